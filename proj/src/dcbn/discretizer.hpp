#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "event_pipeline/events.hpp"

namespace cfrca {

struct Dataset;

// Per-variable thresholds mapping counts to K ordered states. A value
// maps to the number of edges strictly below it, so with K = 3 the
// states are L (<= e1), M (e1 < x <= e2), H (> e2).
struct Discretizer {
    int K = 3;
    std::vector<std::string> variables;
    std::vector<std::vector<double>> edges;  // K - 1 strictly ascending values each
    std::vector<std::string> warnings;

    std::size_t index_of(std::string_view var) const;
    int state(std::size_t var, double value) const;
    int state(std::string_view var, double value) const { return state(index_of(var), value); }
    void validate() const;

    bool operator==(const Discretizer& o) const {
        return K == o.K && variables == o.variables && edges == o.edges;
    }
};

std::string state_label(int state, int K);  // "L", "M", "H" for K = 3

enum class Binning { Quantile, Envelope };

// Edges sit at midpoints between consecutive distinct observed values; edge
// k is the midpoint whose empirical CDF is closest to k / K, subject to
// strict ascent. Variables with fewer than K distinct values get
// epsilon-spaced edges above the data and a warning.
Discretizer fit_discretizer(std::span<const CountPanel> normal_panels, int K);

// Edge k sits at mean + z[k] * sd of the normal data, so upper states mark
// departures from the nominal operating envelope. K = z.size() + 1.
Discretizer fit_envelope_discretizer(std::span<const CountPanel> normal_panels, std::span<const double> z);

// {1.5, 6.5} for K = 3; other K spread the same range evenly.
std::vector<double> default_envelope_z(int K);

// Uses the pre-fault slots [0, true_poif) of every instance.
Discretizer fit_discretizer(const Dataset& dataset, int K, Binning binning = Binning::Envelope);

}  // namespace cfrca

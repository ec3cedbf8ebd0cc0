#include "dcbn/discretizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "common/error.hpp"
#include "common/io_util.hpp"
#include "common/stats.hpp"
#include "simulator/simulator.hpp"

namespace cfrca {

namespace {

constexpr double kEdgeEpsilon = 1e-6;

std::vector<double> fit_edges(std::vector<double> values, int K, const std::string& var,
                              std::vector<std::string>& warnings) {
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());

    // Candidate cut points and the fraction of mass at or below each.
    std::vector<double> cuts, below;
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        if (values[i + 1] != values[i]) {
            cuts.push_back(0.5 * (values[i] + values[i + 1]));
            below.push_back(static_cast<double>(i + 1) / n);
        }
    }
    if (cuts.size() + 1 < static_cast<std::size_t>(K)) {
        warnings.push_back("variable '" + var + "' has " + std::to_string(cuts.size() + 1) +
                           " distinct values, fewer than K = " + std::to_string(K) + "; edges widened by epsilon");
    }

    std::vector<double> edges;
    std::size_t next = 0;  // first cut still available
    for (int k = 1; k < K; ++k) {
        const double target = static_cast<double>(k) / K;
        // Leave enough cuts for the remaining edges when possible.
        const std::size_t remaining = static_cast<std::size_t>(K - 1 - k);
        const std::size_t last = cuts.size() > remaining ? cuts.size() - remaining : 0;
        if (next < last) {
            std::size_t best = next;
            for (std::size_t c = next; c < last; ++c) {
                if (std::fabs(below[c] - target) < std::fabs(below[best] - target)) best = c;
            }
            edges.push_back(cuts[best]);
            next = best + 1;
        } else {
            const double base = edges.empty() ? values.back() : edges.back();
            edges.push_back(base + kEdgeEpsilon);
        }
    }
    return edges;
}

std::vector<double> normal_values(std::span<const CountPanel> panels, const std::string& var) {
    std::vector<double> values;
    for (const auto& p : panels) {
        for (auto c : p.series(var)) values.push_back(static_cast<double>(c));
    }
    if (values.empty()) throw ValidationError("no normal-regime data for '" + var + "'");
    return values;
}

}  // namespace

std::string state_label(int state, int K) {
    if (K == 3) {
        static const char* const names[] = {"L", "M", "H"};
        if (state >= 0 && state < 3) return names[state];
    }
    if (K == 2) return state == 0 ? "L" : "H";
    return "S" + std::to_string(state);
}

std::size_t Discretizer::index_of(std::string_view var) const {
    const auto it = std::find(variables.begin(), variables.end(), var);
    if (it == variables.end()) throw ValidationError("discretizer has no variable '" + std::string(var) + "'");
    return static_cast<std::size_t>(it - variables.begin());
}

int Discretizer::state(std::size_t var, double value) const {
    const auto& e = edges[var];
    return static_cast<int>(std::lower_bound(e.begin(), e.end(), value) - e.begin());
}

void Discretizer::validate() const {
    if (K < 2) throw ValidationError("K must be at least 2");
    if (edges.size() != variables.size()) throw ValidationError("discretizer edge table size mismatch");
    for (std::size_t v = 0; v < edges.size(); ++v) {
        if (edges[v].size() != static_cast<std::size_t>(K - 1)) {
            throw ValidationError("variable '" + variables[v] + "' needs K - 1 edges");
        }
        for (std::size_t i = 0; i < edges[v].size(); ++i) {
            if (!std::isfinite(edges[v][i]) || (i > 0 && !(edges[v][i] > edges[v][i - 1]))) {
                throw ValidationError("edges of '" + variables[v] + "' are not strictly ascending");
            }
        }
    }
}

Discretizer fit_discretizer(std::span<const CountPanel> normal_panels, int K) {
    if (K < 2) throw ValidationError("K must be at least 2");
    if (normal_panels.empty()) throw ValidationError("fit_discretizer needs data");
    Discretizer disc;
    disc.K = K;
    disc.variables = normal_panels.front().variables;
    for (const auto& var : disc.variables) {
        disc.edges.push_back(fit_edges(normal_values(normal_panels, var), K, var, disc.warnings));
    }
    disc.validate();
    return disc;
}

std::vector<double> default_envelope_z(int K) {
    if (K < 2) throw ValidationError("K must be at least 2");
    if (K == 2) return {6.5};
    std::vector<double> z;
    for (int k = 0; k < K - 1; ++k) z.push_back(1.5 + 5.0 * k / (K - 2));
    return z;
}

Discretizer fit_envelope_discretizer(std::span<const CountPanel> normal_panels, std::span<const double> z) {
    if (z.empty()) throw ValidationError("envelope needs at least one z value");
    for (std::size_t i = 1; i < z.size(); ++i) {
        if (!(z[i] > z[i - 1])) throw ValidationError("envelope z values must be strictly ascending");
    }
    if (normal_panels.empty()) throw ValidationError("fit_discretizer needs data");
    Discretizer disc;
    disc.K = static_cast<int>(z.size()) + 1;
    disc.variables = normal_panels.front().variables;
    for (const auto& var : disc.variables) {
        const auto values = normal_values(normal_panels, var);
        const double m = stats::mean(values);
        const double sd = values.size() > 1 ? stats::stddev(values) : 0.0;
        std::vector<double> e;
        for (double zk : z) e.push_back(m + zk * sd);
        bool widened = false;
        for (std::size_t i = 1; i < e.size(); ++i) {
            if (!(e[i] > e[i - 1])) {
                e[i] = e[i - 1] + kEdgeEpsilon;
                widened = true;
            }
        }
        if (widened) disc.warnings.push_back("variable '" + var + "' is constant in normal data; edges widened by epsilon");
        disc.edges.push_back(std::move(e));
    }
    disc.validate();
    return disc;
}

Discretizer fit_discretizer(const Dataset& dataset, int K, Binning binning) {
    std::vector<CountPanel> normal;
    for (const auto& inst : dataset.instances) {
        if (inst.true_poif == 0) continue;
        normal.push_back(window_to_failure(inst.panel, inst.true_poif - 1, inst.true_poif));
    }
    if (binning == Binning::Quantile) return fit_discretizer(normal, K);
    const auto z = default_envelope_z(K);
    return fit_envelope_discretizer(normal, z);
}

}  // namespace cfrca

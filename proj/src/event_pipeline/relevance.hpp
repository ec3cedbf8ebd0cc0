#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "event_pipeline/events.hpp"

namespace cfrca {

struct MiResult {
    double mi = 0.0;  // nats
    double p_value = 1.0;
};

inline constexpr int kMiPermutations = 199;

// floor(sqrt(n / 5)) clamped to [2, 16].
int default_mi_bins(std::size_t n);

// Plug-in mutual information on an equal-frequency 2-D binning. Tied values
// always share a bin (bin chosen from the average rank). The p-value comes
// from kMiPermutations seeded permutations of `b`:
//   p = (1 + #{permuted mi >= observed mi}) / (kMiPermutations + 1).
MiResult mutual_information(std::span<const std::int64_t> a, std::span<const std::int64_t> b, int bins,
                            std::uint64_t seed = 0);

// Largest non-DC periodogram peak over total non-DC power, in [0, 1].
double periodicity_score(std::span<const std::int64_t> series);

struct RelevanceReport {
    struct Scored {
        std::string name;
        double mi = 0.0;
        double p_value = 1.0;
    };
    struct Periodic {
        std::string name;
        double score = 0.0;
    };
    std::vector<Scored> retained;  // descending mi; target included
    std::vector<Scored> dropped_irrelevant;
    std::vector<Periodic> dropped_periodic;
};

// Periodic variables are dropped first, then variables whose MI against
// the target is not significant at `alpha`. The target is always kept.
RelevanceReport relevance_filter(const CountPanel& panel, const std::string& target, double alpha = 0.05,
                                 double periodicity_threshold = 0.5, std::uint64_t seed = 0);

}  // namespace cfrca

#include "event_pipeline/relevance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "common/error.hpp"
#include "common/rng.hpp"

namespace cfrca {

namespace {

std::vector<int> equal_frequency_bins(std::span<const std::int64_t> x, int bins) {
    const std::size_t n = x.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return x[i] < x[j]; });
    std::vector<int> out(n, 0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
        const double avg_rank = 0.5 * static_cast<double>(i + j);
        const int bin = std::min(bins - 1, static_cast<int>(std::floor(bins * avg_rank / static_cast<double>(n))));
        for (std::size_t k = i; k <= j; ++k) out[order[k]] = bin;
        i = j + 1;
    }
    return out;
}

// Terms are summed in sorted order so that transposing the table gives a
// bit-identical result.
double plugin_mi(const std::vector<int>& a, const std::vector<int>& b, int bins) {
    const std::size_t n = a.size();
    const auto nb = static_cast<std::size_t>(bins);
    std::vector<double> joint(nb * nb, 0.0), ra(nb, 0.0), rb(nb, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
        joint[static_cast<std::size_t>(a[t]) * nb + static_cast<std::size_t>(b[t])] += 1.0;
        ra[static_cast<std::size_t>(a[t])] += 1.0;
        rb[static_cast<std::size_t>(b[t])] += 1.0;
    }
    const double dn = static_cast<double>(n);
    std::vector<double> terms;
    terms.reserve(nb * nb);
    for (std::size_t i = 0; i < nb; ++i) {
        for (std::size_t j = 0; j < nb; ++j) {
            const double c = joint[i * nb + j];
            if (c <= 0.0) continue;
            terms.push_back(c / dn * std::log(c * dn / (ra[i] * rb[j])));
        }
    }
    std::sort(terms.begin(), terms.end());
    const double mi = std::accumulate(terms.begin(), terms.end(), 0.0);
    return std::max(0.0, mi);
}

bool is_constant(std::span<const std::int64_t> x) {
    return std::adjacent_find(x.begin(), x.end(), std::not_equal_to<>{}) == x.end();
}

}  // namespace

int default_mi_bins(std::size_t n) {
    const auto b = static_cast<int>(std::floor(std::sqrt(static_cast<double>(n) / 5.0)));
    return std::clamp(b, 2, 16);
}

MiResult mutual_information(std::span<const std::int64_t> a, std::span<const std::int64_t> b, int bins,
                            std::uint64_t seed) {
    if (a.size() != b.size()) {
        throw ValidationError("series length mismatch: " + std::to_string(a.size()) + " vs " +
                              std::to_string(b.size()));
    }
    if (a.size() < 8) throw ValidationError("mutual_information needs at least 8 samples");
    if (bins < 2) throw ValidationError("mutual_information needs at least 2 bins");
    if (is_constant(a) || is_constant(b)) return {0.0, 1.0};

    const auto ba = equal_frequency_bins(a, bins);
    auto bb = equal_frequency_bins(b, bins);
    const double observed = plugin_mi(ba, bb, bins);

    Rng rng(seed);
    int at_least = 0;
    const double tol = 1e-12 * std::max(1.0, observed);
    for (int p = 0; p < kMiPermutations; ++p) {
        rng.shuffle(std::span<int>(bb));
        if (plugin_mi(ba, bb, bins) >= observed - tol) ++at_least;
    }
    return {observed, (1.0 + at_least) / (kMiPermutations + 1.0)};
}

double periodicity_score(std::span<const std::int64_t> series) {
    const std::size_t n = series.size();
    if (n < 16) throw ValidationError("periodicity_score needs at least 16 samples");
    if (is_constant(series)) return 0.0;

    double mean = 0.0;
    for (auto v : series) mean += static_cast<double>(v);
    mean /= static_cast<double>(n);

    // Direct DFT; panels are short enough that O(n^2) is not a concern.
    double total = 0.0, peak = 0.0;
    const double w = 2.0 * std::numbers::pi / static_cast<double>(n);
    for (std::size_t k = 1; k <= n / 2; ++k) {
        double re = 0.0, im = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            const double x = static_cast<double>(series[t]) - mean;
            const double phase = w * static_cast<double>((k * t) % n);
            re += x * std::cos(phase);
            im -= x * std::sin(phase);
        }
        const double power = re * re + im * im;
        total += power;
        peak = std::max(peak, power);
    }
    if (total <= 0.0) return 0.0;
    return std::clamp(peak / total, 0.0, 1.0);
}

RelevanceReport relevance_filter(const CountPanel& panel, const std::string& target, double alpha,
                                 double periodicity_threshold, std::uint64_t seed) {
    const auto target_idx = panel.index_of(target);
    if (!target_idx) throw ValidationError("target '" + target + "' not in panel");
    const auto n = panel.n_slots();
    const int bins = default_mi_bins(n);
    const auto& y = panel.counts[*target_idx];

    RelevanceReport report;
    for (std::size_t v = 0; v < panel.n_vars(); ++v) {
        const auto& name = panel.variables[v];
        const auto& x = panel.counts[v];
        const auto mi = mutual_information(x, y, bins, mix_seed(seed, v));
        if (v == *target_idx) {
            report.retained.push_back({name, mi.mi, mi.p_value});
            continue;
        }
        const double period = n >= 16 ? periodicity_score(x) : 0.0;
        if (period > periodicity_threshold) {
            report.dropped_periodic.push_back({name, period});
        } else if (mi.p_value > alpha) {
            report.dropped_irrelevant.push_back({name, mi.mi, mi.p_value});
        } else {
            report.retained.push_back({name, mi.mi, mi.p_value});
        }
    }
    std::stable_sort(report.retained.begin(), report.retained.end(), [](const auto& a, const auto& b) {
        if (a.mi != b.mi) return a.mi > b.mi;
        return a.name < b.name;
    });
    return report;
}

}  // namespace cfrca

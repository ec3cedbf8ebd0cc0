#include "discovery/ci_tests.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "common/error.hpp"
#include "common/rng.hpp"
#include "common/stats.hpp"

namespace cfrca {

namespace {

constexpr double kClamp = 1.0 - 1e-12;
constexpr std::uint64_t kLillieforsSeed = 0x4c494c4c49454652ULL;

std::string column_list(const std::vector<Node>& columns, std::span<const std::size_t> idx) {
    std::string out;
    for (auto c : idx) {
        if (!out.empty()) out += ", ";
        out += to_string(columns[c]);
    }
    return out;
}

}  // namespace

FisherZ::FisherZ(const LaggedDataMatrix& data) : columns_(data.columns), n_rows_(data.n_rows()) {
    if (n_rows_ < 2) throw ValidationError("Fisher-Z needs at least two rows");
    Eigen::MatrixXd z = data.rows;
    for (Eigen::Index c = 0; c < z.cols(); ++c) {
        const double m = z.col(c).mean();
        z.col(c).array() -= m;
        const double sd = std::sqrt(z.col(c).squaredNorm() / static_cast<double>(n_rows_ - 1));
        if (!(sd > 0.0)) {
            throw NumericError("column " + to_string(columns_[static_cast<std::size_t>(c)]) + " is constant");
        }
        z.col(c) /= sd;
    }
    corr_ = (z.transpose() * z) / static_cast<double>(n_rows_ - 1);
    corr_.diagonal().setOnes();
}

CiTestResult FisherZ::test(std::size_t i, std::size_t j, std::span<const std::size_t> cond) const {
    const auto n_cols = columns_.size();
    if (i >= n_cols || j >= n_cols) throw ValidationError("column index out of range");
    if (i == j) throw ValidationError("fisher_z_test needs two distinct columns");
    for (auto c : cond) {
        if (c >= n_cols) throw ValidationError("conditioning column out of range");
        if (c == i || c == j) throw ValidationError("conditioning set contains a tested column");
    }
    const double n_eff = static_cast<double>(n_rows_) - static_cast<double>(cond.size()) - 3.0;
    if (n_eff < 1.0) throw ValidationError("too few rows for the conditioning set size");

    CiTestResult out;
    out.n_eff = n_eff;
    double r = 0.0;
    if (cond.empty()) {
        r = corr_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    } else {
        const auto k = static_cast<Eigen::Index>(cond.size());
        Eigen::MatrixXd s(k, k);
        for (Eigen::Index a = 0; a < k; ++a) {
            for (Eigen::Index b = 0; b < k; ++b) {
                s(a, b) = corr_(static_cast<Eigen::Index>(cond[static_cast<std::size_t>(a)]),
                                static_cast<Eigen::Index>(cond[static_cast<std::size_t>(b)]));
            }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s, Eigen::EigenvaluesOnly);
        if (eig.eigenvalues().minCoeff() < 1e-10) {
            throw NumericError("singular conditioning set: columns " + column_list(columns_, cond) +
                               " are collinear");
        }
        // Residual covariance of (i, j) given cond via the Schur complement.
        Eigen::MatrixXd cross(2, k);
        for (Eigen::Index b = 0; b < k; ++b) {
            cross(0, b) = corr_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(cond[static_cast<std::size_t>(b)]));
            cross(1, b) = corr_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(cond[static_cast<std::size_t>(b)]));
        }
        Eigen::Matrix2d top;
        top << 1.0, corr_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)),
            corr_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)), 1.0;
        const Eigen::Matrix2d resid = top - cross * s.ldlt().solve(cross.transpose());
        const double denom = std::sqrt(std::max(resid(0, 0), 0.0) * std::max(resid(1, 1), 0.0));
        r = denom > 0.0 ? resid(0, 1) / denom : 1.0;
    }
    if (!std::isfinite(r)) throw NumericError("non-finite partial correlation");
    if (std::fabs(r) >= kClamp) {
        r = std::copysign(kClamp, r);
        out.clamped = true;
    }
    out.partial_correlation = r;
    const double z = std::atanh(r);
    out.statistic = std::sqrt(n_eff) * std::fabs(z);
    out.p_value = std::clamp(stats::normal_two_sided_p(out.statistic), 0.0, 1.0);
    return out;
}

CiTestResult fisher_z_test(const LaggedDataMatrix& data, std::size_t i, std::size_t j,
                           std::span<const std::size_t> cond) {
    return FisherZ(data).test(i, j, cond);
}

double lilliefors_statistic(std::span<const double> series) {
    const double m = stats::mean(series);
    const double sd = stats::stddev(series);
    if (!(sd > 0.0)) return 1.0;
    std::vector<double> x(series.begin(), series.end());
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    // Walk tie groups: the empirical CDF jumps from i/n to (j+1)/n at x[i].
    std::size_t i = 0;
    while (i < x.size()) {
        std::size_t j = i;
        while (j + 1 < x.size() && x[j + 1] == x[i]) ++j;
        const double f = stats::normal_cdf((x[i] - m) / sd);
        d = std::max(d, std::fabs(static_cast<double>(j + 1) / n - f));
        d = std::max(d, std::fabs(f - static_cast<double>(i) / n));
        i = j + 1;
    }
    return d;
}

namespace {

const std::vector<double>& lilliefors_null(std::size_t n) {
    static std::mutex mu;
    static std::map<std::size_t, std::vector<double>> cache;
    std::lock_guard lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    Rng rng(mix_seed(kLillieforsSeed, n));
    std::vector<double> null(kLillieforsNullSamples), sample(n);
    for (auto& d : null) {
        for (auto& v : sample) v = rng.normal();
        d = lilliefors_statistic(sample);
    }
    std::sort(null.begin(), null.end());
    return cache.emplace(n, std::move(null)).first->second;
}

}  // namespace

CiTestResult lilliefors_test(std::span<const double> series) {
    if (series.size() < 20) throw ValidationError("lilliefors_test needs at least 20 samples");
    CiTestResult out;
    out.n_eff = static_cast<double>(series.size());
    if (!(stats::stddev(series) > 0.0)) {
        out.statistic = 1.0;
        out.p_value = 0.0;
        return out;
    }
    out.statistic = lilliefors_statistic(series);
    const auto& null = lilliefors_null(series.size());
    const auto below = std::lower_bound(null.begin(), null.end(), out.statistic);
    const auto at_least = static_cast<double>(null.end() - below);
    out.p_value = (1.0 + at_least) / (kLillieforsNullSamples + 1.0);
    return out;
}

CiTestResult lilliefors_test(std::span<const std::int64_t> series) {
    std::vector<double> x(series.begin(), series.end());
    return lilliefors_test(std::span<const double>(x));
}

}  // namespace cfrca

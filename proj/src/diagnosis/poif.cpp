#include "diagnosis/poif.hpp"

#include <cmath>

#include "common/error.hpp"

namespace cfrca {

PoifResult detect_poif(const ProbSeries& series, double theta) {
    const auto& x = series.values;
    const std::size_t n = x.size();
    if (n < 5) throw ValidationError("detect_poif needs at least 5 points");
    if (!(theta > 0.0) || !std::isfinite(theta)) throw ValidationError("theta must be positive");

    std::vector<double> smooth(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) smooth[i] = (x[i - 1] + x[i] + x[i + 1]) / 3.0;

    PoifResult out;
    out.theta = theta;
    out.start_slot = series.start_slot;
    out.second_derivative.assign(n, 0.0);
    for (std::size_t i = 2; i + 2 < n; ++i) {
        out.second_derivative[i] = smooth[i + 1] - 2.0 * smooth[i] + smooth[i - 1];
    }
    for (std::size_t i = 2; i + 2 < n; ++i) {
        if (out.second_derivative[i] > theta) {
            out.detected = true;
            out.T = series.start_slot + i;
            break;
        }
    }
    return out;
}

}  // namespace cfrca

#pragma once

#include <cstddef>
#include <vector>

#include "dcbn/dcbn.hpp"

namespace cfrca {

struct PoifResult {
    bool detected = false;
    std::size_t T = 0;  // absolute slot, valid when detected
    double theta = 0.0;
    std::size_t start_slot = 0;
    // Aligned with the input series; zero where the 3-point smoothing or
    // the central difference lacks a full neighbourhood.
    std::vector<double> second_derivative;
};

// Smooths with a centered 3-point moving average, takes the central second
// difference (unit slot spacing) and returns the first slot whose
// curvature exceeds theta.
PoifResult detect_poif(const ProbSeries& series, double theta);

}  // namespace cfrca

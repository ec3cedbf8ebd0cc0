#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "discovery/lagged_dag.hpp"
#include "event_pipeline/events.hpp"

namespace cfrca {

// Lag-augmented design matrix. Row r holds the present slot r + max_lag;
// column (v, l) at row r holds counts[v][r + max_lag - l]. Columns are
// variable-major in panel order, lags ascending.
struct LaggedDataMatrix {
    int max_lag = 0;
    std::vector<Node> columns;
    Eigen::MatrixXd rows;

    std::size_t n_rows() const { return static_cast<std::size_t>(rows.rows()); }
    std::size_t n_cols() const { return columns.size(); }
    std::size_t column_of(const Node& node) const;
};

LaggedDataMatrix lag_augment(const CountPanel& panel, int max_lag);

// Lag-augments each panel separately and stacks the rows, so no row mixes
// slots from different panels. All panels must share the variable list.
LaggedDataMatrix lag_augment_pooled(std::span<const CountPanel> panels, int max_lag);

}  // namespace cfrca

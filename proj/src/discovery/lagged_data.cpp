#include "discovery/lagged_data.hpp"

#include "common/error.hpp"

namespace cfrca {

std::size_t LaggedDataMatrix::column_of(const Node& node) const {
    for (std::size_t c = 0; c < columns.size(); ++c) {
        if (columns[c] == node) return c;
    }
    throw ValidationError("column " + to_string(node) + " not in lagged data");
}

LaggedDataMatrix lag_augment(const CountPanel& panel, int max_lag) {
    if (max_lag < 1) throw ValidationError("max_lag must be at least 1");
    const auto n_slots = panel.n_slots();
    const auto lag = static_cast<std::size_t>(max_lag);
    if (n_slots <= lag) {
        throw ValidationError("panel has " + std::to_string(n_slots) + " slots; lag_augment needs more than " +
                              std::to_string(max_lag));
    }
    LaggedDataMatrix out;
    out.max_lag = max_lag;
    for (const auto& v : panel.variables) {
        for (int l = 0; l <= max_lag; ++l) out.columns.push_back({v, l});
    }
    const auto n_rows = static_cast<Eigen::Index>(n_slots - lag);
    out.rows.resize(n_rows, static_cast<Eigen::Index>(out.columns.size()));
    Eigen::Index col = 0;
    for (const auto& series : panel.counts) {
        for (std::size_t l = 0; l <= lag; ++l, ++col) {
            for (Eigen::Index r = 0; r < n_rows; ++r) {
                out.rows(r, col) = static_cast<double>(series[static_cast<std::size_t>(r) + lag - l]);
            }
        }
    }
    return out;
}

LaggedDataMatrix lag_augment_pooled(std::span<const CountPanel> panels, int max_lag) {
    if (panels.empty()) throw ValidationError("lag_augment_pooled needs at least one panel");
    std::vector<LaggedDataMatrix> parts;
    Eigen::Index total = 0;
    for (const auto& p : panels) {
        if (p.variables != panels.front().variables) throw ValidationError("pooled panels differ in variables");
        parts.push_back(lag_augment(p, max_lag));
        total += parts.back().rows.rows();
    }
    LaggedDataMatrix out;
    out.max_lag = max_lag;
    out.columns = parts.front().columns;
    out.rows.resize(total, static_cast<Eigen::Index>(out.columns.size()));
    Eigen::Index at = 0;
    for (const auto& part : parts) {
        out.rows.middleRows(at, part.rows.rows()) = part.rows;
        at += part.rows.rows();
    }
    return out;
}

}  // namespace cfrca

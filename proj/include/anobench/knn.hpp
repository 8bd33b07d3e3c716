#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "anobench/dataset.hpp"
#include "anobench/stats.hpp"

namespace anobench {

// Per-row nearest-neighbour summary: `neighbors[i]` holds the k nearest
// other rows ordered by (distance, case id) and `mean_dist[i]` the mean
// Euclidean distance to them — the joint-density deviation score.
struct NeighborInfo {
    std::vector<double> mean_dist;
    std::vector<std::vector<std::uint32_t>> neighbors;
};

// The continuous attributes of a dataset as a column-major point set,
// optionally standardized ((x - center) / scale, zero-scale columns to 0).
// Distance accumulation runs through the runtime-selected kernels.
class ContinuousSpace {
public:
    ContinuousSpace(const Dataset& dataset, bool standardize,
                    ScaleMethod method = ScaleMethod::Mad);

    std::size_t n_rows() const { return n_rows_; }
    std::size_t n_dims() const { return columns_.size(); }

    // Squared distances from an already-standardized query point to every
    // row.
    std::vector<double> sqdist_to_all(std::span<const double> point) const;

    std::vector<double> sqdist_from_row(std::size_t row) const;

    // Applies the stored centers/scales to a raw point.
    std::vector<double> standardize_point(std::span<const double> raw) const;

    std::vector<double> row_point(std::size_t row) const;

    // k nearest other rows for every row; ties broken by ascending case id.
    NeighborInfo all_neighbors(int k) const;

    // k nearest rows to an external (standardized) point.
    std::pair<double, std::vector<std::uint32_t>> query(
        std::span<const double> point, int k) const;

    // Distance from row `row` to its k-th nearest other row.
    double kth_neighbor_distance(std::size_t row, int k) const;

private:
    std::vector<std::uint32_t> select_nearest(std::vector<double>& sqdist,
                                              int k,
                                              std::size_t exclude_row) const;

    std::vector<std::vector<double>> columns_;
    std::vector<double> centers_;
    std::vector<double> scales_;  // reciprocal applied; 0 for zero-scale
    std::span<const CaseId> ids_;
    std::size_t n_rows_ = 0;
};

}  // namespace anobench

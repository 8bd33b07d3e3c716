#include "anobench/knn.hpp"

#include <algorithm>
#include <cmath>

#include "anobench/kernels.hpp"

namespace anobench {

ContinuousSpace::ContinuousSpace(const Dataset& dataset, bool standardize,
                                 ScaleMethod method)
    : ids_(dataset.case_ids()), n_rows_(dataset.n_cases()) {
    const auto cont = dataset.schema().indices_of(AttributeKind::Continuous);
    if (cont.empty()) {
        throw ValidationError("no continuous attributes available");
    }
    const auto& ops = kernels::active();
    columns_.reserve(cont.size());
    centers_.reserve(cont.size());
    scales_.reserve(cont.size());
    for (std::size_t a : cont) {
        const auto values = dataset.continuous(a);
        double center = 0.0;
        double inv_scale = 1.0;
        if (standardize) {
            const ContinuousStats st = continuous_stats(values);
            center = st.center(method);
            const double scale = st.scale(method);
            inv_scale = scale > 0.0 ? 1.0 / scale : 0.0;
        }
        std::vector<double> col(values.size());
        ops.scale_shift(col.data(), values.data(), center, inv_scale,
                        values.size());
        columns_.push_back(std::move(col));
        centers_.push_back(center);
        scales_.push_back(inv_scale);
    }
}

std::vector<double> ContinuousSpace::sqdist_to_all(
    std::span<const double> point) const {
    if (point.size() != columns_.size()) {
        throw ParamError("query dimensionality mismatch");
    }
    std::vector<double> acc(n_rows_, 0.0);
    const auto& ops = kernels::active();
    for (std::size_t d = 0; d < columns_.size(); ++d) {
        ops.sqdiff_acc(acc.data(), columns_[d].data(), point[d], n_rows_);
    }
    return acc;
}

std::vector<double> ContinuousSpace::sqdist_from_row(std::size_t row) const {
    std::vector<double> point(columns_.size());
    for (std::size_t d = 0; d < columns_.size(); ++d) point[d] = columns_[d][row];
    return sqdist_to_all(point);
}

std::vector<double> ContinuousSpace::standardize_point(
    std::span<const double> raw) const {
    if (raw.size() != columns_.size()) {
        throw ParamError("point dimensionality mismatch");
    }
    std::vector<double> out(raw.size());
    for (std::size_t d = 0; d < raw.size(); ++d) {
        out[d] = (raw[d] - centers_[d]) * scales_[d];
    }
    return out;
}

std::vector<double> ContinuousSpace::row_point(std::size_t row) const {
    std::vector<double> point(columns_.size());
    for (std::size_t d = 0; d < columns_.size(); ++d) point[d] = columns_[d][row];
    return point;
}

std::vector<std::uint32_t> ContinuousSpace::select_nearest(
    std::vector<double>& sqdist, int k, std::size_t exclude_row) const {
    std::vector<std::uint32_t> order;
    order.reserve(n_rows_);
    for (std::uint32_t j = 0; j < n_rows_; ++j) {
        if (j != exclude_row) order.push_back(j);
    }
    const auto closer = [&](std::uint32_t a, std::uint32_t b) {
        if (sqdist[a] != sqdist[b]) return sqdist[a] < sqdist[b];
        return ids_[a] < ids_[b];
    };
    const auto kk = static_cast<std::size_t>(k);
    if (kk < order.size()) {
        std::nth_element(order.begin(), order.begin() + kk, order.end(), closer);
        order.resize(kk);
    }
    std::sort(order.begin(), order.end(), closer);
    return order;
}

NeighborInfo ContinuousSpace::all_neighbors(int k) const {
    if (k < 1) throw ParamError("neighbor count must be >= 1");
    if (static_cast<std::size_t>(k) >= n_rows_) {
        throw ParamError("neighbor count " + std::to_string(k) +
                         " requires more than " + std::to_string(n_rows_) +
                         " cases");
    }
    NeighborInfo info;
    info.mean_dist.resize(n_rows_);
    info.neighbors.resize(n_rows_);
    for (std::size_t i = 0; i < n_rows_; ++i) {
        auto sqdist = sqdist_from_row(i);
        auto nearest = select_nearest(sqdist, k, i);
        double sum = 0.0;
        for (std::uint32_t j : nearest) sum += std::sqrt(sqdist[j]);
        info.mean_dist[i] = sum / static_cast<double>(k);
        info.neighbors[i] = std::move(nearest);
    }
    return info;
}

std::pair<double, std::vector<std::uint32_t>> ContinuousSpace::query(
    std::span<const double> point, int k) const {
    if (k < 1) throw ParamError("neighbor count must be >= 1");
    if (static_cast<std::size_t>(k) > n_rows_) {
        throw ParamError("neighbor count exceeds row count");
    }
    auto sqdist = sqdist_to_all(point);
    auto nearest = select_nearest(sqdist, k, n_rows_);  // exclude nothing
    double sum = 0.0;
    for (std::uint32_t j : nearest) sum += std::sqrt(sqdist[j]);
    return {sum / static_cast<double>(k), std::move(nearest)};
}

double ContinuousSpace::kth_neighbor_distance(std::size_t row, int k) const {
    auto sqdist = sqdist_from_row(row);
    auto nearest = select_nearest(sqdist, k, row);
    return std::sqrt(sqdist[nearest.back()]);
}

}  // namespace anobench

#include "anobench/stats.hpp"

#include <algorithm>
#include <cmath>

#include "anobench/kernels.hpp"

namespace anobench {

std::string_view to_string(ScaleMethod m) {
    return m == ScaleMethod::Sd ? "sd" : "mad";
}

ScaleMethod scale_method_from_string(std::string_view s) {
    if (s == "sd" || s == "zscore") return ScaleMethod::Sd;
    if (s == "mad" || s == "robust") return ScaleMethod::Mad;
    throw ParamError("unknown scale method: '" + std::string(s) + "'");
}

double robust_deviation(double value, double center, double scale) {
    if (scale > 0.0) return std::abs(value - center) / scale;
    return value == center ? 0.0 : kZeroScaleDeviance;
}

double median_of(std::vector<double> values) {
    if (values.empty()) return 0.0;
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + mid, values.end());
    double hi = values[mid];
    if (values.size() % 2 == 1) return hi;
    const double lo = *std::max_element(values.begin(), values.begin() + mid);
    return lo + (hi - lo) / 2.0;
}

ContinuousStats continuous_stats(std::span<const double> values) {
    ContinuousStats out;
    const std::size_t n = values.size();
    if (n == 0) return out;

    const auto& ops = kernels::active();
    out.mean = ops.sum(values.data(), n) / static_cast<double>(n);
    out.sd = std::sqrt(ops.sumsqdiff(values.data(), out.mean, n) /
                       static_cast<double>(n));
    out.min = *std::min_element(values.begin(), values.end());
    out.max = *std::max_element(values.begin(), values.end());

    std::vector<double> work(values.begin(), values.end());
    out.median = median_of(work);
    for (double& v : work) v = std::abs(v - out.median);
    out.mad = kMadScale * median_of(std::move(work));
    return out;
}

ContinuousStats continuous_stats_excluding(std::span<const double> values,
                                           std::size_t skip) {
    std::vector<double> rest;
    rest.reserve(values.size() - 1);
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i != skip) rest.push_back(values[i]);
    }
    return continuous_stats(rest);
}

double empirical_quantile(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw ParamError("quantile of an empty sample");
    if (q < 0.0 || q > 1.0) throw ParamError("quantile level out of [0,1]");
    const double n = static_cast<double>(sorted.size());
    auto rank = static_cast<std::size_t>(std::ceil(q * n));
    if (rank > 0) --rank;
    if (rank >= sorted.size()) rank = sorted.size() - 1;
    return sorted[rank];
}

MarginalStats MarginalStats::compute(const Dataset& dataset) {
    MarginalStats stats;
    const auto& schema = dataset.schema();
    stats.continuous.resize(schema.attributes.size());
    stats.categorical.resize(schema.attributes.size());
    const double n = static_cast<double>(dataset.n_cases());
    for (std::size_t a = 0; a < schema.attributes.size(); ++a) {
        if (schema.attributes[a].kind == AttributeKind::Continuous) {
            stats.continuous[a] = continuous_stats(dataset.continuous(a));
        } else {
            const auto& col = dataset.categorical(a);
            auto& cat = stats.categorical[a];
            cat.by_code.resize(col.label_count());
            for (std::uint32_t code : col.codes()) ++cat.by_code[code].count;
            for (auto& ls : cat.by_code) {
                ls.freq = n > 0 ? static_cast<double>(ls.count) / n : 0.0;
            }
        }
    }
    return stats;
}

Dataset standardize(const Dataset& dataset, ScaleMethod method) {
    const auto cont = dataset.schema().indices_of(AttributeKind::Continuous);
    if (cont.empty()) {
        throw ValidationError("standardize: dataset has no continuous attributes");
    }
    Dataset out = dataset;
    const auto& ops = kernels::active();
    std::vector<double> scaled(dataset.n_cases());
    for (std::size_t a : cont) {
        const auto values = dataset.continuous(a);
        const ContinuousStats st = continuous_stats(values);
        const double center = st.center(method);
        const double scale = st.scale(method);
        const double inv = scale > 0.0 ? 1.0 / scale : 0.0;
        ops.scale_shift(scaled.data(), values.data(), center, inv, values.size());
        for (std::size_t row = 0; row < values.size(); ++row) {
            out.set_continuous(row, a, scaled[row]);
        }
    }
    return out;
}

}  // namespace anobench

#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "anobench/dataset.hpp"

namespace anobench {

// Scale conventions shared across the toolkit:
//  * standard deviation uses the population divisor n — scores here are
//    descriptive over the given set, not inferential;
//  * the median absolute deviation is scaled by 1.4826 so MAD-based
//    thresholds share the k=3 convention of SD-based ones;
//  * a zero-scale (constant) column standardizes to 0, and any value that
//    differs from the center of such a column is maximally deviant.
inline constexpr double kMadScale = 1.4826;

// Finite stand-in for "maximally deviant" on zero-scale columns; large
// enough to dominate every threshold, small enough to survive sums.
inline constexpr double kZeroScaleDeviance = 1e100;

enum class ScaleMethod { Sd, Mad };

std::string_view to_string(ScaleMethod m);
ScaleMethod scale_method_from_string(std::string_view s);

struct ContinuousStats {
    double mean = 0.0;
    double median = 0.0;
    double sd = 0.0;       // population divisor
    double mad = 0.0;      // scaled by kMadScale
    double min = 0.0;
    double max = 0.0;

    double center(ScaleMethod m) const { return m == ScaleMethod::Sd ? mean : median; }
    double scale(ScaleMethod m) const { return m == ScaleMethod::Sd ? sd : mad; }
};

struct LabelStats {
    std::int64_t count = 0;
    double freq = 0.0;
};

struct CategoricalStats {
    // Indexed by the column's label codes.
    std::vector<LabelStats> by_code;

    const LabelStats& of(std::uint32_t code) const { return by_code[code]; }
};

// Per-attribute marginal statistics; entries align with schema order and
// only the matching kind is populated.
struct MarginalStats {
    std::vector<ContinuousStats> continuous;   // indexed by attribute
    std::vector<CategoricalStats> categorical; // indexed by attribute

    static MarginalStats compute(const Dataset& dataset);
};

// Deviation of a value from center in scale units; applies the zero-scale
// rule above.
double robust_deviation(double value, double center, double scale);

// Statistics over a raw column.
double median_of(std::vector<double> values);
ContinuousStats continuous_stats(std::span<const double> values);

// Same numbers with row `skip` removed; used by leave-one-out scoring.
ContinuousStats continuous_stats_excluding(std::span<const double> values,
                                           std::size_t skip);

// Order-statistic empirical quantile: the smallest element such that at
// least ceil(q * n) of the sample is <= it. `sorted` must be ascending.
double empirical_quantile(std::span<const double> sorted, double q);

// Replaces each continuous value by (value - center) / scale; categorical
// attributes are untouched; zero-scale columns map to 0.
// method: Sd = z-score, Mad = robust.
Dataset standardize(const Dataset& dataset, ScaleMethod method);

}  // namespace anobench

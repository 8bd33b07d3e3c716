#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "anobench/dataset.hpp"
#include "anobench/injector.hpp"
#include "anobench/taxonomy.hpp"

namespace anobench {

// A Series is a Dataset whose dependency attribute is an integer time index
// (strictly increasing, gap-free) alongside one continuous value attribute.
inline constexpr const char* kTimeAttr = "time";
inline constexpr const char* kValueAttr = "value";

Dataset make_series(std::int64_t t0, std::span<const double> values);
void require_series(const Dataset& dataset);
std::vector<double> series_values(const Dataset& series);

// value(t) = slope*t + amplitude*sin(2*pi*t/period) + noise*N(0,1);
// deterministic for a fixed seed. Preconditions: period >= 2, n >= 2*period.
Dataset generate_series(std::size_t n, double slope, double amplitude,
                        std::size_t period, double noise, std::uint64_t seed);

// --------------------------------------------------------------------------
// Within-series anomaly kinds
// --------------------------------------------------------------------------

enum class SeriesAnomalyKind {
    Additive,         // single-point offset at t0
    TransitoryChange, // offset decaying geometrically from t0
    LevelShift,       // constant offset for all t >= t0
    Innovational,     // trend and seasonal change from t0 on
    DeviantCycle,     // one cycle's values re-ordered within the cycle
};

std::string_view to_string(SeriesAnomalyKind kind);
SeriesAnomalyKind series_anomaly_kind_from_string(std::string_view s);

struct SeriesAnomalySpec {
    SeriesAnomalyKind kind = SeriesAnomalyKind::Additive;
    std::int64_t t0 = 0;          // location (additive/transitory/shift/innovational)
    double magnitude = 0.0;       // offset size
    double decay = 0.7;           // transitory: in (0,1)
    double amplitude_delta = 0.0; // innovational
    double slope_delta = 0.0;     // innovational
    std::size_t period = 0;       // innovational / deviant_cycle
    std::size_t cycle_index = 0;  // deviant_cycle

    void validate(std::size_t series_length) const;
};

struct SeriesInjection {
    Dataset series;
    GroundTruth truth;                // affected time points
    std::set<AnomalyType> mapped;     // via the external-typology mapping
};

// The ground truth marks affected time points: the single point for
// additive, the decay window for transitory (offsets >= 5% of magnitude),
// the transition point for level shifts and innovational changes, the full
// replaced cycle for deviant cycles. The mapped set evaluates
// globally_extreme against the modified series (MAD method, k = 3).
SeriesInjection inject_series_anomaly(const Dataset& series,
                                      const SeriesAnomalySpec& spec,
                                      std::uint64_t seed);

// --------------------------------------------------------------------------
// Conceptual-level transforms
// --------------------------------------------------------------------------

// Differencing: output length n-1, value'(t) = value(t+1) - value(t). Turns
// a level shift into a single extreme transition.
Dataset difference(const Dataset& series);

// Inverse of difference given the stored initial value.
Dataset undifference(const Dataset& diff, double initial);

// One case per complete cycle (floor(n/period)) with per-cycle features
// (mean, min, max, amplitude) and a shape class assigned by nearest
// centroid over raw cycle vectors; cycles farther than `cutoff` from every
// existing centroid start a new class. cutoff <= 0 picks the default
// 0.25 * value range * sqrt(period).
Dataset segment_cycles(const Dataset& series, std::size_t period,
                       double cutoff = 0.0);

// --------------------------------------------------------------------------
// Symbolic sequences
// --------------------------------------------------------------------------

struct SymbolSequence {
    std::vector<std::string> tokens;
    std::set<std::string> alphabet;

    static SymbolSequence from_tokens(std::vector<std::string> tokens);
    // One token per line; blank lines ignored.
    static SymbolSequence load(const std::string& path);
};

// One case per sliding window; the window tokens become `width` categorical
// attributes pos_0..pos_{width-1}. Output row count = length - width + 1.
// Rare windows are then findable with the multidimensional rare-class
// detector.
Dataset windowize(const SymbolSequence& sequence, std::size_t width);

// --------------------------------------------------------------------------
// Aggregation
// --------------------------------------------------------------------------

enum class AggregateFn { Mean, Min, Max, Count, Mode };

std::string_view to_string(AggregateFn fn);
AggregateFn aggregate_fn_from_string(std::string_view s);

struct Aggregation {
    std::string attribute;
    AggregateFn fn = AggregateFn::Mean;
};

// One case per group value, groups ordered by first appearance. Mean/min/
// max require a continuous attribute; mode works on either kind (ties break
// to the smaller value / lexicographically smaller label); count ignores
// the attribute's values and reports the group size.
Dataset aggregate_by(const Dataset& dataset, const std::string& group_key,
                     const std::vector<Aggregation>& aggregations);

}  // namespace anobench

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "anobench/dataset.hpp"
#include "anobench/knn.hpp"
#include "anobench/stats.hpp"

namespace anobench {

// Analysis thresholds shared by the reference detectors and the case
// classifier. Defaults are documented conventions of this toolkit, not
// claims: k_extreme = 3 is the usual sigma/MAD convention, the rest were
// chosen to behave sensibly at desk scale and are all overridable.
struct DetectorParams {
    double k_extreme = 3.0;          // extreme-value threshold in scale units
    ScaleMethod method = ScaleMethod::Mad;
    bool leave_one_out = false;      // recompute center/scale without the case
    bool bin_rarity = false;         // 1-D density check for rare mid-range values
    int bins = 20;                   // equal-width bins for the density check
    double tau_rare = 0.01;          // class rarity: relative frequency bound
    std::int64_t c_rare = 1;         // class rarity: absolute count bound
    int k_nn = 10;                   // neighbourhood size (Euclidean)
    int combo_order = 2;             // largest categorical tuple examined
    double min_global_freq = 0.05;   // Type VI gate: class common in the set
    double max_local_freq = 0.10;    // Type VI gate: class rare among neighbours
    double density_quantile = 0.02;  // Type IV flag quantile (epsilon)
    bool standardize = true;         // robust-standardize before distances

    void validate() const;           // range checks; throws ParamError
    std::string to_json() const;
    static DetectorParams from_json(const std::string& text);
};

// Per-case scores of one detector over one dataset, aligned with dataset
// row order. Higher score = more anomalous. `flags` applies the detector's
// stated threshold rule; `detail` is auxiliary per-detector information
// (number of deviant attributes for the univariate detectors, firing order
// for Type VI), zero elsewhere.
struct ScoreVector {
    std::string detector_id;
    std::vector<CaseId> ids;
    std::vector<double> scores;
    std::vector<bool> flags;   // empty for externally loaded scores
    std::vector<int> detail;
    std::string params_json;

    std::size_t size() const { return ids.size(); }
};

// CSV form: header "case_id,score,flag"; flag written as 0/1.
void write_scores(std::ostream& out, const ScoreVector& scores);
void write_scores_file(const std::string& path, const ScoreVector& scores);

// --------------------------------------------------------------------------
// Shared check primitives (also used by the classifier, so that detector
// flags and classification decisions provably agree).
// --------------------------------------------------------------------------

// Deviation of every case on every continuous attribute, in scale units of
// the chosen method; honours leave_one_out and the zero-scale rule.
// Result: [position in cont-attr list][row].
std::vector<std::vector<double>> extreme_deviations(const Dataset& dataset,
                                                    const DetectorParams& params);

// Leave-one-out empty-bin rarity per continuous attribute (equal-width
// binning over [min,max]); the rare-mid-range signal. Result aligned like
// extreme_deviations.
std::vector<std::vector<char>> empty_bin_flags(const Dataset& dataset,
                                               const DetectorParams& params);

// All subsets of `attrs` with sizes in [lo, hi], in deterministic
// lexicographic order.
std::vector<std::vector<std::size_t>> attr_subsets(
    const std::vector<std::size_t>& attrs, int lo, int hi);

// Joint value-tuple occurrence counts over a categorical attribute subset.
class TupleCounts {
public:
    TupleCounts(const Dataset& dataset, std::span<const std::size_t> attrs);
    std::int64_t count_of_row(std::size_t row) const;
    std::int64_t count_of_codes(std::span<const std::uint32_t> codes) const;
    std::size_t distinct() const { return counts_.size(); }

    // Observed tuples with their counts, sorted by code vector.
    std::vector<std::pair<std::vector<std::uint32_t>, std::int64_t>> entries() const;

private:
    std::string key_of_row(std::size_t row) const;
    const Dataset* dataset_;
    std::vector<std::size_t> attrs_;
    std::unordered_map<std::string, std::int64_t> counts_;
};

// --------------------------------------------------------------------------
// The six reference detectors, one per anomaly type.
// --------------------------------------------------------------------------

// Type I. Per-attribute deviation from center in scale units, case score =
// max over continuous attributes, flagged iff score > k_extreme. With
// bin_rarity enabled, a value alone in its bin scores at least
// k_extreme + 1 (rare mid-range values are deviant without being extreme).
ScoreVector detect_extreme_value(const Dataset& dataset,
                                 const DetectorParams& params);

// Type II. Score = sum over categorical attributes of -log(freq(value));
// flagged iff any attribute value has freq <= tau_rare or count <= c_rare.
ScoreVector detect_rare_class(const Dataset& dataset,
                              const DetectorParams& params);

// Type III. Conjunction of I and II: flagged iff flagged by both; score =
// the sum of both scores, each normalized by its maximum over the dataset.
ScoreVector detect_simple_mixed(const Dataset& dataset,
                                const DetectorParams& params);

// Type IV. Mean Euclidean distance to the k_nn nearest other cases in
// (robust-)standardized continuous space; flagged iff the score exceeds the
// (1 - density_quantile) empirical quantile of all scores.
ScoreVector detect_multidim_numerical(const Dataset& dataset,
                                      const DetectorParams& params);

// Type V. Score = max over categorical subsets (sizes 2..combo_order) of
// -log(joint freq of the case's value tuple); flagged iff some subset has
// joint count <= c_rare while every participating marginal frequency is
// > tau_rare (which separates rare combinations from rare classes).
ScoreVector detect_multidim_rare_class(const Dataset& dataset,
                                       const DetectorParams& params);

// Type VI. For each case, classes and class tuples (up to combo_order) that
// are globally common (freq >= min_global_freq) score by how much their
// local frequency among the k_nn nearest neighbours falls below the global
// one; flagged iff some such candidate has local freq <= max_local_freq.
// `detail` reports the smallest firing order.
ScoreVector detect_multidim_mixed(const Dataset& dataset,
                                  const DetectorParams& params);

// --------------------------------------------------------------------------
// Registry
// --------------------------------------------------------------------------

using DetectorFn = std::function<ScoreVector(const Dataset&, const DetectorParams&)>;

const std::vector<std::string>& registered_detectors();  // "type1".."type6"

// Dispatches by id; unknown ids raise ParamError listing the registry.
ScoreVector run_detector(const std::string& detector_id, const Dataset& dataset,
                         const DetectorParams& params);

}  // namespace anobench

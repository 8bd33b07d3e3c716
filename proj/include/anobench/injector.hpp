#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "anobench/dataset.hpp"
#include "anobench/detectors.hpp"
#include "anobench/taxonomy.hpp"

namespace anobench {

// --------------------------------------------------------------------------
// Simulated base datasets: a Gaussian-mixture cluster structure shared by
// all continuous attributes, with categorical attributes drawn globally,
// per cluster, or derived deterministically from another attribute (which
// is how class/region association and coupled label pairs are expressed).
// --------------------------------------------------------------------------

struct ClusterSpec {
    double weight = 1.0;
};

struct ContinuousAttrSpec {
    std::string name;
    std::vector<double> means;   // one per cluster
    std::vector<double> scales;  // one per cluster, > 0
};

struct CategoricalAttrSpec {
    std::string name;
    std::vector<std::string> labels;

    // Sampled attribute: one probability row (global) or one per cluster.
    std::vector<std::vector<double>> probs;

    // Derived attribute: value = map[cluster or 0][code of source attr].
    // `derive_from` must name an earlier categorical attribute.
    std::string derive_from;
    std::vector<std::vector<std::string>> map;

    bool derived() const { return !derive_from.empty(); }
};

struct BaseSpec {
    std::size_t n_cases = 0;
    std::uint64_t seed = 0;
    std::vector<ClusterSpec> clusters;
    std::vector<ContinuousAttrSpec> continuous;
    std::vector<CategoricalAttrSpec> categorical;

    void validate() const;
    Schema schema() const;  // continuous attributes first, then categorical
    std::string to_json() const;
    static BaseSpec from_json(const std::string& text);
};

// Fully determined by the spec (including seed). Sampling order per case:
// cluster, continuous attributes in spec order, categorical in spec order.
Dataset generate_base(const BaseSpec& spec);

// --------------------------------------------------------------------------
// Anomaly injection
// --------------------------------------------------------------------------

enum class RarityMode { NewLabel, Reuse };

struct InjectionSpec {
    std::uint64_t seed = 0;
    std::map<AnomalyType, int> counts;

    double extremity = 6.0;          // Type I/III: offset in scale units
    RarityMode rarity_mode = RarityMode::NewLabel;  // Type II/III
    bool midrange = false;           // Type I: place in an empty mid-range bin
    double band_lo = 0.05;           // Type IV: marginal quantile band
    double band_hi = 0.95;
    int tuple_order = 2;             // Type V: tuple size
    int vi_order = 1;                // Type VI: anomaly order
    int retry_budget = 10000;

    // Thresholds the constructions are checked against; stored in the
    // ground truth so that later classification uses matched parameters.
    DetectorParams thresholds;

    void validate() const;
    std::string to_json() const;
    static InjectionSpec from_json(const std::string& text);
};

struct TruthEntry {
    CaseId case_id = 0;
    AnomalyType type = AnomalyType::ExtremeValue;
    std::vector<std::string> attributes;  // contributing attributes
    int order = 0;                        // Type VI only (>= 1)
    std::string params_json;              // injection parameters for this case
};

struct GroundTruth {
    std::vector<TruthEntry> entries;

    std::string to_json() const;
    static GroundTruth from_json(const std::string& text);
};

void write_truth_file(const std::string& path, const GroundTruth& truth);
GroundTruth load_truth_file(const std::string& path);

// Appends `spec.counts[type]` cases of the given type. Rarity, density and
// distance statistics are computed over rows [0, reference_rows) only, so
// injected cases never shift the frame of reference used for placing later
// ones. Base cases are never mutated.
std::pair<Dataset, GroundTruth> inject(const Dataset& dataset, AnomalyType type,
                                       const InjectionSpec& spec,
                                       std::uint64_t seed,
                                       std::size_t reference_rows);

// generate_base + inject in fixed order I..VI (per-type streams derived from
// spec.seed), then verifies every construction post-condition against the
// finished dataset; throws InfeasibleError if any is violated.
std::pair<Dataset, GroundTruth> build_benchmark(const BaseSpec& base,
                                                const InjectionSpec& inj);

// Construction soundness, checkable at any time: Type I cases exceed the
// univariate threshold, Type IV cases stay inside every marginal range yet
// exceed the joint-density threshold while no univariate check fires, Type V
// tuples have zero reference joint count with common marginals, Type VI
// classes are globally common and absent among the k nearest reference
// neighbours. Returns human-readable violations (empty = all sound).
std::vector<std::string> construction_violations(const Dataset& dataset,
                                                 const GroundTruth& truth,
                                                 std::size_t reference_rows,
                                                 const InjectionSpec& spec);

}  // namespace anobench

#pragma once

#include <memory>

#include "anobench/detectors.hpp"
#include "anobench/taxonomy.hpp"

namespace anobench {

struct ClassificationParams {
    DetectorParams thresholds;
    bool multi_label = false;  // also report every type whose check fires
};

// Deterministic decision procedure for one case:
//   1. univariate checks per attribute — continuous deviation (> k_extreme,
//      or empty-bin rarity when enabled) and categorical rarity
//      (freq <= tau_rare or count <= c_rare);
//   2. both kinds fired -> III, continuous only -> I, categorical only -> II
//      (a univariately deviant case is never classified multivariate);
//   3. otherwise multivariate checks — local class rarity across kinds
//      -> VI; else joint density deviation only -> IV; else joint class
//      rarity only -> V; both IV and V evidence -> VI;
//   4. nothing fired -> not anomalous (empty evidence).
// Checks whose data preconditions are unmet (missing attribute kind, too
// few cases for the neighbourhood) are skipped.
TypeAttribution classify_case(const Dataset& dataset, CaseId case_id,
                              const ClassificationParams& params);

// Same procedure for every case with the dataset-level work (stats,
// neighbourhoods, tuple counts) shared across cases.
std::vector<TypeAttribution> classify_all(const Dataset& dataset,
                                          const ClassificationParams& params);

// Reusable dataset-level state for repeated classify calls.
class ClassifyContext {
public:
    ClassifyContext(const Dataset& dataset, const ClassificationParams& params);
    ~ClassifyContext();
    ClassifyContext(const ClassifyContext&) = delete;
    ClassifyContext& operator=(const ClassifyContext&) = delete;

    TypeAttribution classify(CaseId case_id) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace anobench

#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "anobench/dataset.hpp"
#include "anobench/detectors.hpp"
#include "anobench/injector.hpp"
#include "anobench/taxonomy.hpp"

namespace anobench {

// Rank-based metrics of one detector against one anomaly type. The
// comparison population is that type's ground-truth cases versus the cases
// carrying no ground-truth label at all: anomalies of other types neither
// reward nor penalize a detector here. Ties contribute 0.5 to the rank-AUC;
// rankings break ties by ascending case id. K defaults to the number of
// injected cases of the type. Flag-threshold metrics are absent when the
// score source carries no flags (externally loaded scores).
struct TypeMetrics {
    double rank_auc = 0.0;
    double recall_at_k = 0.0;
    int k = 0;
    int n_anomalies = 0;
    std::optional<double> recall_at_flags;
    std::optional<double> precision_at_flags;
};

struct ReportRow {
    std::string detector_id;
    AnomalyType type = AnomalyType::ExtremeValue;
    TypeMetrics metrics;
};

struct EvaluationReport {
    std::string benchmark_id;
    std::vector<ReportRow> rows;  // one per (detector, type with instances)
    std::vector<std::pair<std::string, TypeMetrics>> overall;  // per detector
    std::string params_json;

    std::string to_json() const;
    static EvaluationReport from_json(const std::string& text);
    // Flat CSV: detector,type,metric,value
    void write_csv(std::ostream& out) const;
    // Fixed-width detector x type table of rank-AUC values.
    void write_table(std::ostream& out) const;
};

// Per-type metrics of one score vector; requires a score for every case of
// the dataset and ground-truth ids that exist.
std::map<AnomalyType, TypeMetrics> evaluate_scores(const ScoreVector& scores,
                                                   const GroundTruth& truth,
                                                   const Dataset& dataset);

// All anomalies of any type against unlabeled cases.
TypeMetrics evaluate_overall(const ScoreVector& scores, const GroundTruth& truth,
                             const Dataset& dataset);

// Runs each registered detector id and assembles the detector x type
// matrix.
EvaluationReport cross_matrix(const std::vector<std::string>& detector_ids,
                              const Dataset& dataset, const GroundTruth& truth,
                              const DetectorParams& params,
                              const std::string& benchmark_id = "");

// CSV with header "case_id,score": every dataset case id exactly once, no
// extras; flags are absent so threshold metrics will be skipped.
ScoreVector load_external_scores(std::istream& in, const Dataset& dataset,
                                 const std::string& detector_id);
ScoreVector load_external_scores_file(const std::string& path,
                                      const Dataset& dataset);

// Probability that a random member of `positives` outscores a random member
// of `negatives`, ties counted as half.
double rank_auc(std::span<const double> positives,
                std::span<const double> negatives);

}  // namespace anobench

#include "anobench/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "anobench/csv.hpp"

namespace anobench {

using nlohmann::json;

double rank_auc(std::span<const double> positives,
                std::span<const double> negatives) {
    if (positives.empty() || negatives.empty()) return 0.5;
    // Midrank formulation: AUC = (R_pos - n_pos(n_pos+1)/2) / (n_pos * n_neg).
    struct Item {
        double score;
        bool positive;
    };
    std::vector<Item> items;
    items.reserve(positives.size() + negatives.size());
    for (double s : positives) items.push_back({s, true});
    for (double s : negatives) items.push_back({s, false});
    std::sort(items.begin(), items.end(),
              [](const Item& a, const Item& b) { return a.score < b.score; });
    double rank_sum = 0.0;
    std::size_t i = 0;
    while (i < items.size()) {
        std::size_t j = i;
        while (j < items.size() && items[j].score == items[i].score) ++j;
        const double midrank =
            (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t t = i; t < j; ++t) {
            if (items[t].positive) rank_sum += midrank;
        }
        i = j;
    }
    const double np = static_cast<double>(positives.size());
    const double nn = static_cast<double>(negatives.size());
    return (rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

namespace {

struct ScoreLookup {
    std::unordered_map<CaseId, std::size_t> index;

    ScoreLookup(const ScoreVector& scores, const Dataset& dataset) {
        index.reserve(scores.ids.size());
        for (std::size_t i = 0; i < scores.ids.size(); ++i) {
            index.emplace(scores.ids[i], i);
        }
        for (CaseId id : dataset.case_ids()) {
            if (!index.count(id)) {
                throw ValidationError("scores missing for case id " +
                                      std::to_string(id));
            }
        }
    }

    std::size_t at(CaseId id) const { return index.find(id)->second; }
};

TypeMetrics metrics_for(const ScoreVector& scores, const ScoreLookup& lookup,
                        const std::vector<CaseId>& anomalies,
                        const std::vector<CaseId>& normals) {
    TypeMetrics m;
    m.n_anomalies = static_cast<int>(anomalies.size());
    m.k = m.n_anomalies;
    if (anomalies.empty()) return m;

    std::vector<double> pos;
    std::vector<double> neg;
    pos.reserve(anomalies.size());
    neg.reserve(normals.size());
    for (CaseId id : anomalies) pos.push_back(scores.scores[lookup.at(id)]);
    for (CaseId id : normals) neg.push_back(scores.scores[lookup.at(id)]);
    m.rank_auc = rank_auc(pos, neg);

    // recall@K over the type's population, descending score, ids ascending.
    struct Ranked {
        double score;
        CaseId id;
        bool positive;
    };
    std::vector<Ranked> ranked;
    ranked.reserve(anomalies.size() + normals.size());
    for (CaseId id : anomalies) {
        ranked.push_back({scores.scores[lookup.at(id)], id, true});
    }
    for (CaseId id : normals) {
        ranked.push_back({scores.scores[lookup.at(id)], id, false});
    }
    std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.id < b.id;
    });
    std::size_t hits = 0;
    const std::size_t K = std::min<std::size_t>(m.k, ranked.size());
    for (std::size_t i = 0; i < K; ++i) {
        if (ranked[i].positive) ++hits;
    }
    m.recall_at_k =
        static_cast<double>(hits) / static_cast<double>(anomalies.size());

    if (!scores.flags.empty()) {
        std::size_t tp = 0;
        std::size_t flagged_in_population = 0;
        for (CaseId id : anomalies) {
            if (scores.flags[lookup.at(id)]) {
                ++tp;
                ++flagged_in_population;
            }
        }
        for (CaseId id : normals) {
            if (scores.flags[lookup.at(id)]) ++flagged_in_population;
        }
        m.recall_at_flags =
            static_cast<double>(tp) / static_cast<double>(anomalies.size());
        m.precision_at_flags =
            flagged_in_population == 0
                ? std::optional<double>{}
                : std::optional<double>{static_cast<double>(tp) /
                                        static_cast<double>(flagged_in_population)};
    }
    return m;
}

void split_population(const GroundTruth& truth, const Dataset& dataset,
                      std::map<AnomalyType, std::vector<CaseId>>& by_type,
                      std::vector<CaseId>& normals) {
    std::unordered_map<CaseId, bool> labeled;
    for (const auto& e : truth.entries) {
        if (!dataset.has_case(e.case_id)) {
            throw ValidationError("ground truth references unknown case id " +
                                  std::to_string(e.case_id));
        }
        by_type[e.type].push_back(e.case_id);
        labeled[e.case_id] = true;
    }
    for (CaseId id : dataset.case_ids()) {
        if (!labeled.count(id)) normals.push_back(id);
    }
}

}  // namespace

std::map<AnomalyType, TypeMetrics> evaluate_scores(const ScoreVector& scores,
                                                   const GroundTruth& truth,
                                                   const Dataset& dataset) {
    const ScoreLookup lookup(scores, dataset);
    std::map<AnomalyType, std::vector<CaseId>> by_type;
    std::vector<CaseId> normals;
    split_population(truth, dataset, by_type, normals);
    std::map<AnomalyType, TypeMetrics> out;
    for (const auto& [type, anomalies] : by_type) {
        out[type] = metrics_for(scores, lookup, anomalies, normals);
    }
    return out;
}

TypeMetrics evaluate_overall(const ScoreVector& scores, const GroundTruth& truth,
                             const Dataset& dataset) {
    const ScoreLookup lookup(scores, dataset);
    std::map<AnomalyType, std::vector<CaseId>> by_type;
    std::vector<CaseId> normals;
    split_population(truth, dataset, by_type, normals);
    std::vector<CaseId> all;
    for (const auto& [type, anomalies] : by_type) {
        (void)type;
        all.insert(all.end(), anomalies.begin(), anomalies.end());
    }
    std::sort(all.begin(), all.end());
    return metrics_for(scores, lookup, all, normals);
}

EvaluationReport cross_matrix(const std::vector<std::string>& detector_ids,
                              const Dataset& dataset, const GroundTruth& truth,
                              const DetectorParams& params,
                              const std::string& benchmark_id) {
    EvaluationReport report;
    report.benchmark_id = benchmark_id;
    report.params_json = params.to_json();
    for (const auto& id : detector_ids) {
        const ScoreVector scores = run_detector(id, dataset, params);
        for (const auto& [type, metrics] : evaluate_scores(scores, truth, dataset)) {
            report.rows.push_back({id, type, metrics});
        }
        report.overall.emplace_back(id, evaluate_overall(scores, truth, dataset));
    }
    return report;
}

ScoreVector load_external_scores(std::istream& in, const Dataset& dataset,
                                 const std::string& detector_id) {
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError("external scores: empty input");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "case_id,score") {
        throw ParseError("external scores: header must be 'case_id,score', got '" +
                         line + "'");
    }
    ScoreVector sv;
    sv.detector_id = detector_id;
    std::unordered_map<CaseId, double> seen;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        ++row;
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw ParseError("external scores: row " + std::to_string(row) +
                             " has no score column");
        }
        CaseId id = 0;
        {
            const char* first = line.data();
            const char* last = line.data() + comma;
            const auto res = std::from_chars(first, last, id);
            if (res.ec != std::errc() || res.ptr != last) {
                throw ParseError("external scores: row " + std::to_string(row) +
                                 ": bad case id '" + line.substr(0, comma) + "'");
            }
        }
        double score = 0.0;
        {
            const char* first = line.data() + comma + 1;
            const char* last = line.data() + line.size();
            const auto res = std::from_chars(first, last, score);
            if (res.ec != std::errc() || res.ptr != last || !std::isfinite(score)) {
                throw ParseError("external scores: row " + std::to_string(row) +
                                 ": non-numeric score for case id " +
                                 std::to_string(id));
            }
        }
        if (!dataset.has_case(id)) {
            throw ValidationError("external scores: unknown case id " +
                                  std::to_string(id));
        }
        if (!seen.emplace(id, score).second) {
            throw ValidationError("external scores: duplicate case id " +
                                  std::to_string(id));
        }
    }
    for (CaseId id : dataset.case_ids()) {
        const auto it = seen.find(id);
        if (it == seen.end()) {
            throw ValidationError("external scores: missing case id " +
                                  std::to_string(id));
        }
        sv.ids.push_back(id);
        sv.scores.push_back(it->second);
    }
    return sv;
}

ScoreVector load_external_scores_file(const std::string& path,
                                      const Dataset& dataset) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open scores file: " + path);
    // Detector id from file metadata: the basename without extension.
    std::string stem = path;
    if (const auto slash = stem.find_last_of("/\\"); slash != std::string::npos) {
        stem = stem.substr(slash + 1);
    }
    if (const auto dot = stem.find_last_of('.'); dot != std::string::npos) {
        stem = stem.substr(0, dot);
    }
    return load_external_scores(in, dataset, stem);
}

namespace {

json metrics_to_json(const TypeMetrics& m) {
    json j;
    j["rank_auc"] = m.rank_auc;
    j["recall_at_k"] = m.recall_at_k;
    j["k"] = m.k;
    j["n_anomalies"] = m.n_anomalies;
    j["recall_at_flags"] =
        m.recall_at_flags ? json(*m.recall_at_flags) : json(nullptr);
    j["precision_at_flags"] =
        m.precision_at_flags ? json(*m.precision_at_flags) : json(nullptr);
    return j;
}

TypeMetrics metrics_from_json(const json& j) {
    TypeMetrics m;
    m.rank_auc = j.at("rank_auc").get<double>();
    m.recall_at_k = j.at("recall_at_k").get<double>();
    m.k = j.at("k").get<int>();
    m.n_anomalies = j.at("n_anomalies").get<int>();
    if (!j.at("recall_at_flags").is_null()) {
        m.recall_at_flags = j["recall_at_flags"].get<double>();
    }
    if (!j.at("precision_at_flags").is_null()) {
        m.precision_at_flags = j["precision_at_flags"].get<double>();
    }
    return m;
}

}  // namespace

std::string EvaluationReport::to_json() const {
    json j;
    j["benchmark"] = benchmark_id;
    j["rows"] = json::array();
    for (const auto& row : rows) {
        j["rows"].push_back({{"detector", row.detector_id},
                             {"type", std::string(roman(row.type))},
                             {"metrics", metrics_to_json(row.metrics)}});
    }
    j["overall"] = json::array();
    for (const auto& [id, m] : overall) {
        j["overall"].push_back({{"detector", id}, {"metrics", metrics_to_json(m)}});
    }
    j["params"] =
        params_json.empty() ? json::object() : json::parse(params_json);
    return j.dump(2) + "\n";
}

EvaluationReport EvaluationReport::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("report json: ") + e.what());
    }
    EvaluationReport report;
    try {
        report.benchmark_id = j.value("benchmark", "");
        for (const auto& row : j.at("rows")) {
            report.rows.push_back(
                {row.at("detector").get<std::string>(),
                 anomaly_type_from_roman(row.at("type").get<std::string>()),
                 metrics_from_json(row.at("metrics"))});
        }
        if (j.contains("overall")) {
            for (const auto& row : j["overall"]) {
                report.overall.emplace_back(row.at("detector").get<std::string>(),
                                            metrics_from_json(row.at("metrics")));
            }
        }
        if (j.contains("params")) report.params_json = j["params"].dump();
    } catch (const json::exception& e) {
        throw ParseError(std::string("report json: ") + e.what());
    }
    return report;
}

void EvaluationReport::write_csv(std::ostream& out) const {
    out << "detector,type,metric,value\n";
    const auto emit = [&](const std::string& det, const std::string& type,
                          const char* metric, double value) {
        out << det << ',' << type << ',' << metric << ',' << format_double(value)
            << '\n';
    };
    for (const auto& row : rows) {
        const std::string type(roman(row.type));
        emit(row.detector_id, type, "rank_auc", row.metrics.rank_auc);
        emit(row.detector_id, type, "recall_at_k", row.metrics.recall_at_k);
        if (row.metrics.recall_at_flags) {
            emit(row.detector_id, type, "recall_at_flags",
                 *row.metrics.recall_at_flags);
        }
        if (row.metrics.precision_at_flags) {
            emit(row.detector_id, type, "precision_at_flags",
                 *row.metrics.precision_at_flags);
        }
    }
    for (const auto& [id, m] : overall) {
        emit(id, "all", "rank_auc", m.rank_auc);
        emit(id, "all", "recall_at_k", m.recall_at_k);
        if (m.recall_at_flags) emit(id, "all", "recall_at_flags", *m.recall_at_flags);
        if (m.precision_at_flags) {
            emit(id, "all", "precision_at_flags", *m.precision_at_flags);
        }
    }
}

void EvaluationReport::write_table(std::ostream& out) const {
    // Column per type that appears; row per detector; cells are rank-AUC.
    std::vector<AnomalyType> types;
    std::vector<std::string> detectors;
    for (const auto& row : rows) {
        if (std::find(types.begin(), types.end(), row.type) == types.end()) {
            types.push_back(row.type);
        }
        if (std::find(detectors.begin(), detectors.end(), row.detector_id) ==
            detectors.end()) {
            detectors.push_back(row.detector_id);
        }
    }
    std::sort(types.begin(), types.end());

    out << "rank-AUC by detector (rows) and anomaly type (columns)\n";
    out << std::left << std::setw(12) << "detector";
    for (AnomalyType t : types) {
        out << std::right << std::setw(8) << roman(t);
    }
    out << '\n';
    for (const auto& det : detectors) {
        out << std::left << std::setw(12) << det;
        for (AnomalyType t : types) {
            double value = std::nan("");
            for (const auto& row : rows) {
                if (row.detector_id == det && row.type == t) {
                    value = row.metrics.rank_auc;
                }
            }
            std::ostringstream cell;
            cell << std::fixed << std::setprecision(3) << value;
            out << std::right << std::setw(8) << cell.str();
        }
        out << '\n';
    }
}

}  // namespace anobench

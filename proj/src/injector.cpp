#include "anobench/injector.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "anobench/knn.hpp"
#include "anobench/rng.hpp"

namespace anobench {

using nlohmann::json;

// --------------------------------------------------------------------------
// BaseSpec
// --------------------------------------------------------------------------

void BaseSpec::validate() const {
    if (clusters.empty()) throw ParamError("base spec: at least one cluster");
    double wsum = 0.0;
    for (const auto& c : clusters) {
        if (!(c.weight > 0.0)) throw ParamError("base spec: weights must be > 0");
        wsum += c.weight;
    }
    if (std::abs(wsum - 1.0) > 1e-9) {
        throw ParamError("base spec: cluster weights must sum to 1");
    }
    for (const auto& a : continuous) {
        if (a.means.size() != clusters.size() || a.scales.size() != clusters.size()) {
            throw ParamError("base spec: attribute '" + a.name +
                             "' needs one mean/scale per cluster");
        }
        for (double s : a.scales) {
            if (!(s > 0.0)) throw ParamError("base spec: scales must be > 0");
        }
    }
    for (const auto& a : categorical) {
        if (a.labels.empty()) {
            throw ParamError("base spec: attribute '" + a.name + "' has no labels");
        }
        if (a.derived()) {
            if (!a.probs.empty()) {
                throw ParamError("base spec: '" + a.name +
                                 "' cannot be both sampled and derived");
            }
            bool found = false;
            for (const auto& src : categorical) {
                if (&src == &a) break;
                if (src.name == a.derive_from) {
                    if (a.map.empty() ||
                        (a.map.size() != 1 && a.map.size() != clusters.size())) {
                        throw ParamError("base spec: '" + a.name +
                                         "' map needs 1 row or one per cluster");
                    }
                    for (const auto& row : a.map) {
                        if (row.size() != src.labels.size()) {
                            throw ParamError("base spec: '" + a.name +
                                             "' map row length must match '" +
                                             src.name + "' label count");
                        }
                        for (const auto& lbl : row) {
                            if (std::find(a.labels.begin(), a.labels.end(), lbl) ==
                                a.labels.end()) {
                                throw ParamError("base spec: '" + a.name +
                                                 "' map uses unknown label '" +
                                                 lbl + "'");
                            }
                        }
                    }
                    found = true;
                    break;
                }
            }
            if (!found) {
                throw ParamError("base spec: '" + a.name + "' derives from '" +
                                 a.derive_from +
                                 "', which must be an earlier categorical attribute");
            }
        } else {
            if (a.probs.size() != 1 && a.probs.size() != clusters.size()) {
                throw ParamError("base spec: '" + a.name +
                                 "' needs 1 probability row or one per cluster");
            }
            for (const auto& row : a.probs) {
                if (row.size() != a.labels.size()) {
                    throw ParamError("base spec: '" + a.name +
                                     "' probability row length must match labels");
                }
                double psum = 0.0;
                for (double p : row) {
                    if (p < 0.0) throw ParamError("base spec: negative probability");
                    psum += p;
                }
                if (std::abs(psum - 1.0) > 1e-9) {
                    throw ParamError("base spec: '" + a.name +
                                     "' probabilities must sum to 1");
                }
            }
        }
    }
    schema().validate();
}

Schema BaseSpec::schema() const {
    Schema s;
    for (const auto& a : continuous) {
        s.attributes.push_back({a.name, AttributeKind::Continuous});
    }
    for (const auto& a : categorical) {
        s.attributes.push_back({a.name, AttributeKind::Categorical});
    }
    return s;
}

std::string BaseSpec::to_json() const {
    json j;
    j["n_cases"] = n_cases;
    j["seed"] = seed;
    j["clusters"] = json::array();
    for (const auto& c : clusters) j["clusters"].push_back({{"weight", c.weight}});
    j["continuous"] = json::array();
    for (const auto& a : continuous) {
        j["continuous"].push_back(
            {{"name", a.name}, {"means", a.means}, {"scales", a.scales}});
    }
    j["categorical"] = json::array();
    for (const auto& a : categorical) {
        json e{{"name", a.name}, {"labels", a.labels}};
        if (a.derived()) {
            e["derive_from"] = a.derive_from;
            e["map"] = a.map;
        } else {
            e["probs"] = a.probs;
        }
        j["categorical"].push_back(e);
    }
    return j.dump(2) + "\n";
}

BaseSpec BaseSpec::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("base spec: ") + e.what());
    }
    BaseSpec spec;
    try {
        spec.n_cases = j.at("n_cases").get<std::size_t>();
        if (j.contains("seed")) spec.seed = j["seed"].get<std::uint64_t>();
        for (const auto& c : j.at("clusters")) {
            spec.clusters.push_back({c.at("weight").get<double>()});
        }
        if (j.contains("continuous")) {
            for (const auto& a : j["continuous"]) {
                spec.continuous.push_back(
                    {a.at("name").get<std::string>(),
                     a.at("means").get<std::vector<double>>(),
                     a.at("scales").get<std::vector<double>>()});
            }
        }
        if (j.contains("categorical")) {
            for (const auto& a : j["categorical"]) {
                CategoricalAttrSpec cat;
                cat.name = a.at("name").get<std::string>();
                cat.labels = a.at("labels").get<std::vector<std::string>>();
                if (a.contains("derive_from")) {
                    cat.derive_from = a["derive_from"].get<std::string>();
                    cat.map = a.at("map").get<std::vector<std::vector<std::string>>>();
                } else {
                    cat.probs = a.at("probs").get<std::vector<std::vector<double>>>();
                }
                spec.categorical.push_back(std::move(cat));
            }
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("base spec: ") + e.what());
    }
    spec.validate();
    return spec;
}

Dataset generate_base(const BaseSpec& spec) {
    spec.validate();
    Dataset dataset(spec.schema());
    Rng rng(spec.seed);

    std::vector<double> cum_weights;
    double acc = 0.0;
    for (const auto& c : spec.clusters) {
        acc += c.weight;
        cum_weights.push_back(acc);
    }

    // Source attribute positions for derived categorical attributes.
    std::vector<std::optional<std::size_t>> source_pos(spec.categorical.size());
    for (std::size_t i = 0; i < spec.categorical.size(); ++i) {
        if (!spec.categorical[i].derived()) continue;
        for (std::size_t s = 0; s < i; ++s) {
            if (spec.categorical[s].name == spec.categorical[i].derive_from) {
                source_pos[i] = s;
            }
        }
    }

    std::vector<Value> row(spec.continuous.size() + spec.categorical.size());
    std::vector<std::size_t> cat_codes(spec.categorical.size());
    for (std::size_t i = 0; i < spec.n_cases; ++i) {
        const double u = rng.uniform01();
        std::size_t cluster = 0;
        while (cluster + 1 < cum_weights.size() && u >= cum_weights[cluster]) {
            ++cluster;
        }
        for (std::size_t a = 0; a < spec.continuous.size(); ++a) {
            const auto& attr = spec.continuous[a];
            row[a] = attr.means[cluster] + attr.scales[cluster] * rng.normal();
        }
        for (std::size_t a = 0; a < spec.categorical.size(); ++a) {
            const auto& attr = spec.categorical[a];
            std::size_t code;
            if (attr.derived()) {
                const auto& map_row =
                    attr.map.size() == 1 ? attr.map[0] : attr.map[cluster];
                const std::string& lbl = map_row[cat_codes[*source_pos[a]]];
                code = static_cast<std::size_t>(
                    std::find(attr.labels.begin(), attr.labels.end(), lbl) -
                    attr.labels.begin());
            } else {
                const auto& p =
                    attr.probs.size() == 1 ? attr.probs[0] : attr.probs[cluster];
                const double v = rng.uniform01();
                double c = 0.0;
                code = p.size() - 1;
                for (std::size_t l = 0; l < p.size(); ++l) {
                    c += p[l];
                    if (v < c) {
                        code = l;
                        break;
                    }
                }
            }
            cat_codes[a] = code;
            row[spec.continuous.size() + a] = attr.labels[code];
        }
        dataset.append_row(row);
    }
    return dataset;
}

// --------------------------------------------------------------------------
// InjectionSpec / GroundTruth
// --------------------------------------------------------------------------

void InjectionSpec::validate() const {
    for (const auto& [type, count] : counts) {
        if (count < 0) throw ParamError("injection spec: counts must be >= 0");
        (void)type;
    }
    if (!(extremity > 0.0)) throw ParamError("injection spec: extremity must be > 0");
    if (!(band_lo >= 0.0 && band_lo < band_hi && band_hi <= 1.0)) {
        throw ParamError("injection spec: quantile band must satisfy 0 <= lo < hi <= 1");
    }
    if (tuple_order < 2) throw ParamError("injection spec: tuple_order must be >= 2");
    if (vi_order < 1) throw ParamError("injection spec: vi_order must be >= 1");
    if (retry_budget < 1) throw ParamError("injection spec: retry_budget must be >= 1");
    thresholds.validate();
}

std::string InjectionSpec::to_json() const {
    json j;
    j["seed"] = seed;
    json cnt = json::object();
    for (const auto& [type, count] : counts) {
        cnt[std::string(roman(type))] = count;
    }
    j["counts"] = cnt;
    j["extremity"] = extremity;
    j["rarity_mode"] = rarity_mode == RarityMode::NewLabel ? "new_label" : "reuse";
    j["midrange"] = midrange;
    j["quantile_band"] = {band_lo, band_hi};
    j["tuple_order"] = tuple_order;
    j["vi_order"] = vi_order;
    j["retry_budget"] = retry_budget;
    j["thresholds"] = json::parse(thresholds.to_json());
    return j.dump(2) + "\n";
}

InjectionSpec InjectionSpec::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("injection spec: ") + e.what());
    }
    InjectionSpec spec;
    try {
        if (j.contains("seed")) spec.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("counts")) {
            for (const auto& [key, value] : j["counts"].items()) {
                spec.counts[anomaly_type_from_roman(key)] = value.get<int>();
            }
        }
        if (j.contains("extremity")) spec.extremity = j["extremity"].get<double>();
        if (j.contains("rarity_mode")) {
            const auto mode = j["rarity_mode"].get<std::string>();
            if (mode == "new_label") spec.rarity_mode = RarityMode::NewLabel;
            else if (mode == "reuse") spec.rarity_mode = RarityMode::Reuse;
            else throw ParseError("injection spec: unknown rarity_mode '" + mode + "'");
        }
        if (j.contains("midrange")) spec.midrange = j["midrange"].get<bool>();
        if (j.contains("quantile_band")) {
            spec.band_lo = j["quantile_band"].at(0).get<double>();
            spec.band_hi = j["quantile_band"].at(1).get<double>();
        }
        if (j.contains("tuple_order")) spec.tuple_order = j["tuple_order"].get<int>();
        if (j.contains("vi_order")) spec.vi_order = j["vi_order"].get<int>();
        if (j.contains("retry_budget")) {
            spec.retry_budget = j["retry_budget"].get<int>();
        }
        if (j.contains("thresholds")) {
            spec.thresholds = DetectorParams::from_json(j["thresholds"].dump());
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("injection spec: ") + e.what());
    }
    spec.validate();
    return spec;
}

std::string GroundTruth::to_json() const {
    json j;
    j["entries"] = json::array();
    for (const auto& e : entries) {
        json entry;
        entry["case_id"] = e.case_id;
        entry["type"] = std::string(roman(e.type));
        entry["attributes"] = e.attributes;
        entry["order"] = e.order;
        entry["params"] = e.params_json.empty() ? json::object()
                                                : json::parse(e.params_json);
        j["entries"].push_back(entry);
    }
    return j.dump(2) + "\n";
}

GroundTruth GroundTruth::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("ground truth: ") + e.what());
    }
    GroundTruth truth;
    try {
        for (const auto& e : j.at("entries")) {
            TruthEntry entry;
            entry.case_id = e.at("case_id").get<CaseId>();
            entry.type = anomaly_type_from_roman(e.at("type").get<std::string>());
            if (e.contains("attributes")) {
                entry.attributes = e["attributes"].get<std::vector<std::string>>();
            }
            if (e.contains("order")) entry.order = e["order"].get<int>();
            if (e.contains("params")) entry.params_json = e["params"].dump();
            truth.entries.push_back(std::move(entry));
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("ground truth: ") + e.what());
    }
    return truth;
}

void write_truth_file(const std::string& path, const GroundTruth& truth) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open output file: " + path);
    out << truth.to_json();
}

GroundTruth load_truth_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open ground truth file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return GroundTruth::from_json(buf.str());
}

// --------------------------------------------------------------------------
// Injection machinery
// --------------------------------------------------------------------------

namespace {

Dataset prefix_rows(const Dataset& dataset, std::size_t n) {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    return dataset.reordered(order);
}

// Reference frame for one inject() call: everything is computed over the
// first `reference_rows` of the input and never updated while appending.
struct Frame {
    Dataset base;
    MarginalStats stats;
    std::vector<std::size_t> cont_attrs;
    std::vector<std::size_t> cat_attrs;
    std::vector<std::vector<double>> deviations;  // univariate, [pos][row]
    std::optional<ContinuousSpace> space;
    std::vector<double> knn_scores;
    std::vector<double> knn_sorted;
    NeighborInfo neighbors;
    bool knn_ready = false;

    Frame(const Dataset& dataset, std::size_t reference_rows,
          const DetectorParams& th)
        : base(prefix_rows(dataset, reference_rows)),
          stats(MarginalStats::compute(base)) {
        cont_attrs = base.schema().indices_of(AttributeKind::Continuous);
        cat_attrs = base.schema().indices_of(AttributeKind::Categorical);
        if (!cont_attrs.empty() && base.n_cases() >= 2) {
            deviations = extreme_deviations(base, th);
        }
        if (!cont_attrs.empty() &&
            base.n_cases() > static_cast<std::size_t>(th.k_nn)) {
            space.emplace(base, th.standardize, th.method);
            neighbors = space->all_neighbors(th.k_nn);
            knn_scores = neighbors.mean_dist;
            knn_sorted = knn_scores;
            std::sort(knn_sorted.begin(), knn_sorted.end());
            knn_ready = true;
        }
    }

    // A clone source: not univariately deviant, all labels common, and (when
    // distances are available) inside the dense half of the score range.
    bool clone_ok(std::size_t row, const DetectorParams& th) const {
        for (const auto& dev : deviations) {
            if (dev[row] > th.k_extreme) return false;
        }
        for (std::size_t a : cat_attrs) {
            const auto& ls = stats.categorical[a].of(base.categorical(a).code(row));
            if (ls.freq <= th.tau_rare || ls.count <= th.c_rare) return false;
        }
        if (knn_ready) {
            const double median = empirical_quantile(knn_sorted, 0.5);
            if (knn_scores[row] > median) return false;
        }
        return true;
    }

    std::size_t pick_dense_row(Rng& rng, const DetectorParams& th,
                               int budget) const {
        for (int i = 0; i < budget; ++i) {
            const std::size_t row = rng.index(base.n_cases());
            if (clone_ok(row, th)) return row;
        }
        throw InfeasibleError(
            "injection: no clone source satisfies the density/commonness "
            "constraints within the retry budget");
    }

    std::vector<Value> row_values(std::size_t row) const {
        std::vector<Value> vals;
        vals.reserve(base.n_attributes());
        for (std::size_t a = 0; a < base.n_attributes(); ++a) {
            vals.push_back(base.value(row, a));
        }
        return vals;
    }
};

std::string attr_name(const Dataset& d, std::size_t a) {
    return d.schema().attributes[a].name;
}

// Next free index for synthetic "anom_<n>" labels in a column.
int next_anom_index(const CategoricalColumn& col) {
    int next = 0;
    for (std::size_t c = 0; c < col.label_count(); ++c) {
        const auto lbl = col.label_of_code(static_cast<std::uint32_t>(c));
        if (lbl.rfind("anom_", 0) == 0) {
            const int idx = std::atoi(std::string(lbl.substr(5)).c_str());
            next = std::max(next, idx + 1);
        }
    }
    return next;
}

struct ExtremePick {
    double value = 0.0;
    std::string mode;
};

// A value beyond center +/- m*scale (or inside an interior empty bin in
// mid-range mode).
ExtremePick pick_extreme_value(const Frame& frame, std::size_t attr, Rng& rng,
                               const InjectionSpec& spec) {
    const auto& th = spec.thresholds;
    const ContinuousStats& st = frame.stats.continuous[attr];
    if (spec.midrange) {
        const auto values = frame.base.continuous(attr);
        const auto bins = static_cast<std::size_t>(th.bins);
        const double width = (st.max - st.min) / static_cast<double>(bins);
        if (width <= 0.0) {
            throw InfeasibleError("mid-range injection: constant column '" +
                                  attr_name(frame.base, attr) + "'");
        }
        std::vector<std::int64_t> counts(bins, 0);
        for (double v : values) {
            auto b = static_cast<std::size_t>((v - st.min) / width);
            ++counts[std::min(b, bins - 1)];
        }
        // Interior empty bins bracketed by occupied ones: rare values in the
        // middle of the range.
        std::vector<std::size_t> candidates;
        for (std::size_t b = 1; b + 1 < bins; ++b) {
            if (counts[b] != 0) continue;
            bool mass_left = false;
            bool mass_right = false;
            for (std::size_t l = 0; l < b; ++l) mass_left |= counts[l] > 0;
            for (std::size_t r = b + 1; r < bins; ++r) mass_right |= counts[r] > 0;
            if (mass_left && mass_right) candidates.push_back(b);
        }
        if (candidates.empty()) {
            throw InfeasibleError(
                "mid-range injection: no empty interior bin in column '" +
                attr_name(frame.base, attr) + "'");
        }
        const std::size_t bin = candidates[rng.index(candidates.size())];
        return {st.min + (static_cast<double>(bin) + 0.5) * width, "midrange"};
    }
    const double scale = st.scale(th.method);
    const double center = st.center(th.method);
    const double sign = rng.coin() ? 1.0 : -1.0;
    const double offset = spec.extremity + rng.uniform(0.0, spec.extremity / 4.0);
    // Zero-scale columns: any distinct value is maximally deviant; use an
    // absolute offset.
    const double value =
        scale > 0.0 ? center + sign * offset * scale : center + sign * offset;
    return {value, "extreme"};
}

struct RarePick {
    std::string label;
    std::string mode;
};

RarePick pick_rare_label(const Frame& frame, Dataset& dataset, std::size_t attr,
                         const InjectionSpec& spec,
                         std::map<std::size_t, int>& anom_counter,
                         std::map<std::pair<std::size_t, std::string>, int>& reuse) {
    if (spec.rarity_mode == RarityMode::NewLabel) {
        auto it = anom_counter.find(attr);
        if (it == anom_counter.end()) {
            it = anom_counter.emplace(attr, next_anom_index(dataset.categorical(attr)))
                     .first;
        }
        return {"anom_" + std::to_string(it->second++), "new_label"};
    }
    // Reuse: pick the least frequent existing label whose resulting count
    // stays <= c_rare.
    const auto& col = frame.base.categorical(attr);
    const auto& cat = frame.stats.categorical[attr];
    std::optional<std::uint32_t> best;
    for (std::uint32_t c = 0; c < col.label_count(); ++c) {
        const std::string lbl(col.label_of_code(c));
        const std::int64_t planned = reuse[{attr, lbl}];
        if (cat.of(c).count + planned + 1 > spec.thresholds.c_rare) continue;
        if (!best || cat.of(c).count < cat.of(*best).count) best = c;
    }
    if (!best) {
        throw InfeasibleError(
            "rare-label reuse: no label of '" + attr_name(frame.base, attr) +
            "' can stay within count <= c_rare after reuse");
    }
    const std::string lbl(col.label_of_code(*best));
    ++reuse[{attr, lbl}];
    return {lbl, "reuse"};
}

// The most locally typical of the given neighbour rows: the one whose
// categorical values are most frequent within that same neighbourhood.
std::size_t most_typical_neighbor(const Frame& frame,
                                  std::span<const std::uint32_t> nbrs) {
    double best_score = -1.0;
    std::size_t best_row = nbrs[0];
    for (std::uint32_t cand : nbrs) {
        double score = 0.0;
        for (std::size_t a : frame.cat_attrs) {
            const auto& col = frame.base.categorical(a);
            const std::uint32_t own = col.code(cand);
            std::size_t hits = 0;
            for (std::uint32_t nb : nbrs) {
                if (col.code(nb) == own) ++hits;
            }
            score += static_cast<double>(hits);
        }
        if (score > best_score ||
            (score == best_score &&
             frame.base.case_id(cand) < frame.base.case_id(best_row))) {
            best_score = score;
            best_row = cand;
        }
    }
    return best_row;
}

void require_kinds_for(AnomalyType type, const Dataset& dataset) {
    const TypeProperties props = type_properties(type);
    if (props.uses_continuous &&
        dataset.schema().count(AttributeKind::Continuous) == 0) {
        throw ValidationError(std::string("inject: type ") +
                              std::string(roman(type)) +
                              " requires continuous attributes");
    }
    if (props.uses_categorical &&
        dataset.schema().count(AttributeKind::Categorical) == 0) {
        throw ValidationError(std::string("inject: type ") +
                              std::string(roman(type)) +
                              " requires categorical attributes");
    }
}

void inject_into(Dataset& dataset, AnomalyType type, const InjectionSpec& spec,
                 std::uint64_t seed, std::size_t reference_rows,
                 GroundTruth& truth) {
    const auto it = spec.counts.find(type);
    const int count = it == spec.counts.end() ? 0 : it->second;
    if (count == 0) return;
    require_kinds_for(type, dataset);
    if (reference_rows == 0 || reference_rows > dataset.n_cases()) {
        throw ParamError("inject: reference_rows out of range");
    }

    const auto& th = spec.thresholds;
    Rng rng(seed);
    const Frame frame(dataset, reference_rows, th);
    const std::size_t n_cont = frame.cont_attrs.size();
    const std::size_t n_cat = frame.cat_attrs.size();

    std::map<std::size_t, int> anom_counter;
    std::map<std::pair<std::size_t, std::string>, int> reuse_counter;

    // Standardized positions of already-placed Type VI cases, to keep them
    // out of each other's neighbourhoods.
    std::vector<std::vector<double>> placed_vi;

    for (int item = 0; item < count; ++item) {
        json params;
        params["thresholds"] = json::parse(th.to_json());
        std::vector<std::string> attributes;
        int order = 0;
        std::vector<Value> row;

        switch (type) {
            case AnomalyType::ExtremeValue: {
                const std::size_t src = frame.pick_dense_row(rng, th, spec.retry_budget);
                row = frame.row_values(src);
                const std::size_t attr = frame.cont_attrs[rng.index(n_cont)];
                const ExtremePick pick = pick_extreme_value(frame, attr, rng, spec);
                row[attr] = pick.value;
                attributes = {attr_name(dataset, attr)};
                params["mode"] = pick.mode;
                params["value"] = pick.value;
                params["extremity"] = spec.extremity;
                break;
            }
            case AnomalyType::RareClass: {
                const std::size_t src = frame.pick_dense_row(rng, th, spec.retry_budget);
                row = frame.row_values(src);
                const std::size_t attr = frame.cat_attrs[rng.index(n_cat)];
                const RarePick pick = pick_rare_label(frame, dataset, attr, spec,
                                                      anom_counter, reuse_counter);
                row[attr] = pick.label;
                attributes = {attr_name(dataset, attr)};
                params["mode"] = pick.mode;
                params["label"] = pick.label;
                break;
            }
            case AnomalyType::SimpleMixed: {
                const std::size_t src = frame.pick_dense_row(rng, th, spec.retry_budget);
                row = frame.row_values(src);
                const std::size_t cattr = frame.cont_attrs[rng.index(n_cont)];
                const ExtremePick epick = pick_extreme_value(frame, cattr, rng, spec);
                row[cattr] = epick.value;
                const std::size_t kattr = frame.cat_attrs[rng.index(n_cat)];
                const RarePick rpick = pick_rare_label(frame, dataset, kattr, spec,
                                                       anom_counter, reuse_counter);
                row[kattr] = rpick.label;
                attributes = {attr_name(dataset, cattr), attr_name(dataset, kattr)};
                params["value"] = epick.value;
                params["label"] = rpick.label;
                break;
            }
            case AnomalyType::MultidimNumerical: {
                if (n_cont < 2) {
                    throw ValidationError(
                        "inject: type IV requires at least 2 continuous attributes");
                }
                if (!frame.knn_ready) {
                    throw ValidationError(
                        "inject: type IV requires more cases than k_nn");
                }
                // Marginal quantile band per attribute.
                std::vector<std::pair<double, double>> band(n_cont);
                for (std::size_t p = 0; p < n_cont; ++p) {
                    auto col = frame.base.continuous(frame.cont_attrs[p]);
                    std::vector<double> sorted(col.begin(), col.end());
                    std::sort(sorted.begin(), sorted.end());
                    band[p] = {empirical_quantile(sorted, spec.band_lo),
                               empirical_quantile(sorted, spec.band_hi)};
                }
                // Placement threshold sits a factor 4 deeper into the tail
                // than the detection quantile, so the construction still
                // clears the (1 - eps) cut after all appended cases shift
                // the score distribution.
                const double place_cut = empirical_quantile(
                    frame.knn_sorted, 1.0 - th.density_quantile / 4.0);
                bool placed = false;
                for (int attempt = 0; attempt < spec.retry_budget && !placed;
                     ++attempt) {
                    std::vector<double> point(n_cont);
                    for (std::size_t p = 0; p < n_cont; ++p) {
                        point[p] = rng.uniform(band[p].first, band[p].second);
                    }
                    const auto std_point = frame.space->standardize_point(point);
                    const auto [score, nbrs] =
                        frame.space->query(std_point, th.k_nn);
                    if (score <= place_cut) continue;
                    row.assign(dataset.n_attributes(), Value{0.0});
                    for (std::size_t p = 0; p < n_cont; ++p) {
                        row[frame.cont_attrs[p]] = point[p];
                    }
                    // Categorical values: copy the most locally typical
                    // neighbour so the case is only deviant jointly.
                    if (!frame.cat_attrs.empty()) {
                        const std::size_t donor = most_typical_neighbor(frame, nbrs);
                        for (std::size_t a : frame.cat_attrs) {
                            row[a] = std::string(
                                frame.base.categorical(a).label(donor));
                        }
                    }
                    params["score"] = score;
                    params["place_cut"] = place_cut;
                    params["quantile_band"] = {spec.band_lo, spec.band_hi};
                    placed = true;
                }
                if (!placed) {
                    throw InfeasibleError(
                        "type IV injection: no in-band point exceeded the "
                        "joint-density cut within the retry budget; widen the "
                        "quantile band or lower density_quantile");
                }
                for (std::size_t p = 0; p < n_cont; ++p) {
                    attributes.push_back(attr_name(dataset, frame.cont_attrs[p]));
                }
                break;
            }
            case AnomalyType::MultidimRareClass: {
                if (n_cat < 2) {
                    throw ValidationError(
                        "inject: type V requires at least 2 categorical attributes");
                }
                const int tsize = std::min<int>(spec.tuple_order,
                                                static_cast<int>(n_cat));
                bool placed = false;
                for (int attempt = 0; attempt < spec.retry_budget && !placed;
                     ++attempt) {
                    // Random attribute subset of the requested size.
                    std::vector<std::size_t> pool = frame.cat_attrs;
                    rng.shuffle(pool);
                    std::vector<std::size_t> subset(pool.begin(), pool.begin() + tsize);
                    std::sort(subset.begin(), subset.end());
                    // Random value combination with common marginals.
                    std::vector<std::uint32_t> combo(subset.size());
                    bool marginals_ok = true;
                    for (std::size_t p = 0; p < subset.size(); ++p) {
                        const auto& col = frame.base.categorical(subset[p]);
                        combo[p] = static_cast<std::uint32_t>(
                            rng.index(col.label_count()));
                        if (frame.stats.categorical[subset[p]].of(combo[p]).freq <=
                            th.tau_rare) {
                            marginals_ok = false;
                        }
                    }
                    if (!marginals_ok) continue;
                    const TupleCounts counter(frame.base, subset);
                    if (counter.count_of_codes(combo) != 0) continue;
                    // Unused so far in this call (keeps final counts at 1)?
                    json combo_key = json::array();
                    for (std::size_t p = 0; p < subset.size(); ++p) {
                        combo_key.push_back(std::string(
                            frame.base.categorical(subset[p]).label_of_code(combo[p])));
                    }
                    bool used = false;
                    for (const auto& e : truth.entries) {
                        if (e.type != AnomalyType::MultidimRareClass) continue;
                        const json prev = json::parse(e.params_json);
                        if (prev.contains("tuple") && prev["tuple"] == combo_key &&
                            prev["tuple_attrs"].get<std::vector<std::string>>() ==
                                [&] {
                                    std::vector<std::string> names;
                                    for (std::size_t a : subset) {
                                        names.push_back(attr_name(dataset, a));
                                    }
                                    return names;
                                }()) {
                            used = true;
                            break;
                        }
                    }
                    if (used) continue;
                    // Clone site where every globally common combo label is
                    // locally common, so the local-rarity check stays quiet.
                    const std::size_t src =
                        frame.pick_dense_row(rng, th, spec.retry_budget);
                    if (frame.knn_ready) {
                        const auto& nbrs = frame.neighbors.neighbors[src];
                        bool site_ok = true;
                        for (std::size_t p = 0; p < subset.size() && site_ok; ++p) {
                            if (frame.stats.categorical[subset[p]].of(combo[p]).freq <
                                th.min_global_freq) {
                                continue;  // below the gate; cannot fire
                            }
                            std::size_t hits = 0;
                            for (std::uint32_t nb : nbrs) {
                                if (frame.base.categorical(subset[p]).code(nb) ==
                                    combo[p]) {
                                    ++hits;
                                }
                            }
                            const double local = static_cast<double>(hits) /
                                                 static_cast<double>(th.k_nn);
                            if (local <= th.max_local_freq) site_ok = false;
                        }
                        if (!site_ok) continue;
                    }
                    row = frame.row_values(src);
                    std::vector<std::string> names;
                    for (std::size_t p = 0; p < subset.size(); ++p) {
                        row[subset[p]] = std::string(
                            frame.base.categorical(subset[p]).label_of_code(combo[p]));
                        names.push_back(attr_name(dataset, subset[p]));
                    }
                    attributes = names;
                    params["tuple"] = combo_key;
                    params["tuple_attrs"] = names;
                    placed = true;
                }
                if (!placed) {
                    throw InfeasibleError(
                        "type V injection: no unused zero-count tuple with "
                        "common marginals found within the retry budget");
                }
                break;
            }
            case AnomalyType::MultidimMixed: {
                if (!frame.knn_ready) {
                    throw ValidationError(
                        "inject: type VI requires more cases than k_nn");
                }
                const int vorder = std::min<int>(spec.vi_order,
                                                 static_cast<int>(n_cat));
                bool placed = false;
                for (int attempt = 0; attempt < spec.retry_budget && !placed;
                     ++attempt) {
                    const std::size_t src =
                        frame.pick_dense_row(rng, th, spec.retry_budget);
                    // Keep out of previously placed VI neighbourhoods.
                    const double radius =
                        frame.space->kth_neighbor_distance(src, th.k_nn);
                    const auto src_point = frame.space->row_point(src);
                    bool crowded = false;
                    for (const auto& prev : placed_vi) {
                        double sq = 0.0;
                        for (std::size_t d = 0; d < prev.size(); ++d) {
                            const double diff = prev[d] - src_point[d];
                            sq += diff * diff;
                        }
                        if (std::sqrt(sq) < 2.0 * radius) crowded = true;
                    }
                    if (crowded) continue;
                    const auto& nbrs = frame.neighbors.neighbors[src];

                    if (vorder == 1) {
                        // A single class: globally common, absent among the
                        // k nearest reference neighbours.
                        std::vector<std::pair<std::size_t, std::uint32_t>> cands;
                        for (std::size_t a : frame.cat_attrs) {
                            const auto& col = frame.base.categorical(a);
                            for (std::uint32_t c = 0; c < col.label_count(); ++c) {
                                if (c == col.code(src)) continue;
                                if (frame.stats.categorical[a].of(c).freq <
                                    th.min_global_freq) {
                                    continue;
                                }
                                bool seen = false;
                                for (std::uint32_t nb : nbrs) {
                                    if (col.code(nb) == c) {
                                        seen = true;
                                        break;
                                    }
                                }
                                if (!seen) cands.emplace_back(a, c);
                            }
                        }
                        if (cands.empty()) continue;
                        const auto [attr, code] = cands[rng.index(cands.size())];
                        row = frame.row_values(src);
                        const std::string lbl(
                            frame.base.categorical(attr).label_of_code(code));
                        row[attr] = lbl;
                        attributes = {attr_name(dataset, attr)};
                        params["replacement"] = lbl;
                        order = 1;
                        placed = true;
                    } else {
                        // A class tuple: globally common as a combination,
                        // locally absent, every member locally common (so
                        // lower orders stay quiet).
                        std::vector<std::size_t> pool = frame.cat_attrs;
                        rng.shuffle(pool);
                        std::vector<std::size_t> subset(pool.begin(),
                                                        pool.begin() + vorder);
                        std::sort(subset.begin(), subset.end());
                        const TupleCounts counter(frame.base, subset);
                        const double nref =
                            static_cast<double>(frame.base.n_cases());
                        std::vector<std::vector<std::uint32_t>> cands;
                        for (const auto& [codes, cnt] : counter.entries()) {
                            if (static_cast<double>(cnt) / nref <
                                th.min_global_freq) {
                                continue;
                            }
                            bool tuple_seen = false;
                            bool members_common = true;
                            std::size_t member_hits[16] = {};
                            for (std::uint32_t nb : nbrs) {
                                bool same = true;
                                for (std::size_t p = 0; p < subset.size(); ++p) {
                                    const bool eq =
                                        frame.base.categorical(subset[p]).code(nb) ==
                                        codes[p];
                                    if (eq) ++member_hits[p];
                                    same &= eq;
                                }
                                tuple_seen |= same;
                            }
                            for (std::size_t p = 0; p < subset.size(); ++p) {
                                const double local =
                                    static_cast<double>(member_hits[p]) /
                                    static_cast<double>(th.k_nn);
                                if (local <= th.max_local_freq) {
                                    members_common = false;
                                }
                            }
                            if (!tuple_seen && members_common) {
                                cands.push_back(codes);
                            }
                        }
                        if (cands.empty()) continue;
                        const auto& codes = cands[rng.index(cands.size())];
                        row = frame.row_values(src);
                        json repl = json::array();
                        for (std::size_t p = 0; p < subset.size(); ++p) {
                            const std::string lbl(
                                frame.base.categorical(subset[p]).label_of_code(
                                    codes[p]));
                            row[subset[p]] = lbl;
                            repl.push_back(lbl);
                            attributes.push_back(attr_name(dataset, subset[p]));
                        }
                        params["replacement"] = repl;
                        order = vorder;
                        placed = true;
                    }
                    if (placed) {
                        placed_vi.push_back(src_point);
                        params["clone_case_id"] = frame.base.case_id(src);
                    }
                }
                if (!placed) {
                    throw InfeasibleError(
                        "type VI injection: no clone/replacement combination "
                        "satisfied the global-common/locally-absent "
                        "constraints within the retry budget");
                }
                break;
            }
        }

        const CaseId id = dataset.append_row(row);
        TruthEntry entry;
        entry.case_id = id;
        entry.type = type;
        entry.attributes = std::move(attributes);
        entry.order = order;
        entry.params_json = params.dump();
        truth.entries.push_back(std::move(entry));
    }
}

}  // namespace

std::pair<Dataset, GroundTruth> inject(const Dataset& dataset, AnomalyType type,
                                       const InjectionSpec& spec,
                                       std::uint64_t seed,
                                       std::size_t reference_rows) {
    spec.validate();
    Dataset out = dataset;
    GroundTruth truth;
    inject_into(out, type, spec, seed, reference_rows, truth);
    return {std::move(out), std::move(truth)};
}

std::pair<Dataset, GroundTruth> build_benchmark(const BaseSpec& base,
                                                const InjectionSpec& inj) {
    inj.validate();
    Dataset dataset = generate_base(base);
    const std::size_t base_rows = dataset.n_cases();
    GroundTruth truth;
    for (AnomalyType type : kAllTypes) {
        inject_into(dataset, type, inj,
                    Rng::derive(inj.seed, static_cast<std::uint64_t>(type)),
                    base_rows == 0 ? 1 : base_rows, truth);
    }
    const auto violations = construction_violations(dataset, truth, base_rows, inj);
    if (!violations.empty()) {
        std::string msg = "benchmark construction check failed:";
        for (const auto& v : violations) msg += "\n  " + v;
        throw InfeasibleError(msg);
    }
    return {std::move(dataset), std::move(truth)};
}

std::vector<std::string> construction_violations(const Dataset& dataset,
                                                 const GroundTruth& truth,
                                                 std::size_t reference_rows,
                                                 const InjectionSpec& spec) {
    std::vector<std::string> out;
    if (truth.entries.empty()) return out;
    const auto& th = spec.thresholds;
    const Dataset base = prefix_rows(dataset, reference_rows);
    const MarginalStats base_stats = MarginalStats::compute(base);
    const MarginalStats final_stats = MarginalStats::compute(dataset);
    const auto cont = dataset.schema().indices_of(AttributeKind::Continuous);

    // Univariate deviations and joint-density scores over the final set.
    std::vector<std::vector<double>> dev;
    if (!cont.empty() && dataset.n_cases() >= 2) {
        dev = extreme_deviations(dataset, th);
    }
    std::vector<std::vector<char>> bins;
    if (spec.midrange) bins = empty_bin_flags(dataset, th);

    std::optional<ScoreVector> knn;
    std::optional<ContinuousSpace> base_space;
    if (cont.size() >= 2 &&
        dataset.n_cases() > static_cast<std::size_t>(th.k_nn)) {
        knn = detect_multidim_numerical(dataset, th);
    }
    if (!cont.empty() && base.n_cases() >= static_cast<std::size_t>(th.k_nn)) {
        base_space.emplace(base, th.standardize, th.method);
    }

    const auto complain = [&](const TruthEntry& e, const std::string& what) {
        out.push_back("case " + std::to_string(e.case_id) + " (type " +
                      std::string(roman(e.type)) + "): " + what);
    };

    for (const auto& e : truth.entries) {
        const std::size_t row = dataset.row_of(e.case_id);
        switch (e.type) {
            case AnomalyType::ExtremeValue:
            case AnomalyType::SimpleMixed: {
                bool deviant = false;
                for (std::size_t p = 0; p < cont.size(); ++p) {
                    if (dev[p][row] > th.k_extreme) deviant = true;
                    if (!bins.empty() && bins[p][row]) deviant = true;
                }
                if (!deviant) complain(e, "no univariate deviation above threshold");
                if (e.type == AnomalyType::SimpleMixed) {
                    bool rare = false;
                    for (std::size_t a :
                         dataset.schema().indices_of(AttributeKind::Categorical)) {
                        const auto& ls = final_stats.categorical[a].of(
                            dataset.categorical(a).code(row));
                        if (ls.freq <= th.tau_rare || ls.count <= th.c_rare) {
                            rare = true;
                        }
                    }
                    if (!rare) complain(e, "no rare class value");
                }
                break;
            }
            case AnomalyType::RareClass: {
                bool rare = false;
                for (std::size_t a :
                     dataset.schema().indices_of(AttributeKind::Categorical)) {
                    const auto& ls = final_stats.categorical[a].of(
                        dataset.categorical(a).code(row));
                    if (ls.freq <= th.tau_rare || ls.count <= th.c_rare) rare = true;
                }
                if (!rare) complain(e, "no rare class value");
                break;
            }
            case AnomalyType::MultidimNumerical: {
                for (std::size_t p = 0; p < cont.size(); ++p) {
                    const auto& st = base_stats.continuous[cont[p]];
                    const double v = dataset.continuous(cont[p])[row];
                    if (v < st.min || v > st.max) {
                        complain(e, "outside the reference marginal range");
                    }
                    if (dev[p][row] > th.k_extreme) {
                        complain(e, "univariately extreme; should hide jointly");
                    }
                }
                if (knn && !knn->flags[row]) {
                    complain(e, "joint-density score not in the top quantile");
                }
                break;
            }
            case AnomalyType::MultidimRareClass: {
                const json params = json::parse(e.params_json);
                const auto names =
                    params.at("tuple_attrs").get<std::vector<std::string>>();
                const auto tuple =
                    params.at("tuple").get<std::vector<std::string>>();
                std::vector<std::size_t> attrs;
                for (const auto& nm : names) {
                    attrs.push_back(dataset.schema().index_of(nm));
                }
                const TupleCounts base_counter(base, attrs);
                std::vector<std::uint32_t> codes;
                bool representable = true;
                for (std::size_t p = 0; p < attrs.size(); ++p) {
                    const auto code = base.categorical(attrs[p]).code_of(tuple[p]);
                    if (!code) {
                        representable = false;
                        break;
                    }
                    codes.push_back(*code);
                }
                if (representable && base_counter.count_of_codes(codes) != 0) {
                    complain(e, "tuple occurs in the reference data");
                }
                for (std::size_t p = 0; p < attrs.size(); ++p) {
                    const auto& col = dataset.categorical(attrs[p]);
                    const auto& ls = final_stats.categorical[attrs[p]].of(col.code(row));
                    if (ls.freq <= th.tau_rare) {
                        complain(e, "tuple marginal '" + tuple[p] + "' is rare");
                    }
                }
                break;
            }
            case AnomalyType::MultidimMixed: {
                // Globally common and absent among the k nearest reference
                // neighbours.
                if (!base_space) break;
                std::vector<double> point;
                for (std::size_t a : cont) {
                    point.push_back(dataset.continuous(a)[row]);
                }
                const auto std_point = base_space->standardize_point(point);
                const auto [score, nbrs] = base_space->query(std_point, th.k_nn);
                (void)score;
                for (const auto& nm : e.attributes) {
                    const std::size_t a = dataset.schema().index_of(nm);
                    const auto& col = dataset.categorical(a);
                    const std::uint32_t own = col.code(row);
                    if (final_stats.categorical[a].of(own).freq <
                        th.min_global_freq) {
                        complain(e, "replacement class not globally common");
                    }
                }
                if (e.order == 1) {
                    const std::size_t a = dataset.schema().index_of(e.attributes[0]);
                    const std::string own(dataset.categorical(a).label(row));
                    for (std::uint32_t nb : nbrs) {
                        if (base.categorical(a).label(nb) == own) {
                            complain(e, "replacement class present in the "
                                        "reference neighbourhood");
                            break;
                        }
                    }
                } else {
                    std::size_t hits = 0;
                    for (std::uint32_t nb : nbrs) {
                        bool same = true;
                        for (const auto& nm : e.attributes) {
                            const std::size_t a = dataset.schema().index_of(nm);
                            if (std::string(base.categorical(a).label(nb)) !=
                                std::string(dataset.categorical(a).label(row))) {
                                same = false;
                                break;
                            }
                        }
                        if (same) ++hits;
                    }
                    if (hits > 0) {
                        complain(e, "replacement tuple present in the "
                                    "reference neighbourhood");
                    }
                }
                break;
            }
        }
    }
    return out;
}

}  // namespace anobench

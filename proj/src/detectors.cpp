#include "anobench/detectors.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <ostream>

#include <json.hpp>

#include "anobench/csv.hpp"

namespace anobench {

using nlohmann::json;

void DetectorParams::validate() const {
    if (!(k_extreme > 0.0)) throw ParamError("k_extreme must be > 0");
    if (!(tau_rare > 0.0 && tau_rare < 1.0)) {
        throw ParamError("tau_rare must lie in (0,1)");
    }
    if (c_rare < 0) throw ParamError("c_rare must be >= 0");
    if (k_nn < 1) throw ParamError("k_nn must be >= 1");
    if (combo_order < 2) throw ParamError("combo_order must be >= 2");
    if (bins < 1) throw ParamError("bins must be >= 1");
    if (!(min_global_freq >= 0.0 && min_global_freq <= 1.0)) {
        throw ParamError("min_global_freq must lie in [0,1]");
    }
    if (!(max_local_freq >= 0.0 && max_local_freq <= 1.0)) {
        throw ParamError("max_local_freq must lie in [0,1]");
    }
    if (!(density_quantile > 0.0 && density_quantile < 1.0)) {
        throw ParamError("density_quantile must lie in (0,1)");
    }
}

std::string DetectorParams::to_json() const {
    json j;
    j["k_extreme"] = k_extreme;
    j["method"] = std::string(to_string(method));
    j["leave_one_out"] = leave_one_out;
    j["bin_rarity"] = bin_rarity;
    j["bins"] = bins;
    j["tau_rare"] = tau_rare;
    j["c_rare"] = c_rare;
    j["k_nn"] = k_nn;
    j["combo_order"] = combo_order;
    j["min_global_freq"] = min_global_freq;
    j["max_local_freq"] = max_local_freq;
    j["density_quantile"] = density_quantile;
    j["standardize"] = standardize;
    return j.dump();
}

DetectorParams DetectorParams::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("detector params: ") + e.what());
    }
    DetectorParams p;
    if (j.contains("k_extreme")) p.k_extreme = j["k_extreme"].get<double>();
    if (j.contains("method")) {
        p.method = scale_method_from_string(j["method"].get<std::string>());
    }
    if (j.contains("leave_one_out")) p.leave_one_out = j["leave_one_out"].get<bool>();
    if (j.contains("bin_rarity")) p.bin_rarity = j["bin_rarity"].get<bool>();
    if (j.contains("bins")) p.bins = j["bins"].get<int>();
    if (j.contains("tau_rare")) p.tau_rare = j["tau_rare"].get<double>();
    if (j.contains("c_rare")) p.c_rare = j["c_rare"].get<std::int64_t>();
    if (j.contains("k_nn")) p.k_nn = j["k_nn"].get<int>();
    if (j.contains("combo_order")) p.combo_order = j["combo_order"].get<int>();
    if (j.contains("min_global_freq")) {
        p.min_global_freq = j["min_global_freq"].get<double>();
    }
    if (j.contains("max_local_freq")) {
        p.max_local_freq = j["max_local_freq"].get<double>();
    }
    if (j.contains("density_quantile")) {
        p.density_quantile = j["density_quantile"].get<double>();
    }
    if (j.contains("standardize")) p.standardize = j["standardize"].get<bool>();
    p.validate();
    return p;
}

void write_scores(std::ostream& out, const ScoreVector& scores) {
    out << "case_id,score,flag\n";
    for (std::size_t i = 0; i < scores.size(); ++i) {
        out << scores.ids[i] << ',' << format_double(scores.scores[i]) << ',';
        if (scores.flags.empty()) {
            out << "";
        } else {
            out << (scores.flags[i] ? '1' : '0');
        }
        out << '\n';
    }
}

void write_scores_file(const std::string& path, const ScoreVector& scores) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open output file: " + path);
    write_scores(out, scores);
}

// --------------------------------------------------------------------------
// shared check primitives
// --------------------------------------------------------------------------

std::vector<std::vector<double>> extreme_deviations(const Dataset& dataset,
                                                    const DetectorParams& params) {
    const auto cont = dataset.schema().indices_of(AttributeKind::Continuous);
    const std::size_t n = dataset.n_cases();
    std::vector<std::vector<double>> out(cont.size());
    for (std::size_t pos = 0; pos < cont.size(); ++pos) {
        const auto values = dataset.continuous(cont[pos]);
        auto& dev = out[pos];
        dev.resize(n);
        if (params.leave_one_out) {
            for (std::size_t row = 0; row < n; ++row) {
                const ContinuousStats st = continuous_stats_excluding(values, row);
                dev[row] = robust_deviation(values[row], st.center(params.method),
                                            st.scale(params.method));
            }
        } else {
            const ContinuousStats st = continuous_stats(values);
            const double center = st.center(params.method);
            const double scale = st.scale(params.method);
            for (std::size_t row = 0; row < n; ++row) {
                dev[row] = robust_deviation(values[row], center, scale);
            }
        }
    }
    return out;
}

std::vector<std::vector<char>> empty_bin_flags(const Dataset& dataset,
                                               const DetectorParams& params) {
    const auto cont = dataset.schema().indices_of(AttributeKind::Continuous);
    const std::size_t n = dataset.n_cases();
    const auto bins = static_cast<std::size_t>(params.bins);
    std::vector<std::vector<char>> out(cont.size());
    for (std::size_t pos = 0; pos < cont.size(); ++pos) {
        const auto values = dataset.continuous(cont[pos]);
        auto& rare = out[pos];
        rare.assign(n, 0);
        if (n == 0) continue;
        const auto [mn_it, mx_it] = std::minmax_element(values.begin(), values.end());
        const double mn = *mn_it;
        const double width = (*mx_it - mn) / static_cast<double>(bins);
        if (width <= 0.0) continue;  // constant column: one fully shared bin
        const auto bin_of = [&](double v) {
            auto b = static_cast<std::size_t>((v - mn) / width);
            return std::min(b, bins - 1);
        };
        std::vector<std::int64_t> counts(bins, 0);
        for (double v : values) ++counts[bin_of(v)];
        for (std::size_t row = 0; row < n; ++row) {
            // A value alone in its bin has zero neighbours at this
            // granularity: locally rare even in mid-range.
            rare[row] = counts[bin_of(values[row])] <= 1 ? 1 : 0;
        }
    }
    return out;
}

std::vector<std::vector<std::size_t>> attr_subsets(
    const std::vector<std::size_t>& attrs, int lo, int hi) {
    std::vector<std::vector<std::size_t>> out;
    const int n = static_cast<int>(attrs.size());
    hi = std::min(hi, n);
    for (int size = lo; size <= hi; ++size) {
        std::vector<int> pick(size);
        for (int i = 0; i < size; ++i) pick[i] = i;
        for (;;) {
            std::vector<std::size_t> subset(size);
            for (int i = 0; i < size; ++i) subset[i] = attrs[pick[i]];
            out.push_back(std::move(subset));
            int i = size - 1;
            while (i >= 0 && pick[i] == n - size + i) --i;
            if (i < 0) break;
            ++pick[i];
            for (int j = i + 1; j < size; ++j) pick[j] = pick[j - 1] + 1;
        }
    }
    return out;
}

TupleCounts::TupleCounts(const Dataset& dataset,
                         std::span<const std::size_t> attrs)
    : dataset_(&dataset), attrs_(attrs.begin(), attrs.end()) {
    counts_.reserve(dataset.n_cases());
    for (std::size_t row = 0; row < dataset.n_cases(); ++row) {
        ++counts_[key_of_row(row)];
    }
}

std::string TupleCounts::key_of_row(std::size_t row) const {
    std::string key;
    key.reserve(attrs_.size() * 4);
    for (std::size_t a : attrs_) {
        const std::uint32_t code = dataset_->categorical(a).code(row);
        key.append(reinterpret_cast<const char*>(&code), 4);
    }
    return key;
}

std::int64_t TupleCounts::count_of_row(std::size_t row) const {
    const auto it = counts_.find(key_of_row(row));
    return it == counts_.end() ? 0 : it->second;
}

std::int64_t TupleCounts::count_of_codes(
    std::span<const std::uint32_t> codes) const {
    std::string key;
    key.reserve(codes.size() * 4);
    for (std::uint32_t code : codes) {
        key.append(reinterpret_cast<const char*>(&code), 4);
    }
    const auto it = counts_.find(key);
    return it == counts_.end() ? 0 : it->second;
}

std::vector<std::pair<std::vector<std::uint32_t>, std::int64_t>>
TupleCounts::entries() const {
    std::vector<std::pair<std::vector<std::uint32_t>, std::int64_t>> out;
    out.reserve(counts_.size());
    for (const auto& [key, count] : counts_) {
        std::vector<std::uint32_t> codes(key.size() / 4);
        std::memcpy(codes.data(), key.data(), key.size());
        out.emplace_back(std::move(codes), count);
    }
    std::sort(out.begin(), out.end());
    return out;
}

// --------------------------------------------------------------------------
// detectors
// --------------------------------------------------------------------------

namespace {

ScoreVector make_result(const char* id, const Dataset& dataset,
                        const DetectorParams& params) {
    ScoreVector sv;
    sv.detector_id = id;
    sv.ids.assign(dataset.case_ids().begin(), dataset.case_ids().end());
    sv.scores.assign(dataset.n_cases(), 0.0);
    sv.flags.assign(dataset.n_cases(), false);
    sv.detail.assign(dataset.n_cases(), 0);
    sv.params_json = params.to_json();
    return sv;
}

void require_kind(const Dataset& dataset, AttributeKind kind, std::size_t least,
                  const char* who) {
    if (dataset.schema().count(kind) < least) {
        throw ValidationError(std::string(who) + ": needs at least " +
                              std::to_string(least) + " " +
                              std::string(to_string(kind)) + " attribute(s)");
    }
}

}  // namespace

ScoreVector detect_extreme_value(const Dataset& dataset,
                                 const DetectorParams& params) {
    params.validate();
    require_kind(dataset, AttributeKind::Continuous, 1, "extreme-value detector");
    if (dataset.n_cases() < 2) {
        throw ValidationError("extreme-value detector: needs at least 2 cases");
    }
    ScoreVector sv = make_result("type1", dataset, params);
    const auto dev = extreme_deviations(dataset, params);
    std::vector<std::vector<char>> rare;
    if (params.bin_rarity) rare = empty_bin_flags(dataset, params);
    for (std::size_t row = 0; row < dataset.n_cases(); ++row) {
        double best = 0.0;
        int hits = 0;
        for (std::size_t pos = 0; pos < dev.size(); ++pos) {
            double s = dev[pos][row];
            if (params.bin_rarity && rare[pos][row]) {
                s = std::max(s, params.k_extreme + 1.0);
            }
            best = std::max(best, s);
            if (s > params.k_extreme) ++hits;
        }
        sv.scores[row] = best;
        sv.flags[row] = best > params.k_extreme;
        sv.detail[row] = hits;
    }
    return sv;
}

ScoreVector detect_rare_class(const Dataset& dataset,
                              const DetectorParams& params) {
    params.validate();
    require_kind(dataset, AttributeKind::Categorical, 1, "rare-class detector");
    ScoreVector sv = make_result("type2", dataset, params);
    const auto cats = dataset.schema().indices_of(AttributeKind::Categorical);
    const MarginalStats stats = MarginalStats::compute(dataset);
    for (std::size_t row = 0; row < dataset.n_cases(); ++row) {
        double score = 0.0;
        int hits = 0;
        for (std::size_t a : cats) {
            const auto& ls = stats.categorical[a].of(dataset.categorical(a).code(row));
            score += -std::log(ls.freq);
            if (ls.freq <= params.tau_rare || ls.count <= params.c_rare) ++hits;
        }
        sv.scores[row] = score;
        sv.flags[row] = hits > 0;
        sv.detail[row] = hits;
    }
    return sv;
}

ScoreVector detect_simple_mixed(const Dataset& dataset,
                                const DetectorParams& params) {
    params.validate();
    require_kind(dataset, AttributeKind::Continuous, 1, "simple-mixed detector");
    require_kind(dataset, AttributeKind::Categorical, 1, "simple-mixed detector");
    const ScoreVector ev = detect_extreme_value(dataset, params);
    const ScoreVector rc = detect_rare_class(dataset, params);
    ScoreVector sv = make_result("type3", dataset, params);
    const double ev_max = *std::max_element(ev.scores.begin(), ev.scores.end());
    const double rc_max = *std::max_element(rc.scores.begin(), rc.scores.end());
    for (std::size_t row = 0; row < dataset.n_cases(); ++row) {
        const double a = ev_max > 0.0 ? ev.scores[row] / ev_max : 0.0;
        const double b = rc_max > 0.0 ? rc.scores[row] / rc_max : 0.0;
        sv.scores[row] = a + b;
        sv.flags[row] = ev.flags[row] && rc.flags[row];
        sv.detail[row] = ev.detail[row] + rc.detail[row];
    }
    return sv;
}

ScoreVector detect_multidim_numerical(const Dataset& dataset,
                                      const DetectorParams& params) {
    params.validate();
    require_kind(dataset, AttributeKind::Continuous, 2,
                 "multidimensional numerical detector");
    if (dataset.n_cases() <= static_cast<std::size_t>(params.k_nn)) {
        throw ParamError("multidimensional numerical detector: k_nn = " +
                         std::to_string(params.k_nn) + " requires more than " +
                         std::to_string(params.k_nn) + " cases, got " +
                         std::to_string(dataset.n_cases()));
    }
    ScoreVector sv = make_result("type4", dataset, params);
    const ContinuousSpace space(dataset, params.standardize, params.method);
    const NeighborInfo info = space.all_neighbors(params.k_nn);
    sv.scores = info.mean_dist;
    std::vector<double> sorted = sv.scores;
    std::sort(sorted.begin(), sorted.end());
    const double cut = empirical_quantile(sorted, 1.0 - params.density_quantile);
    for (std::size_t row = 0; row < dataset.n_cases(); ++row) {
        sv.flags[row] = sv.scores[row] > cut;
    }
    return sv;
}

ScoreVector detect_multidim_rare_class(const Dataset& dataset,
                                       const DetectorParams& params) {
    params.validate();
    require_kind(dataset, AttributeKind::Categorical, 2,
                 "multidimensional rare-class detector");
    const auto cats = dataset.schema().indices_of(AttributeKind::Categorical);
    if (params.combo_order > static_cast<int>(cats.size())) {
        throw ParamError("combo_order exceeds the number of categorical attributes");
    }
    ScoreVector sv = make_result("type5", dataset, params);
    const MarginalStats stats = MarginalStats::compute(dataset);
    const double n = static_cast<double>(dataset.n_cases());
    const auto subsets = attr_subsets(cats, 2, params.combo_order);
    std::vector<TupleCounts> counters;
    counters.reserve(subsets.size());
    for (const auto& s : subsets) counters.emplace_back(dataset, s);

    for (std::size_t row = 0; row < dataset.n_cases(); ++row) {
        double best = 0.0;
        int fired_size = 0;
        for (std::size_t si = 0; si < subsets.size(); ++si) {
            const std::int64_t joint = counters[si].count_of_row(row);
            best = std::max(best, -std::log(static_cast<double>(joint) / n));
            if (joint <= params.c_rare) {
                // A member that is itself rare (by frequency or count) makes
                // this a rare-class case, not a rare combination.
                bool marginals_common = true;
                for (std::size_t a : subsets[si]) {
                    const auto& ls =
                        stats.categorical[a].of(dataset.categorical(a).code(row));
                    if (ls.freq <= params.tau_rare || ls.count <= params.c_rare) {
                        marginals_common = false;
                        break;
                    }
                }
                if (marginals_common &&
                    (fired_size == 0 ||
                     static_cast<int>(subsets[si].size()) < fired_size)) {
                    fired_size = static_cast<int>(subsets[si].size());
                }
            }
        }
        sv.scores[row] = best;
        sv.flags[row] = fired_size > 0;
        sv.detail[row] = fired_size;
    }
    return sv;
}

ScoreVector detect_multidim_mixed(const Dataset& dataset,
                                  const DetectorParams& params) {
    params.validate();
    require_kind(dataset, AttributeKind::Continuous, 1, "multidim mixed detector");
    require_kind(dataset, AttributeKind::Categorical, 1, "multidim mixed detector");
    if (dataset.n_cases() <= static_cast<std::size_t>(params.k_nn)) {
        throw ParamError("multidim mixed detector: k_nn = " +
                         std::to_string(params.k_nn) + " requires more than " +
                         std::to_string(params.k_nn) + " cases");
    }
    ScoreVector sv = make_result("type6", dataset, params);
    const auto cats = dataset.schema().indices_of(AttributeKind::Categorical);
    const MarginalStats stats = MarginalStats::compute(dataset);
    const ContinuousSpace space(dataset, params.standardize, params.method);
    const NeighborInfo info = space.all_neighbors(params.k_nn);
    const double n = static_cast<double>(dataset.n_cases());
    const double k = static_cast<double>(params.k_nn);

    // Tuple subsets (ascending size) and their global counts, for second-
    // and higher-order checks.
    const auto subsets =
        cats.size() >= 2 ? attr_subsets(cats, 2, params.combo_order)
                         : std::vector<std::vector<std::size_t>>{};
    std::vector<TupleCounts> counters;
    counters.reserve(subsets.size());
    for (const auto& s : subsets) counters.emplace_back(dataset, s);

    for (std::size_t row = 0; row < dataset.n_cases(); ++row) {
        const auto& nbrs = info.neighbors[row];
        double best = 0.0;
        int fired_order = 0;

        // Order 1: a single class, globally common yet locally rare.
        for (std::size_t a : cats) {
            const auto& col = dataset.categorical(a);
            const std::uint32_t own = col.code(row);
            const double global = stats.categorical[a].of(own).freq;
            if (global < params.min_global_freq) continue;
            std::size_t hits = 0;
            for (std::uint32_t nb : nbrs) {
                if (col.code(nb) == own) ++hits;
            }
            const double local = static_cast<double>(hits) / k;
            best = std::max(best, std::max(0.0, global - local));
            if (local <= params.max_local_freq && fired_order == 0) fired_order = 1;
        }

        // Higher orders: a tuple of classes, common in the set, absent or
        // rare in their combination in this specific area.
        for (std::size_t si = 0; si < subsets.size(); ++si) {
            const auto& subset = subsets[si];
            const double global =
                static_cast<double>(counters[si].count_of_row(row)) / n;
            if (global < params.min_global_freq) continue;
            std::size_t local_hits = 0;
            for (std::uint32_t nb : nbrs) {
                bool same = true;
                for (std::size_t a : subset) {
                    if (dataset.categorical(a).code(nb) !=
                        dataset.categorical(a).code(row)) {
                        same = false;
                        break;
                    }
                }
                if (same) ++local_hits;
            }
            const double local = static_cast<double>(local_hits) / k;
            best = std::max(best, std::max(0.0, global - local));
            if (local <= params.max_local_freq && fired_order == 0) {
                fired_order = static_cast<int>(subset.size());
            }
        }

        sv.scores[row] = best;
        sv.flags[row] = fired_order > 0;
        sv.detail[row] = fired_order;
    }
    return sv;
}

// --------------------------------------------------------------------------
// registry
// --------------------------------------------------------------------------

namespace {

const std::vector<std::pair<std::string, DetectorFn>>& registry() {
    static const std::vector<std::pair<std::string, DetectorFn>> table = {
        {"type1", detect_extreme_value},
        {"type2", detect_rare_class},
        {"type3", detect_simple_mixed},
        {"type4", detect_multidim_numerical},
        {"type5", detect_multidim_rare_class},
        {"type6", detect_multidim_mixed},
    };
    return table;
}

}  // namespace

const std::vector<std::string>& registered_detectors() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& [name, fn] : registry()) out.push_back(name);
        return out;
    }();
    return names;
}

ScoreVector run_detector(const std::string& detector_id, const Dataset& dataset,
                         const DetectorParams& params) {
    for (const auto& [name, fn] : registry()) {
        if (name == detector_id) return fn(dataset, params);
    }
    std::string known;
    for (const auto& name : registered_detectors()) {
        if (!known.empty()) known += ", ";
        known += name;
    }
    throw ParamError("unknown detector id '" + detector_id +
                     "'; registered: " + known);
}

}  // namespace anobench

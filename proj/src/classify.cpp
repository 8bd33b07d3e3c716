#include "anobench/classify.hpp"

#include <algorithm>
#include <cmath>

namespace anobench {

struct ClassifyContext::Impl {
    const Dataset& dataset;
    ClassificationParams params;

    std::vector<std::size_t> cont_attrs;
    std::vector<std::size_t> cat_attrs;
    MarginalStats stats;

    std::vector<std::vector<double>> deviations;       // [cont pos][row]
    std::vector<std::vector<char>> bin_rare;           // optional

    bool knn_ready = false;                            // VI / IV machinery
    NeighborInfo neighbors;
    double density_cut = 0.0;

    std::vector<std::vector<std::size_t>> subsets;     // categorical tuples
    std::vector<TupleCounts> counters;

    Impl(const Dataset& d, const ClassificationParams& p)
        : dataset(d), params(p), stats(MarginalStats::compute(d)) {
        params.thresholds.validate();
        cont_attrs = d.schema().indices_of(AttributeKind::Continuous);
        cat_attrs = d.schema().indices_of(AttributeKind::Categorical);
        const auto& th = params.thresholds;

        if (!cont_attrs.empty() && d.n_cases() >= 2) {
            deviations = extreme_deviations(d, th);
            if (th.bin_rarity) bin_rare = empty_bin_flags(d, th);
        }
        if (!cont_attrs.empty() &&
            d.n_cases() > static_cast<std::size_t>(th.k_nn)) {
            const ContinuousSpace space(d, th.standardize, th.method);
            neighbors = space.all_neighbors(th.k_nn);
            std::vector<double> sorted = neighbors.mean_dist;
            std::sort(sorted.begin(), sorted.end());
            density_cut = empirical_quantile(sorted, 1.0 - th.density_quantile);
            knn_ready = true;
        }
        if (cat_attrs.size() >= 2) {
            const int hi = std::min<int>(th.combo_order,
                                         static_cast<int>(cat_attrs.size()));
            subsets = attr_subsets(cat_attrs, 2, hi);
            for (const auto& s : subsets) counters.emplace_back(d, s);
        }
    }

    std::string attr_name(std::size_t a) const {
        return dataset.schema().attributes[a].name;
    }

    // -- univariate checks ---------------------------------------------------

    bool univariate_continuous(std::size_t row, std::vector<EvidenceItem>& ev) const {
        const auto& th = params.thresholds;
        bool fired = false;
        for (std::size_t pos = 0; pos < deviations.size(); ++pos) {
            const double dev = deviations[pos][row];
            if (dev > th.k_extreme) {
                ev.push_back({{attr_name(cont_attrs[pos])}, "extreme_value", dev,
                              th.k_extreme});
                fired = true;
            } else if (!bin_rare.empty() && bin_rare[pos][row]) {
                // Score is the number of other cases sharing the bin.
                ev.push_back({{attr_name(cont_attrs[pos])}, "bin_rarity", 0.0, 0.0});
                fired = true;
            }
        }
        return fired;
    }

    bool univariate_categorical(std::size_t row, std::vector<EvidenceItem>& ev) const {
        const auto& th = params.thresholds;
        bool fired = false;
        for (std::size_t a : cat_attrs) {
            const auto& ls = stats.categorical[a].of(dataset.categorical(a).code(row));
            if (ls.freq <= th.tau_rare) {
                ev.push_back({{attr_name(a)}, "class_rarity", ls.freq, th.tau_rare});
                fired = true;
            } else if (ls.count <= th.c_rare) {
                ev.push_back({{attr_name(a)}, "class_rarity",
                              static_cast<double>(ls.count),
                              static_cast<double>(th.c_rare)});
                fired = true;
            }
        }
        return fired;
    }

    // -- multivariate checks -------------------------------------------------

    // Local class rarity across kinds; returns the smallest firing order.
    int local_class_rarity(std::size_t row, std::vector<EvidenceItem>& ev) const {
        if (!knn_ready || cat_attrs.empty()) return 0;
        const auto& th = params.thresholds;
        const auto& nbrs = neighbors.neighbors[row];
        const double k = static_cast<double>(th.k_nn);
        int fired = 0;

        for (std::size_t a : cat_attrs) {
            const auto& col = dataset.categorical(a);
            const std::uint32_t own = col.code(row);
            const double global = stats.categorical[a].of(own).freq;
            if (global < th.min_global_freq) continue;
            std::size_t hits = 0;
            for (std::uint32_t nb : nbrs) {
                if (col.code(nb) == own) ++hits;
            }
            const double local = static_cast<double>(hits) / k;
            if (local <= th.max_local_freq) {
                ev.push_back({{attr_name(a)}, "local_class_rarity", local,
                              th.max_local_freq});
                if (fired == 0) fired = 1;
            }
        }
        const double n = static_cast<double>(dataset.n_cases());
        for (std::size_t si = 0; si < subsets.size(); ++si) {
            const auto& subset = subsets[si];
            const double global =
                static_cast<double>(counters[si].count_of_row(row)) / n;
            if (global < th.min_global_freq) continue;
            std::size_t hits = 0;
            for (std::uint32_t nb : nbrs) {
                bool same = true;
                for (std::size_t a : subset) {
                    if (dataset.categorical(a).code(nb) !=
                        dataset.categorical(a).code(row)) {
                        same = false;
                        break;
                    }
                }
                if (same) ++hits;
            }
            const double local = static_cast<double>(hits) / k;
            if (local <= th.max_local_freq) {
                std::vector<std::string> names;
                for (std::size_t a : subset) names.push_back(attr_name(a));
                ev.push_back({names, "local_class_rarity", local, th.max_local_freq});
                if (fired == 0) fired = static_cast<int>(subset.size());
            }
        }
        return fired;
    }

    bool joint_density(std::size_t row, std::vector<EvidenceItem>& ev) const {
        if (!knn_ready || cont_attrs.size() < 2) return false;
        const double score = neighbors.mean_dist[row];
        if (score > density_cut) {
            std::vector<std::string> names;
            for (std::size_t a : cont_attrs) names.push_back(attr_name(a));
            ev.push_back({names, "joint_density", score, density_cut});
            return true;
        }
        return false;
    }

    bool joint_class_rarity(std::size_t row, std::vector<EvidenceItem>& ev) const {
        const auto& th = params.thresholds;
        bool fired = false;
        for (std::size_t si = 0; si < subsets.size(); ++si) {
            const std::int64_t joint = counters[si].count_of_row(row);
            if (joint > th.c_rare) continue;
            bool marginals_common = true;
            for (std::size_t a : subsets[si]) {
                const auto& ls =
                    stats.categorical[a].of(dataset.categorical(a).code(row));
                if (ls.freq <= th.tau_rare || ls.count <= th.c_rare) {
                    marginals_common = false;
                    break;
                }
            }
            if (!marginals_common) continue;
            std::vector<std::string> names;
            for (std::size_t a : subsets[si]) names.push_back(attr_name(a));
            ev.push_back({names, "joint_class_rarity", static_cast<double>(joint),
                          static_cast<double>(th.c_rare)});
            fired = true;
        }
        return fired;
    }

    TypeAttribution classify_row(std::size_t row) const {
        TypeAttribution out;
        out.case_id = dataset.case_id(row);

        std::vector<EvidenceItem> ev_cont, ev_cat;
        const bool cont_fired =
            !deviations.empty() && univariate_continuous(row, ev_cont);
        const bool cat_fired = univariate_categorical(row, ev_cat);

        std::vector<EvidenceItem> ev_vi, ev_iv, ev_v;
        int vi_order = 0;
        bool iv = false;
        bool v = false;
        if (!cont_fired && !cat_fired) {
            vi_order = local_class_rarity(row, ev_vi);
            iv = joint_density(row, ev_iv);
            v = joint_class_rarity(row, ev_v);
        }

        if (cont_fired && cat_fired) {
            out.primary = AnomalyType::SimpleMixed;
            out.evidence = std::move(ev_cont);
            out.evidence.insert(out.evidence.end(), ev_cat.begin(), ev_cat.end());
        } else if (cont_fired) {
            out.primary = AnomalyType::ExtremeValue;
            out.evidence = std::move(ev_cont);
        } else if (cat_fired) {
            out.primary = AnomalyType::RareClass;
            out.evidence = std::move(ev_cat);
        } else if (vi_order > 0) {
            out.primary = AnomalyType::MultidimMixed;
            out.order = vi_order;
            out.evidence = std::move(ev_vi);
        } else if (iv && v) {
            // Simultaneous numerical and categorical joint deviation:
            // mixed attribute involvement.
            out.primary = AnomalyType::MultidimMixed;
            out.order = 1;
            out.evidence = std::move(ev_iv);
            out.evidence.insert(out.evidence.end(), ev_v.begin(), ev_v.end());
        } else if (iv) {
            out.primary = AnomalyType::MultidimNumerical;
            out.evidence = std::move(ev_iv);
        } else if (v) {
            out.primary = AnomalyType::MultidimRareClass;
            out.evidence = std::move(ev_v);
        }

        if (params.multi_label) {
            if (cont_fired) out.all_types.push_back(AnomalyType::ExtremeValue);
            if (cat_fired) out.all_types.push_back(AnomalyType::RareClass);
            if (cont_fired && cat_fired) {
                out.all_types.push_back(AnomalyType::SimpleMixed);
            }
            if (iv) out.all_types.push_back(AnomalyType::MultidimNumerical);
            if (v) out.all_types.push_back(AnomalyType::MultidimRareClass);
            if (vi_order > 0 || (iv && v)) {
                out.all_types.push_back(AnomalyType::MultidimMixed);
            }
        }
        return out;
    }
};

ClassifyContext::ClassifyContext(const Dataset& dataset,
                                 const ClassificationParams& params)
    : impl_(std::make_unique<Impl>(dataset, params)) {}

ClassifyContext::~ClassifyContext() = default;

TypeAttribution ClassifyContext::classify(CaseId case_id) const {
    return impl_->classify_row(impl_->dataset.row_of(case_id));
}

TypeAttribution classify_case(const Dataset& dataset, CaseId case_id,
                              const ClassificationParams& params) {
    if (!dataset.has_case(case_id)) {
        throw ValidationError("unknown case id " + std::to_string(case_id));
    }
    ClassifyContext ctx(dataset, params);
    return ctx.classify(case_id);
}

std::vector<TypeAttribution> classify_all(const Dataset& dataset,
                                          const ClassificationParams& params) {
    ClassifyContext ctx(dataset, params);
    std::vector<TypeAttribution> out;
    out.reserve(dataset.n_cases());
    for (CaseId id : dataset.case_ids()) out.push_back(ctx.classify(id));
    return out;
}

}  // namespace anobench

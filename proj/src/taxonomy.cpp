#include "anobench/taxonomy.hpp"

#include <json.hpp>

namespace anobench {

std::string_view roman(AnomalyType t) {
    switch (t) {
        case AnomalyType::ExtremeValue: return "I";
        case AnomalyType::RareClass: return "II";
        case AnomalyType::SimpleMixed: return "III";
        case AnomalyType::MultidimNumerical: return "IV";
        case AnomalyType::MultidimRareClass: return "V";
        case AnomalyType::MultidimMixed: return "VI";
    }
    throw ParamError("invalid anomaly type");
}

AnomalyType anomaly_type_from_roman(std::string_view s) {
    for (AnomalyType t : kAllTypes) {
        if (roman(t) == s) return t;
    }
    throw ParseError("unknown anomaly type: '" + std::string(s) + "'");
}

std::string_view type_name(AnomalyType t) {
    switch (t) {
        case AnomalyType::ExtremeValue: return "extreme_value";
        case AnomalyType::RareClass: return "rare_class";
        case AnomalyType::SimpleMixed: return "simple_mixed";
        case AnomalyType::MultidimNumerical: return "multidim_numerical";
        case AnomalyType::MultidimRareClass: return "multidim_rare_class";
        case AnomalyType::MultidimMixed: return "multidim_mixed";
    }
    throw ParamError("invalid anomaly type");
}

TypeProperties type_properties(AnomalyType t) {
    TypeProperties p;
    switch (t) {
        case AnomalyType::ExtremeValue:
            p.uses_continuous = true;
            p.cardinality = Cardinality::Univariate;
            break;
        case AnomalyType::RareClass:
            p.uses_categorical = true;
            p.cardinality = Cardinality::Univariate;
            break;
        case AnomalyType::SimpleMixed:
            p.uses_continuous = p.uses_categorical = true;
            p.cardinality = Cardinality::Univariate;
            break;
        case AnomalyType::MultidimNumerical:
            p.uses_continuous = true;
            p.cardinality = Cardinality::Multivariate;
            break;
        case AnomalyType::MultidimRareClass:
            p.uses_categorical = true;
            p.cardinality = Cardinality::Multivariate;
            break;
        case AnomalyType::MultidimMixed:
            p.uses_continuous = p.uses_categorical = true;
            p.cardinality = Cardinality::Multivariate;
            break;
    }
    p.locality = p.cardinality == Cardinality::Univariate ? Locality::Global
                                                          : Locality::Local;
    return p;
}

Locality locality(AnomalyType t) { return type_properties(t).locality; }

const std::vector<std::string>& external_vocabulary(ExternalSource source) {
    static const std::vector<std::string> chandola = {"point", "contextual",
                                                      "collective"};
    static const std::vector<std::string> kaiser = {
        "additive", "transitory_change", "level_shift", "innovational",
        "deviant_cycle"};
    return source == ExternalSource::Chandola ? chandola : kaiser;
}

std::set<AnomalyType> map_external(const ExternalTypeLabel& label,
                                   const ExternalContext& context) {
    const auto& vocab = external_vocabulary(label.source);
    if (std::find(vocab.begin(), vocab.end(), label.label) == vocab.end()) {
        throw ParamError("label '" + label.label +
                         "' is not in the vocabulary of its source");
    }

    const std::set<AnomalyType> all(std::begin(kAllTypes), std::end(kAllTypes));

    if (label.source == ExternalSource::Chandola) {
        if (label.label == "point") return all;
        if (label.label == "contextual") {
            return {AnomalyType::MultidimNumerical,
                    AnomalyType::MultidimRareClass, AnomalyType::MultidimMixed};
        }
        // collective: a group of related cases; requires dependent data.
        if (!context.dependent_data) {
            throw ParamError("collective anomalies require dependent data");
        }
        return {AnomalyType::MultidimNumerical, AnomalyType::MultidimRareClass};
    }

    // Within-sequence time-series labels all presuppose dependent data.
    if (!context.dependent_data) {
        throw ParamError("label '" + label.label + "' requires dependent data");
    }
    if (label.label == "additive" || label.label == "transitory_change") {
        return context.globally_extreme
                   ? std::set<AnomalyType>{AnomalyType::ExtremeValue}
                   : std::set<AnomalyType>{AnomalyType::MultidimNumerical};
    }
    // level_shift, innovational, deviant_cycle: deviant only relative to the
    // local pattern over time.
    return {AnomalyType::MultidimNumerical};
}

std::string TypeAttribution::to_json() const {
    nlohmann::json j;
    j["case_id"] = case_id;
    j["type"] = primary ? std::string(roman(*primary)) : std::string("none");
    if (primary == AnomalyType::MultidimMixed) j["order"] = order;
    j["evidence"] = nlohmann::json::array();
    for (const auto& e : evidence) {
        j["evidence"].push_back({{"attributes", e.attributes},
                                 {"check", e.check},
                                 {"score", e.score},
                                 {"threshold", e.threshold}});
    }
    if (!all_types.empty()) {
        auto arr = nlohmann::json::array();
        for (AnomalyType t : all_types) arr.push_back(std::string(roman(t)));
        j["types"] = arr;
    }
    return j.dump();
}

}  // namespace anobench

#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "anobench/dataset.hpp"

namespace anobench {

// The six anomaly types, one per cell of the 3x2 grid spanned by the kind
// of data involved (continuous / categorical / mixed) and the cardinality
// of the relationship (univariate / multivariate):
//
//                  continuous        categorical         mixed
//   univariate     I ExtremeValue    II RareClass        III SimpleMixed
//   multivariate   IV MultidimNum.   V MultidimRareClass VI MultidimMixed
enum class AnomalyType {
    ExtremeValue = 1,       // I
    RareClass = 2,          // II
    SimpleMixed = 3,        // III
    MultidimNumerical = 4,  // IV
    MultidimRareClass = 5,  // V
    MultidimMixed = 6,      // VI
};

inline constexpr AnomalyType kAllTypes[] = {
    AnomalyType::ExtremeValue,      AnomalyType::RareClass,
    AnomalyType::SimpleMixed,       AnomalyType::MultidimNumerical,
    AnomalyType::MultidimRareClass, AnomalyType::MultidimMixed,
};

// Roman-numeral form used in every serialized artifact ("I".."VI").
std::string_view roman(AnomalyType t);
AnomalyType anomaly_type_from_roman(std::string_view s);
std::string_view type_name(AnomalyType t);

enum class Cardinality { Univariate, Multivariate };
enum class Locality { Global, Local };

struct TypeProperties {
    bool uses_continuous = false;
    bool uses_categorical = false;
    Cardinality cardinality = Cardinality::Univariate;
    Locality locality = Locality::Global;

    bool mixed() const { return uses_continuous && uses_categorical; }
};

// Total over all six variants.
TypeProperties type_properties(AnomalyType t);

// Univariate types are global (deviant regardless of the other attributes);
// multivariate types are situational and therefore local.
Locality locality(AnomalyType t);

// --------------------------------------------------------------------------
// Mapping of external typology labels onto the grid.
// --------------------------------------------------------------------------

enum class ExternalSource { Chandola, Kaiser };

struct ExternalTypeLabel {
    ExternalSource source;
    std::string label;
};

struct ExternalContext {
    bool globally_extreme = false;
    bool dependent_data = false;
};

// Closed vocabularies:
//   chandola: point | contextual | collective
//   kaiser:   additive | transitory_change | level_shift | innovational |
//             deviant_cycle
// Labels that describe within-sequence or collective behaviour require
// dependent data.
std::set<AnomalyType> map_external(const ExternalTypeLabel& label,
                                   const ExternalContext& context);

const std::vector<std::string>& external_vocabulary(ExternalSource source);

// --------------------------------------------------------------------------
// Attribution of a single case.
// --------------------------------------------------------------------------

struct EvidenceItem {
    std::vector<std::string> attributes;
    std::string check;
    double score = 0.0;
    double threshold = 0.0;
};

struct TypeAttribution {
    CaseId case_id = 0;
    std::optional<AnomalyType> primary;  // nullopt = not anomalous
    int order = 0;                       // set only for Type VI (>= 1)
    std::vector<EvidenceItem> evidence;
    std::vector<AnomalyType> all_types;  // populated in multi-label mode

    // {"case_id":..,"type":"I".."VI"|"none","order":..,"evidence":[...]}
    std::string to_json() const;
};

}  // namespace anobench

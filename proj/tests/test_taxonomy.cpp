#include <doctest.h>

#include <set>

#include "anobench/taxonomy.hpp"

using namespace anobench;

TEST_CASE("the six types exhaust the 3x2 grid") {
    std::set<std::tuple<bool, bool, Cardinality>> cells;
    for (AnomalyType t : kAllTypes) {
        const TypeProperties p = type_properties(t);
        cells.insert({p.uses_continuous, p.uses_categorical, p.cardinality});
        CHECK((p.uses_continuous || p.uses_categorical));
    }
    CHECK(cells.size() == 6);
}

TEST_CASE("grid cells match the typology") {
    const auto p1 = type_properties(AnomalyType::ExtremeValue);
    CHECK(p1.uses_continuous);
    CHECK(!p1.uses_categorical);
    CHECK(p1.cardinality == Cardinality::Univariate);
    CHECK(p1.locality == Locality::Global);

    const auto p2 = type_properties(AnomalyType::RareClass);
    CHECK(!p2.uses_continuous);
    CHECK(p2.uses_categorical);
    CHECK(p2.cardinality == Cardinality::Univariate);

    const auto p6 = type_properties(AnomalyType::MultidimMixed);
    CHECK(p6.uses_continuous);
    CHECK(p6.uses_categorical);
    CHECK(p6.cardinality == Cardinality::Multivariate);
    CHECK(p6.locality == Locality::Local);
}

TEST_CASE("locality follows cardinality for every type") {
    for (AnomalyType t : kAllTypes) {
        const TypeProperties p = type_properties(t);
        CHECK((locality(t) == Locality::Global) ==
              (p.cardinality == Cardinality::Univariate));
    }
    CHECK(locality(AnomalyType::SimpleMixed) == Locality::Global);
    CHECK(locality(AnomalyType::MultidimNumerical) == Locality::Local);
    CHECK(locality(AnomalyType::MultidimRareClass) == Locality::Local);
}

TEST_CASE("roman numeral serialization") {
    CHECK(roman(AnomalyType::ExtremeValue) == "I");
    CHECK(roman(AnomalyType::MultidimMixed) == "VI");
    for (AnomalyType t : kAllTypes) {
        CHECK(anomaly_type_from_roman(roman(t)) == t);
    }
    CHECK_THROWS_AS(anomaly_type_from_roman("VII"), ParseError);
}

TEST_CASE("external mapping: point anomalies cover all six types") {
    const auto types = map_external({ExternalSource::Chandola, "point"}, {});
    CHECK(types.size() == 6);
}

TEST_CASE("external mapping: contextual covers the multivariate column") {
    const auto types = map_external({ExternalSource::Chandola, "contextual"}, {});
    CHECK(types == std::set<AnomalyType>{AnomalyType::MultidimNumerical,
                                         AnomalyType::MultidimRareClass,
                                         AnomalyType::MultidimMixed});
}

TEST_CASE("external mapping: collective requires dependent data") {
    CHECK_THROWS_AS(
        map_external({ExternalSource::Chandola, "collective"}, {false, false}),
        ParamError);
    const auto types = map_external({ExternalSource::Chandola, "collective"},
                                    {false, true});
    CHECK(types == std::set<AnomalyType>{AnomalyType::MultidimNumerical,
                                         AnomalyType::MultidimRareClass});
}

TEST_CASE("external mapping: additive splits on global extremeness") {
    const ExternalTypeLabel additive{ExternalSource::Kaiser, "additive"};
    CHECK(map_external(additive, {true, true}) ==
          std::set<AnomalyType>{AnomalyType::ExtremeValue});
    CHECK(map_external(additive, {false, true}) ==
          std::set<AnomalyType>{AnomalyType::MultidimNumerical});
    CHECK(map_external({ExternalSource::Kaiser, "transitory_change"}, {true, true}) ==
          std::set<AnomalyType>{AnomalyType::ExtremeValue});
    CHECK(map_external({ExternalSource::Kaiser, "level_shift"}, {true, true}) ==
          std::set<AnomalyType>{AnomalyType::MultidimNumerical});
    CHECK(map_external({ExternalSource::Kaiser, "innovational"}, {false, true}) ==
          std::set<AnomalyType>{AnomalyType::MultidimNumerical});
    CHECK(map_external({ExternalSource::Kaiser, "deviant_cycle"}, {false, true}) ==
          std::set<AnomalyType>{AnomalyType::MultidimNumerical});
}

TEST_CASE("external mapping: closed vocabularies") {
    CHECK_THROWS_AS(map_external({ExternalSource::Chandola, "additive"}, {}),
                    ParamError);
    CHECK_THROWS_AS(map_external({ExternalSource::Kaiser, "point"}, {true, true}),
                    ParamError);
    CHECK_THROWS_AS(map_external({ExternalSource::Kaiser, "additive"}, {true, false}),
                    ParamError);
}

TEST_CASE("attribution json shape") {
    TypeAttribution a;
    a.case_id = 7;
    a.primary = AnomalyType::MultidimMixed;
    a.order = 2;
    a.evidence.push_back({{"color"}, "local_class_rarity", 0.0, 0.1});
    const std::string j = a.to_json();
    CHECK(j.find("\"case_id\":7") != std::string::npos);
    CHECK(j.find("\"type\":\"VI\"") != std::string::npos);
    CHECK(j.find("\"order\":2") != std::string::npos);
    CHECK(j.find("local_class_rarity") != std::string::npos);

    TypeAttribution none;
    none.case_id = 3;
    CHECK(none.to_json().find("\"type\":\"none\"") != std::string::npos);
    CHECK(none.to_json().find("order") == std::string::npos);
}

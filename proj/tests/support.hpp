#pragma once

// Shared helpers for building small datasets in tests.

#include <string>
#include <utility>
#include <vector>

#include "anobench/dataset.hpp"

namespace anobench::testing {

using ContCol = std::pair<std::string, std::vector<double>>;
using CatCol = std::pair<std::string, std::vector<std::string>>;

inline Dataset make_dataset(const std::vector<ContCol>& cont,
                            const std::vector<CatCol>& cats) {
    Schema schema;
    std::size_t n = 0;
    for (const auto& [name, values] : cont) {
        schema.attributes.push_back({name, AttributeKind::Continuous});
        n = values.size();
    }
    for (const auto& [name, values] : cats) {
        schema.attributes.push_back({name, AttributeKind::Categorical});
        n = values.size();
    }
    Dataset dataset(schema);
    for (std::size_t row = 0; row < n; ++row) {
        std::vector<Value> vals;
        for (const auto& [name, values] : cont) vals.emplace_back(values[row]);
        for (const auto& [name, values] : cats) vals.emplace_back(values[row]);
        dataset.append_row(vals);
    }
    return dataset;
}

inline Dataset make_continuous(const std::string& name,
                               const std::vector<double>& values) {
    return make_dataset({{name, values}}, {});
}

}  // namespace anobench::testing

#include "anobench/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace anobench {

std::string_view to_string(AttributeKind kind) {
    return kind == AttributeKind::Continuous ? "continuous" : "categorical";
}

AttributeKind attribute_kind_from_string(std::string_view s) {
    if (s == "continuous") return AttributeKind::Continuous;
    if (s == "categorical") return AttributeKind::Categorical;
    throw ParseError("unknown attribute kind: '" + std::string(s) + "'");
}

bool operator==(const Attribute& a, const Attribute& b) {
    return a.name == b.name && a.kind == b.kind;
}

void Schema::validate() const {
    std::unordered_set<std::string_view> seen;
    for (const auto& attr : attributes) {
        if (attr.name.empty()) throw ValidationError("schema: empty attribute name");
        if (!seen.insert(attr.name).second) {
            throw ValidationError("schema: duplicate attribute name '" + attr.name + "'");
        }
    }
    if (dependency && !find(*dependency)) {
        throw ValidationError("schema: dependency attribute '" + *dependency +
                              "' is not in the attribute list");
    }
}

std::size_t Schema::index_of(std::string_view name) const {
    if (auto idx = find(name)) return *idx;
    throw ValidationError("schema: no attribute named '" + std::string(name) + "'");
}

std::optional<std::size_t> Schema::find(std::string_view name) const {
    for (std::size_t i = 0; i < attributes.size(); ++i) {
        if (attributes[i].name == name) return i;
    }
    return std::nullopt;
}

std::size_t Schema::count(AttributeKind kind) const {
    return static_cast<std::size_t>(
        std::count_if(attributes.begin(), attributes.end(),
                      [&](const Attribute& a) { return a.kind == kind; }));
}

std::vector<std::size_t> Schema::indices_of(AttributeKind kind) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < attributes.size(); ++i) {
        if (attributes[i].kind == kind) out.push_back(i);
    }
    return out;
}

std::uint32_t CategoricalColumn::encode(std::string_view label) {
    if (auto it = index_.find(std::string(label)); it != index_.end()) {
        return it->second;
    }
    const auto code = static_cast<std::uint32_t>(labels_.size());
    labels_.emplace_back(label);
    index_.emplace(labels_.back(), code);
    return code;
}

std::optional<std::uint32_t> CategoricalColumn::code_of(std::string_view label) const {
    if (auto it = index_.find(std::string(label)); it != index_.end()) {
        return it->second;
    }
    return std::nullopt;
}

void CategoricalColumn::push_back_code(std::uint32_t code) {
    if (code >= labels_.size()) {
        throw ValidationError("categorical code out of range");
    }
    codes_.push_back(code);
}

Dataset::Dataset(Schema schema) : schema_(std::move(schema)) {
    schema_.validate();
    columns_.resize(schema_.attributes.size());
}

std::span<const double> Dataset::continuous(std::size_t attr) const {
    if (schema_.attributes.at(attr).kind != AttributeKind::Continuous) {
        throw ValidationError("attribute '" + schema_.attributes[attr].name +
                              "' is not continuous");
    }
    return columns_[attr].reals;
}

const CategoricalColumn& Dataset::categorical(std::size_t attr) const {
    if (schema_.attributes.at(attr).kind != AttributeKind::Categorical) {
        throw ValidationError("attribute '" + schema_.attributes[attr].name +
                              "' is not categorical");
    }
    return columns_[attr].cats;
}

CategoricalColumn& Dataset::categorical_mut(std::size_t attr) {
    if (schema_.attributes.at(attr).kind != AttributeKind::Categorical) {
        throw ValidationError("attribute '" + schema_.attributes[attr].name +
                              "' is not categorical");
    }
    return columns_[attr].cats;
}

std::size_t Dataset::row_of(CaseId id) const {
    if (auto it = row_index_.find(id); it != row_index_.end()) return it->second;
    throw ValidationError("unknown case id " + std::to_string(id));
}

Value Dataset::value(std::size_t row, std::size_t attr) const {
    if (schema_.attributes.at(attr).kind == AttributeKind::Continuous) {
        return columns_[attr].reals.at(row);
    }
    return std::string(columns_[attr].cats.label(row));
}

void Dataset::set_continuous(std::size_t row, std::size_t attr, double v) {
    if (!std::isfinite(v)) throw ValidationError("non-finite continuous value");
    if (schema_.attributes.at(attr).kind != AttributeKind::Continuous) {
        throw ValidationError("attribute is not continuous");
    }
    columns_[attr].reals.at(row) = v;
}

CaseId Dataset::append_row(const std::vector<Value>& row) {
    const CaseId id = next_id_;
    append_row_with_id(id, row);
    return id;
}

void Dataset::append_row_with_id(CaseId id, const std::vector<Value>& row) {
    if (row.size() != schema_.attributes.size()) {
        throw ValidationError("row length " + std::to_string(row.size()) +
                              " does not match schema length " +
                              std::to_string(schema_.attributes.size()));
    }
    if (row_index_.count(id)) {
        throw ValidationError("duplicate case id " + std::to_string(id));
    }
    for (std::size_t a = 0; a < row.size(); ++a) {
        const bool want_cont =
            schema_.attributes[a].kind == AttributeKind::Continuous;
        if (want_cont) {
            const double* v = std::get_if<double>(&row[a]);
            if (!v) {
                throw ValidationError("attribute '" + schema_.attributes[a].name +
                                      "': expected a continuous value");
            }
            if (!std::isfinite(*v)) {
                throw ValidationError("attribute '" + schema_.attributes[a].name +
                                      "': non-finite continuous value");
            }
        } else if (!std::holds_alternative<std::string>(row[a])) {
            throw ValidationError("attribute '" + schema_.attributes[a].name +
                                  "': expected a categorical value");
        }
    }
    // All cells checked; mutate.
    for (std::size_t a = 0; a < row.size(); ++a) {
        if (schema_.attributes[a].kind == AttributeKind::Continuous) {
            columns_[a].reals.push_back(std::get<double>(row[a]));
        } else {
            columns_[a].cats.push_back(std::get<std::string>(row[a]));
        }
    }
    row_index_.emplace(id, ids_.size());
    ids_.push_back(id);
    next_id_ = std::max(next_id_, id + 1);
}

Dataset Dataset::reordered(std::span<const std::size_t> new_order) const {
    if (new_order.size() != n_cases()) {
        throw ValidationError("reorder: permutation size mismatch");
    }
    Dataset out(schema_);
    for (std::size_t pos = 0; pos < new_order.size(); ++pos) {
        const std::size_t row = new_order[pos];
        std::vector<Value> vals;
        vals.reserve(n_attributes());
        for (std::size_t a = 0; a < n_attributes(); ++a) vals.push_back(value(row, a));
        out.append_row_with_id(ids_.at(row), vals);
    }
    return out;
}

void Dataset::validate() const {
    schema_.validate();
    for (std::size_t a = 0; a < columns_.size(); ++a) {
        const std::size_t len =
            schema_.attributes[a].kind == AttributeKind::Continuous
                ? columns_[a].reals.size()
                : columns_[a].cats.size();
        if (len != ids_.size()) {
            throw ValidationError("column '" + schema_.attributes[a].name +
                                  "' is not rectangular");
        }
        if (schema_.attributes[a].kind == AttributeKind::Continuous) {
            for (double v : columns_[a].reals) {
                if (!std::isfinite(v)) {
                    throw ValidationError("non-finite value in column '" +
                                          schema_.attributes[a].name + "'");
                }
            }
        }
    }
    std::unordered_set<CaseId> seen(ids_.begin(), ids_.end());
    if (seen.size() != ids_.size()) {
        throw ValidationError("case ids are not unique");
    }
}

}  // namespace anobench

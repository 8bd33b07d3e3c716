#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "anobench/error.hpp"

namespace anobench {

using CaseId = std::int64_t;

enum class AttributeKind { Continuous, Categorical };

std::string_view to_string(AttributeKind kind);
AttributeKind attribute_kind_from_string(std::string_view s);

struct Attribute {
    std::string name;
    AttributeKind kind;
};

// Ordered attribute list plus an optional dependency attribute that links
// rows (time, space or identity). Attribute names are unique and non-empty.
struct Schema {
    std::vector<Attribute> attributes;
    std::optional<std::string> dependency;

    void validate() const;
    std::size_t index_of(std::string_view name) const;
    std::optional<std::size_t> find(std::string_view name) const;
    std::size_t count(AttributeKind kind) const;
    std::vector<std::size_t> indices_of(AttributeKind kind) const;
    bool operator==(const Schema&) const = default;
};

bool operator==(const Attribute&, const Attribute&);

// Dictionary-encoded categorical column: per-row codes into a label table.
class CategoricalColumn {
public:
    std::uint32_t encode(std::string_view label);
    std::optional<std::uint32_t> code_of(std::string_view label) const;
    std::string_view label(std::size_t row) const { return labels_[codes_[row]]; }
    std::uint32_t code(std::size_t row) const { return codes_[row]; }
    std::size_t size() const { return codes_.size(); }
    std::size_t label_count() const { return labels_.size(); }
    std::string_view label_of_code(std::uint32_t code) const { return labels_[code]; }
    std::span<const std::uint32_t> codes() const { return codes_; }
    void push_back(std::string_view label) { codes_.push_back(encode(label)); }
    void push_back_code(std::uint32_t code);

private:
    std::vector<std::uint32_t> codes_;
    std::vector<std::string> labels_;
    std::unordered_map<std::string, std::uint32_t> index_;
};

using Value = std::variant<double, std::string>;

// Rectangular, immutable-after-build collection of cases. Continuous cells
// are finite doubles, categorical cells are labels from a finite set. Every
// row carries a stable case id; all downstream outputs reference ids, never
// row positions.
class Dataset {
public:
    Dataset() = default;
    explicit Dataset(Schema schema);

    const Schema& schema() const { return schema_; }
    std::size_t n_cases() const { return ids_.size(); }
    std::size_t n_attributes() const { return schema_.attributes.size(); }

    std::span<const double> continuous(std::size_t attr) const;
    const CategoricalColumn& categorical(std::size_t attr) const;
    CategoricalColumn& categorical_mut(std::size_t attr);

    CaseId case_id(std::size_t row) const { return ids_[row]; }
    std::span<const CaseId> case_ids() const { return ids_; }
    std::size_t row_of(CaseId id) const;
    bool has_case(CaseId id) const { return row_index_.count(id) != 0; }

    Value value(std::size_t row, std::size_t attr) const;
    void set_continuous(std::size_t row, std::size_t attr, double v);

    // Appends a row and assigns the next free case id (max existing + 1).
    CaseId append_row(const std::vector<Value>& row);
    void append_row_with_id(CaseId id, const std::vector<Value>& row);

    // Returns a dataset with rows in the given order (a permutation of
    // 0..n-1); case ids travel with their rows.
    Dataset reordered(std::span<const std::size_t> new_order) const;

    void validate() const;

private:
    struct Column {
        std::vector<double> reals;    // continuous attributes
        CategoricalColumn cats;       // categorical attributes
    };

    Schema schema_;
    std::vector<Column> columns_;
    std::vector<CaseId> ids_;
    std::unordered_map<CaseId, std::size_t> row_index_;
    CaseId next_id_ = 0;
};

}  // namespace anobench

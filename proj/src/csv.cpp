#include "anobench/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace anobench {

namespace {

using nlohmann::json;

// Splits one physical CSV record into fields, honouring RFC 4180 quoting.
// `line` must already contain the full record (no embedded newlines are
// produced by this toolkit's writers).
std::vector<std::string> split_record(const std::string& line, std::size_t row) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    std::size_t i = 0;
    while (i < line.size()) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"') {
            if (!field.empty()) {
                throw ParseError("row " + std::to_string(row) +
                                 ": stray quote inside unquoted field");
            }
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field.push_back(c);
        }
        ++i;
    }
    if (quoted) {
        throw ParseError("row " + std::to_string(row) + ": unterminated quote");
    }
    fields.push_back(std::move(field));
    return fields;
}

double parse_continuous(const std::string& token, std::size_t row,
                        const std::string& column) {
    const auto fail = [&](const char* why) -> ParseError {
        return ParseError("row " + std::to_string(row) + ", column '" + column +
                          "': " + why + " ('" + token + "')");
    };
    if (token.empty()) throw fail("missing value");
    double v = 0.0;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last) {
        throw fail("non-numeric token in continuous column");
    }
    if (!std::isfinite(v)) throw fail("non-finite value");
    return v;
}

bool needs_quoting(std::string_view s) {
    return s.find_first_of(",\"\n\r") != std::string_view::npos;
}

void write_field(std::ostream& out, std::string_view s) {
    if (!needs_quoting(s)) {
        out << s;
        return;
    }
    out << '"';
    for (char c : s) {
        if (c == '"') out << "\"\"";
        else out << c;
    }
    out << '"';
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

Dataset load_dataset(std::istream& source, const Schema& schema) {
    schema.validate();
    std::string line;
    if (!std::getline(source, line)) {
        throw ParseError("empty input: missing header row");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split_record(line, 0);
    if (header.size() != schema.attributes.size()) {
        throw ParseError("header has " + std::to_string(header.size()) +
                         " columns, schema expects " +
                         std::to_string(schema.attributes.size()));
    }
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] != schema.attributes[i].name) {
            throw ParseError("header column " + std::to_string(i + 1) + " is '" +
                             header[i] + "', schema expects '" +
                             schema.attributes[i].name + "'");
        }
    }

    Dataset dataset(schema);
    std::size_t row = 0;
    while (std::getline(source, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() && source.peek() == std::char_traits<char>::eof()) break;
        ++row;
        const auto fields = split_record(line, row);
        if (fields.size() != schema.attributes.size()) {
            throw ParseError("row " + std::to_string(row) + " has " +
                             std::to_string(fields.size()) +
                             " fields, expected " +
                             std::to_string(schema.attributes.size()));
        }
        std::vector<Value> values;
        values.reserve(fields.size());
        for (std::size_t a = 0; a < fields.size(); ++a) {
            const auto& attr = schema.attributes[a];
            if (attr.kind == AttributeKind::Continuous) {
                values.emplace_back(parse_continuous(fields[a], row, attr.name));
            } else {
                if (fields[a].empty()) {
                    throw ParseError("row " + std::to_string(row) + ", column '" +
                                     attr.name + "': missing value");
                }
                values.emplace_back(fields[a]);
            }
        }
        dataset.append_row(values);
    }
    return dataset;
}

Dataset load_dataset_file(const std::string& path, const Schema& schema) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open dataset file: " + path);
    return load_dataset(in, schema);
}

void write_dataset(std::ostream& out, const Dataset& dataset) {
    const auto& attrs = dataset.schema().attributes;
    for (std::size_t a = 0; a < attrs.size(); ++a) {
        if (a) out << ',';
        write_field(out, attrs[a].name);
    }
    out << '\n';
    for (std::size_t row = 0; row < dataset.n_cases(); ++row) {
        for (std::size_t a = 0; a < attrs.size(); ++a) {
            if (a) out << ',';
            if (attrs[a].kind == AttributeKind::Continuous) {
                out << format_double(dataset.continuous(a)[row]);
            } else {
                write_field(out, dataset.categorical(a).label(row));
            }
        }
        out << '\n';
    }
}

void write_dataset_file(const std::string& path, const Dataset& dataset) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open output file: " + path);
    write_dataset(out, dataset);
}

Schema schema_from_json(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("schema json: ") + e.what());
    }
    Schema schema;
    if (!j.contains("attributes") || !j["attributes"].is_array()) {
        throw ParseError("schema json: missing 'attributes' array");
    }
    for (const auto& a : j["attributes"]) {
        schema.attributes.push_back(
            {a.at("name").get<std::string>(),
             attribute_kind_from_string(a.at("kind").get<std::string>())});
    }
    if (j.contains("dependency") && !j["dependency"].is_null()) {
        schema.dependency = j["dependency"].get<std::string>();
    }
    schema.validate();
    return schema;
}

std::string schema_to_json(const Schema& schema) {
    json j;
    j["attributes"] = json::array();
    for (const auto& a : schema.attributes) {
        j["attributes"].push_back(
            {{"name", a.name}, {"kind", std::string(to_string(a.kind))}});
    }
    j["dependency"] = schema.dependency ? json(*schema.dependency) : json(nullptr);
    return j.dump(2) + "\n";
}

Schema load_schema_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open schema file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return schema_from_json(buf.str());
}

void write_schema_file(const std::string& path, const Schema& schema) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open output file: " + path);
    out << schema_to_json(schema);
}

}  // namespace anobench

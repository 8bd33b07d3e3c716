#pragma once

// CSV and schema-sidecar I/O.
//
// Data files are UTF-8, comma-separated, first row a header matching the
// schema attribute names. Continuous values accept decimal or scientific
// notation. Fields containing commas, quotes or newlines are quoted in
// RFC 4180 style. Doubles are written as the shortest string that parses
// back to the same bits, so a load -> serialize -> load round trip is exact
// and the output is byte-stable.
//
// The schema sidecar is a JSON object:
//   {"attributes":[{"name":...,"kind":"continuous"|"categorical"}],
//    "dependency": name | null}

#include <iosfwd>
#include <string>

#include "anobench/dataset.hpp"

namespace anobench {

// Parse errors report 1-based data row numbers and the column name.
Dataset load_dataset(std::istream& source, const Schema& schema);
Dataset load_dataset_file(const std::string& path, const Schema& schema);

void write_dataset(std::ostream& out, const Dataset& dataset);
void write_dataset_file(const std::string& path, const Dataset& dataset);

Schema schema_from_json(const std::string& json_text);
std::string schema_to_json(const Schema& schema);
Schema load_schema_file(const std::string& path);
void write_schema_file(const std::string& path, const Schema& schema);

// Shortest round-trip representation of a double (std::to_chars).
std::string format_double(double v);

}  // namespace anobench

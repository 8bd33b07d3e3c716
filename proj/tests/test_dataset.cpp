#include <doctest.h>

#include <limits>
#include <sstream>

#include "anobench/csv.hpp"
#include "anobench/dataset.hpp"
#include "support.hpp"

using namespace anobench;

namespace {

Schema xy_color_schema() {
    Schema schema;
    schema.attributes = {{"x", AttributeKind::Continuous},
                         {"color", AttributeKind::Categorical}};
    return schema;
}

}  // namespace

TEST_CASE("schema validation") {
    Schema schema = xy_color_schema();
    schema.validate();
    schema.dependency = "x";
    schema.validate();
    schema.dependency = "missing";
    CHECK_THROWS_AS(schema.validate(), ValidationError);
    schema.dependency.reset();
    schema.attributes.push_back({"x", AttributeKind::Categorical});
    CHECK_THROWS_AS(schema.validate(), ValidationError);
}

TEST_CASE("load_dataset: minimal well-formed input") {
    std::istringstream in("x,color\n1.0,red\n2.0,blue\n");
    const Dataset d = load_dataset(in, xy_color_schema());
    REQUIRE(d.n_cases() == 2);
    CHECK(d.continuous(0)[0] == 1.0);
    CHECK(d.continuous(0)[1] == 2.0);
    CHECK(d.categorical(1).label(0) == "red");
    CHECK(d.case_id(0) == 0);
    CHECK(d.case_id(1) == 1);
}

TEST_CASE("load_dataset: non-numeric token names row and column") {
    std::istringstream in("x,color\nabc,red\n");
    try {
        load_dataset(in, xy_color_schema());
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("row 1") != std::string::npos);
        CHECK(msg.find("'x'") != std::string::npos);
    }
}

TEST_CASE("load_dataset: empty body is a valid empty dataset") {
    std::istringstream in("x,color\n");
    const Dataset d = load_dataset(in, xy_color_schema());
    CHECK(d.n_cases() == 0);
}

TEST_CASE("load_dataset: ragged and missing cells rejected") {
    {
        std::istringstream in("x,color\n1.0\n");
        CHECK_THROWS_AS(load_dataset(in, xy_color_schema()), ParseError);
    }
    {
        std::istringstream in("x,color\n1.0,red,extra\n");
        CHECK_THROWS_AS(load_dataset(in, xy_color_schema()), ParseError);
    }
    {
        std::istringstream in("x,color\n,red\n");
        CHECK_THROWS_AS(load_dataset(in, xy_color_schema()), ParseError);
    }
    {
        std::istringstream in("x,color\nnan,red\n");
        CHECK_THROWS_AS(load_dataset(in, xy_color_schema()), ParseError);
    }
    {
        std::istringstream in("y,color\n1.0,red\n");
        CHECK_THROWS_AS(load_dataset(in, xy_color_schema()), ParseError);
    }
}

TEST_CASE("round trip is exact for labels and value bits") {
    using namespace anobench::testing;
    const Dataset d = make_dataset(
        {{"x", {0.1, 1e-17, -3.5e12, 2.0 / 3.0}}},
        {{"c", {"a,b", "quo\"te", "plain", "sp ace"}}});
    std::ostringstream out;
    write_dataset(out, d);
    std::istringstream in(out.str());
    const Dataset back = load_dataset(in, d.schema());
    REQUIRE(back.n_cases() == d.n_cases());
    for (std::size_t row = 0; row < d.n_cases(); ++row) {
        CHECK(back.continuous(0)[row] == d.continuous(0)[row]);
        CHECK(back.categorical(1).label(row) == d.categorical(1).label(row));
    }
    // Byte-stable serialization.
    std::ostringstream again;
    write_dataset(again, back);
    CHECK(again.str() == out.str());
}

TEST_CASE("schema json sidecar round trip") {
    Schema schema = xy_color_schema();
    schema.dependency = "x";
    const Schema back = schema_from_json(schema_to_json(schema));
    CHECK(back == schema);
    CHECK_THROWS_AS(schema_from_json("{"), ParseError);
    CHECK_THROWS_AS(schema_from_json("{\"attributes\":[{\"name\":\"a\",\"kind\":\"weird\"}]}"),
                    ParseError);
}

TEST_CASE("case ids stay with rows under reordering") {
    using namespace anobench::testing;
    const Dataset d =
        make_dataset({{"x", {10.0, 20.0, 30.0}}}, {{"c", {"a", "b", "c"}}});
    const std::vector<std::size_t> order = {2, 0, 1};
    const Dataset r = d.reordered(order);
    CHECK(r.case_id(0) == 2);
    CHECK(r.continuous(0)[0] == 30.0);
    CHECK(r.row_of(0) == 1);
    CHECK_THROWS_AS(r.row_of(99), ValidationError);
}

TEST_CASE("append validates kinds and finiteness") {
    Dataset d(xy_color_schema());
    CHECK_THROWS_AS(d.append_row({Value{1.0}}), ValidationError);
    CHECK_THROWS_AS(d.append_row({Value{std::string("oops")}, Value{std::string("red")}}),
                    ValidationError);
    CHECK_THROWS_AS(
        d.append_row({Value{std::numeric_limits<double>::infinity()},
                      Value{std::string("red")}}),
        ValidationError);
    d.append_row({Value{1.5}, Value{std::string("red")}});
    CHECK(d.n_cases() == 1);
}

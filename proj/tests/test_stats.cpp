#include <doctest.h>

#include <algorithm>

#include "anobench/rng.hpp"
#include "anobench/stats.hpp"
#include "support.hpp"

using namespace anobench;
using namespace anobench::testing;

TEST_CASE("marginal stats on the masking column [1,2,3,4,100]") {
    const Dataset d = make_continuous("x", {1, 2, 3, 4, 100});
    const MarginalStats stats = MarginalStats::compute(d);
    const auto& st = stats.continuous[0];
    CHECK(st.mean == doctest::Approx(22.0));
    CHECK(st.median == doctest::Approx(3.0));
    // Deviations from the median are {2,1,0,1,97}: raw MAD 1.
    CHECK(st.mad == doctest::Approx(1.4826));
    // Population divisor: sqrt(7610/5).
    CHECK(st.sd == doctest::Approx(39.01281840626232).epsilon(1e-12));
    CHECK(st.min == 1.0);
    CHECK(st.max == 100.0);
}

TEST_CASE("constant column: scale zero, not an error") {
    const Dataset d = make_continuous("x", {5, 5, 5});
    const auto& st = MarginalStats::compute(d).continuous[0];
    CHECK(st.mean == 5.0);
    CHECK(st.sd == 0.0);
    CHECK(st.mad == 0.0);
}

TEST_CASE("empty dataset: degenerate but valid stats") {
    const Dataset d = make_continuous("x", {});
    const auto& st = MarginalStats::compute(d).continuous[0];
    CHECK(st.sd == 0.0);
    CHECK(st.mad == 0.0);
}

TEST_CASE("categorical frequencies: 7 red, 1 blue") {
    const Dataset d = make_dataset(
        {}, {{"color", {"red", "red", "red", "blue", "red", "red", "red", "red"}}});
    const MarginalStats stats = MarginalStats::compute(d);
    const auto& col = d.categorical(0);
    const auto blue = *col.code_of("blue");
    const auto red = *col.code_of("red");
    CHECK(stats.categorical[0].of(blue).count == 1);
    CHECK(stats.categorical[0].of(blue).freq == doctest::Approx(0.125));
    CHECK(stats.categorical[0].of(red).freq == doctest::Approx(0.875));
    double total = 0.0;
    for (const auto& ls : stats.categorical[0].by_code) total += ls.freq;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("standardize: zscore uses the population divisor") {
    const Dataset d = make_continuous("x", {0, 10});
    const Dataset z = standardize(d, ScaleMethod::Sd);
    CHECK(z.continuous(0)[0] == doctest::Approx(-1.0));
    CHECK(z.continuous(0)[1] == doctest::Approx(1.0));
}

TEST_CASE("standardize: robust maps 100 to 97/1.4826") {
    const Dataset d = make_continuous("x", {1, 2, 3, 4, 100});
    const Dataset z = standardize(d, ScaleMethod::Mad);
    CHECK(z.continuous(0)[4] == doctest::Approx(65.42560366922973).epsilon(1e-12));
}

TEST_CASE("standardize: constant column maps to zero; no continuous errors") {
    const Dataset d = make_continuous("x", {7, 7, 7, 7});
    const Dataset z = standardize(d, ScaleMethod::Sd);
    for (double v : z.continuous(0)) CHECK(v == 0.0);
    const Dataset cats = make_dataset({}, {{"c", {"a", "b"}}});
    CHECK_THROWS_AS(standardize(cats, ScaleMethod::Sd), ValidationError);
}

TEST_CASE("row permutation leaves marginal stats unchanged") {
    Rng rng(99);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t n = 3 + rng.index(40);
        std::vector<double> values(n);
        for (auto& v : values) v = rng.uniform(-50, 50);
        std::vector<std::string> labels(n);
        for (auto& l : labels) l = "c" + std::to_string(rng.index(4));
        const Dataset d = make_dataset({{"x", values}}, {{"c", labels}});
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        rng.shuffle(order);
        const Dataset p = d.reordered(order);

        const auto a = MarginalStats::compute(d);
        const auto b = MarginalStats::compute(p);
        CHECK(a.continuous[0].median == b.continuous[0].median);
        CHECK(a.continuous[0].mad == b.continuous[0].mad);
        CHECK(a.continuous[0].mean == doctest::Approx(b.continuous[0].mean).epsilon(1e-12));
        CHECK(a.continuous[0].sd == doctest::Approx(b.continuous[0].sd).epsilon(1e-12));
    }
}

TEST_CASE("robust standardization is affine-equivariant") {
    Rng rng(7);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t n = 4 + rng.index(30);
        std::vector<double> values(n);
        for (auto& v : values) v = rng.uniform(-10, 10);
        const double a = rng.uniform(0.1, 5.0);
        const double b = rng.uniform(-20.0, 20.0);
        std::vector<double> mapped(n);
        for (std::size_t i = 0; i < n; ++i) mapped[i] = a * values[i] + b;

        const Dataset d1 = make_continuous("x", values);
        const Dataset d2 = make_continuous("x", mapped);
        const auto z1 = standardize(d1, ScaleMethod::Mad);
        const auto z2 = standardize(d2, ScaleMethod::Mad);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(z1.continuous(0)[i] ==
                  doctest::Approx(z2.continuous(0)[i]).epsilon(1e-9));
        }
    }
}

TEST_CASE("empirical quantile: order-statistic convention") {
    const std::vector<double> sorted = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    CHECK(empirical_quantile(sorted, 0.5) == 5.0);
    CHECK(empirical_quantile(sorted, 0.98) == 10.0);
    CHECK(empirical_quantile(sorted, 0.0) == 1.0);
    CHECK(empirical_quantile(sorted, 1.0) == 10.0);
    CHECK_THROWS_AS(empirical_quantile({}, 0.5), ParamError);
}

TEST_CASE("zero-scale deviation rule") {
    CHECK(robust_deviation(5.0, 5.0, 0.0) == 0.0);
    CHECK(robust_deviation(5.1, 5.0, 0.0) == kZeroScaleDeviance);
    CHECK(robust_deviation(8.0, 5.0, 1.5) == doctest::Approx(2.0));
}

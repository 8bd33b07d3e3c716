#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "anobench/detectors.hpp"
#include "anobench/rng.hpp"
#include "support.hpp"

using namespace anobench;
using namespace anobench::testing;

namespace {

// ---------------------------------------------------------------------------
// Independent oracles. These recompute everything from raw values with the
// most literal possible code and never touch the library's kNN or counting
// paths.
// ---------------------------------------------------------------------------

double oracle_median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n % 2 == 1) return v[n / 2];
    return v[n / 2 - 1] + (v[n / 2] - v[n / 2 - 1]) / 2.0;
}

// Exhaustive O(n^2) pairwise-distance scores: robust-standardize, full
// distance matrix, sort neighbours by (distance, case id), mean of k.
std::vector<double> knn_oracle(const Dataset& d, int k, bool standardize) {
    const auto cont = d.schema().indices_of(AttributeKind::Continuous);
    const std::size_t n = d.n_cases();
    std::vector<std::vector<double>> points(n, std::vector<double>(cont.size()));
    for (std::size_t p = 0; p < cont.size(); ++p) {
        auto col = d.continuous(cont[p]);
        double center = 0.0;
        double scale = 1.0;
        if (standardize) {
            std::vector<double> raw(col.begin(), col.end());
            center = oracle_median(raw);
            std::vector<double> dev;
            for (double v : raw) dev.push_back(std::abs(v - center));
            const double mad = 1.4826 * oracle_median(dev);
            scale = mad > 0.0 ? mad : 0.0;
        }
        for (std::size_t i = 0; i < n; ++i) {
            points[i][p] =
                standardize ? (scale > 0.0 ? (col[i] - center) / scale : 0.0)
                            : col[i];
        }
    }
    std::vector<double> scores(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::pair<double, CaseId>> dists;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            double sq = 0.0;
            for (std::size_t p = 0; p < points[i].size(); ++p) {
                const double diff = points[i][p] - points[j][p];
                sq += diff * diff;
            }
            dists.emplace_back(sq, d.case_id(j));
        }
        std::sort(dists.begin(), dists.end());
        double sum = 0.0;
        for (int t = 0; t < k; ++t) sum += std::sqrt(dists[t].first);
        scores[i] = sum / k;
    }
    return scores;
}

// Full-enumeration counting oracle for per-value frequencies.
std::map<std::string, std::int64_t> count_labels(const Dataset& d, std::size_t attr) {
    std::map<std::string, std::int64_t> counts;
    for (std::size_t row = 0; row < d.n_cases(); ++row) {
        ++counts[std::string(d.categorical(attr).label(row))];
    }
    return counts;
}

Dataset two_cluster_colors() {
    // Cluster A at (0,0) all blue; cluster B at (10,10) pink except one blue.
    std::vector<double> xs, ys;
    std::vector<std::string> colors;
    Rng rng(5);
    for (int i = 0; i < 10; ++i) {
        xs.push_back(0.0 + 0.2 * rng.normal());
        ys.push_back(0.0 + 0.2 * rng.normal());
        colors.push_back("blue");
    }
    for (int i = 0; i < 10; ++i) {
        xs.push_back(10.0 + 0.2 * rng.normal());
        ys.push_back(10.0 + 0.2 * rng.normal());
        colors.push_back(i == 3 ? "blue" : "pink");
    }
    return make_dataset({{"x", xs}, {"y", ys}}, {{"color", colors}});
}

}  // namespace

// ---------------------------------------------------------------------------
// Type I
// ---------------------------------------------------------------------------

TEST_CASE("extreme value: MAD flags what the SD misses (masking)") {
    const Dataset d = make_continuous("x", {1, 2, 3, 4, 100});
    DetectorParams params;

    params.method = ScaleMethod::Mad;
    const ScoreVector mad = detect_extreme_value(d, params);
    CHECK(mad.scores[4] == doctest::Approx(65.42560366922973).epsilon(1e-9));
    CHECK(mad.flags[4]);
    CHECK(mad.detail[4] == 1);
    for (int i = 0; i < 4; ++i) CHECK(!mad.flags[i]);

    params.method = ScaleMethod::Sd;
    const ScoreVector sd = detect_extreme_value(d, params);
    CHECK(sd.scores[4] == doctest::Approx(1.9993428618189626).epsilon(1e-9));
    CHECK(!sd.flags[4]);
}

TEST_CASE("extreme value: constant column scores zero") {
    const Dataset d = make_continuous("x", {5, 5, 5, 5});
    const ScoreVector sv = detect_extreme_value(d, DetectorParams{});
    for (double s : sv.scores) CHECK(s == 0.0);
    for (bool f : sv.flags) CHECK(!f);
}

TEST_CASE("extreme value: preconditions") {
    const Dataset cats = make_dataset({}, {{"c", {"a", "b"}}});
    CHECK_THROWS_AS(detect_extreme_value(cats, DetectorParams{}), ValidationError);
    const Dataset single = make_continuous("x", {1});
    CHECK_THROWS_AS(detect_extreme_value(single, DetectorParams{}), ValidationError);
}

TEST_CASE("extreme value: empty-bin rarity finds a rare mid-range value") {
    std::vector<double> values;
    Rng rng(3);
    for (int i = 0; i < 12; ++i) values.push_back(rng.uniform(0.0, 0.4));
    for (int i = 0; i < 12; ++i) values.push_back(rng.uniform(9.6, 10.0));
    values.push_back(5.0);  // alone in the middle of the range
    const Dataset d = make_continuous("x", values);

    DetectorParams plain;
    const ScoreVector without = detect_extreme_value(d, plain);
    CHECK(!without.flags[24]);

    DetectorParams with = plain;
    with.bin_rarity = true;
    const ScoreVector sv = detect_extreme_value(d, with);
    CHECK(sv.flags[24]);
    CHECK(sv.scores[24] > with.k_extreme);
}

TEST_CASE("extreme value: leave-one-out strictly increases with distance") {
    Rng rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 5 + rng.index(20);
        std::vector<double> values(n);
        for (auto& v : values) v = rng.uniform(-10, 10);
        DetectorParams params;
        params.leave_one_out = true;
        const std::size_t target = rng.index(n);

        const Dataset d1 = make_continuous("x", values);
        const ScoreVector s1 = detect_extreme_value(d1, params);

        // Move the value strictly farther from the leave-one-out center.
        std::vector<double> rest;
        for (std::size_t i = 0; i < n; ++i) {
            if (i != target) rest.push_back(values[i]);
        }
        const double center = oracle_median(rest);
        auto moved = values;
        const double sign = values[target] >= center ? 1.0 : -1.0;
        moved[target] = center + sign * (std::abs(values[target] - center) + 1.0);
        const Dataset d2 = make_continuous("x", moved);
        const ScoreVector s2 = detect_extreme_value(d2, params);
        CHECK(s2.scores[target] > s1.scores[target]);
    }
}

// ---------------------------------------------------------------------------
// Type II
// ---------------------------------------------------------------------------

TEST_CASE("rare class: count and frequency gates") {
    const Dataset d = make_dataset(
        {}, {{"color", {"red", "red", "red", "blue", "red", "red", "red", "red"}}});

    DetectorParams by_count;  // defaults: tau 0.01, c_rare 1
    const ScoreVector sv = detect_rare_class(d, by_count);
    CHECK(sv.flags[3]);
    CHECK(sv.detail[3] == 1);
    CHECK(!sv.flags[0]);
    // Score is the negative log frequency.
    CHECK(sv.scores[3] == doctest::Approx(-std::log(0.125)).epsilon(1e-12));

    DetectorParams by_freq;
    by_freq.tau_rare = 0.05;
    by_freq.c_rare = 0;
    const ScoreVector sv2 = detect_rare_class(d, by_freq);
    CHECK(!sv2.flags[3]);  // freq 0.125 > 0.05 and counts never reach 0
}

TEST_CASE("rare class: uniform column yields equal scores, no flags") {
    const Dataset d = make_dataset({}, {{"c", {"a", "a", "a", "a"}}});
    const ScoreVector sv = detect_rare_class(d, DetectorParams{});
    for (double s : sv.scores) CHECK(s == sv.scores[0]);
    for (bool f : sv.flags) CHECK(!f);
    const Dataset nums = make_continuous("x", {1, 2});
    CHECK_THROWS_AS(detect_rare_class(nums, DetectorParams{}), ValidationError);
}

TEST_CASE("rare class: matches the counting oracle exactly") {
    Rng rng(23);
    std::vector<std::string> c1, c2;
    for (int i = 0; i < 200; ++i) {
        c1.push_back("a" + std::to_string(rng.index(5)));
        c2.push_back("b" + std::to_string(rng.index(3)));
    }
    const Dataset d = make_dataset({}, {{"c1", c1}, {"c2", c2}});
    const ScoreVector sv = detect_rare_class(d, DetectorParams{});
    const auto counts1 = count_labels(d, 0);
    const auto counts2 = count_labels(d, 1);
    for (std::size_t row = 0; row < d.n_cases(); ++row) {
        const double expected =
            -std::log(counts1.at(c1[row]) / 200.0) +
            -std::log(counts2.at(c2[row]) / 200.0);
        CHECK(sv.scores[row] == expected);  // same arithmetic, bit-exact
    }
}

// ---------------------------------------------------------------------------
// Type III
// ---------------------------------------------------------------------------

TEST_CASE("simple mixed: conjunction semantics") {
    // Case 5: extreme x AND unique class. Case 6: extreme only. Case 7:
    // unique class only.
    const Dataset d = make_dataset(
        {{"x", {1, 2, 3, 2, 1, 60, 70, 2}}},
        {{"c",
          {"a", "a", "b", "b", "a", "unique", "a", "solo"}}});
    const ScoreVector sv = detect_simple_mixed(d, DetectorParams{});
    CHECK(sv.flags[5]);
    CHECK(!sv.flags[6]);  // extreme x, common class
    CHECK(!sv.flags[7]);  // rare class, ordinary x
    CHECK(sv.scores[5] > sv.scores[0]);
}

// ---------------------------------------------------------------------------
// Type IV
// ---------------------------------------------------------------------------

TEST_CASE("multidim numerical: the off-line point wins (hand geometry)") {
    const Dataset d = make_dataset(
        {{"x", {0, 1, 2, 3, 4, 0}}, {"y", {0, 1, 2, 3, 4, 4}}}, {});
    DetectorParams params;
    params.k_nn = 1;
    params.standardize = false;
    params.density_quantile = 0.2;
    const ScoreVector sv = detect_multidim_numerical(d, params);
    for (int i = 0; i < 5; ++i) {
        CHECK(sv.scores[i] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    }
    CHECK(sv.scores[5] == doctest::Approx(std::sqrt(8.0)).epsilon(1e-12));
    CHECK(sv.flags[5]);
    for (int i = 0; i < 5; ++i) CHECK(!sv.flags[i]);
}

TEST_CASE("multidim numerical: duplicates score zero") {
    const Dataset d = make_dataset(
        {{"x", {1, 1, 5, 5, 9}}, {"y", {2, 2, 5, 5, 0}}}, {});
    DetectorParams params;
    params.k_nn = 1;
    const ScoreVector sv = detect_multidim_numerical(d, params);
    CHECK(sv.scores[0] == 0.0);
    CHECK(sv.scores[1] == 0.0);
}

TEST_CASE("multidim numerical: preconditions") {
    const Dataset d = make_dataset({{"x", {1, 2, 3}}, {"y", {1, 2, 3}}}, {});
    DetectorParams params;
    params.k_nn = 3;
    CHECK_THROWS_AS(detect_multidim_numerical(d, params), ParamError);
    const Dataset one = make_continuous("x", {1, 2, 3});
    CHECK_THROWS_AS(detect_multidim_numerical(one, DetectorParams{}),
                    ValidationError);
}

TEST_CASE("multidim numerical: matches the exhaustive oracle") {
    Rng rng(31);
    std::vector<double> x, y, z;
    for (int i = 0; i < 500; ++i) {
        const bool left = rng.coin();
        x.push_back((left ? 0.0 : 6.0) + rng.normal());
        y.push_back((left ? 0.0 : 6.0) + rng.normal());
        z.push_back(rng.uniform(-1.0, 1.0));
    }
    const Dataset d = make_dataset({{"x", x}, {"y", y}, {"z", z}}, {});
    DetectorParams params;
    params.k_nn = 10;
    const ScoreVector sv = detect_multidim_numerical(d, params);
    const auto expected = knn_oracle(d, params.k_nn, true);
    for (std::size_t i = 0; i < sv.scores.size(); ++i) {
        CHECK(sv.scores[i] == doctest::Approx(expected[i]).epsilon(1e-9));
    }
}

TEST_CASE("multidim numerical: rigid motions leave unstandardized scores alone") {
    Rng rng(37);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 30 + rng.index(40);
        std::vector<double> x(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = rng.uniform(-5, 5);
            y[i] = rng.uniform(-5, 5);
        }
        const double theta = rng.uniform(0.0, 6.28318);
        const double tx = rng.uniform(-10, 10);
        const double ty = rng.uniform(-10, 10);
        const bool reflect = rng.coin();
        std::vector<double> xr(n), yr(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double xx = reflect ? -x[i] : x[i];
            xr[i] = std::cos(theta) * xx - std::sin(theta) * y[i] + tx;
            yr[i] = std::sin(theta) * xx + std::cos(theta) * y[i] + ty;
        }
        DetectorParams params;
        params.standardize = false;
        params.k_nn = 5;
        const auto a = detect_multidim_numerical(make_dataset({{"x", x}, {"y", y}}, {}),
                                                 params);
        const auto b = detect_multidim_numerical(
            make_dataset({{"x", xr}, {"y", yr}}, {}), params);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(a.scores[i] == doctest::Approx(b.scores[i]).epsilon(1e-9));
        }
    }
}

// ---------------------------------------------------------------------------
// Type V
// ---------------------------------------------------------------------------

TEST_CASE("multidim rare class: the pregnant male puppy") {
    std::vector<std::string> sex, age, status;
    // Ordinary dogs: every single value common, the triple unique.
    const char* rows[][3] = {
        {"MALE", "ADULT", "NOT_PREGNANT"},   {"FEMALE", "ADULT", "PREGNANT"},
        {"FEMALE", "PUPPY", "NOT_PREGNANT"}, {"MALE", "ADULT", "NOT_PREGNANT"},
        {"FEMALE", "ADULT", "NOT_PREGNANT"}, {"MALE", "PUPPY", "NOT_PREGNANT"},
        {"FEMALE", "PUPPY", "NOT_PREGNANT"}, {"FEMALE", "ADULT", "PREGNANT"},
        {"MALE", "ADULT", "NOT_PREGNANT"},   {"FEMALE", "PUPPY", "NOT_PREGNANT"},
        {"MALE", "PUPPY", "NOT_PREGNANT"},   {"FEMALE", "ADULT", "PREGNANT"},
    };
    for (const auto& r : rows) {
        sex.push_back(r[0]);
        age.push_back(r[1]);
        status.push_back(r[2]);
    }
    sex.push_back("MALE");
    age.push_back("PUPPY");
    status.push_back("PREGNANT");

    const Dataset d =
        make_dataset({}, {{"sex", sex}, {"age", age}, {"status", status}});
    DetectorParams params;
    params.combo_order = 3;
    params.tau_rare = 0.08;
    const ScoreVector sv = detect_multidim_rare_class(d, params);
    CHECK(sv.flags[12]);
    for (int i = 0; i < 12; ++i) CHECK(!sv.flags[i]);
    // The unique tuple has the top score.
    CHECK(*std::max_element(sv.scores.begin(), sv.scores.end()) == sv.scores[12]);
}

TEST_CASE("multidim rare class: perfectly correlated columns raise no flags") {
    std::vector<std::string> a, b;
    for (int i = 0; i < 40; ++i) {
        const std::string label = "v" + std::to_string(i % 4);
        a.push_back(label);
        b.push_back("m" + std::to_string(i % 4));
    }
    const Dataset d = make_dataset({}, {{"a", a}, {"b", b}});
    const ScoreVector sv = detect_multidim_rare_class(d, DetectorParams{});
    for (bool f : sv.flags) CHECK(!f);
}

TEST_CASE("multidim rare class: a rare marginal belongs to type II, not V") {
    // Tuple (solo, m0) is unique, but only because 'solo' itself is unique.
    std::vector<std::string> a, b;
    for (int i = 0; i < 30; ++i) {
        a.push_back(i % 2 ? "u" : "w");
        b.push_back("m" + std::to_string(i % 3));
    }
    a.push_back("solo");
    b.push_back("m0");
    const Dataset d = make_dataset({}, {{"a", a}, {"b", b}});
    const ScoreVector sv = detect_multidim_rare_class(d, DetectorParams{});
    CHECK(!sv.flags[30]);

    // Counting-oracle check of the score on every case.
    std::map<std::pair<std::string, std::string>, std::int64_t> joint;
    for (std::size_t i = 0; i < d.n_cases(); ++i) {
        ++joint[{a[i], b[i]}];
    }
    for (std::size_t i = 0; i < d.n_cases(); ++i) {
        const double expected =
            -std::log(static_cast<double>(joint[{a[i], b[i]}]) /
                      static_cast<double>(d.n_cases()));
        CHECK(sv.scores[i] == expected);
    }
}

TEST_CASE("multidim rare class: preconditions") {
    const Dataset d = make_dataset({}, {{"a", {"x", "y"}}});
    CHECK_THROWS_AS(detect_multidim_rare_class(d, DetectorParams{}),
                    ValidationError);
    const Dataset d2 = make_dataset({}, {{"a", {"x", "y"}}, {"b", {"u", "v"}}});
    DetectorParams params;
    params.combo_order = 3;
    CHECK_THROWS_AS(detect_multidim_rare_class(d2, params), ParamError);
}

// ---------------------------------------------------------------------------
// Type VI
// ---------------------------------------------------------------------------

TEST_CASE("multidim mixed: a stray blue among pinks, order 1") {
    const Dataset d = two_cluster_colors();
    DetectorParams params;
    params.k_nn = 5;
    const ScoreVector sv = detect_multidim_mixed(d, params);
    // global freq(blue) = 11/20 = 0.55; the stray's neighbours are all pink.
    CHECK(sv.flags[13]);
    CHECK(sv.detail[13] == 1);
    CHECK(sv.scores[13] == doctest::Approx(0.55).epsilon(1e-12));
    for (std::size_t i = 0; i < d.n_cases(); ++i) {
        if (i != 13) CHECK(!sv.flags[i]);
    }
}

TEST_CASE("multidim mixed: a globally unique class is gated out") {
    std::vector<double> xs, ys;
    std::vector<std::string> colors;
    Rng rng(8);
    for (int i = 0; i < 12; ++i) {
        xs.push_back(rng.normal());
        ys.push_back(rng.normal());
        colors.push_back("blue");
    }
    colors[4] = "exotic";  // unique in the whole set: type II, not VI
    const Dataset d = make_dataset({{"x", xs}, {"y", ys}}, {{"color", colors}});
    DetectorParams params;
    params.k_nn = 5;
    const ScoreVector sv = detect_multidim_mixed(d, params);
    CHECK(!sv.flags[4]);
}

TEST_CASE("multidim mixed: second-order tuple rarity") {
    // Two clusters pairing u and v oppositely; (u0,v1) is globally common
    // but never seen inside cluster A.
    std::vector<double> xs, ys;
    std::vector<std::string> us, vs;
    Rng rng(12);
    for (int i = 0; i < 12; ++i) {  // cluster A: (u0,v0) and (u1,v1)
        xs.push_back(0.0 + 0.3 * rng.normal());
        ys.push_back(0.0 + 0.3 * rng.normal());
        us.push_back(i % 2 ? "u1" : "u0");
        vs.push_back(i % 2 ? "v1" : "v0");
    }
    for (int i = 0; i < 12; ++i) {  // cluster B: (u0,v1) and (u1,v0)
        xs.push_back(8.0 + 0.3 * rng.normal());
        ys.push_back(8.0 + 0.3 * rng.normal());
        us.push_back(i % 2 ? "u1" : "u0");
        vs.push_back(i % 2 ? "v0" : "v1");
    }
    // The probe: cluster-A location with cluster-B pairing.
    xs.push_back(0.05);
    ys.push_back(-0.05);
    us.push_back("u0");
    vs.push_back("v1");
    const Dataset d = make_dataset({{"x", xs}, {"y", ys}}, {{"u", us}, {"v", vs}});
    DetectorParams params;
    params.k_nn = 6;
    const ScoreVector sv = detect_multidim_mixed(d, params);
    CHECK(sv.flags[24]);
    CHECK(sv.detail[24] == 2);  // members are locally common; the pair is not
}

// ---------------------------------------------------------------------------
// Registry
// ---------------------------------------------------------------------------

TEST_CASE("registry dispatch is the identity on detectors") {
    const Dataset d = make_dataset({{"x", {1, 2, 3, 4, 100}}},
                                   {{"c", {"a", "a", "b", "a", "a"}}});
    const ScoreVector direct = detect_extreme_value(d, DetectorParams{});
    const ScoreVector via = run_detector("type1", d, DetectorParams{});
    CHECK(via.detector_id == direct.detector_id);
    CHECK(via.scores == direct.scores);
    CHECK(via.flags == direct.flags);
}

TEST_CASE("registry rejects unknown ids, listing the registry") {
    const Dataset d = make_continuous("x", {1, 2});
    try {
        run_detector("foo", d, DetectorParams{});
        FAIL("expected ParamError");
    } catch (const ParamError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("foo") != std::string::npos);
        CHECK(msg.find("type1") != std::string::npos);
        CHECK(msg.find("type6") != std::string::npos);
    }
}

TEST_CASE("registry surfaces parameter preconditions") {
    const Dataset d = make_dataset({{"x", {1, 2, 3}}, {"y", {4, 5, 6}}}, {});
    DetectorParams params;
    params.k_nn = 2000;
    CHECK_THROWS_AS(run_detector("type4", d, params), ParamError);
}

// ---------------------------------------------------------------------------
// Invariance properties
// ---------------------------------------------------------------------------

TEST_CASE("column independence: univariate detectors ignore the other kind") {
    Rng rng(41);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 8 + rng.index(30);
        std::vector<double> x(n);
        for (auto& v : x) v = rng.uniform(-10, 10);
        std::vector<std::string> c(n), c2(n);
        for (auto& l : c) l = "k" + std::to_string(rng.index(3));
        for (auto& l : c2) l = "m" + std::to_string(rng.index(4));

        // Permute the categorical columns independently.
        auto cp = c;
        auto cp2 = c2;
        rng.shuffle(cp);
        rng.shuffle(cp2);
        const Dataset d1 = make_dataset({{"x", x}}, {{"c", c}, {"c2", c2}});
        const Dataset d2 = make_dataset({{"x", x}}, {{"c", cp}, {"c2", cp2}});
        const auto ev1 = detect_extreme_value(d1, DetectorParams{});
        const auto ev2 = detect_extreme_value(d2, DetectorParams{});
        CHECK(ev1.scores == ev2.scores);

        // And the continuous column for the rare-class detector.
        auto xp = x;
        rng.shuffle(xp);
        const Dataset d3 = make_dataset({{"x", xp}}, {{"c", c}, {"c2", c2}});
        const auto rc1 = detect_rare_class(d1, DetectorParams{});
        const auto rc3 = detect_rare_class(d3, DetectorParams{});
        CHECK(rc1.scores == rc3.scores);
    }
}

TEST_CASE("row permutation permutes every detector's scores identically") {
    Rng rng(43);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 15 + rng.index(25);
        std::vector<double> x(n), y(n);
        std::vector<std::string> c(n), c2(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = rng.uniform(-10, 10);
            y[i] = rng.uniform(-10, 10);
            c[i] = "k" + std::to_string(rng.index(3));
            c2[i] = "m" + std::to_string(rng.index(3));
        }
        const Dataset d = make_dataset({{"x", x}, {"y", y}}, {{"c", c}, {"c2", c2}});
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        rng.shuffle(order);
        const Dataset p = d.reordered(order);

        DetectorParams params;
        params.k_nn = 5;
        for (const auto& id : registered_detectors()) {
            const ScoreVector sd = run_detector(id, d, params);
            const ScoreVector sp = run_detector(id, p, params);
            // Compare by case id.
            std::map<CaseId, double> by_id;
            for (std::size_t i = 0; i < sp.size(); ++i) by_id[sp.ids[i]] = sp.scores[i];
            for (std::size_t i = 0; i < sd.size(); ++i) {
                CHECK(sd.scores[i] ==
                      doctest::Approx(by_id[sd.ids[i]]).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("affine transforms leave robust extreme-value scores unchanged") {
    Rng rng(47);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 6 + rng.index(20);
        std::vector<double> x(n);
        for (auto& v : x) v = rng.uniform(-10, 10);
        const double a = rng.uniform(0.1, 4.0);
        const double b = rng.uniform(-50, 50);
        std::vector<double> mapped(n);
        for (std::size_t i = 0; i < n; ++i) mapped[i] = a * x[i] + b;
        DetectorParams params;  // mad
        const auto s1 = detect_extreme_value(make_continuous("x", x), params);
        const auto s2 = detect_extreme_value(make_continuous("x", mapped), params);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(s1.scores[i] == doctest::Approx(s2.scores[i]).epsilon(1e-9));
        }
    }
}

TEST_CASE("bijective label renaming leaves class-rarity scores unchanged") {
    Rng rng(53);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 10 + rng.index(40);
        std::vector<std::string> c(n), c2(n);
        for (std::size_t i = 0; i < n; ++i) {
            c[i] = "k" + std::to_string(rng.index(4));
            c2[i] = "m" + std::to_string(rng.index(3));
        }
        auto renamed = c;
        for (auto& l : renamed) l = "renamed_" + l;  // bijection
        const Dataset d1 = make_dataset({}, {{"c", c}, {"c2", c2}});
        const Dataset d2 = make_dataset({}, {{"c", renamed}, {"c2", c2}});
        const auto a2 = detect_rare_class(d1, DetectorParams{});
        const auto b2 = detect_rare_class(d2, DetectorParams{});
        CHECK(a2.scores == b2.scores);
        CHECK(a2.flags == b2.flags);
        const auto a5 = detect_multidim_rare_class(d1, DetectorParams{});
        const auto b5 = detect_multidim_rare_class(d2, DetectorParams{});
        CHECK(a5.scores == b5.scores);
        CHECK(a5.flags == b5.flags);
    }
}

TEST_CASE("flags follow scores through the stated threshold rule") {
    const Dataset d = two_cluster_colors();
    DetectorParams params;
    params.k_nn = 5;
    const ScoreVector sv = detect_multidim_numerical(d, params);
    std::vector<double> sorted = sv.scores;
    std::sort(sorted.begin(), sorted.end());
    const double cut = empirical_quantile(sorted, 1.0 - params.density_quantile);
    for (std::size_t i = 0; i < sv.size(); ++i) {
        CHECK(sv.flags[i] == (sv.scores[i] > cut));
    }
    const ScoreVector ev = detect_extreme_value(d, params);
    for (std::size_t i = 0; i < ev.size(); ++i) {
        CHECK(ev.flags[i] == (ev.scores[i] > params.k_extreme));
    }
}

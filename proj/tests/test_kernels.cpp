#include <doctest.h>

#include <cmath>
#include <vector>

#include "anobench/error.hpp"
#include "anobench/kernels.hpp"
#include "anobench/rng.hpp"

using namespace anobench;

namespace {

std::vector<double> random_vec(Rng& rng, std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(-100.0, 100.0);
    return v;
}

}  // namespace

TEST_CASE("scalar kernels match straightforward loops") {
    const auto& ops = kernels::scalar_ops();
    Rng rng(11);
    const auto x = random_vec(rng, 37);
    CHECK(ops.sum(x.data(), x.size()) ==
          doctest::Approx([&] {
              double s = 0;
              for (double v : x) s += v;
              return s;
          }()).epsilon(1e-14));
    CHECK(ops.sumsqdiff(x.data(), 1.5, x.size()) ==
          doctest::Approx([&] {
              double s = 0;
              for (double v : x) s += (v - 1.5) * (v - 1.5);
              return s;
          }()).epsilon(1e-14));
}

TEST_CASE("vector kernels agree with the scalar reference") {
    const kernels::Ops* vec = kernels::vector_ops();
    if (vec == nullptr) return;  // host has no vector ISA built in
    const auto& ref = kernels::scalar_ops();
    Rng rng(42);
    // Cover lane widths, remainders and the empty case.
    for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 15u, 64u, 1001u}) {
        const auto x = random_vec(rng, n);
        const double c = rng.uniform(-5.0, 5.0);

        CHECK(vec->sum(x.data(), n) ==
              doctest::Approx(ref.sum(x.data(), n)).epsilon(1e-12));
        CHECK(vec->sumsqdiff(x.data(), c, n) ==
              doctest::Approx(ref.sumsqdiff(x.data(), c, n)).epsilon(1e-12));

        std::vector<double> acc_a(n, 1.0);
        std::vector<double> acc_b(n, 1.0);
        vec->sqdiff_acc(acc_a.data(), x.data(), c, n);
        ref.sqdiff_acc(acc_b.data(), x.data(), c, n);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(acc_a[i] == doctest::Approx(acc_b[i]).epsilon(1e-12));
        }

        std::vector<double> dst_a(n);
        std::vector<double> dst_b(n);
        vec->scale_shift(dst_a.data(), x.data(), c, 2.5, n);
        ref.scale_shift(dst_b.data(), x.data(), c, 2.5, n);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(dst_a[i] == dst_b[i]);  // elementwise op: bit-identical
        }
    }
}

TEST_CASE("kernel selection can be forced and restored") {
    const char* before = kernels::active().name;
    kernels::force("scalar");
    CHECK(std::string(kernels::active().name) == "scalar");
    kernels::force("auto");
    if (kernels::vector_ops() != nullptr) {
        CHECK(std::string(kernels::active().name) ==
              kernels::vector_ops()->name);
    }
    CHECK_THROWS_AS(kernels::force("mmx"), anobench::ParamError);
    kernels::force(before);
}

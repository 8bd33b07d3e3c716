#pragma once

// Data-parallel inner loops used by the statistics and nearest-neighbour
// code paths. Every kernel exists as a scalar reference implementation and,
// where the build supports it, as a vectorized variant (AVX2+FMA on x86-64,
// NEON on aarch64). The active set is chosen once at runtime from cpuid and
// can be forced with the ANOBENCH_KERNELS environment variable or
// kernels::force() — the scalar set is the semantic reference and the
// vector sets are equivalence-tested against it.

#include <cstddef>
#include <string_view>

namespace anobench::kernels {

struct Ops {
    // acc[i] += (x[i] - c)^2   — per-dimension step of squared-distance
    // accumulation against a query coordinate c.
    void (*sqdiff_acc)(double* acc, const double* x, double c, std::size_t n);

    // sum of x[0..n)
    double (*sum)(const double* x, std::size_t n);

    // sum of (x[i] - c)^2
    double (*sumsqdiff)(const double* x, double c, std::size_t n);

    // dst[i] = (x[i] - shift) * scale
    void (*scale_shift)(double* dst, const double* x, double shift,
                        double scale, std::size_t n);

    const char* name;
};

// Kernel set picked at startup (cpuid + ANOBENCH_KERNELS override).
const Ops& active();

// Reference implementation; always available.
const Ops& scalar_ops();

// Vector implementation compiled into this binary, or nullptr.
const Ops* vector_ops();

// Select a set by name: "scalar", "avx2"/"neon", or "auto". Throws
// ParamError for unknown names or unavailable sets. Intended for tests and
// the CLI; not thread-safe against concurrent kernel use.
void force(std::string_view name);

}  // namespace anobench::kernels

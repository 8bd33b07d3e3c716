#include <cstdlib>
#include <string>

#include "anobench/error.hpp"
#include "anobench/kernels.hpp"

namespace anobench::kernels {

#if defined(ANOBENCH_BUILD_AVX2)
const Ops* avx2_ops_impl();
#endif
#if defined(__aarch64__) && defined(__ARM_NEON)
const Ops* neon_ops_impl();
#endif

namespace {

const Ops* vector_ops_if_supported() {
#if defined(ANOBENCH_BUILD_AVX2)
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
        return avx2_ops_impl();
    }
#endif
#if defined(__aarch64__) && defined(__ARM_NEON)
    return neon_ops_impl();
#endif
    return nullptr;
}

const Ops* pick_default() {
    if (const char* env = std::getenv("ANOBENCH_KERNELS")) {
        const std::string_view want(env);
        if (want == "scalar") return &scalar_ops();
        if (want != "auto" && !want.empty()) {
            if (const Ops* v = vector_ops_if_supported(); v && want == v->name) {
                return v;
            }
            // Unknown or unsupported request: fall through to auto rather
            // than failing process startup.
        }
    }
    if (const Ops* v = vector_ops_if_supported()) return v;
    return &scalar_ops();
}

const Ops*& active_slot() {
    static const Ops* slot = pick_default();
    return slot;
}

}  // namespace

const Ops& active() { return *active_slot(); }

const Ops* vector_ops() { return vector_ops_if_supported(); }

void force(std::string_view name) {
    if (name == "auto") {
        active_slot() = vector_ops_if_supported() ? vector_ops_if_supported()
                                                  : &scalar_ops();
        return;
    }
    if (name == "scalar") {
        active_slot() = &scalar_ops();
        return;
    }
    if (const Ops* v = vector_ops_if_supported(); v && name == v->name) {
        active_slot() = v;
        return;
    }
    throw ParamError("unknown or unsupported kernel set: " + std::string(name));
}

}  // namespace anobench::kernels

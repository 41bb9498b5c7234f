#include <cstdlib>
#include <string_view>

#include "cwlab/kernels.hpp"

namespace cwlab::kernels {
namespace {

bool cpu_has_avx2_fma() noexcept {
#if (defined(__x86_64__) || defined(_M_X64)) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const KernelTable& select() noexcept {
    const char* env = std::getenv("CWLAB_SIMD");
    if (env != nullptr) {
        if (const KernelTable* t = find(env)) return *t;
    }
#if defined(__x86_64__) || defined(_M_X64)
    if (cpu_has_avx2_fma()) return detail::avx2_table();
#endif
#if defined(__aarch64__)
    return detail::neon_table();
#endif
    return scalar_table();
}

}  // namespace

const KernelTable* find(std::string_view name) noexcept {
    if (name == "scalar") return &scalar_table();
#if defined(__x86_64__) || defined(_M_X64)
    if (name == "avx2" && cpu_has_avx2_fma()) return &detail::avx2_table();
#endif
#if defined(__aarch64__)
    if (name == "neon") return &detail::neon_table();
#endif
    return nullptr;
}

const KernelTable& active() noexcept {
    static const KernelTable& table = select();
    return table;
}

}  // namespace cwlab::kernels

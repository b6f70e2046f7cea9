#include "navsim/kernels.hpp"

namespace navsim::kernels {

namespace {

bool detect_avx2() {
#if defined(__x86_64__)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

Isa g_isa = detect_avx2() ? Isa::avx2 : Isa::scalar;

}  // namespace

bool avx2_supported() {
    static const bool s = detect_avx2();
    return s;
}

Isa active_isa() { return g_isa; }

void force_isa(Isa isa) {
    if (isa == Isa::avx2 && !avx2_supported()) return;
    g_isa = isa;
}

void reset_isa() { g_isa = avx2_supported() ? Isa::avx2 : Isa::scalar; }

void batch_margin(const double* cx, const double* cy, const double* cz,
                  const double* rr, std::size_t n,
                  double x, double y, double z, double* out) {
    if (g_isa == Isa::avx2) {
        detail::batch_margin_avx2(cx, cy, cz, rr, n, x, y, z, out);
    } else {
        detail::batch_margin_scalar(cx, cy, cz, rr, n, x, y, z, out);
    }
}

MinResult min_element(const double* v, std::size_t n) {
    return g_isa == Isa::avx2 ? detail::min_element_avx2(v, n)
                              : detail::min_element_scalar(v, n);
}

std::size_t count_leq(const double* v, std::size_t n, double threshold) {
    return g_isa == Isa::avx2 ? detail::count_leq_avx2(v, n, threshold)
                              : detail::count_leq_scalar(v, n, threshold);
}

}  // namespace navsim::kernels

#include "navsim/kernels.hpp"

namespace navsim::kernels::detail {

void batch_margin_scalar(const double* cx, const double* cy, const double* cz,
                         const double* rr, std::size_t n,
                         double x, double y, double z, double* out) {
    if (cz) {
        for (std::size_t j = 0; j < n; ++j) {
            const double dx = x - cx[j];
            const double dy = y - cy[j];
            const double dz = z - cz[j];
            out[j] = ((dx * dx + dy * dy) + dz * dz) - rr[j];
        }
    } else {
        for (std::size_t j = 0; j < n; ++j) {
            const double dx = x - cx[j];
            const double dy = y - cy[j];
            out[j] = (dx * dx + dy * dy) - rr[j];
        }
    }
}

MinResult min_element_scalar(const double* v, std::size_t n) {
    if (n == 0) return {0.0, -1};
    MinResult r{v[0], 0};
    for (std::size_t j = 1; j < n; ++j) {
        if (v[j] < r.value) {
            r.value = v[j];
            r.index = static_cast<std::ptrdiff_t>(j);
        }
    }
    return r;
}

std::size_t count_leq_scalar(const double* v, std::size_t n, double threshold) {
    std::size_t c = 0;
    for (std::size_t j = 0; j < n; ++j) {
        if (v[j] <= threshold) ++c;
    }
    return c;
}

}  // namespace navsim::kernels::detail

#pragma once

#include <cstddef>

// Data-parallel inner loops shared by the geometry and metric code: batched
// squared-distance margins over obstacle arrays, min/argmin and threshold
// counts. Scalar reference implementations are the semantics; the AVX2
// variants are selected at runtime and must match them bit for bit (no FMA,
// identical per-element operation order).

namespace navsim::kernels {

struct MinResult {
    double value;
    std::ptrdiff_t index;  // -1 when n == 0, else first index attaining value
};

// out[j] = (x-cx[j])^2 + (y-cy[j])^2 [+ (z-cz[j])^2] - rr[j].
// cz may be null for the planar case. rr holds squared inflated radii.
void batch_margin(const double* cx, const double* cy, const double* cz,
                  const double* rr, std::size_t n,
                  double x, double y, double z, double* out);

MinResult min_element(const double* v, std::size_t n);

std::size_t count_leq(const double* v, std::size_t n, double threshold);

enum class Isa { scalar, avx2 };

Isa active_isa();
bool avx2_supported();
// Test hook; forcing avx2 on a machine without it is ignored.
void force_isa(Isa isa);
void reset_isa();

namespace detail {
void batch_margin_scalar(const double* cx, const double* cy, const double* cz,
                         const double* rr, std::size_t n,
                         double x, double y, double z, double* out);
MinResult min_element_scalar(const double* v, std::size_t n);
std::size_t count_leq_scalar(const double* v, std::size_t n, double threshold);

void batch_margin_avx2(const double* cx, const double* cy, const double* cz,
                       const double* rr, std::size_t n,
                       double x, double y, double z, double* out);
MinResult min_element_avx2(const double* v, std::size_t n);
std::size_t count_leq_avx2(const double* v, std::size_t n, double threshold);
}  // namespace detail

}  // namespace navsim::kernels

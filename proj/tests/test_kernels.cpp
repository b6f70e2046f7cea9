#include <doctest.h>

#include <cstring>
#include <random>
#include <vector>

#include "navsim/kernels.hpp"

using namespace navsim::kernels;

namespace {

std::vector<double> random_array(std::mt19937_64& rng, std::size_t n, double scale) {
    std::uniform_real_distribution<double> u(-scale, scale);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("batch margin matches direct arithmetic") {
    const double cx[] = {5.0, 0.0};
    const double cy[] = {5.0, 4.0};
    const double rr[] = {0.75 * 0.75, 1.0};
    double out[2];
    detail::batch_margin_scalar(cx, cy, nullptr, rr, 2, 5.0, 6.0, 0.0, out);
    CHECK(out[0] == doctest::Approx(0.4375).epsilon(1e-15));
    CHECK(out[1] == doctest::Approx(25.0 + 4.0 - 1.0).epsilon(1e-15));
}

TEST_CASE("min element keeps the first index on ties") {
    const double v[] = {3.0, 1.0, 1.0, 2.0};
    const MinResult r = detail::min_element_scalar(v, 4);
    CHECK(r.value == 1.0);
    CHECK(r.index == 1);
    CHECK(detail::min_element_scalar(v, 0).index == -1);
}

TEST_CASE("count_leq boundary inclusive") {
    const double v[] = {1.0, 2.0, 3.0};
    CHECK(detail::count_leq_scalar(v, 3, 2.0) == 2);
    CHECK(detail::count_leq_scalar(v, 3, 0.5) == 0);
}

TEST_CASE("scalar and avx2 variants agree bit for bit") {
    if (!avx2_supported()) return;
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + rng() % 97;
        const auto cx = random_array(rng, n, 10.0);
        const auto cy = random_array(rng, n, 10.0);
        const auto cz = random_array(rng, n, 10.0);
        const auto rr = random_array(rng, n, 2.0);
        const double x = 3.7, y = -1.2, z = 0.4;

        std::vector<double> a(n), b(n);
        for (const double* czp : {static_cast<const double*>(nullptr), cz.data()}) {
            detail::batch_margin_scalar(cx.data(), cy.data(), czp, rr.data(), n, x, y, z,
                                        a.data());
            detail::batch_margin_avx2(cx.data(), cy.data(), czp, rr.data(), n, x, y, z,
                                      b.data());
            CHECK(std::memcmp(a.data(), b.data(), n * sizeof(double)) == 0);

            const MinResult ms = detail::min_element_scalar(a.data(), n);
            const MinResult mv = detail::min_element_avx2(a.data(), n);
            CHECK(ms.value == mv.value);
            CHECK(ms.index == mv.index);

            const double thr = a[rng() % n];
            CHECK(detail::count_leq_scalar(a.data(), n, thr) ==
                  detail::count_leq_avx2(a.data(), n, thr));
        }
    }
}

TEST_CASE("avx2 min handles duplicated minima like the scalar path") {
    if (!avx2_supported()) return;
    std::vector<double> v(23, 5.0);
    v[7] = -1.0;
    v[19] = -1.0;
    const MinResult ms = detail::min_element_scalar(v.data(), v.size());
    const MinResult mv = detail::min_element_avx2(v.data(), v.size());
    CHECK(ms.index == 7);
    CHECK(mv.index == ms.index);
    CHECK(mv.value == ms.value);
}

TEST_CASE("dispatch honors forced isa") {
    force_isa(Isa::scalar);
    CHECK(active_isa() == Isa::scalar);
    reset_isa();
    if (avx2_supported()) CHECK(active_isa() == Isa::avx2);
}

}  // TEST_SUITE

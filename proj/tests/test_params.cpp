#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "biharm/params.hpp"
#include "biharm/power_sum.hpp"

using namespace biharm;

namespace {

// Independent oracle for p_c: bisection root of g(p) = p*K0(n,p) - Hn.
// p*K0 = (alpha+4)(alpha+2)(n-2-alpha)(n-4-alpha) decreases toward
// 8(n-2)(n-4) as p grows, so g has a single sign change when one exists.
double pc_bisection_oracle(int n) {
    const double Hn = compute_Hn(n);
    auto g = [&](double p) { return p * compute_K0(n, p) - Hn; };
    double lo = (n + 4.0) / (n - 4.0) * 1.0001;
    double hi = 1e7;
    REQUIRE(g(lo) > 0.0);
    REQUIRE(g(hi) < 0.0);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("alpha") {
    CHECK(compute_alpha(3.0) == 2.0);
    CHECK(compute_alpha(2.0) == 4.0);
    CHECK_THAT(compute_alpha(30.0), Catch::Matchers::WithinRel(4.0 / 29.0, 1e-15));
    CHECK_THROWS_AS(compute_alpha(1.0), std::domain_error);
    CHECK_THROWS_AS(compute_alpha(0.5), std::domain_error);
}

TEST_CASE("Hn closed form") {
    CHECK(compute_Hn(13) == 855.5625);
    CHECK(compute_Hn(8) == 64.0);
    CHECK_THROWS_AS(compute_Hn(4), std::domain_error);
}

TEST_CASE("K0 equals the symbolic bilaplacian coefficient of r^{-alpha}") {
    // oracle: apply the radial bilaplacian to r^{-alpha} symbolically
    CHECK_THAT(compute_K0(13, 3.0), Catch::Matchers::WithinRel(504.0, 1e-14));
    const auto t = bilaplacian_power(-compute_alpha(3.0), 13);
    CHECK_THAT(t.coeff, Catch::Matchers::WithinRel(504.0, 1e-14));
    CHECK(t.exponent == -6.0);  // -alpha - 4

    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 5 + static_cast<int>(unif(rng) * 40);
        const double pmin = (n + 4.0) / (n - 4.0);
        const double p = pmin * (1.001 + 50.0 * unif(rng));
        const double K0 = compute_K0(n, p);
        const auto b = bilaplacian_power(-compute_alpha(p), n);
        CHECK_THAT(K0, Catch::Matchers::WithinRel(b.coeff, 1e-12));
        // identity p*K0 = (alpha+4)(alpha+2)(n-2-alpha)(n-4-alpha)
        const double a = compute_alpha(p);
        const double rhs = (a + 4) * (a + 2) * (n - 2 - a) * (n - 4 - a);
        CHECK_THAT(p * K0, Catch::Matchers::WithinRel(rhs, 1e-12));
    }
}

TEST_CASE("K0 rejects subcritical exponents") {
    CHECK_THROWS_AS(compute_K0(13, 1.2), std::domain_error);
    CHECK_THROWS_AS(compute_K0(5, 2.0), std::domain_error);  // (n+4)/(n-4) = 9
}

TEST_CASE("K0 large-p asymptote 8(n-2)(n-4)/p") {
    // sanity fit of |p*K0 - 8(n-2)(n-4)| <= C/p, not a hard bound
    for (int n : {13, 31}) {
        const double limit = 8.0 * (n - 2) * (n - 4);
        double fitted_C = 0.0;
        for (double p : {100.0, 400.0, 1600.0, 6400.0}) {
            const double dev = std::abs(p * compute_K0(n, static_cast<double>(p)) - limit);
            fitted_C = std::max(fitted_C, dev * p);
        }
        for (double p : {100.0, 1000.0, 10000.0}) {
            const double dev = std::abs(p * compute_K0(n, p) - limit);
            CHECK(dev <= 1.25 * fitted_C / p + 1e-9);
        }
        INFO("n=" << n << " fitted C=" << fitted_C);
        CHECK(fitted_C > 0.0);
    }
}

TEST_CASE("pc closed form against the bisection oracle") {
    const auto pc13 = compute_pc<double>(13);
    REQUIRE(pc13.has_value());
    CHECK_THAT(*pc13, Catch::Matchers::WithinAbs(28.17, 0.05));
    for (int n = 13; n <= 31; ++n) {
        const auto pc = compute_pc<double>(n);
        REQUIRE(pc.has_value());
        CHECK_THAT(*pc, Catch::Matchers::WithinRel(pc_bisection_oracle(n), 1e-9));
        // defining identity p*K0 = Hn at p = pc
        CHECK_THAT(*pc * compute_K0(n, *pc), Catch::Matchers::WithinRel(compute_Hn(n), 1e-9));
    }
}

TEST_CASE("pc not applicable below dimension 13") {
    for (int n = 5; n <= 12; ++n) CHECK_FALSE(compute_pc<double>(n).has_value());
}

TEST_CASE("threshold equivalence p >= pc  <=>  p*K0 <= Hn") {
    for (int n : {13, 21, 31}) {
        const double pc = *compute_pc<double>(n);
        for (double f : {0.7, 0.9, 0.99, 1.01, 1.5, 4.0}) {
            const double p = pc * f;
            if (p <= (n + 4.0) / (n - 4.0)) continue;
            const bool above = p >= pc;
            const bool stable = p * compute_K0(n, p) <= compute_Hn(n);
            CHECK(above == stable);
        }
    }
}

TEST_CASE("K1 bilaplacian coefficient of r^m") {
    CHECK(compute_K1(2.0, 13) == 0.0);
    CHECK_THAT(compute_K1(3.5, 13), Catch::Matchers::WithinRel(951.5625, 1e-14));
    // cross-check against D^2(r^4) = 8n(n+2)
    CHECK_THAT(compute_K1(4.0, 5), Catch::Matchers::WithinRel(280.0, 1e-14));
    CHECK_THAT(compute_K1(4.0, 5), Catch::Matchers::WithinRel(8.0 * 5 * 7, 1e-14));
}

TEST_CASE("coefficients a1 a2") {
    const auto c = compute_coeffs(3.0, 2.0);
    CHECK(c.a1 == 0.5);
    CHECK(c.a2 == 0.5);
    const auto d = compute_coeffs(30.0, 3.5);
    CHECK_THAT(d.a1, Catch::Matchers::WithinAbs(0.96209, 1e-5));
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double prev_a1 = 0.0;
    for (double p : {1.5, 2.0, 5.0, 20.0, 100.0, 1e4}) {
        const auto cc = compute_coeffs(p, 3.5);
        CHECK_THAT(cc.a1 + cc.a2, Catch::Matchers::WithinAbs(1.0, 1e-15));
        CHECK(cc.a1 > 0.0);
        CHECK(cc.a2 > 0.0);
        CHECK(cc.a1 > prev_a1);  // a1 strictly increasing in p at fixed m
        prev_a1 = cc.a1;
    }
    for (int trial = 0; trial < 100; ++trial) {
        const double p = 1.0 + std::exp(8.0 * unif(rng));
        const double m = 0.1 + 8.0 * unif(rng);
        const auto cc = compute_coeffs(p, m);
        CHECK_THAT(cc.a1 + cc.a2, Catch::Matchers::WithinAbs(1.0, 1e-14));
    }
    // a2 (p-1) m -> 4 as p -> infinity
    const auto big = compute_coeffs(1e8, 3.5);
    CHECK_THAT(big.a2 * (1e8 - 1.0) * 3.5, Catch::Matchers::WithinRel(4.0, 1e-6));
}

TEST_CASE("derived constants and the printed K0 variant") {
    const ProblemParams params(13, 30.0, 3.5);
    CHECK(params.supercritical());
    const auto d = derive<double>(params);
    CHECK_THAT(d.K0 * (params.p - 1.0), Catch::Matchers::WithinRel(printed_variant_K0(13, 30.0), 1e-12));
    CHECK_THAT(d.alpha, Catch::Matchers::WithinRel(4.0 / 29.0, 1e-15));
    REQUIRE(d.pc.has_value());
    CHECK(d.K0 > 0.0);
    CHECK_THROWS_AS(ProblemParams(4, 30.0, 3.5), std::domain_error);
    CHECK_THROWS_AS(ProblemParams(13, 0.5, 3.5), std::domain_error);
    CHECK_THROWS_AS(ProblemParams(13, 30.0, -1.0), std::domain_error);
}

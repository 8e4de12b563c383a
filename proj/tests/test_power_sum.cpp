#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "biharm/params.hpp"
#include "biharm/power_sum.hpp"

using namespace biharm;

namespace {

// five-point central finite-difference oracle for the radial Laplacian
double laplacian_fd(double (*f)(double), double r, int n, double h) {
    const double d2 = (-f(r + 2 * h) + 16 * f(r + h) - 30 * f(r) + 16 * f(r - h) - f(r - 2 * h)) / (12 * h * h);
    const double d1 = (-f(r + 2 * h) + 8 * f(r + h) - 8 * f(r - h) + f(r - 2 * h)) / (12 * h);
    return d2 + (n - 1) / r * d1;
}

double rpow_m2(double r) { return std::pow(r, -2.0); }

}  // namespace

TEST_CASE("laplacian of a power") {
    const auto a = laplacian_power(2.0, 13);
    CHECK(a.coeff == 26.0);
    CHECK(a.exponent == 0.0);
    const auto b = laplacian_power(0.0, 13);
    CHECK(b.coeff == 0.0);
    const auto c = laplacian_power(-2.0, 13);
    CHECK(c.coeff == -18.0);
    CHECK(c.exponent == -4.0);
    // finite-difference cross-check of Lap r^{-2} at r = 0.5
    const double fd = laplacian_fd(rpow_m2, 0.5, 13, 1e-4);
    CHECK_THAT(c.coeff * std::pow(0.5, -4.0), Catch::Matchers::WithinRel(fd, 1e-7));
}

TEST_CASE("bilaplacian of a power composes two laplacians") {
    for (double e : {-1.7, -0.3, 0.5, 2.0, 3.5, 4.0, 6.0}) {
        for (int n : {5, 13, 31}) {
            const auto once = laplacian_power(e, n);
            const auto twice = laplacian_power(once.exponent, n);
            const auto b = bilaplacian_power(e, n);
            CHECK_THAT(b.coeff, Catch::Matchers::WithinRel(once.coeff * twice.coeff, 1e-14));
            CHECK(b.exponent == e - 4.0);
        }
    }
    const auto q = bilaplacian_power(4.0, 5);
    CHECK(q.coeff == 280.0);
    CHECK(q.exponent == 0.0);
    // coefficient matches K1 for e = m
    CHECK_THAT(bilaplacian_power(3.5, 13).coeff, Catch::Matchers::WithinRel(compute_K1(3.5, 13), 1e-14));
    // and K0 for e = -alpha
    for (double p : {3.0, 30.0, 500.0}) {
        const double a = compute_alpha(p);
        CHECK_THAT(bilaplacian_power(-a, 13).coeff, Catch::Matchers::WithinRel(compute_K0(13, p), 1e-13));
    }
}

TEST_CASE("bilaplacian of a power sum") {
    SECTION("constants are annihilated") {
        PowerSum<double> c(3.7);
        const auto out = bilaplacian_powersum(c, 13);
        CHECK(out.constant() == 0.0);
        CHECK(out.terms().empty());
    }
    SECTION("omega profile maps to a1 K0 r^{-alpha-4} + a2 K1 r^{m-4}") {
        const double p = 30.0, m = 3.5;
        const int n = 13;
        const double alpha = compute_alpha(p);
        const auto coeffs = compute_coeffs(p, m);
        PowerSum<double> omega;
        omega.add_term(coeffs.a1, -alpha);
        omega.add_term(coeffs.a2, m);
        omega.add_constant(-1.0);
        const auto out = bilaplacian_powersum(omega, n);
        REQUIRE(out.terms().size() == 2);
        CHECK_THAT(out.terms()[0].coeff, Catch::Matchers::WithinRel(coeffs.a1 * compute_K0(n, p), 1e-13));
        CHECK_THAT(out.terms()[0].exponent, Catch::Matchers::WithinRel(-alpha - 4.0, 1e-15));
        CHECK_THAT(out.terms()[1].coeff, Catch::Matchers::WithinRel(coeffs.a2 * compute_K1(m, n), 1e-13));
        CHECK_THAT(out.terms()[1].exponent, Catch::Matchers::WithinRel(m - 4.0, 1e-15));
    }
    SECTION("(1-r^2)^2 maps to the constant 8n(n+2)") {
        PowerSum<double> f;
        f.add_constant(1.0);
        f.add_term(-2.0, 2.0);
        f.add_term(1.0, 4.0);
        for (int n : {5, 13, 31}) {
            const auto out = bilaplacian_powersum(f, n);
            CHECK(out.terms().empty());
            CHECK_THAT(out.constant(), Catch::Matchers::WithinRel(8.0 * n * (n + 2), 1e-14));
        }
    }
}

TEST_CASE("exact singular profile identity pins down K0") {
    // D^2(r^{-alpha} - 1) = K0 r^{-alpha-4} = K0 (1 + ut)^p pointwise
    for (int n : {13, 31}) {
        for (double p : {30.0, 500.0}) {
            const double alpha = compute_alpha(p);
            const double K0 = compute_K0(n, p);
            PowerSum<double> ut;
            ut.add_term(1.0, -alpha);
            ut.add_constant(-1.0);
            const auto lhs = bilaplacian_powersum(ut, n);
            REQUIRE(lhs.terms().size() == 1);
            for (int k = 1; k <= 1000; ++k) {
                const double r = static_cast<double>(k) / 1000.0;
                const double rhs = K0 * std::exp(p * std::log1p(ut.eval(r)));
                CHECK_THAT(lhs.eval(r), Catch::Matchers::WithinRel(rhs, 1e-10));
            }
        }
    }
}

TEST_CASE("power sum algebra") {
    PowerSum<double> f;
    f.add_term(2.0, 1.5);
    f.add_term(-1.0, 3.0);
    f.add_constant(0.5);
    CHECK_THAT(f.eval(0.7), Catch::Matchers::WithinRel(2.0 * std::pow(0.7, 1.5) - std::pow(0.7, 3.0) + 0.5, 1e-15));

    const auto d = f.derivative();
    CHECK_THAT(d.eval(0.7), Catch::Matchers::WithinRel(3.0 * std::pow(0.7, 0.5) - 3.0 * 0.49, 1e-14));

    // merging keeps exponents distinct
    PowerSum<double> g;
    g.add_term(1.0, 2.0);
    g.add_term(3.0, 2.0);
    REQUIRE(g.terms().size() == 1);
    CHECK(g.terms()[0].coeff == 4.0);
    g.add_term(-4.0, 2.0);
    CHECK(g.terms().empty());

    // product: (1 + r)(1 - r) = 1 - r^2
    PowerSum<double> a, b;
    a.add_constant(1.0);
    a.add_term(1.0, 1.0);
    b.add_constant(1.0);
    b.add_term(-1.0, 1.0);
    const auto prod = a * b;
    CHECK(prod.constant() == 1.0);
    REQUIRE(prod.terms().size() == 1);
    CHECK(prod.terms()[0].coeff == -1.0);
    CHECK(prod.terms()[0].exponent == 2.0);

    // exact weighted integral: int_0^1 (1 - r^2) r^{n-1} dr = 1/n - 1/(n+2)
    CHECK_THAT(prod.integral_unit_ball_radial(13), Catch::Matchers::WithinRel(1.0 / 13 - 1.0 / 15, 1e-15));
}

#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

namespace biharm {

/// Problem data for the radial clamped bilaplacian eigenvalue problem
///   D^2 u = lambda (1+u)^p  on the unit ball in R^n,  u(1) = u'(1) = 0.
/// `m` is the auxiliary exponent of the two-term comparison profile
/// a1 r^{-4/(p-1)} + a2 r^m - 1.
struct ProblemParams {
    int n = 13;
    double p = 30.0;
    double m = 3.5;

    ProblemParams() = default;
    ProblemParams(int n_, double p_, double m_) : n(n_), p(p_), m(m_) { validate(); }

    void validate() const {
        if (n < 5) throw std::domain_error("ProblemParams: dimension n must be >= 5");
        if (!(p > 1.0)) throw std::domain_error("ProblemParams: exponent p must be > 1");
        if (!(m > 0.0)) throw std::domain_error("ProblemParams: exponent m must be > 0");
    }

    double critical_exponent() const { return (n + 4.0) / (n - 4.0); }
    bool supercritical() const { return p > critical_exponent(); }
};

/// alpha = 4/(p-1), the decay exponent of the explicit singular profile.
template <class Real = double>
Real compute_alpha(Real p) {
    if (!(p > Real(1))) throw std::domain_error("compute_alpha: requires p > 1");
    return Real(4) / (p - Real(1));
}

/// Hn = (n(n-4)/4)^2, the optimal constant of the classical Hardy-Rellich
/// inequality on the clamped space.
template <class Real = double>
Real compute_Hn(int n) {
    if (n < 5) throw std::domain_error("compute_Hn: requires n >= 5");
    const Real q = Real(n) * Real(n - 4) / Real(4);
    return q * q;
}

/// The eigenvalue K0 for which ut(r) = r^{-alpha} - 1 solves
/// D^2 ut = K0 (1+ut)^p exactly in the interior:
///   K0 = alpha (alpha+2) (n-2-alpha) (n-4-alpha).
/// Requires all four factors positive, i.e. p > (n+4)/(n-4).
template <class Real = double>
Real compute_K0(int n, Real p) {
    if (n < 5) throw std::domain_error("compute_K0: requires n >= 5");
    const Real a = compute_alpha(p);
    if (!(Real(n - 4) > a))
        throw std::domain_error("compute_K0: requires supercritical p > (n+4)/(n-4)");
    return a * (a + 2) * (Real(n) - 2 - a) * (Real(n) - 4 - a);
}

/// The commonly printed variant 8(p+1)/(p-1)[n - 2(p+1)/(p-1)][n - 4p/(p-1)],
/// kept for report transparency. It differs from compute_K0 by a factor (p-1):
/// only the quadratic-denominator version makes r^{-alpha} - 1 an exact solution.
template <class Real = double>
Real printed_variant_K0(int n, Real p) {
    const Real f1 = Real(8) * (p + 1) / (p - 1);
    const Real f2 = Real(n) - 2 * (p + 1) / (p - 1);
    const Real f3 = Real(n) - 4 * p / (p - 1);
    return f1 * f2 * f3;
}

/// K1 = m(m-2)(m+n-2)(m+n-4): the exact coefficient in D^2(r^m) = K1 r^{m-4}.
template <class Real = double>
Real compute_K1(Real m, int n) {
    if (n < 5) throw std::domain_error("compute_K1: requires n >= 5");
    if (!(m > Real(0))) throw std::domain_error("compute_K1: requires m > 0");
    return m * (m - 2) * (m + Real(n) - 2) * (m + Real(n) - 4);
}

/// Threshold exponent p_c, defined by p*K0 = Hn, in closed form.
/// The closed form only produces a meaningful (positive-denominator) value
/// for n >= 13; below that the threshold does not exist and nullopt is returned.
template <class Real = double>
std::optional<Real> compute_pc(int n) {
    if (n < 5) throw std::domain_error("compute_pc: requires n >= 5");
    const Real n2 = Real(n) * Real(n);
    const Real inner = n2 + compute_Hn<Real>(n);
    const Real disc = Real(4) + n2 - 4 * std::sqrt(inner);
    if (!(disc >= Real(0))) return std::nullopt;
    const Real root = std::sqrt(disc);
    const Real den = Real(n) - 6 - root;
    if (!(den > Real(0))) return std::nullopt;
    return (Real(n) + 2 - root) / den;
}

template <class Real = double>
struct Coefficients {
    Real a1;  // m/(m + alpha)
    Real a2;  // alpha/(m + alpha)
};

/// Boundary-matching coefficients of the profile a1 r^{-alpha} + a2 r^m - 1:
/// chosen so that the profile and its derivative vanish at r = 1.
template <class Real = double>
Coefficients<Real> compute_coeffs(Real p, Real m) {
    if (!(m > Real(0))) throw std::domain_error("compute_coeffs: requires m > 0");
    const Real a = compute_alpha(p);
    return {m / (m + a), a / (m + a)};
}

template <class Real = double>
struct DerivedConstants {
    Real alpha;
    Real K0;
    Real Hn;
    std::optional<Real> pc;
    Real K1;
    Real a1;
    Real a2;
};

template <class Real = double>
DerivedConstants<Real> derive(const ProblemParams& params) {
    params.validate();
    const Real p = static_cast<Real>(params.p);
    const Real m = static_cast<Real>(params.m);
    DerivedConstants<Real> d;
    d.alpha = compute_alpha(p);
    d.K0 = compute_K0(params.n, p);
    d.Hn = compute_Hn<Real>(params.n);
    d.pc = compute_pc<Real>(params.n);
    d.K1 = compute_K1(m, params.n);
    const auto c = compute_coeffs(p, m);
    d.a1 = c.a1;
    d.a2 = c.a2;
    return d;
}

/// Label used in reports for the scalar type that produced the numbers.
template <class Real>
constexpr const char* precision_name() {
    if constexpr (sizeof(Real) == sizeof(double)) return "double";
    else return "long-double";
}

}  // namespace biharm

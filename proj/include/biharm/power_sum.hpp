#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace biharm {

template <class Real = double>
struct PowerTerm {
    Real coeff;
    Real exponent;
};

/// Finite sum  c0 + sum_i c_i r^{e_i}  with real exponents.
/// Exponents are kept distinct; terms with zero coefficient are dropped.
/// This is the exact-arithmetic backbone: the radial Laplacian and
/// bilaplacian act on it term by term with closed-form coefficients.
template <class Real = double>
class PowerSum {
  public:
    PowerSum() = default;
    explicit PowerSum(Real constant) : constant_(constant) {}

    static PowerSum zero() { return PowerSum(); }

    void add_constant(Real c) { constant_ += c; }

    void add_term(Real coeff, Real exponent) {
        if (coeff == Real(0)) return;
        if (exponent == Real(0)) {
            constant_ += coeff;
            return;
        }
        for (auto& t : terms_) {
            if (t.exponent == exponent) {
                t.coeff += coeff;
                if (t.coeff == Real(0)) {
                    t.exponent = terms_.back().exponent;
                    t.coeff = terms_.back().coeff;
                    terms_.pop_back();
                    normalize();
                }
                return;
            }
        }
        terms_.push_back({coeff, exponent});
        normalize();
    }

    Real constant() const { return constant_; }
    const std::vector<PowerTerm<Real>>& terms() const { return terms_; }

    Real eval(Real r) const {
        Real s = constant_;
        for (const auto& t : terms_) s += t.coeff * std::pow(r, t.exponent);
        return s;
    }

    /// Termwise d/dr; the constant is annihilated.
    PowerSum derivative() const {
        PowerSum d;
        for (const auto& t : terms_) d.add_term(t.coeff * t.exponent, t.exponent - 1);
        return d;
    }

    PowerSum operator*(const PowerSum& rhs) const {
        PowerSum out;
        out.constant_ = constant_ * rhs.constant_;
        for (const auto& t : terms_) out.add_term(t.coeff * rhs.constant_, t.exponent);
        for (const auto& t : rhs.terms_) out.add_term(constant_ * t.coeff, t.exponent);
        for (const auto& a : terms_)
            for (const auto& b : rhs.terms_) out.add_term(a.coeff * b.coeff, a.exponent + b.exponent);
        return out;
    }

    PowerSum operator+(const PowerSum& rhs) const {
        PowerSum out = *this;
        out.constant_ += rhs.constant_;
        for (const auto& t : rhs.terms_) out.add_term(t.coeff, t.exponent);
        return out;
    }

    PowerSum operator-(const PowerSum& rhs) const {
        PowerSum out = *this;
        out.constant_ -= rhs.constant_;
        for (const auto& t : rhs.terms_) out.add_term(-t.coeff, t.exponent);
        return out;
    }

    /// Exact integral over (0,1) weighted by r^{n-1}: sum c_i/(e_i+n) + c0/n.
    /// Valid when every e_i + n > 0.
    Real integral_unit_ball_radial(int n) const {
        Real s = constant_ / Real(n);
        for (const auto& t : terms_) {
            const Real q = t.exponent + Real(n);
            if (!(q > Real(0)))
                throw std::domain_error("PowerSum: non-integrable exponent against r^{n-1}");
            s += t.coeff / q;
        }
        return s;
    }

  private:
    void normalize() {
        std::sort(terms_.begin(), terms_.end(),
                  [](const PowerTerm<Real>& a, const PowerTerm<Real>& b) { return a.exponent < b.exponent; });
    }

    Real constant_ = Real(0);
    std::vector<PowerTerm<Real>> terms_;
};

/// Radial identity: Lap r^e = e(e+n-2) r^{e-2}.
template <class Real = double>
PowerTerm<Real> laplacian_power(Real e, int n) {
    return {e * (e + Real(n) - 2), e - 2};
}

/// Composition of the radial Laplacian with itself:
///   D^2 r^e = e(e-2)(e+n-2)(e+n-4) r^{e-4}.
template <class Real = double>
PowerTerm<Real> bilaplacian_power(Real e, int n) {
    return {e * (e - 2) * (e + Real(n) - 2) * (e + Real(n) - 4), e - 4};
}

template <class Real = double>
PowerSum<Real> laplacian_powersum(const PowerSum<Real>& f, int n) {
    PowerSum<Real> out;
    for (const auto& t : f.terms()) {
        const auto l = laplacian_power(t.exponent, n);
        out.add_term(t.coeff * l.coeff, l.exponent);
    }
    return out;
}

template <class Real = double>
PowerSum<Real> bilaplacian_powersum(const PowerSum<Real>& f, int n) {
    PowerSum<Real> out;
    for (const auto& t : f.terms()) {
        const auto b = bilaplacian_power(t.exponent, n);
        out.add_term(t.coeff * b.coeff, b.exponent);
    }
    return out;
}

}  // namespace biharm

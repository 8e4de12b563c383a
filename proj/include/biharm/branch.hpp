#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "biharm/banded.hpp"
#include "biharm/discrete_operator.hpp"
#include "biharm/grid.hpp"
#include "biharm/params.hpp"
#include "biharm/power_sum.hpp"
#include "biharm/quadrature.hpp"

namespace biharm {

struct BranchPoint {
    double lambda = 0.0;
    RadialField solution;       // full grid, boundary value included
    double center_value = 0.0;  // u(0) by quadratic extrapolation
    double mu1 = 0.0;
    bool converged = false;
    int newton_iters = 0;
};

struct StepPolicy {
    double initial_step_fraction = 0.05;  // first step as a fraction of K0
    double growth = 1.3;
    int easy_iterations = 5;   // grow the step when Newton needed at most this many
    double min_rel_step = 1e-8;
    std::size_t max_points = 4000;
};

struct BranchResult {
    std::vector<BranchPoint> points;
    double lambda_star_estimate = 0.0;
    bool fold_detected = false;
    // false when mu1 failed to decrease monotonically along the branch:
    // a sign the grid is too coarse and the run should be repeated finer
    bool mu1_monotone = true;
    std::size_t nodes = 0;
    GridKind grid_kind = GridKind::graded;
    double lambda1 = 0.0;
    // diagnostic only: estimated limit of r^{4/(p-1)} u(r) at the last point
    double weak_singularity_estimate = 0.0;
};

namespace detail {

// (1+u)^q with overflow guard; exponents here reach p ~ 1e6
inline double safe_pow1p(double one_plus_u, double q) {
    if (!(one_plus_u > 0.0)) return std::numeric_limits<double>::infinity();
    const double e = q * std::log(one_plus_u);
    if (e > 690.0) return std::numeric_limits<double>::infinity();
    return std::exp(e);
}

struct NewtonOutcome {
    std::vector<double> u;
    bool converged = false;
    int iterations = 0;
};

// Damped Newton for B u = lambda V (1+u)^p. Convergence is measured by the
// componentwise backward-style residual |F_i| / (|B||u| + lambda V g + V)_i:
// on strongly graded grids the raw pointwise residual near the origin sits at
// the h_min^{-4} roundoff floor and is not a usable criterion.
inline NewtonOutcome newton_solve(const DiscreteOperator& op, double lambda, double p,
                                  std::span<const double> init, double tol, int max_iter = 60) {
    const auto& B = op.matrix();
    const auto& V = op.weights();
    const std::size_t M = op.unknowns();
    NewtonOutcome out;
    out.u.assign(init.begin(), init.end());

    auto residual = [&](const std::vector<double>& u, std::vector<double>& F) -> double {
        const auto Bu = B.apply(u);
        const auto scale = B.apply_abs(u);
        F.resize(M);
        double worst = 0.0;
        for (std::size_t i = 0; i < M; ++i) {
            const double g = safe_pow1p(1.0 + u[i], p);
            if (!std::isfinite(g)) return std::numeric_limits<double>::infinity();
            F[i] = Bu[i] - lambda * V[i] * g;
            const double denom = scale[i] + lambda * V[i] * g + V[i];
            worst = std::max(worst, std::abs(F[i]) / denom);
        }
        return worst;
    };

    std::vector<double> F, Fnew;
    double res = residual(out.u, F);
    for (int it = 0; it < max_iter; ++it) {
        if (res <= tol) {
            out.converged = true;
            out.iterations = it;
            return out;
        }
        SymBanded J = B;
        std::vector<double> shift(M);
        for (std::size_t i = 0; i < M; ++i)
            shift[i] = -V[i] * lambda * p * safe_pow1p(1.0 + out.u[i], p - 1.0);
        if (!std::all_of(shift.begin(), shift.end(), [](double s) { return std::isfinite(s); })) {
            out.iterations = it;
            return out;
        }
        J.add_to_diagonal(shift);
        BandedCholesky chol(J);
        if (!chol.ok()) {  // indefinite linearization: treated as step failure
            out.iterations = it;
            return out;
        }
        std::vector<double> rhs(M);
        for (std::size_t i = 0; i < M; ++i) rhs[i] = -F[i];
        const auto du = chol.solve(rhs);

        double t = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 30; ++ls) {
            std::vector<double> trial(M);
            for (std::size_t i = 0; i < M; ++i) trial[i] = out.u[i] + t * du[i];
            const double rnew = residual(trial, Fnew);
            if (rnew < res) {
                out.u.swap(trial);
                F.swap(Fnew);
                res = rnew;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            out.iterations = it;
            return out;
        }
    }
    out.iterations = max_iter;
    out.converged = res <= tol;
    return out;
}

// Smallest eigenvalue of the pencil (B - diag(V q), V) by inverse iteration in
// the V-inner product. A small diagonal shift is applied when the matrix is
// not positive definite (just past a fold).
inline std::optional<double> smallest_eigenvalue(const SymBanded& B, std::span<const double> V,
                                                 std::span<const double> q, double scale_hint,
                                                 double rel_tol = 1e-8,
                                                 std::vector<double>* eigenvector = nullptr) {
    const std::size_t M = V.size();
    SymBanded J = B;
    std::vector<double> shift(M);
    for (std::size_t i = 0; i < M; ++i) shift[i] = -V[i] * q[i];
    J.add_to_diagonal(shift);

    double sigma = 0.0;
    std::optional<BandedCholesky> chol;
    for (int attempt = 0; attempt < 60; ++attempt) {
        SymBanded Js = J;
        if (sigma != 0.0) {
            std::vector<double> s(M);
            for (std::size_t i = 0; i < M; ++i) s[i] = sigma * V[i];
            Js.add_to_diagonal(s);
        }
        BandedCholesky c(Js);
        if (c.ok()) {
            chol.emplace(std::move(c));
            break;
        }
        sigma = (sigma == 0.0) ? std::max(scale_hint, 1.0) * 1e-10 : sigma * 8.0;
    }
    if (!chol) return std::nullopt;

    std::vector<double> x(M, 1.0);
    double vnorm = 0.0;
    for (std::size_t i = 0; i < M; ++i) vnorm += V[i];
    for (auto& xi : x) xi /= std::sqrt(vnorm);

    double mu = std::numeric_limits<double>::quiet_NaN();
    for (int it = 0; it < 2000; ++it) {
        std::vector<double> rhs(M);
        for (std::size_t i = 0; i < M; ++i) rhs[i] = V[i] * x[i];
        auto y = chol->solve(rhs);
        double norm2 = 0.0;
        for (std::size_t i = 0; i < M; ++i) norm2 += V[i] * y[i] * y[i];
        const double nrm = std::sqrt(norm2);
        for (auto& yi : y) yi /= nrm;
        const auto Jy = J.apply(y);
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < M; ++i) {
            num += y[i] * Jy[i];
            den += V[i] * y[i] * y[i];
        }
        const double mu_new = num / den;
        x.swap(y);
        if (std::isfinite(mu) &&
            std::abs(mu_new - mu) <= rel_tol * std::max(std::abs(mu_new), 1e-12 * scale_hint)) {
            if (eigenvector) *eigenvector = x;
            return mu_new;
        }
        mu = mu_new;
    }
    if (eigenvector) *eigenvector = x;
    return mu;
}

}  // namespace detail

/// First eigenvalue of the clamped bilaplacian on the ball, by inverse
/// iteration on the weak-form pencil. The eigenfunction is returned for the
/// one-sign (Jentzsch) check.
struct Lambda1Result {
    double value = 0.0;
    RadialField eigenfunction;
    bool one_signed = false;
};

inline Lambda1Result lambda1(int n, const RadialGrid& grid) {
    if (n != grid.dim) throw std::invalid_argument("lambda1: grid dimension mismatch");
    const DiscreteOperator op(grid);
    std::vector<double> zero(op.unknowns(), 0.0);
    std::vector<double> vec;
    const auto mu = detail::smallest_eigenvalue(op.matrix(), op.weights(), zero, 1.0, 1e-10, &vec);
    if (!mu) throw std::runtime_error("lambda1: eigensolver failed");
    Lambda1Result out;
    out.value = *mu;
    double lo = 0.0, hi = 0.0;
    for (double v : vec) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (std::abs(lo) > hi)
        for (auto& v : vec) v = -v;
    double minv = std::numeric_limits<double>::infinity(), maxv = -minv;
    for (double v : vec) {
        minv = std::min(minv, v);
        maxv = std::max(maxv, v);
    }
    out.one_signed = minv >= -1e-8 * maxv;
    out.eigenfunction = op.to_field(vec);
    return out;
}

/// Smallest eigenvalue of the linearization D^2 - p lambda (1+u)^{p-1} at a
/// branch point, in the r^{n-1}-weighted inner product.
inline double mu1_of(const BranchPoint& point, const ProblemParams& params, const DiscreteOperator& op) {
    if (!point.converged) throw std::invalid_argument("mu1_of: point did not converge");
    const std::size_t M = op.unknowns();
    std::vector<double> q(M);
    for (std::size_t i = 0; i < M; ++i)
        q[i] = params.p * point.lambda * detail::safe_pow1p(1.0 + point.solution.values[i], params.p - 1.0);
    const auto mu =
        detail::smallest_eigenvalue(op.matrix(), op.weights(), q, std::abs(point.lambda) + 1.0, 1e-8);
    if (!mu) throw std::runtime_error("mu1_of: inverse iteration stagnated");
    return *mu;
}

/// One Newton solve of the discrete problem at fixed lambda, continuing from
/// `init`. Non-convergence is an expected outcome near the fold and is
/// reported through `converged`, not an exception.
inline BranchPoint solve_bvp(double lambda, const RadialField& init, const ProblemParams& params,
                             const DiscreteOperator& op) {
    if (lambda < 0.0) throw std::domain_error("solve_bvp: lambda must be >= 0");
    params.validate();
    const std::size_t M = op.unknowns();
    std::vector<double> u0(init.values.begin(), init.values.begin() + static_cast<std::ptrdiff_t>(M));
    const auto sol = detail::newton_solve(op, lambda, params.p, u0, 1e-10 * (1.0 + lambda));
    BranchPoint pt;
    pt.lambda = lambda;
    pt.converged = sol.converged;
    pt.newton_iters = sol.iterations;
    pt.solution = op.to_field(sol.u);
    pt.center_value = op.center_value(sol.u);
    if (sol.converged) pt.mu1 = mu1_of(pt, params, op);
    return pt;
}

/// Continuation in lambda from 0 with adaptive step halving. The estimate of
/// lambda* is the last converged lambda plus half the final bracket. Points
/// past the discrete turning point (mu1 < 0) are trimmed; reaching one is
/// recorded as fold evidence.
inline BranchResult continue_branch(const ProblemParams& params, const RadialGrid& grid,
                                    const StepPolicy& policy = {}) {
    params.validate();
    if (!params.supercritical())
        throw std::domain_error("continue_branch: requires supercritical parameters");
    const DiscreteOperator op(grid);
    const double K0 = compute_K0(params.n, params.p);
    const std::size_t M = op.unknowns();

    BranchResult result;
    result.nodes = grid.size();
    result.grid_kind = grid.kind;
    result.lambda1 = lambda1(params.n, grid).value;

    std::vector<double> u(M, 0.0), u_prev(M, 0.0);
    double lam = 0.0, lam_prev = 0.0;
    double step = policy.initial_step_fraction * K0;
    bool crossed_fold = false;

    while (result.points.size() < policy.max_points) {
        if (lam > 0.0 && step < policy.min_rel_step * lam) break;
        const double target = lam + step;
        if (!(target > lam)) break;  // step underflow
        std::vector<double> guess(M);
        if (lam_prev != lam) {
            const double w = (target - lam_prev) / (lam - lam_prev);  // secant predictor
            for (std::size_t i = 0; i < M; ++i) guess[i] = u_prev[i] + w * (u[i] - u_prev[i]);
        } else {
            guess = u;
        }
        const auto sol = detail::newton_solve(op, target, params.p, guess, 1e-10 * (1.0 + target));
        if (!sol.converged) {
            step *= 0.5;
            continue;
        }
        BranchPoint pt;
        pt.lambda = target;
        pt.converged = true;
        pt.newton_iters = sol.iterations;
        pt.solution = op.to_field(sol.u);
        pt.center_value = op.center_value(sol.u);
        pt.mu1 = mu1_of(pt, params, op);
        if (pt.mu1 <= 0.0) {  // past the discrete turning point; keep as bracket only
            crossed_fold = true;
            lam = target;
            break;
        }
        u_prev = u;
        lam_prev = lam;
        u = sol.u;
        lam = target;
        result.points.push_back(std::move(pt));
        if (sol.iterations <= policy.easy_iterations) step *= policy.growth;
    }

    result.lambda_star_estimate = crossed_fold ? lam : lam + 0.5 * step;

    for (std::size_t i = 1; i < result.points.size(); ++i)
        if (!(result.points[i].mu1 < result.points[i - 1].mu1)) result.mu1_monotone = false;

    // fold evidence: mu1 decreasing monotonically toward zero over the last
    // decade of accepted steps
    const std::size_t K = std::min<std::size_t>(10, result.points.size());
    bool decreasing = K >= 2;
    for (std::size_t i = result.points.size() - K; i + 1 < result.points.size(); ++i)
        if (!(result.points[i].mu1 > result.points[i + 1].mu1)) decreasing = false;
    double mu_max = 0.0;
    for (const auto& pt : result.points) mu_max = std::max(mu_max, pt.mu1);
    const double mu_last = result.points.empty() ? 0.0 : result.points.back().mu1;
    result.fold_detected = crossed_fold || (decreasing && mu_last < 0.2 * mu_max);

    if (!result.points.empty()) {
        const auto& last = result.points.back();
        const double alpha = compute_alpha(params.p);
        const double r0 = last.solution.grid.nodes.front();
        result.weak_singularity_estimate = std::pow(r0, alpha) * last.solution.values.front();
    }
    return result;
}

struct BoundCheckReport {
    bool applicable = false;
    double max_violation = 0.0;  // max over nodes and points of u - (r^{-alpha} - 1)
    double location = 0.0;
    double lambda_at_worst = 0.0;
    bool satisfied = false;
};

/// Verifies the pointwise upper bound u_lambda <= r^{-4/(p-1)} - 1 on every
/// node of every branch point. Only meaningful in the regime of the bound:
/// n >= 13 and p > p_c(n).
inline BoundCheckReport check_upper_bound(const BranchResult& result, const ProblemParams& params,
                                          double tolerance = 1e-9) {
    if (params.n < 13) throw std::domain_error("check_upper_bound: requires n >= 13");
    const auto pc = compute_pc<double>(params.n);
    if (!pc || !(params.p > *pc)) throw std::domain_error("check_upper_bound: requires p > p_c(n)");
    const double alpha = compute_alpha(params.p);
    BoundCheckReport rep;
    rep.applicable = true;
    rep.max_violation = -std::numeric_limits<double>::infinity();
    for (const auto& pt : result.points) {
        const auto& r = pt.solution.grid.nodes;
        for (std::size_t i = 0; i < r.size(); ++i) {
            const double bound = std::pow(r[i], -alpha) - 1.0;
            const double viol = pt.solution.values[i] - bound;
            if (viol > rep.max_violation) {
                rep.max_violation = viol;
                rep.location = r[i];
                rep.lambda_at_worst = pt.lambda;
            }
        }
    }
    rep.satisfied = rep.max_violation <= tolerance;
    return rep;
}

struct WeakFormCheck {
    double max_rel_mismatch = 0.0;
    bool quadrature_ok = true;
};

/// Tests the very-weak formulation int u D^2 phi = lambda int (1+u)^p phi
/// (equivalent to the H_0^2 form for clamped polynomial test functions)
/// against five fixed even polynomials phi_k = (1-r^2)^2 r^{2k}.
/// The solution is interpolated with centered cubic Hermite pieces, so the
/// quadrature error is far below the discretization error being measured.
inline WeakFormCheck weak_form_check(const BranchPoint& point, const ProblemParams& params) {
    const auto& grid = point.solution.grid;
    const auto& r = grid.nodes;
    const auto& uv = point.solution.values;
    const std::size_t N = r.size();
    const int n = grid.dim;

    // centered-slope cubic Hermite interpolation of the nodal solution
    std::vector<double> slope(N);
    for (std::size_t i = 0; i < N; ++i) {
        if (i == 0 || i + 1 == N) {
            const std::size_t a = (i == 0) ? 0 : N - 3;
            const double h1 = r[a + 1] - r[a], h2 = r[a + 2] - r[a + 1];
            const double d1 = (uv[a + 1] - uv[a]) / h1, d2 = (uv[a + 2] - uv[a + 1]) / h2;
            slope[i] = (i == 0) ? d1 - h1 * (d2 - d1) / (h1 + h2) : d2 + h2 * (d2 - d1) / (h1 + h2);
        } else {
            const double hm = r[i] - r[i - 1], hp = r[i + 1] - r[i];
            slope[i] = (uv[i + 1] - uv[i - 1]) / (hm + hp);
        }
    }
    auto interp = [&](double x) -> double {
        auto it = std::upper_bound(r.begin(), r.end(), x);
        std::size_t j = (it == r.begin()) ? 0 : static_cast<std::size_t>(it - r.begin() - 1);
        if (j + 1 >= N) j = N - 2;
        const double h = r[j + 1] - r[j];
        const double t = (x - r[j]) / h;
        const double t2 = t * t, t3 = t2 * t;
        return uv[j] * (2 * t3 - 3 * t2 + 1) + slope[j] * h * (t3 - 2 * t2 + t) +
               uv[j + 1] * (-2 * t3 + 3 * t2) + slope[j + 1] * h * (t3 - t2);
    };

    WeakFormCheck out;
    for (int k = 0; k < 5; ++k) {
        PowerSum<double> phi;  // (1-r^2)^2 r^{2k}
        phi.add_term(1.0, 2.0 * k);
        phi.add_term(-2.0, 2.0 * k + 2);
        phi.add_term(1.0, 2.0 * k + 4);
        const auto bilap_phi = bilaplacian_powersum(phi, n);
        const double rmin = r.front();
        auto lhs = integrate(
            [&](double x) {
                const double u = (x < rmin) ? point.center_value : interp(x);
                return u * bilap_phi.eval(x) * std::pow(x, n - 1);
            },
            0.0, 1.0, 1e-11, 1e-14);
        auto rhs = integrate(
            [&](double x) {
                const double u = (x < rmin) ? point.center_value : interp(x);
                return detail::safe_pow1p(1.0 + u, params.p) * phi.eval(x) * std::pow(x, n - 1);
            },
            0.0, 1.0, 1e-11, 1e-14);
        if (!lhs.converged || !rhs.converged) out.quadrature_ok = false;
        const double rel = std::abs(lhs.value - point.lambda * rhs.value) /
                           std::max(std::abs(lhs.value), std::abs(point.lambda * rhs.value));
        out.max_rel_mismatch = std::max(out.max_rel_mismatch, rel);
    }
    return out;
}

}  // namespace biharm

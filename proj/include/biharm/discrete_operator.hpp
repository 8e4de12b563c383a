#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "biharm/banded.hpp"
#include "biharm/grid.hpp"

namespace biharm {

/// Finite-difference clamped radial bilaplacian on a RadialGrid.
///
/// The unknowns are the nodal values at r_1..r_{N-1}; u(1)=0 is eliminated and
/// u'(1)=0 enters through a mirror ghost node. At the origin the flux form of
/// the radial Laplacian is used, so the r=0 face carries the weight r^{n-1}=0
/// and the regularity conditions u'(0)=u'''(0)=0 hold without ghost values.
///
/// The pentadiagonal matrix is assembled in weak (Galerkin) form
///   B = S^T V^{-1} S,  (S u)_k = flux divergence of u at node k,
/// which makes the operator exactly self-adjoint in the r^{n-1}-weighted inner
/// product: <D^2 u, v>_V = u^T B v. Interior rows coincide with the composed
/// second-order Laplacian stencil, so the truncation error is O(h^2) on the
/// smoothly graded mesh.
class DiscreteOperator {
  public:
    explicit DiscreteOperator(RadialGrid grid) : grid_(std::move(grid)) { assemble(); }

    const RadialGrid& grid() const { return grid_; }
    int dim() const { return grid_.dim; }
    /// Number of interior unknowns (grid size minus the clamped boundary node).
    std::size_t unknowns() const { return grid_.size() - 1; }

    const SymBanded& matrix() const { return matrix_; }
    /// Interior quadrature weights V_i = r_i^{n-1} dr_i.
    const std::vector<double>& weights() const { return weight_; }

    /// Pointwise values of D^2 u at the interior nodes, V^{-1} B u.
    std::vector<double> apply(std::span<const double> u) const {
        if (u.size() != unknowns()) throw std::invalid_argument("DiscreteOperator::apply: size mismatch");
        auto y = matrix_.apply(u);
        for (std::size_t i = 0; i < y.size(); ++i) y[i] /= weight_[i];
        return y;
    }

    /// Solves D^2 u = f with clamped conditions; f given at interior nodes.
    std::vector<double> solve(std::span<const double> f) const {
        if (f.size() != unknowns()) throw std::invalid_argument("DiscreteOperator::solve: size mismatch");
        std::vector<double> rhs(f.size());
        for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = weight_[i] * f[i];
        BandedCholesky chol(matrix_);
        if (!chol.ok()) throw std::runtime_error("DiscreteOperator::solve: factorization failed");
        return chol.solve(rhs);
    }

    /// Full-grid field (boundary value 0 appended) from interior values.
    RadialField to_field(std::span<const double> u_interior) const {
        std::vector<double> v(u_interior.begin(), u_interior.end());
        v.push_back(0.0);
        return RadialField(grid_, std::move(v));
    }

    /// u(0) by quadratic extrapolation through the three smallest nodes.
    double center_value(std::span<const double> u_interior) const {
        const auto& r = grid_.nodes;
        double acc = 0.0;
        for (int i = 0; i < 3; ++i) {
            double term = u_interior[static_cast<std::size_t>(i)];
            for (int j = 0; j < 3; ++j)
                if (j != i) term *= -r[static_cast<std::size_t>(j)] / (r[static_cast<std::size_t>(i)] - r[static_cast<std::size_t>(j)]);
            acc += term;
        }
        return acc;
    }

  private:
    void assemble() {
        grid_.validate();
        const auto& r = grid_.nodes;
        const std::size_t N = r.size();
        if (N < 50) throw std::invalid_argument("DiscreteOperator: grid must have >= 50 nodes");
        const int n = grid_.dim;

        // faces between nodes; face 0 sits at the origin, face N mirrors past r=1
        const double rghost = 2.0 - r[N - 2];
        std::vector<double> face(N + 1), cflux(N + 1);
        face[0] = 0.0;
        for (std::size_t i = 1; i < N; ++i) face[i] = 0.5 * (r[i - 1] + r[i]);
        face[N] = 0.5 * (r[N - 1] + rghost);
        cflux[0] = 0.0;
        for (std::size_t i = 1; i < N; ++i) {
            const double h = r[i] - r[i - 1];
            if (!(h > 0.0)) throw std::runtime_error("DiscreteOperator: duplicate nodes");
            cflux[i] = std::pow(face[i], n - 1) / h;
        }
        cflux[N] = std::pow(face[N], n - 1) / (rghost - r[N - 1]);

        // cell widths; the boundary node keeps the full central width so that
        // the Laplacian value at r=1 stays second-order consistent
        std::vector<double> width(N);
        for (std::size_t i = 0; i + 1 < N; ++i) width[i] = face[i + 1] - face[i];
        width[N - 1] = (rghost - r[N - 2]) / 2.0;

        wall_.resize(N);
        for (std::size_t i = 0; i < N; ++i) wall_[i] = std::pow(r[i], n - 1) * width[i];
        weight_.assign(wall_.begin(), wall_.end() - 1);

        // S as three bands over rows 0..N-1 and columns 0..N-2 (u at r=1 is 0,
        // the mirror ghost folds c_{N+1/2} into the last row)
        const std::size_t M = N - 1;
        slower_.assign(N, 0.0);   // S[i][i-1]
        sdiag_.assign(N, 0.0);    // S[i][i]
        supper_.assign(N, 0.0);   // S[i][i+1]
        for (std::size_t i = 0; i + 1 < N; ++i) {
            if (i > 0) slower_[i] = cflux[i];
            sdiag_[i] = -(cflux[i] + cflux[i + 1]);
            if (i + 1 <= M - 1) supper_[i] = cflux[i + 1];
        }
        slower_[N - 1] = cflux[N - 1] + cflux[N];

        // B = S^T V^{-1} S, grouped as sum_k (S[k,i]/V_k) S[k,j] to avoid
        // underflow of the squared flux coefficients at large n
        matrix_ = SymBanded(M, 2);
        auto entry = [&](std::size_t k, std::size_t j) -> double {
            if (j + 1 == k) return slower_[k];
            if (j == k) return sdiag_[k];
            if (j == k + 1) return supper_[k];
            return 0.0;
        };
        for (std::size_t i = 0; i < M; ++i) {
            for (std::size_t j = i; j <= i + 2 && j < M; ++j) {
                double s = 0.0;
                const std::size_t kmax = (j + 1 < N) ? j + 1 : N - 1;
                const std::size_t kmin = (i > 0) ? i - 1 : 0;
                for (std::size_t k = kmin; k <= kmax; ++k) {
                    const double ski = entry(k, i);
                    if (ski == 0.0) continue;
                    const double skj = entry(k, j);
                    if (skj == 0.0) continue;
                    s += (ski / wall_[k]) * skj;
                }
                matrix_.at(i, j) = s;
            }
        }
    }

    RadialGrid grid_;
    SymBanded matrix_;
    std::vector<double> weight_;  // interior nodes
    std::vector<double> wall_;    // all nodes, including r=1
    std::vector<double> slower_, sdiag_, supper_;
};

struct PositivityReport {
    bool positive = false;
    bool numerical_failure = false;
    double min_entry = 0.0;
    double max_entry = 0.0;
    std::size_t nodes = 0;
};

/// Discrete Boggio check: every entry of the inverse of the clamped discrete
/// bilaplacian must be nonnegative (the columns are the responses to point
/// loads). Dense inversion, so limited to small grids.
inline PositivityReport check_discrete_positivity(const DiscreteOperator& op, double tolerance = -1e-10) {
    PositivityReport rep;
    rep.nodes = op.grid().size();
    if (rep.nodes > 400) throw std::invalid_argument("check_discrete_positivity: needs <= 400 nodes");
    BandedCholesky chol(op.matrix());
    if (!chol.ok()) {
        rep.numerical_failure = true;
        return rep;
    }
    const std::size_t M = op.unknowns();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    std::vector<double> e(M, 0.0);
    for (std::size_t j = 0; j < M; ++j) {
        e[j] = op.weights()[j];  // column j of B^{-1} V = response to a point mass
        const auto col = chol.solve(e);
        e[j] = 0.0;
        for (double v : col) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    rep.min_entry = lo;
    rep.max_entry = hi;
    rep.positive = lo >= tolerance;
    return rep;
}

}  // namespace biharm

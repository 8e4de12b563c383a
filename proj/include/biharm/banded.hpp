#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace biharm {

/// Symmetric banded matrix with half-bandwidth `kd` (pentadiagonal for kd=2).
/// band(0) is the main diagonal, band(d)[i] holds A(i, i+d).
class SymBanded {
  public:
    SymBanded() = default;
    SymBanded(std::size_t size, std::size_t kd) : size_(size), kd_(kd), bands_(kd + 1) {
        for (std::size_t d = 0; d <= kd; ++d) bands_[d].assign(size > d ? size - d : 0, 0.0);
    }

    std::size_t size() const { return size_; }
    std::size_t bandwidth() const { return kd_; }

    double& at(std::size_t i, std::size_t j) {
        if (j < i) std::swap(i, j);
        return bands_[j - i][i];
    }
    double get(std::size_t i, std::size_t j) const {
        if (j < i) std::swap(i, j);
        return (j - i <= kd_) ? bands_[j - i][i] : 0.0;
    }

    std::vector<double> apply(std::span<const double> x) const {
        std::vector<double> y(size_, 0.0);
        for (std::size_t i = 0; i < size_; ++i) {
            double s = bands_[0][i] * x[i];
            for (std::size_t d = 1; d <= kd_; ++d) {
                if (i + d < size_) s += bands_[d][i] * x[i + d];
                if (i >= d) s += bands_[d][i - d] * x[i - d];
            }
            y[i] = s;
        }
        return y;
    }

    /// Sum of |A(i,j)| |x_j| per row, used for backward-error style residual scales.
    std::vector<double> apply_abs(std::span<const double> x) const {
        std::vector<double> y(size_, 0.0);
        for (std::size_t i = 0; i < size_; ++i) {
            double s = std::abs(bands_[0][i] * x[i]);
            for (std::size_t d = 1; d <= kd_; ++d) {
                if (i + d < size_) s += std::abs(bands_[d][i] * x[i + d]);
                if (i >= d) s += std::abs(bands_[d][i - d] * x[i - d]);
            }
            y[i] = s;
        }
        return y;
    }

    void add_to_diagonal(std::span<const double> d) {
        for (std::size_t i = 0; i < size_; ++i) bands_[0][i] += d[i];
    }

  private:
    std::size_t size_ = 0;
    std::size_t kd_ = 0;
    std::vector<std::vector<double>> bands_;
};

/// Cholesky factorization of a symmetric positive definite banded matrix.
/// The matrix is Jacobi-equilibrated first: on strongly graded radial grids
/// the rows of the weak-form bilaplacian span many orders of magnitude and
/// factoring D A D with D = diag(A)^{-1/2} keeps the solve componentwise
/// accurate. Factorization failure (non-positive pivot) is reported through
/// ok(), not an exception: callers use it as indefiniteness evidence.
class BandedCholesky {
  public:
    BandedCholesky() = default;

    explicit BandedCholesky(const SymBanded& a) : n_(a.size()), kd_(a.bandwidth()) {
        scale_.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            const double d = a.get(i, i);
            if (!(d > 0.0) || !std::isfinite(d)) return;
            scale_[i] = 1.0 / std::sqrt(d);
        }
        low_.assign(kd_ + 1, std::vector<double>(n_, 0.0));
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t d = 0; d <= kd_ && i + d < n_; ++d)
                low_[d][i] = a.get(i, i + d) * scale_[i] * scale_[i + d];
        // in-place banded Cholesky of the equilibrated matrix, lower form
        for (std::size_t j = 0; j < n_; ++j) {
            double diag = low_[0][j];
            const std::size_t kmin = (j > kd_) ? j - kd_ : 0;
            for (std::size_t k = kmin; k < j; ++k) {
                const double ljk = low_[j - k][k];
                diag -= ljk * ljk;
            }
            if (!(diag > 0.0) || !std::isfinite(diag)) return;
            low_[0][j] = std::sqrt(diag);
            for (std::size_t i = j + 1; i <= j + kd_ && i < n_; ++i) {
                double s = low_[i - j][j];
                const std::size_t lo = (i > kd_) ? i - kd_ : 0;
                for (std::size_t k = lo; k < j; ++k) s -= low_[i - k][k] * low_[j - k][k];
                low_[i - j][j] = s / low_[0][j];
            }
        }
        ok_ = true;
    }

    bool ok() const { return ok_; }

    std::vector<double> solve(std::span<const double> b) const {
        if (!ok_) throw std::runtime_error("BandedCholesky: factorization failed");
        std::vector<double> x(n_);
        for (std::size_t i = 0; i < n_; ++i) x[i] = b[i] * scale_[i];
        for (std::size_t i = 0; i < n_; ++i) {
            double s = x[i];
            const std::size_t lo = (i > kd_) ? i - kd_ : 0;
            for (std::size_t k = lo; k < i; ++k) s -= low_[i - k][k] * x[k];
            x[i] = s / low_[0][i];
        }
        for (std::size_t ii = n_; ii-- > 0;) {
            double s = x[ii];
            for (std::size_t d = 1; d <= kd_ && ii + d < n_; ++d) s -= low_[d][ii] * x[ii + d];
            x[ii] = s / low_[0][ii];
        }
        for (std::size_t i = 0; i < n_; ++i) x[i] *= scale_[i];
        return x;
    }

  private:
    std::size_t n_ = 0;
    std::size_t kd_ = 0;
    bool ok_ = false;
    std::vector<double> scale_;
    std::vector<std::vector<double>> low_;
};

}  // namespace biharm

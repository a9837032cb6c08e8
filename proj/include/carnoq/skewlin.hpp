#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "carnoq/config.hpp"
#include "carnoq/error.hpp"

namespace carnoq {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// The 2x2 rotation generator [[0,-1],[1,0]].
Matrix standard_j();

// Rotation by theta, i.e. exp(theta * J).
Matrix rotation2(double theta);

/// Validated skew-symmetric matrix. Construction symmetrizes the input to
/// (M - M^T)/2 once the skew check passes, so stored entries satisfy
/// A^T = -A exactly.
class SkewMatrix {
 public:
  SkewMatrix() : m_(0, 0) {}
  explicit SkewMatrix(Matrix m, const Tolerances& tol = default_tolerances());

  const Matrix& matrix() const noexcept { return m_; }
  Eigen::Index dim() const noexcept { return m_.rows(); }

 private:
  Matrix m_;
};

SkewMatrix validate_skew(const Matrix& m, const Tolerances& tol = default_tolerances());

/// Orthogonal change of basis splitting a skew matrix into 2x2 rotation
/// blocks plus kernel: basis^T A basis = blockdiag(f_1 J, ..., f_n J, 0_k)
/// with frequencies sorted descending (repetitions allowed).
struct SpectralForm {
  Eigen::Index dim = 0;
  std::vector<double> frequencies;  // positive, descending
  Matrix basis;                     // d x d orthogonal
  Eigen::Index kernel_dim = 0;

  Eigen::Index n_blocks() const noexcept {
    return static_cast<Eigen::Index>(frequencies.size());
  }
  // blockdiag(f_1 J, ..., f_n J, 0_k)
  Matrix block_diagonal() const;
  // columns of `basis` spanning the orthocomplement of the kernel
  Matrix plane_basis() const;
  // columns of `basis` spanning the kernel
  Matrix kernel_basis() const;
};

SpectralForm spectral_form(const SkewMatrix& a, const Tolerances& tol = default_tolerances());

/// Real polynomial with ascending coefficients; trailing coefficients below
/// poly_tol (relative) are trimmed.
class Polynomial {
 public:
  Polynomial() : coeffs_{0.0} {}
  explicit Polynomial(std::vector<double> ascending, double trim_tol = 0.0);

  const std::vector<double>& coefficients() const noexcept { return coeffs_; }
  int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  double eval(double x) const;
  std::complex<double> eval(std::complex<double> x) const;
  double max_abs_coefficient() const;

  Polynomial operator*(const Polynomial& rhs) const;
  bool almost_equal(const Polynomial& rhs, double tol) const;

 private:
  std::vector<double> coeffs_;
};

// exp(s A), evaluated through the spectral form so the result is orthogonal
// up to rounding.
Matrix expm_skew(const SkewMatrix& a, double s, const Tolerances& tol = default_tolerances());
Matrix expm_skew(const SpectralForm& sf, double s);

// Coefficients of det(A - x I).
Polynomial char_poly(const SkewMatrix& a, const Tolerances& tol = default_tolerances());

/// Restriction of a (possibly singular) skew matrix to the orthocomplement
/// of its kernel: embedding has orthonormal columns, restricted is
/// invertible of even dimension, and embedding * restricted * embedding^T
/// reproduces the input.
struct CoimageRestriction {
  SkewMatrix restricted;
  Matrix embedding;  // d x 2n
};

CoimageRestriction restrict_to_coimage(const SkewMatrix& b,
                                       const Tolerances& tol = default_tolerances());

}  // namespace carnoq

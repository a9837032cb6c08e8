#include "carnoq/skewlin.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "carnoq/config.hpp"

namespace carnoq {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

std::string shape_string(const Matrix& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

// Deterministic sign: flip so the entry of largest magnitude is positive.
void canonicalize_sign(Vector& v) {
  Eigen::Index idx = 0;
  v.cwiseAbs().maxCoeff(&idx);
  if (v[idx] < 0.0) v = -v;
}

bool lex_less(const Vector& a, const Vector& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

// Subtract the projections of v onto the first `count` columns of basis.
void project_out(const Matrix& basis, Eigen::Index count, Vector& v) {
  for (Eigen::Index j = 0; j < count; ++j) {
    v -= basis.col(j).dot(v) * basis.col(j);
  }
}

}  // namespace

const Tolerances& default_tolerances() noexcept {
  static const Tolerances tol{};
  return tol;
}

ErrorCategory category(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument:
    case Errc::schema:
    case Errc::io:
      return ErrorCategory::usage;
    case Errc::eigensolver_failure:
    case Errc::step_size_underflow:
    case Errc::fit_failed:
      return ErrorCategory::numerical;
    default:
      return ErrorCategory::domain;
  }
}

const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument: return "InvalidArgument";
    case Errc::schema: return "SchemaError";
    case Errc::io: return "IoError";
    case Errc::not_square: return "NotSquare";
    case Errc::not_skew: return "NotSkew";
    case Errc::zero_matrix: return "ZeroMatrix";
    case Errc::not_invertible: return "NotInvertible";
    case Errc::not_orthogonal: return "NotOrthogonal";
    case Errc::not_completely_nontrivial: return "NotCompletelyNontrivial";
    case Errc::dependent_structure_matrices: return "DependentStructureMatrices";
    case Errc::too_many_verticals: return "TooManyVerticals";
    case Errc::mismatched_horizontal_spaces: return "MismatchedHorizontalSpaces";
    case Errc::dependent_verticals: return "DependentVerticals";
    case Errc::affine_curve: return "AffineCurve";
    case Errc::zero_structure_matrix: return "ZeroStructureMatrix";
    case Errc::not_contact: return "NotContact";
    case Errc::basepoint_mismatch: return "BasepointMismatch";
    case Errc::not_horizontal: return "NotHorizontal";
    case Errc::eigensolver_failure: return "EigensolverFailure";
    case Errc::step_size_underflow: return "StepSizeUnderflow";
    case Errc::fit_failed: return "FitFailed";
  }
  return "Error";
}

int exit_code(const Error& e) noexcept {
  switch (e.error_category()) {
    case ErrorCategory::usage: return 1;
    case ErrorCategory::domain: return 2;
    case ErrorCategory::numerical: return 3;
  }
  return 3;
}

Matrix standard_j() {
  Matrix j(2, 2);
  j << 0.0, -1.0, 1.0, 0.0;
  return j;
}

Matrix rotation2(double theta) {
  Matrix r(2, 2);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  r << c, -s, s, c;
  return r;
}

SkewMatrix::SkewMatrix(Matrix m, const Tolerances& tol) {
  if (m.rows() != m.cols()) {
    throw Error(Errc::not_square, "expected a square matrix, got " + shape_string(m));
  }
  if (m.size() == 0) {
    m_ = std::move(m);  // 0x0 generator of a horizontally trivial structure
    return;
  }
  if (!m.allFinite()) {
    throw Error(Errc::invalid_argument, "matrix entries must be finite");
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double dev = (m + m.transpose()).cwiseAbs().maxCoeff();
  if (dev > tol.skew_tol * scale) {
    std::ostringstream os;
    os << "max |A + A^T| entry is " << dev << " (allowed " << tol.skew_tol * scale << ")";
    throw Error(Errc::not_skew, os.str());
  }
  m_ = 0.5 * (m - m.transpose().eval());
}

SkewMatrix validate_skew(const Matrix& m, const Tolerances& tol) { return SkewMatrix(m, tol); }

Matrix SpectralForm::block_diagonal() const {
  Matrix d = Matrix::Zero(dim, dim);
  for (Eigen::Index j = 0; j < n_blocks(); ++j) {
    d(2 * j, 2 * j + 1) = -frequencies[static_cast<std::size_t>(j)];
    d(2 * j + 1, 2 * j) = frequencies[static_cast<std::size_t>(j)];
  }
  return d;
}

Matrix SpectralForm::plane_basis() const { return basis.leftCols(2 * n_blocks()); }

Matrix SpectralForm::kernel_basis() const { return basis.rightCols(kernel_dim); }

SpectralForm spectral_form(const SkewMatrix& a, const Tolerances& tol) {
  const Matrix& A = a.matrix();
  const Eigen::Index d = a.dim();
  if (d == 0) {
    SpectralForm empty;
    empty.basis = Matrix::Zero(0, 0);
    return empty;
  }

  // Symmetric eigenproblem for -A^2 = A^T A; eigenvalues are squared
  // frequencies, each plane contributing a two-dimensional eigenspace.
  Matrix S = A.transpose() * A;
  S = 0.5 * (S + S.transpose().eval());
  Eigen::SelfAdjointEigenSolver<Matrix> es(S);
  if (es.info() != Eigen::Success) {
    throw Error(Errc::eigensolver_failure, "symmetric eigensolver did not converge");
  }

  const Vector lam = es.eigenvalues();
  const double lam_max = std::max(0.0, lam.maxCoeff());
  const double lam_zero =
      std::max(tol.freq_floor * tol.freq_floor, 64.0 * kEps * lam_max);

  struct Candidate {
    double lambda;
    Vector vec;
  };
  std::vector<Candidate> candidates;
  std::vector<Vector> kernel_vecs;
  for (Eigen::Index i = 0; i < d; ++i) {
    Vector v = es.eigenvectors().col(i);
    canonicalize_sign(v);
    if (lam[i] > lam_zero) {
      candidates.push_back({lam[i], std::move(v)});
    } else {
      kernel_vecs.push_back(std::move(v));
    }
  }
  // Descending eigenvalue; lexicographic eigenvector order breaks ties inside
  // repeated eigenspaces.
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& x, const Candidate& y) {
    if (x.lambda != y.lambda) return x.lambda > y.lambda;
    return lex_less(x.vec, y.vec);
  });

  if (candidates.size() % 2 != 0) {
    throw Error(Errc::eigensolver_failure,
                "nonzero spectrum of a skew matrix must have even dimension; "
                "frequencies too close to the kernel threshold");
  }

  const Eigen::Index n = static_cast<Eigen::Index>(candidates.size()) / 2;
  Matrix basis(d, d);
  std::vector<double> freqs;
  freqs.reserve(static_cast<std::size_t>(n));
  Eigen::Index cols = 0;

  // Greedy pairing: each accepted eigenvector v spawns the plane
  // span(v, A v / f); eigenvectors already covered by accepted planes are
  // consumed without adding a block.
  std::vector<bool> used(candidates.size(), false);
  std::size_t remaining = candidates.size();
  while (remaining > 0) {
    bool progress = false;
    for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
      if (used[ci]) continue;
      Vector r = candidates[ci].vec;
      project_out(basis, cols, r);
      const double rn = r.norm();
      if (rn >= 0.1) {
        Vector v = r / rn;
        project_out(basis, cols, v);  // second sweep for orthogonality
        v.normalize();
        Vector q2 = A * v;
        project_out(basis, cols, q2);
        q2 -= v.dot(q2) * v;
        const double q2n = q2.norm();
        if (q2n <= tol.freq_floor) {
          throw Error(Errc::eigensolver_failure, "degenerate plane pairing");
        }
        q2 /= q2n;
        const double freq = q2.dot(A * v);
        basis.col(cols) = v;
        basis.col(cols + 1) = q2;
        cols += 2;
        freqs.push_back(freq);
        used[ci] = true;
        --remaining;
        progress = true;
      } else if (rn <= 1e-3) {
        used[ci] = true;
        --remaining;
        progress = true;
      }
    }
    if (!progress) {
      // Residuals stuck between the accept and consume thresholds: take the
      // largest one, it carries a genuinely new direction.
      std::size_t best = candidates.size();
      double best_norm = -1.0;
      for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
        if (used[ci]) continue;
        Vector r = candidates[ci].vec;
        project_out(basis, cols, r);
        if (r.norm() > best_norm) {
          best_norm = r.norm();
          best = ci;
        }
      }
      if (best == candidates.size() || best_norm <= 1e-3) {
        throw Error(Errc::eigensolver_failure, "plane pairing failed to converge");
      }
      Vector v = candidates[best].vec;
      project_out(basis, cols, v);
      v.normalize();
      Vector q2 = A * v;
      project_out(basis, cols, q2);
      q2 -= v.dot(q2) * v;
      q2.normalize();
      basis.col(cols) = v;
      basis.col(cols + 1) = q2;
      cols += 2;
      freqs.push_back(q2.dot(A * v));
      used[best] = true;
      --remaining;
    }
  }

  // Order planes by descending frequency (refined values may differ slightly
  // from the eigenvalue order).
  {
    std::vector<Eigen::Index> order(freqs.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
      return freqs[static_cast<std::size_t>(x)] > freqs[static_cast<std::size_t>(y)];
    });
    Matrix planes(d, cols);
    std::vector<double> sorted_freqs(freqs.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
      planes.col(2 * static_cast<Eigen::Index>(k)) = basis.col(2 * order[k]);
      planes.col(2 * static_cast<Eigen::Index>(k) + 1) = basis.col(2 * order[k] + 1);
      sorted_freqs[k] = freqs[static_cast<std::size_t>(order[k])];
    }
    basis.leftCols(cols) = planes;
    freqs = std::move(sorted_freqs);
  }

  for (Vector& kv : kernel_vecs) {
    project_out(basis, cols, kv);
    kv.normalize();
    basis.col(cols++) = kv;
  }

  SpectralForm sf;
  sf.dim = d;
  sf.frequencies = std::move(freqs);
  sf.basis = std::move(basis);
  sf.kernel_dim = d - 2 * n;
  return sf;
}

Polynomial::Polynomial(std::vector<double> ascending, double trim_tol) : coeffs_(std::move(ascending)) {
  if (coeffs_.empty()) coeffs_.push_back(0.0);
  if (trim_tol > 0.0) {
    double scale = 0.0;
    for (double c : coeffs_) scale = std::max(scale, std::abs(c));
    while (coeffs_.size() > 1 && std::abs(coeffs_.back()) <= trim_tol * scale) {
      coeffs_.pop_back();
    }
  }
}

double Polynomial::eval(double x) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

std::complex<double> Polynomial::eval(std::complex<double> x) const {
  std::complex<double> acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

double Polynomial::max_abs_coefficient() const {
  double m = 0.0;
  for (double c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

Polynomial Polynomial::operator*(const Polynomial& rhs) const {
  std::vector<double> out(coeffs_.size() + rhs.coeffs_.size() - 1, 0.0);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    for (std::size_t j = 0; j < rhs.coeffs_.size(); ++j) {
      out[i + j] += coeffs_[i] * rhs.coeffs_[j];
    }
  }
  return Polynomial(std::move(out));
}

bool Polynomial::almost_equal(const Polynomial& rhs, double tol) const {
  if (coeffs_.size() != rhs.coeffs_.size()) return false;
  const double scale = std::max({1.0, max_abs_coefficient(), rhs.max_abs_coefficient()});
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (std::abs(coeffs_[i] - rhs.coeffs_[i]) > tol * scale) return false;
  }
  return true;
}

Matrix expm_skew(const SpectralForm& sf, double s) {
  Matrix core = Matrix::Identity(sf.dim, sf.dim);
  for (Eigen::Index j = 0; j < sf.n_blocks(); ++j) {
    core.block<2, 2>(2 * j, 2 * j) = rotation2(sf.frequencies[static_cast<std::size_t>(j)] * s);
  }
  return sf.basis * core * sf.basis.transpose();
}

Matrix expm_skew(const SkewMatrix& a, double s, const Tolerances& tol) {
  return expm_skew(spectral_form(a, tol), s);
}

Polynomial char_poly(const SkewMatrix& a, const Tolerances& tol) {
  const SpectralForm sf = spectral_form(a, tol);
  // det(A - xI) = (-1)^d x^k prod_j (x^2 + f_j^2)
  std::vector<double> coeffs{1.0};
  for (double f : sf.frequencies) {
    std::vector<double> next(coeffs.size() + 2, 0.0);
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      next[i] += coeffs[i] * f * f;
      next[i + 2] += coeffs[i];
    }
    coeffs = std::move(next);
  }
  std::vector<double> shifted(coeffs.size() + static_cast<std::size_t>(sf.kernel_dim), 0.0);
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    shifted[i + static_cast<std::size_t>(sf.kernel_dim)] = coeffs[i];
  }
  if (sf.dim % 2 != 0) {
    for (double& c : shifted) c = -c;
  }
  return Polynomial(std::move(shifted));
}

CoimageRestriction restrict_to_coimage(const SkewMatrix& b, const Tolerances& tol) {
  const SpectralForm sf = spectral_form(b, tol);
  if (sf.n_blocks() == 0) {
    throw Error(Errc::zero_matrix, "matrix has no nonzero frequencies; empty coimage");
  }
  Matrix embed = sf.plane_basis();
  Matrix restricted = embed.transpose() * b.matrix() * embed;
  restricted = 0.5 * (restricted - restricted.transpose().eval());
  return CoimageRestriction{SkewMatrix(std::move(restricted), tol), std::move(embed)};
}

}  // namespace carnoq

#include "carnoq/homcurves.hpp"

#include <cmath>
#include <sstream>

namespace carnoq {

namespace {

double sqrt_binomial(int m, int j) {
  // sqrt(binom(m, j)) via lgamma keeps m ~ 30 exact to double precision.
  return std::exp(0.5 * (std::lgamma(m + 1.0) - std::lgamma(j + 1.0) - std::lgamma(m - j + 1.0)));
}

}  // namespace

Vector gamma_m_eval(int m, double s) {
  if (m < 0) throw Error(Errc::invalid_argument, "degree must be >= 0");
  const double c = std::cos(s);
  const double sn = std::sin(s);
  Vector out(m + 1);
  for (int j = 0; j <= m; ++j) {
    out[j] = sqrt_binomial(m, j) * std::pow(c, m - j) * std::pow(sn, j);
  }
  return out;
}

SkewMatrix build_L_m(int m) {
  if (m < 1) throw Error(Errc::invalid_argument, "degree must be >= 1");
  Matrix l = Matrix::Zero(m + 1, m + 1);
  for (int j = 0; j < m; ++j) {
    const double entry = std::sqrt(static_cast<double>((j + 1) * (m - j)));
    l(j + 1, j) = entry;
    l(j, j + 1) = -entry;
  }
  return SkewMatrix(std::move(l));
}

GammaM gamma_m(int m) { return GammaM{m, build_L_m(m)}; }

std::vector<int> spectrum_L_m(int m, const Tolerances& tol) {
  const SpectralForm sf = spectral_form(build_L_m(m), tol);
  std::vector<int> values;
  for (double f : sf.frequencies) {
    const int rounded = static_cast<int>(std::lround(f));
    if (std::abs(f - rounded) > 1e-8) {
      std::ostringstream os;
      os << "frequency " << f << " is not an integer to 1e-8";
      throw Error(Errc::eigensolver_failure, os.str());
    }
    values.push_back(rounded);
    values.push_back(-rounded);
  }
  for (Eigen::Index i = 0; i < sf.kernel_dim; ++i) values.push_back(0);
  std::sort(values.begin(), values.end(), std::greater<>());

  std::vector<int> expected;
  for (int j = 0; j <= m; ++j) expected.push_back(m - 2 * j);
  if (values != expected) {
    throw Error(Errc::eigensolver_failure, "spectrum does not form the arithmetic ladder m - 2j");
  }
  return values;
}

Polynomial char_poly_L_m(int m) {
  if (m < 1) throw Error(Errc::invalid_argument, "degree must be >= 1");
  Polynomial p({1.0});
  if (m % 2 == 0) {
    for (int j = 1; j <= m / 2; ++j) {
      p = p * Polynomial({static_cast<double>(4 * j * j), 0.0, 1.0});
    }
    p = p * Polynomial({0.0, -1.0});
  } else {
    for (int j = 0; j <= (m - 1) / 2; ++j) {
      const double odd = 2.0 * j + 1.0;
      p = p * Polynomial({odd * odd, 0.0, 1.0});
    }
  }
  return p;
}

EmbeddedQ0 postcompose_orthogonal(const Matrix& t, const Q0Curve& c, const Tolerances& tol) {
  const Eigen::Index d = c.structure.ambient_dim();
  if (t.rows() != t.cols() || t.rows() != d) {
    throw Error(Errc::invalid_argument, "postcomposition matrix must be square of ambient size");
  }
  const double dev = (t.transpose() * t - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
  if (dev > tol.ortho_tol) {
    std::ostringstream os;
    os << "max |T^T T - I| entry is " << dev;
    throw Error(Errc::not_orthogonal, os.str());
  }
  // Conjugated generator on the full space (horizontal generator padded by
  // the vertical kernel), new basepoint T gamma(0).
  Matrix a_full = Matrix::Zero(d, d);
  a_full.topLeftCorner(2 * c.structure.n, 2 * c.structure.n) = c.structure.A.matrix();
  const Matrix conjugated = t * a_full * t.transpose();
  const Vector u0 = t * eval_q0(c, 0.0);
  return decompose(SkewMatrix(conjugated, tol), u0, tol);
}

Q0Curve juxtapose(double theta, const Q0Curve& c1, const Q0Curve& c2, const Tolerances& tol) {
  const Eigen::Index h1 = 2 * c1.structure.n;
  const Eigen::Index h2 = 2 * c2.structure.n;
  Matrix a = Matrix::Zero(h1 + h2, h1 + h2);
  a.topLeftCorner(h1, h1) = c1.structure.A.matrix();
  a.bottomRightCorner(h2, h2) = c2.structure.A.matrix();
  Vector v(h1 + h2);
  v << std::cos(theta) * c1.v, std::sin(theta) * c2.v;
  Vector w(c1.structure.p + c2.structure.p);
  w << std::cos(theta) * c1.structure.w, std::sin(theta) * c2.structure.w;
  HelicalCR structure = HelicalCR::create(SkewMatrix(std::move(a), tol), std::move(w), tol);
  return Q0Curve{std::move(structure), std::move(v)};
}

Vector tensor_eval(const Q0Curve& c1, const Q0Curve& c2, double s) {
  const Vector g1 = eval_q0(c1, s);
  const Vector g2 = eval_q0(c2, s);
  Vector out(g1.size() * g2.size());
  for (Eigen::Index i = 0; i < g1.size(); ++i) {
    out.segment(i * g2.size(), g2.size()) = g1[i] * g2;
  }
  return out;
}

EmbeddedQ0 tensor_curve(const Q0Curve& c1, const Q0Curve& c2, const Tolerances& tol) {
  const Eigen::Index d1 = c1.structure.ambient_dim();
  const Eigen::Index d2 = c2.structure.ambient_dim();
  Matrix a1 = Matrix::Zero(d1, d1);
  a1.topLeftCorner(2 * c1.structure.n, 2 * c1.structure.n) = c1.structure.A.matrix();
  Matrix a2 = Matrix::Zero(d2, d2);
  a2.topLeftCorner(2 * c2.structure.n, 2 * c2.structure.n) = c2.structure.A.matrix();
  // Product-rule generator A1 (x) I + I (x) A2 acting on the flattened tensor.
  Matrix gen = Matrix::Zero(d1 * d2, d1 * d2);
  for (Eigen::Index i = 0; i < d1; ++i) {
    for (Eigen::Index j = 0; j < d1; ++j) {
      if (a1(i, j) != 0.0) {
        gen.block(i * d2, j * d2, d2, d2) += a1(i, j) * Matrix::Identity(d2, d2);
      }
    }
    gen.block(i * d2, i * d2, d2, d2) += a2;
  }
  return decompose(SkewMatrix(std::move(gen), tol), tensor_eval(c1, c2, 0.0), tol);
}

Matrix homogeneous_to_B(const Matrix& h) {
  const int m = static_cast<int>(h.cols()) - 1;
  if (m < 0) throw Error(Errc::invalid_argument, "need at least one monomial column");
  Matrix b = h;
  for (int j = 0; j <= m; ++j) b.col(j) /= sqrt_binomial(m, j);
  return b;
}

std::optional<Hyperplane> gamma_m_hyperplane_check(int m, const Tolerances& tol) {
  if (m < 1) throw Error(Errc::invalid_argument, "degree must be >= 1");
  if (m % 2 != 0) return std::nullopt;
  const SpectralForm sf = spectral_form(build_L_m(m), tol);
  if (sf.kernel_dim != 1) {
    throw Error(Errc::eigensolver_failure, "even-degree generator must have a line kernel");
  }
  Hyperplane plane;
  plane.normal = sf.kernel_basis().col(0);
  if (plane.normal[0] < 0.0) plane.normal = -plane.normal;
  plane.offset = plane.normal[0];  // gamma_m(0) is the first basis vector
  return plane;
}

}  // namespace carnoq

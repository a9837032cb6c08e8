#include "carnoq/generators.hpp"

#include <Eigen/QR>

namespace carnoq {

Matrix random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = normal(rng);
  }
  return m;
}

Matrix random_orthogonal(Rng& rng, Eigen::Index d) {
  const Matrix g = random_matrix(rng, d, d);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < d; ++i) {
    if (r(i, i) < 0.0) q.col(i) = -q.col(i);
  }
  return q;
}

SkewMatrix random_skew(Rng& rng, Eigen::Index d) {
  const Matrix m = random_matrix(rng, d, d);
  return SkewMatrix(0.5 * (m - m.transpose().eval()));
}

SkewMatrix random_invertible_skew(Rng& rng, Eigen::Index n, double min_freq, double max_freq,
                                  double min_gap) {
  std::uniform_real_distribution<double> unif(min_freq, max_freq);
  std::vector<double> freqs;
  while (static_cast<Eigen::Index>(freqs.size()) < n) {
    const double f = unif(rng);
    bool ok = true;
    for (double g : freqs) {
      if (std::abs(g - f) < min_gap) ok = false;
    }
    if (ok) freqs.push_back(f);
  }
  Matrix core = Matrix::Zero(2 * n, 2 * n);
  for (Eigen::Index j = 0; j < n; ++j) {
    core(2 * j, 2 * j + 1) = -freqs[static_cast<std::size_t>(j)];
    core(2 * j + 1, 2 * j) = freqs[static_cast<std::size_t>(j)];
  }
  const Matrix q = random_orthogonal(rng, 2 * n);
  Matrix a = q * core * q.transpose();
  a = 0.5 * (a - a.transpose().eval());
  return SkewMatrix(std::move(a));
}

Q0Curve random_q0(Rng& rng, int max_n, int max_p, bool unit_norm) {
  std::uniform_int_distribution<int> pick_n(1, max_n);
  std::uniform_int_distribution<int> pick_p(0, max_p);
  const int n = pick_n(rng);
  const int p = pick_p(rng);
  SkewMatrix a = random_invertible_skew(rng, n);
  Vector v = random_matrix(rng, 2 * n, 1);
  if (v.norm() > 1.5) v *= 1.5 / v.norm();
  Vector w = random_matrix(rng, p, 1);
  if (p > 0 && w.norm() > 1.0) w /= w.norm();
  if (unit_norm) {
    const double total = std::sqrt(v.squaredNorm() + w.squaredNorm());
    v /= total;
    w /= total;
  }
  return Q0Curve{HelicalCR::create(std::move(a), std::move(w)), std::move(v)};
}

Q1Curve random_q1(Rng& rng, int max_n, int max_p) {
  Q0Curve base = random_q0(rng, max_n, max_p);
  Vector v0 = random_matrix(rng, 2 * base.structure.n, 1);
  Vector w0 = random_matrix(rng, base.structure.p, 1);
  return Q1Curve{std::move(base.structure), std::move(base.v), std::move(v0), std::move(w0)};
}

StratifiedAlgebra2 random_contact(Rng& rng, int max_n) {
  std::uniform_int_distribution<int> pick_n(1, max_n);
  return StratifiedAlgebra2::create({random_invertible_skew(rng, pick_n(rng))});
}

GeodesicIVP random_ivp(Rng& rng, const StratifiedAlgebra2& g) {
  GeodesicIVP ivp;
  ivp.x0 = random_matrix(rng, g.m, 1);
  ivp.t0 = random_matrix(rng, g.p, 1);
  ivp.xi0 = random_matrix(rng, g.m, 1);
  ivp.tau0 = random_matrix(rng, g.p, 1);
  return ivp;
}

}  // namespace carnoq

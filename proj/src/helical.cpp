#include "carnoq/helical.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <sstream>

namespace carnoq {

namespace {

constexpr double kPi = std::numbers::pi;

Vector solve_skew(const SkewMatrix& a, const Vector& rhs) {
  return a.matrix().partialPivLu().solve(rhs);
}

Vector pow_apply(const Matrix& a, int k, Vector v) {
  for (int i = 0; i < k; ++i) v = a * v;
  return v;
}

struct FrequencyCluster {
  double frequency = 0.0;            // amplitude-weighted representative
  std::vector<Eigen::Index> planes;  // indices into SpectralForm planes
};

// Group numerically indistinguishable frequencies (descending input).
std::vector<FrequencyCluster> cluster_frequencies(const std::vector<double>& freqs,
                                                  const Tolerances& tol) {
  std::vector<FrequencyCluster> clusters;
  for (std::size_t j = 0; j < freqs.size(); ++j) {
    const double f = freqs[j];
    if (!clusters.empty()) {
      double ref = clusters.back().frequency;
      if (ref - f <= tol.freq_sep * std::max(1.0, ref)) {
        clusters.back().planes.push_back(static_cast<Eigen::Index>(j));
        continue;
      }
    }
    FrequencyCluster c;
    c.frequency = f;
    c.planes.push_back(static_cast<Eigen::Index>(j));
    clusters.push_back(std::move(c));
  }
  return clusters;
}

struct RationalApprox {
  std::int64_t num = 0;
  std::int64_t den = 1;
  double error = 0.0;
};

// Best rational approximation with denominator <= bound, via continued
// fraction convergents and the final run of semiconvergents.
RationalApprox best_rational(double x, std::int64_t bound) {
  RationalApprox best;
  best.num = static_cast<std::int64_t>(std::llround(x));
  best.den = 1;
  best.error = std::abs(x - static_cast<double>(best.num));

  std::int64_t p0 = 1, q0 = 0;  // h_{-1}
  std::int64_t p1 = static_cast<std::int64_t>(std::floor(x)), q1 = 1;
  double frac = x - std::floor(x);
  {
    const double err = std::abs(x - static_cast<double>(p1));
    if (err < best.error) best = {p1, 1, err};
  }
  for (int iter = 0; iter < 64; ++iter) {
    if (frac < 1e-18) break;
    const double inv = 1.0 / frac;
    const double a_real = std::floor(inv);
    if (a_real > 9.0e18) break;
    const std::int64_t a = static_cast<std::int64_t>(a_real);
    frac = inv - a_real;

    // Next convergent p2/q2 = (a p1 + p0) / (a q1 + q0).
    if (q1 != 0 && a > (bound * 4 - q0) / q1) {
      // Overshoots the bound: take the largest admissible semiconvergent.
      const std::int64_t k = (bound - q0) / q1;
      if (k >= 1) {
        const std::int64_t ps = k * p1 + p0;
        const std::int64_t qs = k * q1 + q0;
        const double err = std::abs(x - static_cast<double>(ps) / static_cast<double>(qs));
        if (qs <= bound && err < best.error) best = {ps, qs, err};
      }
      break;
    }
    const std::int64_t p2 = a * p1 + p0;
    const std::int64_t q2 = a * q1 + q0;
    if (q2 > bound) {
      const std::int64_t k = (bound - q0) / q1;
      if (k >= 1) {
        const std::int64_t ps = k * p1 + p0;
        const std::int64_t qs = k * q1 + q0;
        const double err = std::abs(x - static_cast<double>(ps) / static_cast<double>(qs));
        if (qs <= bound && err < best.error) best = {ps, qs, err};
      }
      break;
    }
    const double err = std::abs(x - static_cast<double>(p2) / static_cast<double>(q2));
    if (err < best.error) best = {p2, q2, err};
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    if (err == 0.0) break;
  }
  return best;
}

}  // namespace

HelicalCR HelicalCR::create(SkewMatrix a, Vector w, const Tolerances& tol) {
  if (a.dim() % 2 != 0) {
    throw Error(Errc::invalid_argument, "horizontal dimension must be even");
  }
  if (a.dim() > 0) {
    const SpectralForm sf = spectral_form(a, tol);
    if (sf.kernel_dim != 0 ||
        (sf.n_blocks() > 0 && sf.frequencies.back() <= tol.freq_floor)) {
      throw Error(Errc::not_invertible, "horizontal generator must be invertible");
    }
  }
  HelicalCR h{a.dim() / 2, w.size(), std::move(a), std::move(w)};
  return h;
}

Vector eval_q0(const Q0Curve& c, double s) {
  const Eigen::Index h = 2 * c.structure.n;
  Vector out(h + c.structure.p);
  if (h > 0) out.head(h) = expm_skew(c.structure.A, s) * c.v;
  out.tail(c.structure.p) = c.structure.w;
  return out;
}

Vector eval_q1(const Q1Curve& c, double s) {
  const Eigen::Index h = 2 * c.structure.n;
  Vector out(h + c.structure.p);
  if (h > 0) {
    const Vector ainv_v = solve_skew(c.structure.A, c.v);
    out.head(h) = (expm_skew(c.structure.A, s) - Matrix::Identity(h, h)) * ainv_v + c.v0;
  }
  out.tail(c.structure.p) = c.structure.w * s + c.w0;
  return out;
}

Vector derivative_q0(const Q0Curve& c, int k, double s) {
  if (k < 0) throw Error(Errc::invalid_argument, "derivative order must be >= 0");
  if (k == 0) return eval_q0(c, s);
  const Eigen::Index h = 2 * c.structure.n;
  Vector out = Vector::Zero(h + c.structure.p);
  if (h > 0) {
    out.head(h) = expm_skew(c.structure.A, s) * pow_apply(c.structure.A.matrix(), k, c.v);
  }
  return out;
}

double gram_e_kl(const Q0Curve& c, int k, int l) {
  if (k < 0 || l < 0) throw Error(Errc::invalid_argument, "derivative orders must be >= 0");
  double acc = 0.0;
  if (c.structure.n > 0) {
    const Vector ak = pow_apply(c.structure.A.matrix(), k, c.v);
    const Vector al = pow_apply(c.structure.A.matrix(), l, c.v);
    acc += ak.dot(al);
  }
  if (k == 0 && l == 0) acc += c.structure.w.squaredNorm();
  return acc;
}

Polynomial minimal_annihilating_poly(const Q0Curve& c, const Tolerances& tol) {
  const double scale = std::sqrt(c.v.squaredNorm() + c.structure.w.squaredNorm());
  std::vector<double> active;
  if (c.structure.n > 0) {
    const SpectralForm sf = spectral_form(c.structure.A, tol);
    for (const auto& cl : cluster_frequencies(sf.frequencies, tol)) {
      double amp2 = 0.0;
      double weighted = 0.0;
      for (Eigen::Index j : cl.planes) {
        const double c1 = sf.basis.col(2 * j).dot(c.v);
        const double c2 = sf.basis.col(2 * j + 1).dot(c.v);
        amp2 += c1 * c1 + c2 * c2;
        weighted += (c1 * c1 + c2 * c2) * sf.frequencies[static_cast<std::size_t>(j)];
      }
      const double amp = std::sqrt(amp2);
      if (amp > tol.amp_tol * std::max(1e-300, scale)) {
        active.push_back(weighted / amp2);
      }
    }
  }
  Polynomial p({1.0});
  for (double f : active) p = p * Polynomial({f * f, 0.0, 1.0});
  const bool vertical = c.structure.w.norm() > tol.freq_floor * std::max(1.0, scale);
  if (vertical) p = p * Polynomial({0.0, 1.0});
  return p;
}

Vector EmbeddedQ0::eval_ambient(double s) const {
  return decomposition.change_of_basis * eval_q0(curve, s);
}

Vector EmbeddedQ0::derivative_ambient(int k, double s) const {
  return decomposition.change_of_basis * derivative_q0(curve, k, s);
}

EmbeddedQ0 decompose(const SkewMatrix& a, const Vector& u0, const Tolerances& tol) {
  if (a.dim() != u0.size()) {
    throw Error(Errc::invalid_argument, "generator and basepoint dimensions differ");
  }
  const Eigen::Index d = a.dim();
  const SpectralForm sf = spectral_form(a, tol);
  const double scale = std::max(1e-300, u0.norm());

  struct Plane {
    double frequency;
    double amplitude;
    Vector q1;
    Vector q2;
  };
  std::vector<Plane> active;
  for (const auto& cl : cluster_frequencies(sf.frequencies, tol)) {
    // Component of u0 inside the whole frequency eigenspace; repeated
    // frequencies collapse into the single plane span(h, A h).
    Vector h = Vector::Zero(d);
    for (Eigen::Index j : cl.planes) {
      h += sf.basis.col(2 * j).dot(u0) * sf.basis.col(2 * j);
      h += sf.basis.col(2 * j + 1).dot(u0) * sf.basis.col(2 * j + 1);
    }
    const double amp = h.norm();
    if (amp <= tol.amp_tol * scale) continue;
    Plane pl;
    pl.q1 = h / amp;
    Vector q2 = a.matrix() * pl.q1;
    q2 -= pl.q1.dot(q2) * pl.q1;
    for (const Plane& prev : active) {
      q2 -= prev.q1.dot(q2) * prev.q1;
      q2 -= prev.q2.dot(q2) * prev.q2;
    }
    const double q2n = q2.norm();
    if (q2n <= tol.freq_floor) continue;
    pl.q2 = q2 / q2n;
    pl.frequency = pl.q2.dot(a.matrix() * pl.q1);
    pl.amplitude = amp;
    active.push_back(std::move(pl));
  }
  std::stable_sort(active.begin(), active.end(),
                   [](const Plane& x, const Plane& y) { return x.frequency > y.frequency; });

  const Eigen::Index n = static_cast<Eigen::Index>(active.size());
  const Eigen::Index p = d - 2 * n;
  Matrix basis(d, d);
  for (Eigen::Index j = 0; j < n; ++j) {
    basis.col(2 * j) = active[static_cast<std::size_t>(j)].q1;
    basis.col(2 * j + 1) = active[static_cast<std::size_t>(j)].q2;
  }
  // Vertical space: kernel directions plus inactive planes, re-orthonormalized
  // against the active columns.
  Eigen::Index col = 2 * n;
  auto append_orthonormalized = [&](Vector v) {
    for (Eigen::Index j = 0; j < col; ++j) v -= basis.col(j).dot(v) * basis.col(j);
    const double nv = v.norm();
    if (nv > 0.5) basis.col(col++) = v / nv;
  };
  for (Eigen::Index j = 0; j < sf.n_blocks(); ++j) {
    append_orthonormalized(sf.basis.col(2 * j));
    append_orthonormalized(sf.basis.col(2 * j + 1));
  }
  for (Eigen::Index j = 0; j < sf.kernel_dim; ++j) {
    append_orthonormalized(sf.basis.col(2 * sf.n_blocks() + j));
  }
  if (col != d) {
    throw Error(Errc::eigensolver_failure, "canonical basis completion failed");
  }

  CanonicalDecomposition cd;
  cd.horizontal_dim = 2 * n;
  cd.vertical_dim = p;
  cd.change_of_basis = std::move(basis);
  cd.frequencies.reserve(static_cast<std::size_t>(n));
  cd.amplitudes.reserve(static_cast<std::size_t>(n));
  for (const Plane& pl : active) {
    cd.frequencies.push_back(pl.frequency);
    cd.amplitudes.push_back(pl.amplitude);
  }
  cd.v = cd.change_of_basis.leftCols(2 * n).transpose() * u0;
  cd.w = cd.change_of_basis.rightCols(p).transpose() * u0;
  cd.degenerate_horizontal = (n == 0 && sf.n_blocks() > 0);

  Matrix a_can = Matrix::Zero(2 * n, 2 * n);
  for (Eigen::Index j = 0; j < n; ++j) {
    a_can(2 * j, 2 * j + 1) = -cd.frequencies[static_cast<std::size_t>(j)];
    a_can(2 * j + 1, 2 * j) = cd.frequencies[static_cast<std::size_t>(j)];
  }
  HelicalCR structure = HelicalCR::create(SkewMatrix(std::move(a_can), tol), cd.w, tol);
  Q0Curve curve{std::move(structure), cd.v};
  return EmbeddedQ0{std::move(cd), std::move(curve)};
}

// ---------------------------------------------------------------------------
// Sample fitting
// ---------------------------------------------------------------------------

namespace {

// Natural cubic spline through (s_i, y_i), evaluated on a new grid.
Matrix spline_resample(const Vector& s, const Matrix& y, const Vector& grid) {
  const Eigen::Index n = s.size();
  Matrix out(grid.size(), y.cols());
  Matrix m = Matrix::Zero(n, y.cols());  // second derivatives
  if (n > 2) {
    Eigen::MatrixXd trid = Eigen::MatrixXd::Zero(n - 2, n - 2);
    Matrix rhs(n - 2, y.cols());
    for (Eigen::Index i = 1; i + 1 < n; ++i) {
      const double h0 = s[i] - s[i - 1];
      const double h1 = s[i + 1] - s[i];
      if (i > 1) trid(i - 1, i - 2) = h0;
      trid(i - 1, i - 1) = 2.0 * (h0 + h1);
      if (i + 2 < n) trid(i - 1, i) = h1;
      rhs.row(i - 1) =
          6.0 * ((y.row(i + 1) - y.row(i)) / h1 - (y.row(i) - y.row(i - 1)) / h0);
    }
    m.middleRows(1, n - 2) = trid.partialPivLu().solve(rhs);
  }
  for (Eigen::Index g = 0; g < grid.size(); ++g) {
    const double x = grid[g];
    Eigen::Index i = std::clamp<Eigen::Index>(
        std::lower_bound(s.data(), s.data() + n, x) - s.data(), 1, n - 1);
    const double h = s[i] - s[i - 1];
    const double t1 = (s[i] - x) / h;
    const double t2 = (x - s[i - 1]) / h;
    out.row(g) = t1 * y.row(i - 1) + t2 * y.row(i) +
                 ((t1 * t1 * t1 - t1) * m.row(i - 1) + (t2 * t2 * t2 - t2) * m.row(i)) *
                     (h * h / 6.0);
  }
  return out;
}

// Shift-invariance frequency estimates from uniformly spaced samples.
std::vector<double> pencil_frequencies(const Matrix& y, double delta, int max_freqs,
                                       const Tolerances& tol) {
  const Eigen::Index n = y.rows();
  const Eigen::Index d = y.cols();
  const Eigen::Index window = n / 2;
  const Eigen::Index rows = n - window;
  Matrix hankel(rows * d, window + 1);
  for (Eigen::Index c = 0; c < d; ++c) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      hankel.row(c * rows + i) = y.col(c).segment(i, window + 1).transpose();
    }
  }
  Eigen::BDCSVD<Matrix> svd(hankel, Eigen::ComputeThinV);
  const Vector sig = svd.singularValues();
  Eigen::Index rank = 0;
  const double cutoff = (sig.size() > 0 ? sig[0] : 0.0) * 1e-10;
  while (rank < sig.size() && sig[rank] > cutoff) ++rank;
  rank = std::min<Eigen::Index>(rank, 2 * max_freqs + 1);
  if (rank == 0) return {};

  const Matrix v = svd.matrixV().leftCols(rank);
  const Matrix v0 = v.topRows(window);
  const Matrix v1 = v.bottomRows(window);
  const Matrix shift = v0.colPivHouseholderQr().solve(v1);
  Eigen::EigenSolver<Matrix> es(shift);
  if (es.info() != Eigen::Success) {
    throw Error(Errc::fit_failed, "linear predictor eigensolver did not converge");
  }

  std::vector<double> freqs;
  for (Eigen::Index i = 0; i < rank; ++i) {
    const std::complex<double> z = es.eigenvalues()[i];
    const double mag = std::abs(z);
    if (mag < 0.5 || mag > 1.5) continue;  // spurious predictor root
    const double theta = std::atan2(z.imag(), z.real());
    if (theta <= 1e-9) continue;  // keep one of each conjugate pair
    const double f = theta / delta;
    if (f <= std::max(100.0 * tol.freq_floor, 1e-8)) continue;
    freqs.push_back(f);
  }
  std::sort(freqs.begin(), freqs.end(), std::greater<>());
  // Merge estimates closer than the separation tolerance.
  std::vector<double> merged;
  for (double f : freqs) {
    if (!merged.empty() && merged.back() - f <= tol.freq_sep * std::max(1.0, merged.back())) {
      continue;
    }
    merged.push_back(f);
  }
  return merged;
}

Matrix design_matrix(const Vector& s, const std::vector<double>& freqs) {
  Matrix phi(s.size(), 2 * freqs.size() + 1);
  for (std::size_t j = 0; j < freqs.size(); ++j) {
    phi.col(2 * static_cast<Eigen::Index>(j)) = (freqs[j] * s.array()).cos();
    phi.col(2 * static_cast<Eigen::Index>(j) + 1) = (freqs[j] * s.array()).sin();
  }
  phi.col(2 * static_cast<Eigen::Index>(freqs.size())).setOnes();
  return phi;
}

}  // namespace

FitResult fit_from_samples(std::span<const double> s_values, const Matrix& points,
                           int max_freqs, const Tolerances& tol) {
  const Eigen::Index n_samples = static_cast<Eigen::Index>(s_values.size());
  if (max_freqs < 0) throw Error(Errc::invalid_argument, "max_freqs must be >= 0");
  if (points.rows() != n_samples) {
    throw Error(Errc::invalid_argument, "sample count does not match point rows");
  }
  if (n_samples < 4 * static_cast<Eigen::Index>(max_freqs) + 2) {
    throw Error(Errc::invalid_argument, "need at least 4*max_freqs + 2 samples");
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n_samples));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return s_values[a] < s_values[b]; });
  Vector s(n_samples);
  Matrix y(n_samples, points.cols());
  for (Eigen::Index i = 0; i < n_samples; ++i) {
    s[i] = s_values[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
    y.row(i) = points.row(order[static_cast<std::size_t>(i)]);
  }
  for (Eigen::Index i = 0; i + 1 < n_samples; ++i) {
    if (!(s[i + 1] > s[i])) throw Error(Errc::invalid_argument, "sample abscissae must be distinct");
  }
  const Eigen::Index d = points.cols();
  const double span = s[n_samples - 1] - s[0];
  const double scale = std::max(1e-300, y.rowwise().norm().maxCoeff());

  // Uniformly spaced data feeds the linear predictor directly; otherwise
  // resample through a cubic spline (the final fit still targets the
  // original samples).
  std::vector<double> freqs;
  if (max_freqs > 0) {
    const double delta0 = span / static_cast<double>(n_samples - 1);
    bool uniform = true;
    for (Eigen::Index i = 0; i + 1 < n_samples; ++i) {
      if (std::abs((s[i + 1] - s[i]) - delta0) > 1e-9 * std::max(1.0, span)) {
        uniform = false;
        break;
      }
    }
    if (uniform) {
      freqs = pencil_frequencies(y, delta0, max_freqs, tol);
    } else {
      const Eigen::Index nu = std::max<Eigen::Index>(2 * n_samples, 128);
      Vector grid(nu);
      for (Eigen::Index i = 0; i < nu; ++i) {
        grid[i] = s[0] + span * static_cast<double>(i) / static_cast<double>(nu - 1);
      }
      freqs = pencil_frequencies(spline_resample(s, y, grid), grid[1] - grid[0], max_freqs, tol);
    }
  }

  Matrix coef;
  auto solve_amplitudes = [&]() {
    const Matrix phi = design_matrix(s, freqs);
    coef = phi.colPivHouseholderQr().solve(y);
  };
  auto plane_amplitude = [&](std::size_t j) {
    return std::sqrt(coef.row(2 * static_cast<Eigen::Index>(j)).squaredNorm() +
                     coef.row(2 * static_cast<Eigen::Index>(j) + 1).squaredNorm());
  };
  solve_amplitudes();

  // Drop inactive planes, largest amplitudes kept up to max_freqs.
  {
    std::vector<std::pair<double, double>> keep;  // (amplitude, frequency)
    for (std::size_t j = 0; j < freqs.size(); ++j) {
      const double amp = plane_amplitude(j);
      if (amp > tol.amp_tol * scale) keep.emplace_back(amp, freqs[j]);
    }
    std::sort(keep.begin(), keep.end(), std::greater<>());
    if (static_cast<int>(keep.size()) > max_freqs) keep.resize(static_cast<std::size_t>(max_freqs));
    std::vector<double> kept;
    for (const auto& [amp, f] : keep) kept.push_back(f);
    std::sort(kept.begin(), kept.end(), std::greater<>());
    if (kept != freqs) {
      freqs = std::move(kept);
      solve_amplitudes();
    }
  }

  // Gauss-Newton refinement of the frequencies with re-solved amplitudes.
  for (int iter = 0; iter < 40 && !freqs.empty(); ++iter) {
    const Matrix phi = design_matrix(s, freqs);
    const Matrix resid = phi * coef - y;  // n x d
    Matrix jac(n_samples * d, static_cast<Eigen::Index>(freqs.size()));
    for (std::size_t j = 0; j < freqs.size(); ++j) {
      const Vector cs = phi.col(2 * static_cast<Eigen::Index>(j));
      const Vector sn = phi.col(2 * static_cast<Eigen::Index>(j) + 1);
      for (Eigen::Index c = 0; c < d; ++c) {
        jac.col(static_cast<Eigen::Index>(j)).segment(c * n_samples, n_samples) =
            s.array() * (-sn.array() * coef(2 * static_cast<Eigen::Index>(j), c) +
                         cs.array() * coef(2 * static_cast<Eigen::Index>(j) + 1, c));
      }
    }
    Vector r(n_samples * d);
    for (Eigen::Index c = 0; c < d; ++c) r.segment(c * n_samples, n_samples) = resid.col(c);
    const Vector delta = jac.colPivHouseholderQr().solve(-r);
    double step = 0.0;
    for (std::size_t j = 0; j < freqs.size(); ++j) {
      freqs[j] = std::abs(freqs[j] + delta[static_cast<Eigen::Index>(j)]);
      step = std::max(step, std::abs(delta[static_cast<Eigen::Index>(j)]));
    }
    solve_amplitudes();
    if (step <= 1e-13 * std::max(1.0, std::abs(freqs[0]))) break;
  }

  // Assemble an ambient generator and basepoint, then decompose canonically.
  Matrix a_amb = Matrix::Zero(d, d);
  Vector u0 = coef.row(2 * static_cast<Eigen::Index>(freqs.size())).transpose();
  for (std::size_t j = 0; j < freqs.size(); ++j) {
    const Vector cs = coef.row(2 * static_cast<Eigen::Index>(j)).transpose();
    const Vector sn = coef.row(2 * static_cast<Eigen::Index>(j) + 1).transpose();
    if (cs.norm() <= 1e-12 * scale) {
      throw Error(Errc::fit_failed,
                  "plane with vanishing cosine component cannot start a constant-norm curve");
    }
    Vector q1 = cs.normalized();
    Vector q2 = sn - q1.dot(sn) * q1;
    if (q2.norm() <= 1e-12 * scale) {
      std::ostringstream os;
      os << "plane at frequency " << freqs[j] << " is degenerate (collinear components)";
      throw Error(Errc::fit_failed, os.str());
    }
    q2.normalize();
    a_amb += freqs[j] * (q2 * q1.transpose() - q1 * q2.transpose());
    u0 += cs;
  }

  EmbeddedQ0 emb = decompose(SkewMatrix(a_amb, tol), u0, tol);
  double sq = 0.0;
  for (Eigen::Index i = 0; i < n_samples; ++i) {
    sq += (emb.eval_ambient(s[i]) - y.row(i).transpose()).squaredNorm();
  }
  const double rms = std::sqrt(sq / static_cast<double>(n_samples));
  if (rms > tol.fit_tol * std::max(1.0, scale)) {
    std::ostringstream os;
    os << "rms residual " << rms << " exceeds fit tolerance " << tol.fit_tol
       << " (scale " << scale << ", " << freqs.size() << " frequencies)";
    throw Error(Errc::fit_failed, os.str());
  }
  return FitResult{std::move(emb), rms};
}

// ---------------------------------------------------------------------------
// Injectivity
// ---------------------------------------------------------------------------

InjectivityResult is_injective(std::span<const double> frequencies,
                               std::span<const double> amplitudes, const Tolerances& tol) {
  InjectivityResult res;
  if (frequencies.empty()) {
    res.verdict = Injectivity::non_injective;
    res.period = 0.0;
    res.detail = "constant curve";
    return res;
  }
  for (double f : frequencies) {
    if (!(f > 0.0)) throw Error(Errc::invalid_argument, "frequencies must be positive");
  }
  const double base = frequencies[0];
  const std::int64_t bound = tol.rat_denom_bound;
  const std::int64_t confident = std::max<std::int64_t>(1, bound / 100);

  std::vector<std::int64_t> denominators;
  bool at_bound = false;
  for (std::size_t j = 0; j < frequencies.size(); ++j) {
    const double ratio = frequencies[j] / base;
    const RationalApprox r = best_rational(ratio, bound);
    if (r.error > tol.rat_tol * std::max(1.0, ratio)) {
      res.verdict = Injectivity::injective;
      std::ostringstream os;
      os << "frequency ratio " << ratio << " has no rational approximation with denominator <= "
         << bound << " (best error " << r.error << ")";
      res.detail = os.str();
      return res;
    }
    if (r.den > confident) {
      at_bound = true;
      std::ostringstream os;
      os << "frequency ratio " << ratio << " matches " << r.num << "/" << r.den
         << " with denominator near the search bound " << bound << "; rationality undecidable";
      res.detail = os.str();
    }
    denominators.push_back(r.den);
  }
  if (at_bound) {
    res.verdict = Injectivity::inconclusive;
    return res;
  }

  std::int64_t lcm = 1;
  for (std::int64_t q : denominators) {
    lcm = std::lcm(lcm, q);
    if (lcm > 1000000000LL) {
      res.verdict = Injectivity::inconclusive;
      res.detail = "common period exceeds the verification range";
      return res;
    }
  }
  const double period = 2.0 * kPi * static_cast<double>(lcm) / base;

  // Re-evaluation gap at the candidate period, weighted by amplitudes.
  double gap2 = 0.0;
  double scale2 = 0.0;
  for (std::size_t j = 0; j < frequencies.size(); ++j) {
    const double amp = amplitudes.empty() ? 1.0 : amplitudes[j];
    const double cdiff = std::cos(frequencies[j] * period) - 1.0;
    const double sdiff = std::sin(frequencies[j] * period);
    gap2 += amp * amp * (cdiff * cdiff + sdiff * sdiff);
    scale2 += amp * amp;
  }
  const double gap = std::sqrt(gap2);
  if (gap > 1e-8 * std::max(1.0, std::sqrt(scale2))) {
    res.verdict = Injectivity::inconclusive;
    std::ostringstream os;
    os << "candidate period " << period << " fails re-evaluation (gap " << gap << ")";
    res.detail = os.str();
    return res;
  }
  res.verdict = Injectivity::non_injective;
  res.period = period;
  std::ostringstream os;
  os << "common period " << period << " verified with gap " << gap;
  res.detail = os.str();
  return res;
}

InjectivityResult is_injective(const CanonicalDecomposition& cd, const Tolerances& tol) {
  return is_injective(cd.frequencies, cd.amplitudes, tol);
}

InjectivityResult is_injective(const Q1Curve& c, const Tolerances& tol) {
  const double scale =
      std::sqrt(c.v.squaredNorm() + c.structure.w.squaredNorm() + c.w0.squaredNorm());
  if (c.structure.w.norm() > tol.freq_floor * std::max(1.0, scale)) {
    InjectivityResult res;
    res.verdict = Injectivity::injective;
    res.detail = "nonzero vertical direction makes the vertical component strictly monotone";
    return res;
  }
  const EmbeddedQ0 emb = decompose(c.structure.A, c.v, tol);
  std::vector<double> amps = emb.decomposition.amplitudes;
  for (std::size_t j = 0; j < amps.size(); ++j) {
    amps[j] /= emb.decomposition.frequencies[j];  // integration scales each plane by 1/f
  }
  return is_injective(emb.decomposition.frequencies, amps, tol);
}

EquivalenceResult equivalent(const HelicalCR& h1, const HelicalCR& h2, const Tolerances& tol) {
  if (h1.n != h2.n) {
    throw Error(Errc::invalid_argument, "helical structures have different horizontal dimensions");
  }
  const Matrix& a1 = h1.A.matrix();
  const Matrix& a2 = h2.A.matrix();
  if (a1.size() == 0) return EquivalenceResult{true, 1.0};
  Eigen::Index r = 0, c = 0;
  const double m1 = a1.cwiseAbs().maxCoeff(&r, &c);
  if (m1 == 0.0) {
    return EquivalenceResult{a2.cwiseAbs().maxCoeff() == 0.0, 1.0};
  }
  const double lambda = a2(r, c) / a1(r, c);
  if (std::abs(lambda) < tol.freq_floor) return EquivalenceResult{false, 0.0};
  const double dev = (a2 - lambda * a1).cwiseAbs().maxCoeff();
  if (dev > tol.block_tol * std::max(1.0, a2.cwiseAbs().maxCoeff())) {
    return EquivalenceResult{false, 0.0};
  }
  return EquivalenceResult{true, lambda};
}

std::vector<PlaneProjection> plane_projections(const Q0Curve& c, const Tolerances& tol) {
  if (c.structure.n < 1) {
    throw Error(Errc::invalid_argument, "curve has no horizontal planes");
  }
  const EmbeddedQ0 emb = decompose(c.structure.A, c.v, tol);
  std::vector<PlaneProjection> planes;
  const Eigen::Index h = 2 * c.structure.n;
  for (std::size_t j = 0; j < emb.decomposition.frequencies.size(); ++j) {
    PlaneProjection pp;
    pp.frequency = emb.decomposition.frequencies[j];
    pp.radius = emb.decomposition.amplitudes[j];
    pp.basis1 = Vector::Zero(h + c.structure.p);
    pp.basis2 = Vector::Zero(h + c.structure.p);
    pp.basis1.head(h) = emb.decomposition.change_of_basis.col(2 * static_cast<Eigen::Index>(j));
    pp.basis2.head(h) = emb.decomposition.change_of_basis.col(2 * static_cast<Eigen::Index>(j) + 1);
    planes.push_back(std::move(pp));
  }
  return planes;
}

Q0Curve reparameterize(const Q0Curve& c, double lambda, double b, const Tolerances& tol) {
  if (lambda == 0.0) throw Error(Errc::invalid_argument, "lambda must be nonzero");
  Vector v = c.v;
  Matrix a = c.structure.A.matrix();
  if (c.structure.n > 0) {
    v = expm_skew(c.structure.A, b, tol) * v;
    a *= lambda;
  }
  HelicalCR structure = HelicalCR::create(SkewMatrix(std::move(a), tol), c.structure.w, tol);
  return Q0Curve{std::move(structure), std::move(v)};
}

}  // namespace carnoq

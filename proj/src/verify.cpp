#include "carnoq/verify.hpp"

#include <Eigen/SVD>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "carnoq/generators.hpp"
#include "carnoq/geodesic.hpp"
#include "carnoq/homcurves.hpp"
#include "carnoq/io.hpp"

namespace carnoq {

namespace {

constexpr double kPi = std::numbers::pi;

struct Check {
  double max_residual = 0.0;
  bool pass = true;
  std::string detail;

  void note(const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
  void expect(double residual, double bound, const std::string& what) {
    max_residual = std::max(max_residual, residual);
    if (!(residual <= bound)) {
      pass = false;
      std::ostringstream os;
      os << what << ": residual " << residual << " exceeds " << bound;
      note(os.str());
    }
  }
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      note(what);
    }
  }
};

SuiteResult run_timed(const std::string& name, double time_budget,
                      const std::function<void(Check&)>& body) {
  SuiteResult result;
  result.name = name;
  Check check;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(check);
  } catch (const std::exception& e) {
    check.pass = false;
    check.note(std::string("exception: ") + e.what());
  }
  result.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (time_budget > 0.0 && result.seconds >= time_budget) {
    check.pass = false;
    std::ostringstream os;
    os << "runtime " << result.seconds << "s exceeds budget " << time_budget << "s";
    check.note(os.str());
  }
  result.pass = check.pass;
  result.max_residual = check.max_residual;
  result.detail = check.detail;
  return result;
}

Vector grid(double a, double b, int count) {
  Vector g(count);
  for (int i = 0; i < count; ++i) {
    g[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return g;
}

double norm_constancy_stddev(const Q0Curve& c, int max_order, int points) {
  const Vector s = grid(0.0, 2.0 * kPi, points);
  double worst = 0.0;
  for (int k = 0; k <= max_order; ++k) {
    double mean = 0.0;
    std::vector<double> norms(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
      norms[static_cast<std::size_t>(i)] = derivative_q0(c, k, s[i]).norm();
      mean += norms[static_cast<std::size_t>(i)];
    }
    mean /= points;
    double var = 0.0;
    for (double n : norms) var += (n - mean) * (n - mean);
    worst = std::max(worst, std::sqrt(var / points));
  }
  return worst;
}

double gram_parity_residual(const Q0Curve& c, int max_order) {
  double worst = 0.0;
  for (int k = 0; k <= max_order; ++k) {
    for (int l = 0; l <= max_order; ++l) {
      if ((k - l) % 2 != 0) worst = std::max(worst, std::abs(gram_e_kl(c, k, l)));
    }
  }
  return worst;
}

double even_odd_gram_residual(const Q0Curve& c, double s) {
  double worst = 0.0;
  for (int i = 0; i <= 2; ++i) {
    for (int j = 0; j <= 2; ++j) {
      worst = std::max(
          worst, std::abs(derivative_q0(c, 2 * i, s).dot(derivative_q0(c, 2 * j + 1, s))));
    }
  }
  return worst;
}

double annihilation_residual(const Q0Curve& c, Rng& rng, const Tolerances& tol) {
  const Polynomial p = minimal_annihilating_poly(c, tol);
  std::uniform_real_distribution<double> unif(0.0, 2.0 * kPi);
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const double s = unif(rng);
    Vector acc = Vector::Zero(c.structure.ambient_dim());
    for (int k = 0; k <= p.degree(); ++k) {
      acc += p.coefficients()[static_cast<std::size_t>(k)] * derivative_q0(c, k, s);
    }
    worst = std::max(worst, acc.norm());
  }
  return worst;
}

double decompose_roundtrip_rms(const SkewMatrix& a, const Vector& u0, const Tolerances& tol) {
  const EmbeddedQ0 emb = decompose(a, u0, tol);
  const SpectralForm sf = spectral_form(a, tol);
  const Vector s = grid(0.0, 2.0 * kPi, 33);
  double sq = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    sq += (emb.eval_ambient(s[i]) - expm_skew(sf, s[i]) * u0).squaredNorm();
  }
  return std::sqrt(sq / static_cast<double>(s.size()));
}

// Basepoint with prescribed per-plane amplitudes, well separated from the
// active/inactive threshold.
Vector structured_basepoint(Rng& rng, const SpectralForm& sf, bool with_kernel) {
  std::uniform_real_distribution<double> amp(0.4, 1.4);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
  Vector u0 = Vector::Zero(sf.dim);
  for (Eigen::Index j = 0; j < sf.n_blocks(); ++j) {
    const double r = amp(rng);
    const double ph = phase(rng);
    u0 += r * std::cos(ph) * sf.basis.col(2 * j) + r * std::sin(ph) * sf.basis.col(2 * j + 1);
  }
  if (with_kernel && sf.kernel_dim > 0) {
    for (Eigen::Index j = 0; j < sf.kernel_dim; ++j) {
      u0 += amp(rng) * sf.basis.col(2 * sf.n_blocks() + j);
    }
  }
  return u0;
}

struct OracleComparison {
  double state_gap = 0.0;
  double h_drift = 0.0;
  double zeta_drift = 0.0;
  bool tau_constant = true;
};

OracleComparison compare_closed_form_with_oracle(const StratifiedAlgebra2& g,
                                                 const GeodesicIVP& ivp, int points,
                                                 const Tolerances& tol) {
  const NormalGeodesic geo = geodesic_closed_form(g, ivp, tol);
  const Vector s = grid(0.0, 2.0 * kPi, points);
  std::vector<double> s_vec(s.data(), s.data() + s.size());
  const std::vector<PhaseState> states = ode_oracle(g, ivp, s_vec);
  OracleComparison cmp;
  const double h0 = hamiltonian(g, states.front());
  const double zeta0 = states.front().zeta.norm();
  for (std::size_t i = 0; i < states.size(); ++i) {
    const PhaseState closed = geo.state(s[static_cast<Eigen::Index>(i)]);
    cmp.state_gap = std::max(cmp.state_gap, (closed.x - states[i].x).cwiseAbs().maxCoeff());
    cmp.state_gap = std::max(cmp.state_gap, (closed.t - states[i].t).cwiseAbs().maxCoeff());
    cmp.state_gap = std::max(cmp.state_gap, (closed.xi - states[i].xi).cwiseAbs().maxCoeff());
    cmp.h_drift = std::max(cmp.h_drift, std::abs(hamiltonian(g, states[i]) - h0));
    cmp.h_drift = std::max(cmp.h_drift, std::abs(hamiltonian(g, closed) - h0));
    cmp.zeta_drift = std::max(cmp.zeta_drift, std::abs(states[i].zeta.norm() - zeta0));
    if (states[i].tau != ivp.tau0) cmp.tau_constant = false;
  }
  return cmp;
}

Vector q1_horizontal(const Q1Curve& c, double s) {
  return eval_q1(c, s).head(2 * c.structure.n);
}

MarkedHelicalCR random_marked(Rng& rng, const Tolerances& tol) {
  std::uniform_int_distribution<int> pick_n(1, 3);
  std::uniform_int_distribution<int> pick_p(1, 2);
  const int n = pick_n(rng);
  const int p = pick_p(rng);
  Vector w = random_matrix(rng, p, 1);
  while (w.norm() < 0.3) w = random_matrix(rng, p, 1);
  MarkedHelicalCR mh;
  mh.base = HelicalCR::create(random_invertible_skew(rng, n), std::move(w), tol);
  mh.v = random_matrix(rng, 2 * n, 1);
  std::normal_distribution<double> normal(0.0, 1.0);
  // Basepoints reachable by geodesics have their vertical part on the w-line.
  mh.u0 = Vector(2 * n + p);
  mh.u0 << random_matrix(rng, 2 * n, 1), normal(rng) * mh.base.w;
  return mh;
}

// ---------------------------------------------------------------------------
// Invariant suites
// ---------------------------------------------------------------------------

SuiteResult suite_exp_group(std::uint64_t seed, const Tolerances& tol) {
  return run_timed("skewlin/exponential-group-law", 0.0, [&](Check& check) {
    Rng rng(seed);
    std::uniform_real_distribution<double> unif(-3.0, 3.0);
    std::uniform_int_distribution<int> dim(1, 8);
    for (int trial = 0; trial < 20; ++trial) {
      const SkewMatrix a = random_skew(rng, dim(rng));
      const double s = unif(rng);
      const double t = unif(rng);
      const Matrix lhs = expm_skew(a, s + t, tol);
      const Matrix rhs = expm_skew(a, s, tol) * expm_skew(a, t, tol);
      check.expect((lhs - rhs).cwiseAbs().maxCoeff(), 1e-9, "exp((s+t)A) = exp(sA)exp(tA)");
      const double cap = 50.0 / std::max(1.0, a.matrix().norm() * std::abs(s));
      const Matrix e = expm_skew(a, s * std::min(1.0, cap), tol);
      check.expect((e.transpose() * e - Matrix::Identity(a.dim(), a.dim())).cwiseAbs().maxCoeff(),
                   1e-9, "orthogonality of exp(sA)");
      check.expect(std::abs(e.determinant() - 1.0), 1e-6, "determinant of exp(sA)");
    }
  });
}

SuiteResult suite_spectral_roundtrip(std::uint64_t seed, const Tolerances& tol) {
  return run_timed("skewlin/spectral-roundtrip", 0.0, [&](Check& check) {
    Rng rng(seed + 1);
    std::uniform_int_distribution<int> dim(1, 12);
    for (int trial = 0; trial < 25; ++trial) {
      const SkewMatrix a = random_skew(rng, dim(rng));
      const SpectralForm sf = spectral_form(a, tol);
      check.expect((sf.basis.transpose() * sf.basis -
                    Matrix::Identity(sf.dim, sf.dim)).cwiseAbs().maxCoeff(),
                   tol.ortho_tol, "basis orthogonality");
      check.expect(
          (sf.basis * sf.block_diagonal() * sf.basis.transpose() - a.matrix()).cwiseAbs().maxCoeff(),
          1e-9, "block-diagonal reconstruction");
      for (std::size_t j = 0; j + 1 < sf.frequencies.size(); ++j) {
        check.require(sf.frequencies[j] >= sf.frequencies[j + 1], "frequencies sorted descending");
      }
    }
    // Repeated frequencies through a random conjugation.
    for (int trial = 0; trial < 5; ++trial) {
      Matrix core = Matrix::Zero(6, 6);
      core.block<2, 2>(0, 0) = standard_j();
      core.block<2, 2>(2, 2) = standard_j();
      core.block<2, 2>(4, 4) = 2.0 * standard_j();
      const Matrix q = random_orthogonal(rng, 6);
      Matrix m = q * core * q.transpose();
      m = 0.5 * (m - m.transpose().eval());
      const SkewMatrix a(m, tol);
      const SpectralForm sf = spectral_form(a, tol);
      check.expect(
          (sf.basis * sf.block_diagonal() * sf.basis.transpose() - a.matrix()).cwiseAbs().maxCoeff(),
          1e-9, "repeated-frequency reconstruction");
      check.require(sf.n_blocks() == 3 && sf.kernel_dim == 0, "repeated-frequency block count");
    }
  });
}

SuiteResult suite_charpoly(std::uint64_t seed, const Tolerances& tol) {
  return run_timed("skewlin/charpoly-at-eigenvalues", 0.0, [&](Check& check) {
    Rng rng(seed + 2);
    std::uniform_int_distribution<int> dim(1, 10);
    for (int trial = 0; trial < 15; ++trial) {
      const SkewMatrix a = random_skew(rng, dim(rng));
      const SpectralForm sf = spectral_form(a, tol);
      const Polynomial p = char_poly(a, tol);
      const double scale = std::max(1.0, p.max_abs_coefficient());
      for (double f : sf.frequencies) {
        check.expect(std::abs(p.eval(std::complex<double>(0.0, f))) / scale, 1e-6,
                     "charpoly vanishes at i*frequency");
      }
      if (sf.kernel_dim > 0) {
        check.expect(std::abs(p.eval(0.0)) / scale, 1e-6, "charpoly vanishes at 0");
      }
    }
  });
}

SuiteResult suite_coimage(std::uint64_t seed, const Tolerances& tol) {
  return run_timed("skewlin/coimage-restriction", 0.0, [&](Check& check) {
    Rng rng(seed + 3);
    for (int trial = 0; trial < 10; ++trial) {
      Matrix core = Matrix::Zero(7, 7);
      core.block<2, 2>(0, 0) = 0.7 * standard_j();
      core.block<2, 2>(2, 2) = 1.9 * standard_j();
      const Matrix q = random_orthogonal(rng, 7);
      Matrix m = q * core * q.transpose();
      m = 0.5 * (m - m.transpose().eval());
      const SkewMatrix b(m, tol);
      const CoimageRestriction res = restrict_to_coimage(b, tol);
      check.require(res.restricted.dim() == 4, "coimage dimension");
      check.expect((res.embedding * res.restricted.matrix() * res.embedding.transpose() -
                    b.matrix()).cwiseAbs().maxCoeff(),
                   tol.block_tol, "embedding reconstruction");
      const SpectralForm inner = spectral_form(res.restricted, tol);
      const SpectralForm outer = spectral_form(b, tol);
      check.require(inner.frequencies.size() == outer.frequencies.size(),
                    "nonzero spectrum count preserved");
      for (std::size_t j = 0; j < inner.frequencies.size(); ++j) {
        check.expect(std::abs(inner.frequencies[j] - outer.frequencies[j]), 1e-8,
                     "nonzero spectrum preserved");
      }
    }
    bool threw = false;
    try {
      restrict_to_coimage(SkewMatrix(Matrix::Zero(3, 3), tol), tol);
    } catch (const Error& e) {
      threw = e.code() == Errc::zero_matrix;
    }
    check.require(threw, "zero matrix reports an empty coimage");
  });
}

SuiteResult suite_q0_norms(std::uint64_t seed, const Tolerances& tol) {
  return run_timed("helical/derivative-norm-constancy", 0.0, [&](Check& check) {
    Rng rng(seed + 4);
    for (int trial = 0; trial < 20; ++trial) {
      const Q0Curve c = random_q0(rng);
      check.expect(norm_constancy_stddev(c, 6, 100), 1e-9, "derivative norm constancy");
    }
    (void)tol;
  });
}

SuiteResult suite_gram_parity(std::uint64_t seed, const Tolerances& tol) {
  return run_timed("helical/gram-parity", 0.0, [&](Check& check) {
    Rng rng(seed + 5);
    std::uniform_real_distribution<double> unif(0.0, 2.0 * kPi);
    for (int trial = 0; trial < 20; ++trial) {
      const Q0Curve c = random_q0(rng);
      check.expect(gram_parity_residual(c, 6), 1e-12, "odd-gap inner products vanish");
      // Independent check straight from derivative evaluations.
      for (int k = 0; k < 5; ++k) {
        const double s = unif(rng);
        check.expect(std::abs(derivative_q0(c, 2, s).dot(derivative_q0(c, 3, s))), 1e-9,
                     "derivative inner product parity");
      }
      for (int k = 0; k <= 6; ++k) {
        for (int l = 0; l <= 6; ++l) {
          const double s = unif(rng);
          const double direct = derivative_q0(c, k, s).dot(derivative_q0(c, l, s));
          check.expect(std::abs(direct - gram_e_kl(c, k, l)), 1e-9,
                       "gram matches derivative inner products");
        }
      }
    }
    (void)tol;
  });
}

SuiteResult suite_even_odd(std::uint64_t seed, const Tolerances& tol) {
  return run_timed("helical/even-odd-span-orthogonality", 0.0, [&](Check& check) {
    Rng rng(seed + 6);
    std::uniform_real_distribution<double> unif(0.0, 2.0 * kPi);
    for (int trial = 0; trial < 20; ++trial) {
      const Q0Curve c = random_q0(rng);
      check.expect(even_odd_gram_residual(c, unif(rng)), 1e-9, "even/odd span orthogonality");
    }
    (void)tol;
  });
}

SuiteResult suite_annihilation(std::uint64_t seed, const Tolerances& tol) {
  return run_timed("helical/minimal-annihilating-polynomial", 0.0, [&](Check& check) {
    Rng rng(seed + 7);
    for (int trial = 0; trial < 15; ++trial) {
      const Q0Curve c = random_q0(rng);
      check.expect(annihilation_residual(c, rng, tol), 1e-8, "p(D)gamma = 0");
    }
  });
}

SuiteResult suite_decompose_roundtrip(std::uint64_t seed, const Tolerances& tol) {
  return run_timed("helical/decompose-roundtrip", 0.0, [&](Check& check) {
    Rng rng(seed + 8);
    std::uniform_int_distribution<int> dim(2, 9);
    for (int trial = 0; trial < 15; ++trial) {
      const SkewMatrix a = random_skew(rng, dim(rng));
      const Vector u0 = random_matrix(rng, a.dim(), 1);
      check.expect(decompose_roundtrip_rms(a, u0, tol), 1e-9, "reconstruction RMS");
    }
  });
}

SuiteResult suite_fit_roundtrip(std::uint64_t seed, const Tolerances& tol) {
  return run_timed("helical/fit-roundtrip", 0.0, [&](Check& check) {
    Rng rng(seed + 9);
    std::uniform_int_distribution<int> pick_n(1, 3);
    std::uniform_int_distribution<int> pick_p(0, 1);
    for (int trial = 0; trial < 8; ++trial) {
      const int n = pick_n(rng);
      const int p = pick_p(rng);
      const SkewMatrix a_h = random_invertible_skew(rng, n, 0.3, 1.2, 0.12);
      Matrix a_full = Matrix::Zero(2 * n + p, 2 * n + p);
      a_full.topLeftCorner(2 * n, 2 * n) = a_h.matrix();
      const SkewMatrix a(a_full, tol);
      const SpectralForm sf = spectral_form(a, tol);
      const Vector u0 = structured_basepoint(rng, sf, true);
      const EmbeddedQ0 reference = decompose(a, u0, tol);

      const Vector s = grid(0.0, 4.0 * kPi, 161);
      Matrix samples(s.size(), a.dim());
      for (Eigen::Index i = 0; i < s.size(); ++i) {
        samples.row(i) = (expm_skew(sf, s[i]) * u0).transpose();
      }
      const FitResult fit = fit_from_samples({s.data(), static_cast<std::size_t>(s.size())},
                                             samples, 4, tol);
      check.require(fit.embedded.decomposition.frequencies.size() ==
                        reference.decomposition.frequencies.size(),
                    "fitted frequency count");
      for (std::size_t j = 0; j < fit.embedded.decomposition.frequencies.size() &&
                              j < reference.decomposition.frequencies.size();
           ++j) {
        check.expect(std::abs(fit.embedded.decomposition.frequencies[j] -
                              reference.decomposition.frequencies[j]),
                     1e-6, "fitted frequencies");
      }
    }
  });
}

SuiteResult suite_q1_derivative(std::uint64_t seed, const Tolerances& tol) {
  return run_timed("helical/q1-derivative", 0.0, [&](Check& check) {
    Rng rng(seed + 10);
    std::uniform_real_distribution<double> unif(0.0, 2.0 * kPi);
    const double h = 1e-5;
    for (int trial = 0; trial < 15; ++trial) {
      const Q1Curve c = random_q1(rng);
      const double s = unif(rng);
      const Vector fd = (eval_q1(c, s + h) - eval_q1(c, s - h)) / (2.0 * h);
      check.expect((fd - eval_q0(c.derivative(), s)).cwiseAbs().maxCoeff(), 1e-7,
                   "dQ1/ds equals the Q0 derivative curve");
    }
    (void)tol;
  });
}

SuiteResult suite_bracket(std::uint64_t seed, const Tolerances& tol) {
  return run_timed("carnot/bracket-laws", 0.0, [&](Check& check) {
    Rng rng(seed + 11);
    const std::vector<StratifiedAlgebra2> algebras = {heisenberg(2), free_nilpotent(3),
                                                      random_contact(rng, 3)};
    for (const auto& g : algebras) {
      for (int trial = 0; trial < 10; ++trial) {
        const Vector u = random_matrix(rng, g.m, 1);
        const Vector v = random_matrix(rng, g.m, 1);
        check.expect((bracket(g, u, v) + bracket(g, v, u)).cwiseAbs().maxCoeff(), 1e-13,
                     "bracket antisymmetry");
        check.expect(bracket(g, u, u).cwiseAbs().maxCoeff(), 1e-13, "bracket(u,u) = 0");
      }
      // Surjectivity onto the vertical layer: pairwise brackets span R^p.
      Matrix pairs(g.m * (g.m - 1) / 2, g.p);
      Eigen::Index row = 0;
      for (Eigen::Index i = 0; i < g.m; ++i) {
        for (Eigen::Index j = i + 1; j < g.m; ++j) {
          pairs.row(row++) = bracket(g, Vector::Unit(g.m, i), Vector::Unit(g.m, j)).transpose();
        }
      }
      Eigen::JacobiSVD<Matrix> svd(pairs);
      check.require(svd.singularValues().minCoeff() > tol.dep_tol,
                    "bracket surjectivity onto the vertical layer");
    }
  });
}

SuiteResult suite_group_laws(std::uint64_t seed, const Tolerances& tol) {
  return run_timed("carnot/group-laws", 0.0, [&](Check& check) {
    Rng rng(seed + 12);
    const std::vector<StratifiedAlgebra2> algebras = {heisenberg(1), free_nilpotent(3),
                                                      random_contact(rng, 3)};
    for (const auto& g : algebras) {
      for (int trial = 0; trial < 10; ++trial) {
        const CarnotPoint a{random_matrix(rng, g.m, 1), random_matrix(rng, g.p, 1)};
        const CarnotPoint b{random_matrix(rng, g.m, 1), random_matrix(rng, g.p, 1)};
        const CarnotPoint c{random_matrix(rng, g.m, 1), random_matrix(rng, g.p, 1)};
        const CarnotPoint lhs = group_multiply(g, group_multiply(g, a, b), c);
        const CarnotPoint rhs = group_multiply(g, a, group_multiply(g, b, c));
        check.expect((lhs.x - rhs.x).cwiseAbs().maxCoeff(), 1e-12, "associativity (x)");
        check.expect((lhs.t - rhs.t).cwiseAbs().maxCoeff(), 1e-12, "associativity (t)");
        const CarnotPoint e = group_multiply(g, a, group_identity(g));
        check.expect((e.x - a.x).cwiseAbs().maxCoeff() + (e.t - a.t).cwiseAbs().maxCoeff(), 0.0,
                     "identity law");
        const CarnotPoint inv = group_multiply(g, a, group_inverse(a));
        check.expect(inv.x.cwiseAbs().maxCoeff() + inv.t.cwiseAbs().maxCoeff(), 1e-13,
                     "inverse law");
      }
    }
    (void)tol;
  });
}

SuiteResult suite_frame_bracket(std::uint64_t seed, const Tolerances& tol) {
  return run_timed("carnot/frame-lie-bracket", 0.0, [&](Check& check) {
    Rng rng(seed + 13);
    const std::vector<StratifiedAlgebra2> algebras = {heisenberg(1), free_nilpotent(3),
                                                      random_contact(rng, 2)};
    const double h = 1e-5;
    for (const auto& g : algebras) {
      for (int trial = 0; trial < 4; ++trial) {
        const CarnotPoint at{random_matrix(rng, g.m, 1), random_matrix(rng, g.p, 1)};
        for (Eigen::Index i = 0; i < g.m; ++i) {
          for (Eigen::Index j = 0; j < g.m; ++j) {
            // [X_i, X_j] by finite-difference Jacobians (fields depend on x only).
            auto field = [&](Eigen::Index idx, const Vector& x) {
              return vector_field_at(g, idx, CarnotPoint{x, at.t});
            };
            const Vector ui = field(i, at.x);
            const Vector uj = field(j, at.x);
            Vector lie = Vector::Zero(g.m + g.p);
            for (Eigen::Index k = 0; k < g.m; ++k) {
              const Vector dk_j =
                  (field(j, at.x + h * Vector::Unit(g.m, k)) -
                   field(j, at.x - h * Vector::Unit(g.m, k))) /
                  (2.0 * h);
              const Vector dk_i =
                  (field(i, at.x + h * Vector::Unit(g.m, k)) -
                   field(i, at.x - h * Vector::Unit(g.m, k))) /
                  (2.0 * h);
              lie += dk_j * ui[k] - dk_i * uj[k];
            }
            Vector expected = Vector::Zero(g.m + g.p);
            expected.tail(g.p) = bracket(g, Vector::Unit(g.m, i), Vector::Unit(g.m, j));
            check.expect((lie - expected).cwiseAbs().maxCoeff(), 1e-5,
                         "frame commutator equals the bracket");
          }
        }
      }
    }
    (void)tol;
  });
}

SuiteResult suite_helical_algebra_roundtrip(std::uint64_t seed, const Tolerances& tol) {
  return run_timed("carnot/helical-algebra-roundtrip", 0.0, [&](Check& check) {
    Rng rng(seed + 14);
    std::uniform_int_distribution<int> pick_n(1, 3);
    std::uniform_int_distribution<int> pick_p(1, 3);
    for (int trial = 0; trial < 10; ++trial) {
      Vector w = random_matrix(rng, pick_p(rng), 1);
      while (w.norm() < 0.3) w = random_matrix(rng, w.size(), 1);
      const HelicalCR h = HelicalCR::create(random_invertible_skew(rng, pick_n(rng)), w, tol);
      const ContactEmbedding ce = helical_to_algebra(h, tol);
      const HelicalFromAlgebra back = algebra_to_helical(ce.algebra, h.w, tol);
      const EquivalenceResult eq = equivalent(h, back.helical, tol);
      check.require(eq.equivalent, "round-trip equivalence");
      check.expect(std::abs(eq.lambda - 1.0), 1e-9, "round-trip lambda = 1");
      const SpectralForm s1 = spectral_form(h.A, tol);
      const SpectralForm s2 = spectral_form(back.helical.A, tol);
      check.require(s1.frequencies.size() == s2.frequencies.size(), "spectrum count");
      for (std::size_t j = 0; j < s1.frequencies.size(); ++j) {
        check.expect(std::abs(s1.frequencies[j] - s2.frequencies[j]), 1e-8, "spectra equal");
      }
    }
  });
}

SuiteResult suite_closed_form_vs_oracle(std::uint64_t seed, const Tolerances& tol) {
  return run_timed("geodesic/closed-form-vs-oracle", 0.0, [&](Check& check) {
    Rng rng(seed + 15);
    std::uniform_real_distribution<double> tau_mag(0.4, 1.5);
    std::uniform_int_distribution<int> coin(0, 1);
    for (int trial = 0; trial < 8; ++trial) {
      const StratifiedAlgebra2 g = random_contact(rng, 3);
      GeodesicIVP ivp = random_ivp(rng, g);
      ivp.tau0 = Vector::Constant(1, (coin(rng) ? 1.0 : -1.0) * tau_mag(rng));
      const OracleComparison cmp = compare_closed_form_with_oracle(g, ivp, 33, tol);
      check.expect(cmp.state_gap, 1e-6, "contact closed form vs oracle");
      check.expect(cmp.h_drift, 1e-8, "Hamiltonian drift");
      check.expect(cmp.zeta_drift, 1e-8, "|zeta| constant");
      check.require(cmp.tau_constant, "tau constant");
    }
    for (int trial = 0; trial < 3; ++trial) {
      const StratifiedAlgebra2 g = free_nilpotent(3);
      const GeodesicIVP ivp = random_ivp(rng, g);
      const OracleComparison cmp = compare_closed_form_with_oracle(g, ivp, 33, tol);
      check.expect(cmp.state_gap, 1e-6, "free nilpotent closed form vs oracle");
      check.expect(cmp.h_drift, 1e-8, "Hamiltonian drift");
      check.require(cmp.tau_constant, "tau constant");
    }
  });
}

SuiteResult suite_geodesic_speed(std::uint64_t seed, const Tolerances& tol) {
  return run_timed("geodesic/speed-and-hamilton-equations", 0.0, [&](Check& check) {
    Rng rng(seed + 16);
    std::uniform_real_distribution<double> unif(0.0, 2.0 * kPi);
    for (int trial = 0; trial < 10; ++trial) {
      const StratifiedAlgebra2 g = (trial % 3 == 0) ? free_nilpotent(3) : random_contact(rng, 3);
      const GeodesicIVP ivp = random_ivp(rng, g);
      const NormalGeodesic geo = geodesic_closed_form(g, ivp, tol);
      const double speed0 = geo.zeta0().norm();
      const double h = 1e-5;
      for (int i = 0; i < 5; ++i) {
        const double s = unif(rng);
        const PhaseState st = geo.state(s);
        check.expect(std::abs(st.zeta.norm() - speed0), 1e-9, "constant speed");
        const Vector xdot = (geo.position_x(s + h) - geo.position_x(s - h)) / (2.0 * h);
        check.expect((xdot - st.zeta).cwiseAbs().maxCoeff(), 1e-8, "dx/ds = zeta");
        const Vector tdot = (geo.position_t(s + h) - geo.position_t(s - h)) / (2.0 * h);
        for (Eigen::Index a = 0; a < g.p; ++a) {
          const double expected = 0.5 * st.zeta.dot(g.C[static_cast<std::size_t>(a)].matrix() * st.x);
          check.expect(std::abs(tdot[a] - expected), 1e-7, "dt/ds = (1/2) zeta^T C x");
        }
      }
    }
  });
}

SuiteResult suite_lift_and_length(std::uint64_t seed, const Tolerances& tol) {
  return run_timed("geodesic/lift-and-length", 0.0, [&](Check& check) {
    Rng rng(seed + 17);
    const StratifiedAlgebra2 g = heisenberg(1);

    // Unit circle once around from (1, 0): vertical gain is the enclosed area.
    HorizontalPath circle;
    circle.position = [](double s) {
      Vector x(2);
      x << std::cos(s), std::sin(s);
      return x;
    };
    circle.velocity = [](double s) {
      Vector v(2);
      v << -std::sin(s), std::cos(s);
      return v;
    };
    CarnotPoint base{Vector::Zero(2), Vector::Zero(1)};
    base.x << 1.0, 0.0;
    const auto lift = horizontal_lift(g, circle, base, 0.0, tol);
    check.expect(std::abs(lift(2.0 * kPi).t[0] - kPi), 1e-9, "circle lift gains the area");

    // Same circle as a geodesic trajectory: x(s) = exp(sJ) b with b = (1,0).
    GeodesicIVP ivp;
    ivp.x0 = base.x;
    ivp.t0 = Vector::Zero(1);
    ivp.tau0 = Vector::Constant(1, 1.0);
    ivp.xi0 = standard_j() * (0.5 * base.x);
    const NormalGeodesic geo = geodesic_closed_form(g, ivp, tol);
    for (double s : {0.7, 2.2, 2.0 * kPi}) {
      check.expect((geo.position_x(s) - circle.position(s)).cwiseAbs().maxCoeff(), 1e-10,
                   "geodesic horizontal circle");
      check.expect(std::abs(geo.position_t(s)[0] - lift(s).t[0]), 1e-8,
                   "lift reproduces the geodesic vertical part");
    }

    GroupPath geo_path;
    geo_path.position = [&geo](double s) { return geo.position(s); };
    geo_path.x_velocity = [&geo](double s) { return Vector(geo.state(s).zeta); };
    const double len = cc_length(g, geo_path, 0.0, 2.0, tol);
    check.expect(std::abs(len - geo.zeta0().norm() * 2.0), 1e-8, "geodesic length = |zeta0| L");

    // Straight horizontal segment of length one.
    GroupPath segment;
    segment.position = [&g](double s) {
      CarnotPoint p{Vector::Zero(g.m), Vector::Zero(g.p)};
      p.x[0] = s;
      return p;
    };
    check.expect(std::abs(cc_length(g, segment, 0.0, 1.0, tol) - 1.0), 1e-10,
                 "unit segment length");

    // A non-horizontal path is rejected.
    GroupPath tilted;
    tilted.position = [&g](double s) {
      CarnotPoint p{Vector::Zero(g.m), Vector::Zero(g.p)};
      p.x[0] = s;
      p.t[0] = s;
      return p;
    };
    bool threw = false;
    try {
      cc_length(g, tilted, 0.0, 1.0, tol);
    } catch (const Error& e) {
      threw = e.code() == Errc::not_horizontal;
    }
    check.require(threw, "non-horizontal path rejected");
    (void)rng;
  });
}

SuiteResult suite_horizontal_projection(std::uint64_t seed, const Tolerances& tol) {
  return run_timed("geodesic/marked-horizontal-projection", 0.0, [&](Check& check) {
    Rng rng(seed + 18);
    for (int trial = 0; trial < 8; ++trial) {
      const MarkedHelicalCR mh = random_marked(rng, tol);
      const MarkedGeodesic mg = marked_helical_to_geodesic(mh, tol);
      const NormalGeodesic geo = geodesic_closed_form(mg.contact.algebra, mg.ivp, tol);
      const Q1Curve mu{mh.base, mh.v, mh.v0(), mh.w0()};
      for (int i = 0; i <= 16; ++i) {
        const double s = 2.0 * kPi * i / 16.0;
        check.expect((geo.position_x(s) - q1_horizontal(mu, s)).cwiseAbs().maxCoeff(), 1e-9,
                     "horizontal projections coincide");
      }
    }
  });
}

SuiteResult suite_gamma_identities(std::uint64_t seed, const Tolerances& tol) {
  return run_timed("homcurves/gamma-identities", 0.0, [&](Check& check) {
    Rng rng(seed + 19);
    std::uniform_real_distribution<double> unif(0.0, 2.0 * kPi);
    for (int m = 1; m <= 12; ++m) {
      for (int i = 0; i < 100; ++i) {
        check.expect(std::abs(gamma_m_eval(m, unif(rng)).norm() - 1.0), 1e-12, "unit norm");
      }
    }
    const double h = 1e-6;
    for (int m = 1; m <= 10; ++m) {
      const SkewMatrix l = build_L_m(m);
      const SpectralForm sf = spectral_form(l, tol);
      for (int i = 0; i < 10; ++i) {
        const double s = unif(rng);
        const Vector fd = (gamma_m_eval(m, s + h) - gamma_m_eval(m, s - h)) / (2.0 * h);
        check.expect((fd - l.matrix() * gamma_m_eval(m, s)).cwiseAbs().maxCoeff(), 1e-9,
                     "d/ds gamma = L gamma");
        check.expect(
            (expm_skew(sf, s) * Vector::Unit(m + 1, 0) - gamma_m_eval(m, s)).cwiseAbs().maxCoeff(),
            1e-9, "exp(L s) E0 = gamma");
      }
    }
  });
}

SuiteResult suite_gamma_spectra(std::uint64_t seed, const Tolerances& tol) {
  return run_timed("homcurves/spectra-and-charpoly", 0.0, [&](Check& check) {
    for (int m = 1; m <= 12; ++m) {
      const std::vector<int> spec = spectrum_L_m(m, tol);
      check.require(static_cast<int>(spec.size()) == m + 1, "spectrum size");
      const Polynomial closed = char_poly_L_m(m);
      const Polynomial numeric = char_poly(build_L_m(m), tol);
      check.require(closed.degree() == numeric.degree(), "charpoly degree");
      const double scale = std::max(1.0, closed.max_abs_coefficient());
      for (int k = 0; k <= closed.degree(); ++k) {
        check.expect(std::abs(closed.coefficients()[static_cast<std::size_t>(k)] -
                              numeric.coefficients()[static_cast<std::size_t>(k)]) /
                         scale,
                     1e-6, "charpoly closed form");
      }
    }
    (void)seed;
  });
}

SuiteResult suite_closure_operations(std::uint64_t seed, const Tolerances& tol) {
  return run_timed("homcurves/closure-operations", 0.0, [&](Check& check) {
    Rng rng(seed + 20);
    std::uniform_real_distribution<double> unif(0.0, 2.0 * kPi);
    for (int trial = 0; trial < 6; ++trial) {
      const Q0Curve c1 = random_q0(rng, 2, 1, true);
      const Q0Curve c2 = random_q0(rng, 2, 1, true);
      const Matrix t = random_orthogonal(rng, c1.structure.ambient_dim());
      const EmbeddedQ0 post = postcompose_orthogonal(t, c1, tol);
      for (int i = 0; i < 5; ++i) {
        const double s = unif(rng);
        check.expect((post.eval_ambient(s) - t * eval_q0(c1, s)).cwiseAbs().maxCoeff(), 1e-10,
                     "postcomposition evaluation");
      }
      check.expect(norm_constancy_stddev(post.curve, 4, 60), 1e-8, "postcomposition closure");

      const double theta = unif(rng);
      const Q0Curve jux = juxtapose(theta, c1, c2, tol);
      check.expect(norm_constancy_stddev(jux, 4, 60), 1e-8, "juxtaposition closure");
      for (int k = 0; k <= 4; ++k) {
        const double expected = std::cos(theta) * std::cos(theta) * gram_e_kl(c1, k, k) +
                                std::sin(theta) * std::sin(theta) * gram_e_kl(c2, k, k);
        check.expect(std::abs(gram_e_kl(jux, k, k) - expected), 1e-10,
                     "juxtaposition derivative norms");
      }

      const EmbeddedQ0 tens = tensor_curve(c1, c2, tol);
      for (int i = 0; i < 5; ++i) {
        const double s = unif(rng);
        const Vector direct = tensor_eval(c1, c2, s);
        check.expect((tens.eval_ambient(s) - direct).cwiseAbs().maxCoeff(), 1e-9,
                     "tensor generator evaluation");
        check.expect(std::abs(direct.norm() - eval_q0(c1, s).norm() * eval_q0(c2, s).norm()),
                     1e-12, "tensor norm product law");
      }
      check.expect(norm_constancy_stddev(tens.curve, 4, 60), 1e-8, "tensor closure");
    }

    // Minimal polynomial of the decomposed homogeneous curves.
    for (int m = 2; m <= 6; ++m) {
      const EmbeddedQ0 emb = decompose(build_L_m(m), Vector::Unit(m + 1, 0), tol);
      for (double amp : emb.decomposition.amplitudes) {
        check.require(amp > 1e-6, "all plane amplitudes active");
      }
      Polynomial expected({1.0});
      for (double f : emb.decomposition.frequencies) {
        expected = expected * Polynomial({f * f, 0.0, 1.0});
      }
      if (m % 2 == 0) expected = expected * Polynomial({0.0, 1.0});
      const Polynomial actual = minimal_annihilating_poly(emb.curve, tol);
      check.require(actual.degree() == expected.degree(), "minimal polynomial degree");
      const double scale = std::max(1.0, expected.max_abs_coefficient());
      for (int k = 0; k <= std::min(actual.degree(), expected.degree()); ++k) {
        check.expect(std::abs(actual.coefficients()[static_cast<std::size_t>(k)] -
                              expected.coefficients()[static_cast<std::size_t>(k)]) /
                         scale,
                     1e-9, "minimal polynomial factors");
      }
    }
  });
}

// ---------------------------------------------------------------------------
// Acceptance criteria
// ---------------------------------------------------------------------------

SuiteResult criterion_printed_generators(const Tolerances& tol) {
  return run_timed("criterion-01/printed-generators", 1.0, [&](Check& check) {
    const double r2 = std::sqrt(2.0);
    const double r3 = std::sqrt(3.0);
    Matrix l1(2, 2), l2(3, 3), l3(4, 4);
    l1 << 0, -1, 1, 0;
    l2 << 0, -r2, 0, r2, 0, -r2, 0, r2, 0;
    l3 << 0, -r3, 0, 0, r3, 0, -2, 0, 0, 2, 0, -r3, 0, 0, r3, 0;
    check.expect((build_L_m(1).matrix() - l1).cwiseAbs().maxCoeff(), 1e-12, "L_1");
    check.expect((build_L_m(2).matrix() - l2).cwiseAbs().maxCoeff(), 1e-12, "L_2");
    check.expect((build_L_m(3).matrix() - l3).cwiseAbs().maxCoeff(), 1e-12, "L_3");
    (void)tol;
  });
}

SuiteResult criterion_spectra(const Tolerances& tol) {
  return run_timed("criterion-02/spectra-and-charpolys", 5.0, [&](Check& check) {
    for (int m = 1; m <= 12; ++m) {
      const SpectralForm sf = spectral_form(build_L_m(m), tol);
      std::vector<double> expected;
      for (int j = m; j > 0; j -= 2) expected.push_back(static_cast<double>(j));
      check.require(sf.frequencies.size() == expected.size(), "frequency count");
      check.require(sf.kernel_dim == (m % 2 == 0 ? 1 : 0), "kernel dimension");
      for (std::size_t j = 0; j < expected.size(); ++j) {
        check.expect(std::abs(sf.frequencies[j] - expected[j]), 1e-8, "eigenvalue ladder");
      }
      const Polynomial closed = char_poly_L_m(m);
      const Polynomial numeric = char_poly(build_L_m(m), tol);
      check.require(closed.degree() == numeric.degree(), "charpoly degree");
      const double scale = std::max(1.0, closed.max_abs_coefficient());
      for (int k = 0; k <= closed.degree(); ++k) {
        check.expect(std::abs(closed.coefficients()[static_cast<std::size_t>(k)] -
                              numeric.coefficients()[static_cast<std::size_t>(k)]) /
                         scale,
                     1e-6, "charpoly coefficients");
      }
    }
  });
}

SuiteResult criterion_heisenberg_family(std::uint64_t seed, const Tolerances& tol) {
  return run_timed("criterion-03/heisenberg-geodesics", 5.0, [&](Check& check) {
    Rng rng(seed + 30);
    std::normal_distribution<double> normal(0.0, 1.0);
    const Vector s = grid(0.0, 2.0 * kPi, 201);
    for (int trial = 0; trial < 20; ++trial) {
      const Eigen::Vector2d a(normal(rng), normal(rng));
      const Eigen::Vector2d b(normal(rng), normal(rng));
      const double c = normal(rng);
      const HeisenbergFamily fam = heisenberg_geodesic_ivp(a, b, c);
      const NormalGeodesic geo = geodesic_closed_form(fam.algebra, fam.ivp, tol);
      for (Eigen::Index i = 0; i < s.size(); ++i) {
        const CarnotPoint expected = heisenberg_geodesic(a, b, c, s[i]);
        check.expect((geo.position_x(s[i]) - expected.x).cwiseAbs().maxCoeff(), 1e-9,
                     "horizontal family");
        check.expect(std::abs(geo.position_t(s[i])[0] - expected.t[0]), 1e-9, "vertical family");
      }
    }
    // Geodesics from the origin: b = -a, c = 0.
    for (int trial = 0; trial < 5; ++trial) {
      const Eigen::Vector2d a(normal(rng), normal(rng));
      const HeisenbergFamily fam = heisenberg_geodesic_ivp(a, -a, 0.0);
      const NormalGeodesic geo = geodesic_closed_form(fam.algebra, fam.ivp, tol);
      for (Eigen::Index i = 0; i < s.size(); ++i) {
        Eigen::Vector2d expected_x = a - rotation2(-s[i]) * a;
        const double expected_t = a.squaredNorm() * (s[i] - std::sin(s[i]));
        check.expect((geo.position_x(s[i]) - expected_x).cwiseAbs().maxCoeff(), 1e-9,
                     "origin family horizontal");
        check.expect(std::abs(geo.position_t(s[i])[0] - expected_t), 1e-9,
                     "origin family vertical");
      }
    }
  });
}

SuiteResult criterion_closed_form_oracle(std::uint64_t seed, const Tolerances& tol) {
  return run_timed("criterion-04/closed-form-vs-oracle", 60.0, [&](Check& check) {
    Rng rng(seed + 31);
    std::uniform_real_distribution<double> tau_mag(0.4, 1.5);
    std::uniform_int_distribution<int> coin(0, 1);
    for (int trial = 0; trial < 50; ++trial) {
      const StratifiedAlgebra2 g = random_contact(rng, 4);
      GeodesicIVP ivp = random_ivp(rng, g);
      ivp.tau0 = Vector::Constant(1, (coin(rng) ? 1.0 : -1.0) * tau_mag(rng));
      const OracleComparison cmp = compare_closed_form_with_oracle(g, ivp, 65, tol);
      check.expect(cmp.state_gap, 1e-6, "contact state gap");
      check.expect(cmp.h_drift, 1e-8, "Hamiltonian drift");
      check.require(cmp.tau_constant, "tau constant");
    }
    for (int trial = 0; trial < 10; ++trial) {
      const StratifiedAlgebra2 g = free_nilpotent(3);
      const GeodesicIVP ivp = random_ivp(rng, g);
      const OracleComparison cmp = compare_closed_form_with_oracle(g, ivp, 65, tol);
      check.expect(cmp.state_gap, 1e-6, "free nilpotent state gap");
      check.expect(cmp.h_drift, 1e-8, "Hamiltonian drift");
      check.require(cmp.tau_constant, "tau constant");
    }
  });
}

SuiteResult criterion_q0_invariants(std::uint64_t seed, const Tolerances& tol) {
  return run_timed("criterion-05/constant-norm-invariants", 30.0, [&](Check& check) {
    Rng rng(seed + 32);
    std::uniform_real_distribution<double> unif(0.0, 2.0 * kPi);
    for (int trial = 0; trial < 100; ++trial) {
      const Q0Curve c = random_q0(rng, 4, 2);
      check.expect(norm_constancy_stddev(c, 6, 100), 1e-9, "derivative norm constancy");
      check.expect(gram_parity_residual(c, 6), 1e-12, "parity zeros");
      check.expect(even_odd_gram_residual(c, unif(rng)), 1e-9, "even/odd Gram block");
    }
    (void)tol;
  });
}

SuiteResult criterion_decomposition_roundtrip(std::uint64_t seed, const Tolerances& tol) {
  return run_timed("criterion-06/decomposition-roundtrips", 30.0, [&](Check& check) {
    Rng rng(seed + 33);
    std::uniform_int_distribution<int> pick_n(1, 3);
    std::uniform_int_distribution<int> pick_p(0, 1);
    for (int trial = 0; trial < 50; ++trial) {
      Matrix a_full;
      if (trial == 0) {
        // Repeated frequency: two planes rotating at the same rate.
        a_full = Matrix::Zero(4, 4);
        a_full.block<2, 2>(0, 0) = standard_j();
        a_full.block<2, 2>(2, 2) = standard_j();
      } else if (trial == 1) {
        a_full = build_L_m(2).matrix();  // singular generator
      } else {
        const int n = pick_n(rng);
        const int p = pick_p(rng);
        a_full = Matrix::Zero(2 * n + p, 2 * n + p);
        a_full.topLeftCorner(2 * n, 2 * n) =
            random_invertible_skew(rng, n, 0.3, 1.2, 0.12).matrix();
      }
      const SkewMatrix a(a_full, tol);
      const SpectralForm sf = spectral_form(a, tol);
      const Vector u0 = structured_basepoint(rng, sf, true);

      const EmbeddedQ0 reference = decompose(a, u0, tol);
      check.expect(decompose_roundtrip_rms(a, u0, tol), 1e-9, "decompose reconstruction RMS");

      const Vector s = grid(0.0, 4.0 * kPi, 161);
      Matrix samples(s.size(), a.dim());
      for (Eigen::Index i = 0; i < s.size(); ++i) {
        samples.row(i) = (expm_skew(sf, s[i]) * u0).transpose();
      }
      const FitResult fit =
          fit_from_samples({s.data(), static_cast<std::size_t>(s.size())}, samples, 4, tol);
      check.require(fit.embedded.decomposition.frequencies.size() ==
                        reference.decomposition.frequencies.size(),
                    "fitted frequency count");
      for (std::size_t j = 0; j < fit.embedded.decomposition.frequencies.size() &&
                              j < reference.decomposition.frequencies.size();
           ++j) {
        check.expect(std::abs(fit.embedded.decomposition.frequencies[j] -
                              reference.decomposition.frequencies[j]),
                     1e-6, "fitted frequencies");
      }
      check.expect(fit.rms, 1e-9, "fit reconstruction RMS");
    }
  });
}

SuiteResult criterion_correspondences(std::uint64_t seed, const Tolerances& tol) {
  return run_timed("criterion-07/correspondence-roundtrips", 30.0, [&](Check& check) {
    Rng rng(seed + 34);
    std::uniform_int_distribution<int> pick_n(1, 3);
    std::uniform_int_distribution<int> pick_p(1, 3);

    for (int trial = 0; trial < 20; ++trial) {
      Vector w = random_matrix(rng, pick_p(rng), 1);
      while (w.norm() < 0.3) w = random_matrix(rng, w.size(), 1);
      const HelicalCR h = HelicalCR::create(random_invertible_skew(rng, pick_n(rng)), w, tol);
      const ContactEmbedding ce = helical_to_algebra(h, tol);
      const HelicalFromAlgebra back = algebra_to_helical(ce.algebra, h.w, tol);
      const EquivalenceResult eq = equivalent(h, back.helical, tol);
      check.require(eq.equivalent, "helical round-trip equivalence");
      check.expect(std::abs(eq.lambda - 1.0), 1e-9, "helical round-trip lambda");
      const SpectralForm s1 = spectral_form(h.A, tol);
      const SpectralForm s2 = spectral_form(back.helical.A, tol);
      for (std::size_t j = 0; j < s1.frequencies.size(); ++j) {
        check.expect(std::abs(s1.frequencies[j] - s2.frequencies[j]), 1e-8,
                     "helical round-trip spectra");
      }
    }

    for (int trial = 0; trial < 20; ++trial) {
      const MarkedHelicalCR mh = random_marked(rng, tol);
      const MarkedGeodesic mg = marked_helical_to_geodesic(mh, tol);
      const MarkedHelicalCR back = geodesic_to_marked_helical(
          mg.contact.algebra, mg.ivp, mg.contact.vertical_axis * mg.contact.vertical_norm, tol);
      check.expect((back.v - mh.v).cwiseAbs().maxCoeff(), 1e-12, "marked round-trip v");
      check.expect((back.u0 - mh.u0).cwiseAbs().maxCoeff(), 1e-12, "marked round-trip u0");

      const NormalGeodesic geo = geodesic_closed_form(mg.contact.algebra, mg.ivp, tol);
      const Q1Curve mu{mh.base, mh.v, mh.v0(), mh.w0()};
      for (int i = 0; i <= 16; ++i) {
        const double s = 2.0 * kPi * i / 16.0;
        check.expect((geo.position_x(s) - q1_horizontal(mu, s)).cwiseAbs().maxCoeff(), 1e-9,
                     "horizontal projections coincide");
      }
    }

    for (int trial = 0; trial < 15; ++trial) {
      const int p = pick_p(rng);
      const int n = (p == 1) ? pick_n(rng) : 2 + trial % 2;  // keep p <= m(m-1)/2
      StratifiedAlgebra2 g = [&] {
        for (int attempt = 0;; ++attempt) {
          std::vector<SkewMatrix> cs;
          for (int a = 0; a < p; ++a) cs.push_back(random_invertible_skew(rng, n));
          try {
            return StratifiedAlgebra2::create(std::move(cs), tol);
          } catch (const Error&) {
            if (attempt > 10) throw;
          }
        }
      }();
      std::vector<GeodesicIVP> ivps;
      for (int a = 0; a < p; ++a) {
        GeodesicIVP ivp = random_ivp(rng, g);
        ivp.tau0 = Vector::Unit(p, a);
        ivps.push_back(std::move(ivp));
      }
      const std::vector<Q1Curve> curves = algebra_to_tuple(g, ivps, tol);
      const AssembledTuple back = assemble_from_tuple(curves, tol);
      for (int a = 0; a < p; ++a) {
        check.expect((back.algebra.C[static_cast<std::size_t>(a)].matrix() -
                      g.C[static_cast<std::size_t>(a)].matrix())
                         .cwiseAbs()
                         .maxCoeff(),
                     1e-9, "tuple round-trip structure matrices");
        check.expect((back.geodesics[static_cast<std::size_t>(a)].x0 -
                      ivps[static_cast<std::size_t>(a)].x0)
                         .cwiseAbs()
                         .maxCoeff(),
                     1e-9, "tuple round-trip x0");
        check.expect((back.geodesics[static_cast<std::size_t>(a)].xi0 -
                      ivps[static_cast<std::size_t>(a)].xi0)
                         .cwiseAbs()
                         .maxCoeff(),
                     1e-9, "tuple round-trip xi0");
      }
    }
  });
}

SuiteResult criterion_injectivity(const Tolerances& tol) {
  return run_timed("criterion-08/injectivity", 5.0, [&](Check& check) {
    {
      const std::vector<double> f{2.0, 1.0};
      const InjectivityResult r = is_injective(f, {}, tol);
      check.require(r.verdict == Injectivity::non_injective, "(1,2) non-injective");
      check.require(r.period.has_value(), "(1,2) has a witness");
      if (r.period) {
        check.expect(std::abs(*r.period - 2.0 * kPi), 1e-12, "(1,2) witness period");
        double gap = 0.0;
        for (double fr : f) gap = std::hypot(gap, std::hypot(std::cos(fr * *r.period) - 1.0,
                                                             std::sin(fr * *r.period)));
        check.expect(gap, 1e-8, "(1,2) re-evaluation gap");
      }
    }
    {
      const std::vector<double> f{6.0, 3.0, 2.0};
      const InjectivityResult r = is_injective(f, {}, tol);
      check.require(r.verdict == Injectivity::non_injective, "(2,3,6) non-injective");
      if (r.period) {
        double gap = 0.0;
        for (double fr : f) gap = std::hypot(gap, std::hypot(std::cos(fr * *r.period) - 1.0,
                                                             std::sin(fr * *r.period)));
        check.expect(gap, 1e-8, "(2,3,6) re-evaluation gap");
      } else {
        check.require(false, "(2,3,6) has a witness");
      }
    }
    {
      const std::vector<double> f{std::sqrt(2.0), 1.0};
      const InjectivityResult r = is_injective(f, {}, tol);
      check.require(r.verdict == Injectivity::injective, "(1, sqrt 2) injective");
    }
    {
      // Ratio exactly rational but with denominator at the search bound.
      const std::vector<double> f{1.0 + 1.0 / 999983.0, 1.0};
      const InjectivityResult r = is_injective(f, {}, tol);
      check.require(r.verdict == Injectivity::inconclusive,
                    "near-rational ratio at the bound is inconclusive");
    }
  });
}

SuiteResult criterion_hyperplanes(const Tolerances& tol) {
  return run_timed("criterion-09/hyperplane-containment", 5.0, [&](Check& check) {
    const Vector s = grid(0.0, 2.0 * kPi, 50);
    {
      const auto plane = gamma_m_hyperplane_check(2, tol);
      check.require(plane.has_value(), "gamma_2 hyperplane exists");
      if (plane) {
        Vector expected(3);
        expected << 1.0, 0.0, 1.0;
        expected /= expected.norm();
        check.expect((plane->normal - expected).cwiseAbs().maxCoeff(), 1e-9,
                     "gamma_2 plane normal is (1,0,1)");
        check.expect(std::abs(plane->offset - 1.0 / std::sqrt(2.0)), 1e-12,
                     "gamma_2 plane offset");
        for (Eigen::Index i = 0; i < s.size(); ++i) {
          check.expect(std::abs(plane->normal.dot(gamma_m_eval(2, s[i])) - plane->offset), 1e-9,
                       "gamma_2 containment");
        }
      }
    }
    {
      const auto plane = gamma_m_hyperplane_check(4, tol);
      check.require(plane.has_value(), "gamma_4 hyperplane exists");
      if (plane) {
        for (Eigen::Index i = 0; i < s.size(); ++i) {
          check.expect(std::abs(plane->normal.dot(gamma_m_eval(4, s[i])) - plane->offset), 1e-9,
                       "gamma_4 containment");
        }
      }
    }
    {
      check.require(!gamma_m_hyperplane_check(3, tol).has_value(), "gamma_3 has no kernel plane");
      Matrix moments(s.size(), 5);
      for (Eigen::Index i = 0; i < s.size(); ++i) {
        moments.row(i).head(4) = gamma_m_eval(3, s[i]).transpose();
        moments(i, 4) = 1.0;
      }
      Eigen::JacobiSVD<Matrix> svd(moments);
      check.require(svd.singularValues().minCoeff() > 1e-3,
                    "gamma_3 moment matrix has no affine kernel");
    }
  });
}

SuiteResult criterion_closure(std::uint64_t seed, const Tolerances& tol) {
  return run_timed("criterion-10/closure-operations", 20.0, [&](Check& check) {
    Rng rng(seed + 35);
    std::uniform_real_distribution<double> unif(0.0, 2.0 * kPi);
    for (int trial = 0; trial < 25; ++trial) {
      const Q0Curve c1 = random_q0(rng, 2, 1, true);
      const Q0Curve c2 = random_q0(rng, 2, 1, true);

      const Matrix t = random_orthogonal(rng, c1.structure.ambient_dim());
      const EmbeddedQ0 post = postcompose_orthogonal(t, c1, tol);
      check.expect(norm_constancy_stddev(post.curve, 4, 60), 1e-8, "postcomposition closure");

      const Q0Curve jux = juxtapose(unif(rng), c1, c2, tol);
      check.expect(norm_constancy_stddev(jux, 4, 60), 1e-8, "juxtaposition closure");

      const EmbeddedQ0 tens = tensor_curve(c1, c2, tol);
      check.expect(norm_constancy_stddev(tens.curve, 4, 60), 1e-8, "tensor closure");

      // First-derivative law for unit-sphere factors.
      const double lhs = gram_e_kl(tens.curve, 1, 1);
      const double rhs = gram_e_kl(c1, 1, 1) * gram_e_kl(c2, 0, 0) +
                         gram_e_kl(c1, 0, 0) * gram_e_kl(c2, 1, 1);
      check.expect(std::abs(lhs - rhs), 1e-9, "tensor first-derivative norm law");
    }
  });
}

}  // namespace

std::vector<SuiteResult> run_acceptance_criteria(std::uint64_t seed, const Tolerances& tol) {
  std::vector<SuiteResult> results;
  results.push_back(criterion_printed_generators(tol));
  results.push_back(criterion_spectra(tol));
  results.push_back(criterion_heisenberg_family(seed, tol));
  results.push_back(criterion_closed_form_oracle(seed, tol));
  results.push_back(criterion_q0_invariants(seed, tol));
  results.push_back(criterion_decomposition_roundtrip(seed, tol));
  results.push_back(criterion_correspondences(seed, tol));
  results.push_back(criterion_injectivity(tol));
  results.push_back(criterion_hyperplanes(tol));
  results.push_back(criterion_closure(seed, tol));
  return results;
}

std::vector<SuiteResult> run_invariant_suites(std::uint64_t seed, const Tolerances& tol) {
  std::vector<SuiteResult> results;
  results.push_back(suite_exp_group(seed, tol));
  results.push_back(suite_spectral_roundtrip(seed, tol));
  results.push_back(suite_charpoly(seed, tol));
  results.push_back(suite_coimage(seed, tol));
  results.push_back(suite_q0_norms(seed, tol));
  results.push_back(suite_gram_parity(seed, tol));
  results.push_back(suite_even_odd(seed, tol));
  results.push_back(suite_annihilation(seed, tol));
  results.push_back(suite_decompose_roundtrip(seed, tol));
  results.push_back(suite_fit_roundtrip(seed, tol));
  results.push_back(suite_q1_derivative(seed, tol));
  results.push_back(suite_bracket(seed, tol));
  results.push_back(suite_group_laws(seed, tol));
  results.push_back(suite_frame_bracket(seed, tol));
  results.push_back(suite_helical_algebra_roundtrip(seed, tol));
  results.push_back(suite_closed_form_vs_oracle(seed, tol));
  results.push_back(suite_geodesic_speed(seed, tol));
  results.push_back(suite_lift_and_length(seed, tol));
  results.push_back(suite_horizontal_projection(seed, tol));
  results.push_back(suite_gamma_identities(seed, tol));
  results.push_back(suite_gamma_spectra(seed, tol));
  results.push_back(suite_closure_operations(seed, tol));
  return results;
}

std::string format_report(const std::vector<SuiteResult>& results) {
  std::ostringstream os;
  for (const SuiteResult& r : results) {
    os << (r.pass ? "PASS" : "FAIL") << " " << r.name << " max_residual=" << r.max_residual
       << " time=" << r.seconds << "s";
    if (!r.detail.empty()) os << " (" << r.detail << ")";
    os << '\n';
  }
  std::size_t passed = 0;
  for (const SuiteResult& r : results) passed += r.pass ? 1 : 0;
  os << passed << "/" << results.size() << " suites passed\n";
  return os.str();
}

bool all_pass(const std::vector<SuiteResult>& results) {
  for (const SuiteResult& r : results) {
    if (!r.pass) return false;
  }
  return true;
}

}  // namespace carnoq

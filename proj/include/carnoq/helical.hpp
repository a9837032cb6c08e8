#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "carnoq/skewlin.hpp"

namespace carnoq {

/// Orthogonal splitting R^{2n+p} = R^{2n} (+) R^p with an invertible skew
/// generator on the horizontal part and a fixed vertical direction.
struct HelicalCR {
  Eigen::Index n = 0;  // horizontal dimension is 2n
  Eigen::Index p = 0;  // vertical dimension
  SkewMatrix A;        // 2n x 2n, invertible
  Vector w;            // in R^p

  static HelicalCR create(SkewMatrix a, Vector w, const Tolerances& tol = default_tolerances());

  Eigen::Index ambient_dim() const noexcept { return 2 * n + p; }
  bool completely_nontrivial() const noexcept { return n > 0 && p > 0; }
};

/// A helical structure together with a horizontal vector v and a basepoint
/// u0 = v0 (+) w0.
struct MarkedHelicalCR {
  HelicalCR base;
  Vector v;   // in R^{2n}
  Vector u0;  // in R^{2n+p}

  Vector v0() const { return u0.head(2 * base.n); }
  Vector w0() const { return u0.tail(base.p); }
};

/// Curve exp(A s) v (+) w, constant norm at every derivative order.
struct Q0Curve {
  HelicalCR structure;
  Vector v;  // in R^{2n}
};

/// Curve ((exp(A s) - I) A^{-1} v + v0) (+) (w s + w0); its derivative is
/// the Q0 curve (structure, v).
struct Q1Curve {
  HelicalCR structure;
  Vector v;
  Vector v0;
  Vector w0;

  Q0Curve derivative() const { return Q0Curve{structure, v}; }
};

Vector eval_q0(const Q0Curve& c, double s);
Vector eval_q1(const Q1Curve& c, double s);

// exp(A s) A^k v (+) (w if k == 0 else 0); norm independent of s.
Vector derivative_q0(const Q0Curve& c, int k, double s);

// <A^k v, A^l v> + (<w, w> if k == l == 0), the constant inner product of
// the k-th and l-th derivatives.
double gram_e_kl(const Q0Curve& c, int k, int l);

// Lowest-degree monic p with p(d/ds) gamma = 0: x^e * prod(x^2 + f_j^2)
// over frequencies carrying a nonzero component of v, with e = 1 iff w != 0.
Polynomial minimal_annihilating_poly(const Q0Curve& c, const Tolerances& tol = default_tolerances());

/// Canonical data of a curve exp(A s) u0: distinct positive frequencies with
/// one plane each, amplitudes, and the orthogonal change of basis whose
/// first 2n columns span the canonical horizontal space. `v` and `w` are
/// expressed in the canonical coordinates (columns of change_of_basis).
struct CanonicalDecomposition {
  Eigen::Index horizontal_dim = 0;  // 2n
  Eigen::Index vertical_dim = 0;    // p
  std::vector<double> frequencies;  // strictly decreasing
  std::vector<double> amplitudes;   // per-plane radius of u0
  Vector v;                         // canonical coordinates, size 2n
  Vector w;                         // canonical coordinates, size p
  Matrix change_of_basis;           // d x d orthogonal
  bool degenerate_horizontal = false;
};

/// A Q0 curve in canonical coordinates plus the basis embedding it back
/// into the ambient space it was derived from.
struct EmbeddedQ0 {
  CanonicalDecomposition decomposition;
  Q0Curve curve;

  Vector eval_ambient(double s) const;
  Vector derivative_ambient(int k, double s) const;
};

// Split exp(A s) u0 into kernel part w and rotating planes, collapsing
// repeated frequencies into the single plane actually visited by the curve.
EmbeddedQ0 decompose(const SkewMatrix& a, const Vector& u0,
                     const Tolerances& tol = default_tolerances());

struct FitResult {
  EmbeddedQ0 embedded;
  double rms = 0.0;
};

// Recover a Q0 curve from samples (s_i, point_i): frequency estimation via a
// linear predictor on uniformly spaced data, linear least squares for the
// plane coefficients, then Gauss-Newton refinement of the frequencies.
FitResult fit_from_samples(std::span<const double> s_values, const Matrix& points,
                           int max_freqs, const Tolerances& tol = default_tolerances());

enum class Injectivity { injective, non_injective, inconclusive };

struct InjectivityResult {
  Injectivity verdict = Injectivity::inconclusive;
  std::optional<double> period;  // witness for non-injective curves
  std::string detail;
};

// Rationality test on frequency ratios (continued-fraction convergents with
// a denominator bound); amplitudes weight the witness re-evaluation check.
InjectivityResult is_injective(std::span<const double> frequencies,
                               std::span<const double> amplitudes,
                               const Tolerances& tol = default_tolerances());
InjectivityResult is_injective(const CanonicalDecomposition& cd,
                               const Tolerances& tol = default_tolerances());
InjectivityResult is_injective(const Q1Curve& c, const Tolerances& tol = default_tolerances());

struct EquivalenceResult {
  bool equivalent = false;
  double lambda = 0.0;
};

// True iff A2 = lambda * A1 for a single nonzero scalar; markings and
// vertical data are not compared.
EquivalenceResult equivalent(const HelicalCR& h1, const HelicalCR& h2,
                             const Tolerances& tol = default_tolerances());

/// One canonical plane of a Q0 curve: the projection of the curve into
/// span(basis1, basis2) is the circle of this radius centered at the origin.
struct PlaneProjection {
  double frequency = 0.0;
  double radius = 0.0;
  Vector basis1;  // in R^{2n}
  Vector basis2;
};

std::vector<PlaneProjection> plane_projections(const Q0Curve& c,
                                               const Tolerances& tol = default_tolerances());

// Affine reparameterization s -> lambda s + b: A -> lambda A, v -> exp(A b) v.
Q0Curve reparameterize(const Q0Curve& c, double lambda, double b,
                       const Tolerances& tol = default_tolerances());

}  // namespace carnoq

#pragma once

#include <optional>

#include "carnoq/helical.hpp"

namespace carnoq {

/// Degree-m spherical curve with components sqrt(binom(m,j)) cos^{m-j} sin^j
/// and its bidiagonal skew generator.
struct GammaM {
  int degree = 0;
  SkewMatrix generator;
};

GammaM gamma_m(int m);

// Components sqrt(binom(m,j)) cos^{m-j}(s) sin^j(s); unit norm for every s.
Vector gamma_m_eval(int m, double s);

// Bidiagonal generator with subdiagonal entries sqrt((j+1)(m-j)); satisfies
// d/ds gamma_m = L_m gamma_m.
SkewMatrix build_L_m(int m);

// Eigenvalue imaginary parts {m - 2j : j = 0..m}, validated against the
// numerically computed spectral form (throws on disagreement).
std::vector<int> spectrum_L_m(int m, const Tolerances& tol = default_tolerances());

// Closed-form characteristic polynomial: -x prod_j (x^2 + (2j)^2) for even
// degree, prod_j (x^2 + (2j+1)^2) for odd.
Polynomial char_poly_L_m(int m);

// Orthogonal postcomposition T . gamma, returned through its canonical
// decomposition (T may mix horizontal and vertical directions).
EmbeddedQ0 postcompose_orthogonal(const Matrix& t, const Q0Curve& c,
                                  const Tolerances& tol = default_tolerances());

// (cos(theta) gamma1) (+) (sin(theta) gamma2), with block-diagonal generator.
Q0Curve juxtapose(double theta, const Q0Curve& c1, const Q0Curve& c2,
                  const Tolerances& tol = default_tolerances());

// gamma1(s) (x) gamma2(s), flattened row-major.
Vector tensor_eval(const Q0Curve& c1, const Q0Curve& c2, double s);

// The tensor product as a genuine curve: generator A1 (x) I + I (x) A2 on
// the flattened product space, decomposed canonically.
EmbeddedQ0 tensor_curve(const Q0Curve& c1, const Q0Curve& c2,
                        const Tolerances& tol = default_tolerances());

// Coefficient matrix B with H(cos s, sin s) = B gamma_m(s); columns of h are
// the monomial coefficient vectors of H on x^{m-j} y^j.
Matrix homogeneous_to_B(const Matrix& h);

struct Hyperplane {
  Vector normal;  // unit
  double offset = 0.0;
};

// Affine hyperplane containing the image of gamma_m (even m); none for odd m.
std::optional<Hyperplane> gamma_m_hyperplane_check(int m,
                                                   const Tolerances& tol = default_tolerances());

}  // namespace carnoq

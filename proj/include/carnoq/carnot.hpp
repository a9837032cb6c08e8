#pragma once

#include <vector>

#include "carnoq/helical.hpp"
#include "carnoq/skewlin.hpp"

namespace carnoq {

/// Step-two stratified Lie algebra on R^m (+) R^p, given by p linearly
/// independent skew structure matrices. The frame fields are
///   X_i = d/dx_i + 1/2 sum_{j,a} c^a_{ij} x_j d/dt_a,
/// whose commutators [X_i, X_j] = -c^a_{ij} T_a span the vertical layer.
struct StratifiedAlgebra2 {
  Eigen::Index m = 0;
  Eigen::Index p = 0;
  std::vector<SkewMatrix> C;

  static StratifiedAlgebra2 create(std::vector<SkewMatrix> structure,
                                   const Tolerances& tol = default_tolerances());

  // sum_a tau_a C^a
  Matrix weighted_structure(const Vector& tau) const;
};

StratifiedAlgebra2 new_algebra(const std::vector<Matrix>& structure,
                               const Tolerances& tol = default_tolerances());

// m = 2n, p = 1, C^1 = blockdiag(J, ..., J).
StratifiedAlgebra2 heisenberg(int n);

// p = m(m-1)/2 with one elementary skew generator per coordinate pair
// (i < j, lexicographic), oriented like J so that bracket(e_i, e_j) = e_(i,j).
StratifiedAlgebra2 free_nilpotent(int m);

/// Point of the group in exponential coordinates.
struct CarnotPoint {
  Vector x;  // R^m
  Vector t;  // R^p
};

// Vertical component of the commutator of the horizontal fields along u, v.
Vector bracket(const StratifiedAlgebra2& g, const Vector& u, const Vector& v);

// Value of the i-th frame field (0-based) at a point, as an (m+p)-vector.
Vector vector_field_at(const StratifiedAlgebra2& g, Eigen::Index i, const CarnotPoint& point);

// Exponential-coordinates product; left translations preserve the frame.
CarnotPoint group_multiply(const StratifiedAlgebra2& g, const CarnotPoint& lhs,
                           const CarnotPoint& rhs);

CarnotPoint group_identity(const StratifiedAlgebra2& g);
CarnotPoint group_inverse(const CarnotPoint& point);

/// Initial data of a bicharacteristic: position (x0, t0) and momenta
/// (xi0, tau0).
struct GeodesicIVP {
  Vector x0;
  Vector t0;
  Vector xi0;
  Vector tau0;
};

/// Contact-type algebra induced by a completely nontrivial helical
/// structure, with the ambient vertical axis recorded.
struct ContactEmbedding {
  StratifiedAlgebra2 algebra;
  Vector vertical_axis;  // unit vector in R^p (ambient)
  double vertical_norm = 0.0;
};

ContactEmbedding helical_to_algebra(const HelicalCR& h,
                                    const Tolerances& tol = default_tolerances());

/// Helical structure recovered from a contact algebra, together with the
/// orthonormal embedding of the reduced horizontal space into R^m.
struct HelicalFromAlgebra {
  HelicalCR helical;
  Matrix horizontal_embedding;  // m x 2n
};

HelicalFromAlgebra algebra_to_helical(const StratifiedAlgebra2& g, const Vector& w,
                                      const Tolerances& tol = default_tolerances());

/// Algebra of type (2n, p) assembled from p curves with a common horizontal
/// space; vertical_basis records the curves' vertical directions.
struct AssembledTuple {
  StratifiedAlgebra2 algebra;
  Matrix vertical_basis;  // p x p, column a is the a-th vertical direction
  std::vector<GeodesicIVP> geodesics;
};

AssembledTuple assemble_from_tuple(const std::vector<Q1Curve>& curves,
                                   const Tolerances& tol = default_tolerances());

std::vector<Q1Curve> algebra_to_tuple(const StratifiedAlgebra2& g,
                                      const std::vector<GeodesicIVP>& geodesics,
                                      const Tolerances& tol = default_tolerances());

}  // namespace carnoq

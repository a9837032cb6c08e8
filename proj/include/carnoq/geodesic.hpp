#pragma once

#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "carnoq/carnot.hpp"

namespace carnoq {

/// Bicharacteristic state; zeta = xi + 1/2 (sum_a tau_a C^a) x is the
/// momentum dual to the horizontal frame.
struct PhaseState {
  Vector x;
  Vector t;
  Vector xi;
  Vector tau;
  Vector zeta;

  static PhaseState make(const StratifiedAlgebra2& g, Vector x, Vector t, Vector xi, Vector tau);
};

// H = 1/2 |zeta|^2.
double hamiltonian(const StratifiedAlgebra2& g, const PhaseState& state);

/// Closed-form normal geodesic. The generator A = sum_a tau0_a C^a is
/// decomposed into rotation planes and kernel; positions, momenta and the
/// vertical components all evaluate in closed form, for invertible,
/// singular and zero A alike.
class NormalGeodesic {
 public:
  enum class Kind { straight, rotational, mixed };

  NormalGeodesic(StratifiedAlgebra2 g, GeodesicIVP ivp,
                 const Tolerances& tol = default_tolerances());

  const StratifiedAlgebra2& algebra() const noexcept { return g_; }
  const GeodesicIVP& ivp() const noexcept { return ivp_; }
  const Vector& zeta0() const noexcept { return zeta0_; }
  Kind kind() const noexcept;

  Vector position_x(double s) const;
  Vector position_t(double s) const;
  CarnotPoint position(double s) const;
  PhaseState state(double s) const;

  // (a, b) with x(s) = a + exp(s A) b; defined when A is invertible.
  std::optional<std::pair<Vector, Vector>> circle_params() const;

 private:
  StratifiedAlgebra2 g_;
  GeodesicIVP ivp_;
  Matrix a_tau_;
  SpectralForm sf_;
  Vector zeta0_;
  Vector zeta0_hat_;
  Vector x0_hat_;
  std::vector<Matrix> c_hat_;  // structure matrices in the spectral basis
};

NormalGeodesic geodesic_closed_form(const StratifiedAlgebra2& g, const GeodesicIVP& ivp,
                                    const Tolerances& tol = default_tolerances());

// Classical RK4 bicharacteristic integrator; the step size is refined until
// the Hamiltonian drift stays below drift_per_unit per unit of s.
std::vector<PhaseState> ode_oracle(const StratifiedAlgebra2& g, const GeodesicIVP& ivp,
                                   std::span<const double> s_grid,
                                   double drift_per_unit = 1e-10);

/// Curve in the horizontal space R^m; velocity falls back to high-order
/// central differences when not supplied.
struct HorizontalPath {
  std::function<Vector(double)> position;
  std::function<Vector(double)> velocity;  // optional
};

/// Curve in the group; x_velocity optional as above.
struct GroupPath {
  std::function<CarnotPoint(double)> position;
  std::function<Vector(double)> x_velocity;  // optional
};

// Unique horizontal lift through `base` at parameter `start`.
std::function<CarnotPoint(double)> horizontal_lift(const StratifiedAlgebra2& g,
                                                   const HorizontalPath& gamma,
                                                   const CarnotPoint& base, double start,
                                                   const Tolerances& tol = default_tolerances());

// Length of the horizontal velocity; the frame is orthonormal, so this is
// the Euclidean length of the x-component's derivative.
double cc_length(const StratifiedAlgebra2& g, const GroupPath& curve, double s_begin,
                 double s_end, const Tolerances& tol = default_tolerances());

// The classical helix family (a + b e^{-is}, c + |b|^2 s - Im(conj(a) b e^{-is}))
// with complex arithmetic realized on 2-vectors.
CarnotPoint heisenberg_geodesic(const Eigen::Vector2d& a, const Eigen::Vector2d& b, double c,
                                double s);

struct HeisenbergFamily {
  StratifiedAlgebra2 algebra;
  GeodesicIVP ivp;
};

// Contact data under which geodesic_closed_form reproduces
// heisenberg_geodesic(a, b, c, .) exactly. The printed family carries the
// doubled-area vertical normalization, so the structure matrix is -2J with
// tau0 = 1/2 (making the rotation generator -J, the e^{-is} orientation).
HeisenbergFamily heisenberg_geodesic_ivp(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                                         double c);

struct MarkedGeodesic {
  ContactEmbedding contact;
  GeodesicIVP ivp;
};

// Marked structure -> contact algebra plus initial data with tau0 = 1 and
// zeta0 = v; the geodesic's horizontal projection coincides with the
// horizontal projection of the marked structure's integral curve.
MarkedGeodesic marked_helical_to_geodesic(const MarkedHelicalCR& mh,
                                          const Tolerances& tol = default_tolerances());

// Converse: requires tau0 = 1 (see normalize_tau0); v = 1/2 A x0 + xi0 and
// u0 = x0 (+) t0 w.
MarkedHelicalCR geodesic_to_marked_helical(const StratifiedAlgebra2& g, const GeodesicIVP& ivp,
                                           const Vector& w,
                                           const Tolerances& tol = default_tolerances());

/// tau0 normalized to 0 or 1 on a contact algebra by absorbing tau0 into the
/// structure matrix; the vertical coordinate rescales by vertical_scale.
struct NormalizedContact {
  StratifiedAlgebra2 algebra;
  GeodesicIVP ivp;
  double vertical_scale = 1.0;
};

NormalizedContact normalize_tau0(const StratifiedAlgebra2& g, const GeodesicIVP& ivp,
                                 const Tolerances& tol = default_tolerances());

}  // namespace carnoq

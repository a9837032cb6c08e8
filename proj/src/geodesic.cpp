#include "carnoq/geodesic.hpp"

#include <cmath>
#include <sstream>

namespace carnoq {

namespace {

using Matrix2 = Eigen::Matrix2d;

// int_0^s R(w u) du, as a 2x2 matrix.
Matrix2 rot_integral(double w, double s) {
  Matrix2 out;
  if (w == 0.0) {
    out << s, 0.0, 0.0, s;
    return out;
  }
  const double c = (std::sin(w * s)) / w;
  const double d = (1.0 - std::cos(w * s)) / w;
  out << c, -d, d, c;
  return out;
}

// int_0^s u R(w u) du.
Matrix2 rot_integral_linear(double w, double s) {
  Matrix2 out;
  if (w == 0.0) {
    const double h = 0.5 * s * s;
    out << h, 0.0, 0.0, h;
    return out;
  }
  const double c = (std::cos(w * s) - 1.0) / (w * w) + s * std::sin(w * s) / w;
  const double d = std::sin(w * s) / (w * w) - s * std::cos(w * s) / w;
  out << c, -d, d, c;
  return out;
}

// Commuting / anticommuting split of a 2x2 matrix with respect to J:
// N = (aI + bJ) + (cK + dL) with K = diag(1,-1), L = offdiag(1,1).
struct RotationSplit {
  Matrix2 commuting;
  Matrix2 anticommuting;
};

RotationSplit split_j(const Matrix2& n) {
  const double a = 0.5 * (n(0, 0) + n(1, 1));
  const double b = 0.5 * (n(1, 0) - n(0, 1));
  const double c = 0.5 * (n(0, 0) - n(1, 1));
  const double d = 0.5 * (n(0, 1) + n(1, 0));
  RotationSplit out;
  out.commuting << a, -b, b, a;
  out.anticommuting << c, d, d, -c;
  return out;
}

const Matrix2 kJ2 = (Matrix2() << 0.0, -1.0, 1.0, 0.0).finished();

}  // namespace

PhaseState PhaseState::make(const StratifiedAlgebra2& g, Vector x, Vector t, Vector xi,
                            Vector tau) {
  if (x.size() != g.m || xi.size() != g.m || t.size() != g.p || tau.size() != g.p) {
    throw Error(Errc::invalid_argument, "phase state dimensions do not match the algebra");
  }
  PhaseState st{std::move(x), std::move(t), std::move(xi), std::move(tau), Vector()};
  st.zeta = st.xi + 0.5 * g.weighted_structure(st.tau) * st.x;
  return st;
}

double hamiltonian(const StratifiedAlgebra2& g, const PhaseState& state) {
  if (state.zeta.size() != g.m) {
    throw Error(Errc::invalid_argument, "phase state does not match the algebra");
  }
  return 0.5 * state.zeta.squaredNorm();
}

NormalGeodesic::NormalGeodesic(StratifiedAlgebra2 g, GeodesicIVP ivp, const Tolerances& tol)
    : g_(std::move(g)), ivp_(std::move(ivp)) {
  if (ivp_.x0.size() != g_.m || ivp_.xi0.size() != g_.m || ivp_.t0.size() != g_.p ||
      ivp_.tau0.size() != g_.p) {
    throw Error(Errc::invalid_argument, "initial data dimensions do not match the algebra");
  }
  a_tau_ = g_.weighted_structure(ivp_.tau0);
  sf_ = spectral_form(SkewMatrix(a_tau_, tol), tol);
  a_tau_ = sf_.basis * sf_.block_diagonal() * sf_.basis.transpose();  // denoised generator
  zeta0_ = ivp_.xi0 + 0.5 * a_tau_ * ivp_.x0;
  zeta0_hat_ = sf_.basis.transpose() * zeta0_;
  x0_hat_ = sf_.basis.transpose() * ivp_.x0;
  c_hat_.reserve(static_cast<std::size_t>(g_.p));
  for (Eigen::Index a = 0; a < g_.p; ++a) {
    c_hat_.push_back(sf_.basis.transpose() * g_.C[static_cast<std::size_t>(a)].matrix() *
                     sf_.basis);
  }
}

NormalGeodesic::Kind NormalGeodesic::kind() const noexcept {
  if (sf_.n_blocks() == 0) return Kind::straight;
  if (sf_.kernel_dim == 0) return Kind::rotational;
  return Kind::mixed;
}

Vector NormalGeodesic::position_x(double s) const {
  // x_hat(s) = x0_hat + F(s) zeta0_hat, F = int_0^s exp(u * blockdiag) du.
  Vector xh = x0_hat_;
  for (Eigen::Index j = 0; j < sf_.n_blocks(); ++j) {
    xh.segment<2>(2 * j) +=
        rot_integral(sf_.frequencies[static_cast<std::size_t>(j)], s) * zeta0_hat_.segment<2>(2 * j);
  }
  xh.tail(sf_.kernel_dim) += s * zeta0_hat_.tail(sf_.kernel_dim);
  return sf_.basis * xh;
}

Vector NormalGeodesic::position_t(double s) const {
  const Eigen::Index n = sf_.n_blocks();
  const Eigen::Index k = sf_.kernel_dim;
  Vector t = ivp_.t0;
  for (Eigen::Index a = 0; a < g_.p; ++a) {
    const Matrix& ch = c_hat_[static_cast<std::size_t>(a)];

    // Constant part of the integrand: zeta(u)^T C x0 integrates against
    // exp(-u A) applied on the left.
    const Vector chx = ch * x0_hat_;
    double acc = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      acc += zeta0_hat_.segment<2>(2 * j)
                 .dot(rot_integral(-sf_.frequencies[static_cast<std::size_t>(j)], s) *
                      chx.segment<2>(2 * j));
    }
    acc += s * zeta0_hat_.tail(k).dot(chx.tail(k));

    // Quadratic part: int_0^s exp(-uA) C F(u) du evaluated blockwise against
    // zeta0 on both sides. Plane-plane blocks split into components that
    // commute / anticommute with J, each integrating to a rotation integral
    // at the difference / sum frequency.
    for (Eigen::Index j = 0; j < n; ++j) {
      const double fj = sf_.frequencies[static_cast<std::size_t>(j)];
      const auto zj = zeta0_hat_.segment<2>(2 * j);
      for (Eigen::Index l = 0; l < n; ++l) {
        const double fl = sf_.frequencies[static_cast<std::size_t>(l)];
        const auto zl = zeta0_hat_.segment<2>(2 * l);
        const Matrix2 nmat = ch.block<2, 2>(2 * j, 2 * l) * (-kJ2 / fl);
        const RotationSplit sp = split_j(nmat);
        Matrix2 block = sp.commuting * rot_integral(fl - fj, s) +
                        sp.anticommuting * rot_integral(fl + fj, s) -
                        rot_integral(-fj, s) * nmat;
        acc += zj.dot(block * zl);
      }
      if (k > 0) {
        const auto zk = zeta0_hat_.tail(k);
        acc += zj.dot(rot_integral_linear(-fj, s) * ch.block(2 * j, 2 * n, 2, k) * zk);
      }
    }
    if (k > 0) {
      const auto zk = zeta0_hat_.tail(k);
      for (Eigen::Index l = 0; l < n; ++l) {
        const double fl = sf_.frequencies[static_cast<std::size_t>(l)];
        const auto zl = zeta0_hat_.segment<2>(2 * l);
        const Matrix2 fint = (-kJ2 / fl) * (rot_integral(fl, s) - s * Matrix2::Identity());
        acc += zk.dot(ch.block(2 * n, 2 * l, k, 2) * fint * zl);
      }
      acc += 0.5 * s * s * zk.dot(ch.block(2 * n, 2 * n, k, k) * zk);
    }

    t[a] += 0.5 * acc;
  }
  return t;
}

CarnotPoint NormalGeodesic::position(double s) const {
  return CarnotPoint{position_x(s), position_t(s)};
}

PhaseState NormalGeodesic::state(double s) const {
  Vector zh = zeta0_hat_;
  for (Eigen::Index j = 0; j < sf_.n_blocks(); ++j) {
    const double f = sf_.frequencies[static_cast<std::size_t>(j)];
    const double c = std::cos(f * s);
    const double sn = std::sin(f * s);
    const double z1 = zh[2 * j];
    const double z2 = zh[2 * j + 1];
    zh[2 * j] = c * z1 - sn * z2;
    zh[2 * j + 1] = sn * z1 + c * z2;
  }
  const Vector zeta = sf_.basis * zh;
  const Vector x = position_x(s);
  PhaseState st;
  st.x = x;
  st.t = position_t(s);
  st.xi = zeta - 0.5 * a_tau_ * x;
  st.tau = ivp_.tau0;
  st.zeta = zeta;
  return st;
}

std::optional<std::pair<Vector, Vector>> NormalGeodesic::circle_params() const {
  if (sf_.kernel_dim != 0 || sf_.n_blocks() == 0) return std::nullopt;
  Vector b_hat(zeta0_hat_.size());
  for (Eigen::Index j = 0; j < sf_.n_blocks(); ++j) {
    // (f J)^{-1} = -J / f applied per plane.
    b_hat.segment<2>(2 * j) =
        -kJ2 * zeta0_hat_.segment<2>(2 * j) / sf_.frequencies[static_cast<std::size_t>(j)];
  }
  const Vector b = sf_.basis * b_hat;
  return std::make_pair(ivp_.x0 - b, b);
}

NormalGeodesic geodesic_closed_form(const StratifiedAlgebra2& g, const GeodesicIVP& ivp,
                                    const Tolerances& tol) {
  return NormalGeodesic(g, ivp, tol);
}

std::vector<PhaseState> ode_oracle(const StratifiedAlgebra2& g, const GeodesicIVP& ivp,
                                   std::span<const double> s_grid, double drift_per_unit) {
  if (s_grid.empty()) return {};
  for (std::size_t i = 0; i + 1 < s_grid.size(); ++i) {
    if (!(s_grid[i] <= s_grid[i + 1])) {
      throw Error(Errc::invalid_argument, "evaluation grid must be sorted");
    }
  }
  const Matrix a_tau = g.weighted_structure(ivp.tau0);
  const Eigen::Index m = g.m;
  const Eigen::Index p = g.p;

  // Packed state (x, t, xi); tau is constant along bicharacteristics.
  auto rhs = [&](const Vector& y) {
    Vector dy(m + p + m);
    const auto x = y.head(m);
    const auto xi = y.tail(m);
    const Vector zeta = xi + 0.5 * a_tau * x;
    dy.head(m) = zeta;
    for (Eigen::Index a = 0; a < p; ++a) {
      dy[m + a] = 0.5 * zeta.dot(g.C[static_cast<std::size_t>(a)].matrix() * x);
    }
    dy.tail(m) = 0.5 * a_tau * zeta;
    return dy;
  };

  Vector y0(m + p + m);
  y0 << ivp.x0, ivp.t0, ivp.xi0;
  const Vector zeta0 = ivp.xi0 + 0.5 * a_tau * ivp.x0;
  const double h0 = 0.5 * zeta0.squaredNorm();
  const double span =
      std::max(std::abs(s_grid.front()), std::abs(s_grid.back() - s_grid.front())) + 1e-12;
  const double drift_budget = drift_per_unit * span;

  auto integrate_to = [&](Vector y, double s_from, double s_to, double h) {
    double s = s_from;
    while (s < s_to) {
      const double step = std::min(h, s_to - s);
      const Vector k1 = rhs(y);
      const Vector k2 = rhs(y + 0.5 * step * k1);
      const Vector k3 = rhs(y + 0.5 * step * k2);
      const Vector k4 = rhs(y + step * k3);
      y += (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      s += step;
    }
    return y;
  };

  double h = std::min(0.01, span / 64.0);
  for (int attempt = 0;; ++attempt) {
    std::vector<PhaseState> out;
    Vector y = y0;
    double s_prev = 0.0;
    double max_drift = 0.0;
    for (double s : s_grid) {
      if (s < 0.0) throw Error(Errc::invalid_argument, "oracle grid must start at s >= 0");
      y = integrate_to(y, s_prev, s, h);
      s_prev = s;
      PhaseState st =
          PhaseState::make(g, y.head(m), y.segment(m, p), y.tail(m), ivp.tau0);
      max_drift = std::max(max_drift, std::abs(hamiltonian(g, st) - h0));
      out.push_back(std::move(st));
    }
    if (max_drift <= drift_budget || h0 == 0.0) return out;
    h *= 0.5;
    if (attempt >= 14 || h < 1e-9) {
      throw Error(Errc::step_size_underflow, "step size underflow while bounding drift");
    }
  }
}

namespace {

Vector fd_velocity(const std::function<Vector(double)>& f, double s) {
  // Sixth-order central difference.
  const double h = 1e-3;
  return (45.0 * (f(s + h) - f(s - h)) - 9.0 * (f(s + 2 * h) - f(s - 2 * h)) +
          (f(s + 3 * h) - f(s - 3 * h))) /
         (60.0 * h);
}

// Adaptive Simpson over vector integrands.
Vector simpson_recurse(const std::function<Vector(double)>& f, double a, double b,
                       const Vector& fa, const Vector& fm, const Vector& fb, const Vector& whole,
                       double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const Vector flm = f(lm);
  const Vector frm = f(rm);
  const Vector left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const Vector right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const Vector diff = left + right - whole;
  if (depth <= 0 || diff.cwiseAbs().maxCoeff() <= 15.0 * tol) {
    return left + right + diff / 15.0;
  }
  return simpson_recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

Vector adaptive_simpson(const std::function<Vector(double)>& f, double a, double b, double tol) {
  if (a == b) return Vector::Zero(f(a).size());
  const Vector fa = f(a);
  const Vector fb = f(b);
  const Vector fm = f(0.5 * (a + b));
  const Vector whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_recurse(f, a, b, fa, fm, fb, whole, tol, 48);
}

}  // namespace

std::function<CarnotPoint(double)> horizontal_lift(const StratifiedAlgebra2& g,
                                                   const HorizontalPath& gamma,
                                                   const CarnotPoint& base, double start,
                                                   const Tolerances& /*tol*/) {
  if (base.x.size() != g.m || base.t.size() != g.p) {
    throw Error(Errc::invalid_argument, "basepoint dimensions do not match the algebra");
  }
  const Vector at_start = gamma.position(start);
  const double scale = std::max(1.0, at_start.norm());
  if ((at_start - base.x).norm() > 1e-9 * scale) {
    throw Error(Errc::basepoint_mismatch,
                "basepoint does not project onto the curve at the starting parameter");
  }
  auto velocity = gamma.velocity ? gamma.velocity
                                 : [pos = gamma.position](double s) { return fd_velocity(pos, s); };
  auto rate = [g, pos = gamma.position, velocity](double s) {
    const Vector x = pos(s);
    const Vector v = velocity(s);
    Vector out(g.p);
    for (Eigen::Index a = 0; a < g.p; ++a) {
      out[a] = 0.5 * v.dot(g.C[static_cast<std::size_t>(a)].matrix() * x);
    }
    return out;
  };
  return [g, pos = gamma.position, rate, base, start](double s) {
    CarnotPoint out;
    out.x = pos(s);
    const double sign = (s >= start) ? 1.0 : -1.0;
    const Vector gain = adaptive_simpson(rate, std::min(start, s), std::max(start, s), 1e-10);
    out.t = base.t + sign * gain;
    return out;
  };
}

double cc_length(const StratifiedAlgebra2& g, const GroupPath& curve, double s_begin, double s_end,
                 const Tolerances& /*tol*/) {
  if (!(s_begin < s_end)) throw Error(Errc::invalid_argument, "empty parameter interval");
  auto x_of = [&](double s) { return curve.position(s).x; };
  auto x_vel = curve.x_velocity ? curve.x_velocity
                                : std::function<Vector(double)>(
                                      [x_of](double s) { return fd_velocity(x_of, s); });
  // Horizontality: the vertical velocity must equal the frame-induced one.
  double scale = 1.0;
  for (int i = 0; i <= 32; ++i) {
    const double s = s_begin + (s_end - s_begin) * i / 32.0;
    const CarnotPoint pt = curve.position(s);
    scale = std::max({scale, pt.x.norm(), pt.t.norm()});
    const Vector xv = x_vel(s);
    auto t_of = [&curve](double u) {
      return Vector(curve.position(u).t);
    };
    const Vector tv = fd_velocity(t_of, s);
    for (Eigen::Index a = 0; a < g.p; ++a) {
      const double frame_rate = 0.5 * xv.dot(g.C[static_cast<std::size_t>(a)].matrix() * pt.x);
      if (std::abs(tv[a] - frame_rate) > 1e-8 * scale) {
        std::ostringstream os;
        os << "vertical velocity deviates from the frame-induced rate by "
           << std::abs(tv[a] - frame_rate) << " at s = " << s;
        throw Error(Errc::not_horizontal, os.str());
      }
    }
  }
  auto speed = [&](double s) {
    Vector one(1);
    one[0] = x_vel(s).norm();
    return one;
  };
  return adaptive_simpson(speed, s_begin, s_end, 1e-10)[0];
}

CarnotPoint heisenberg_geodesic(const Eigen::Vector2d& a, const Eigen::Vector2d& b, double c,
                                double s) {
  const double cs = std::cos(s);
  const double sn = std::sin(s);
  // e^{-is} acts as rotation by -s.
  Eigen::Vector2d x;
  x << a[0] + cs * b[0] + sn * b[1], a[1] - sn * b[0] + cs * b[1];
  const double u = a.dot(b);                     // Re(conj(a) b)
  const double v = a[0] * b[1] - a[1] * b[0];    // Im(conj(a) b)
  const double t = c + b.squaredNorm() * s - (v * cs - u * sn);
  CarnotPoint out;
  out.x = x;
  out.t = Vector::Constant(1, t);
  return out;
}

HeisenbergFamily heisenberg_geodesic_ivp(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                                         double c) {
  HeisenbergFamily fam{StratifiedAlgebra2::create({SkewMatrix(-2.0 * standard_j())}),
                       GeodesicIVP{}};
  const Matrix j = standard_j();
  fam.ivp.x0 = a + b;
  fam.ivp.t0 = Vector::Constant(1, c - (a[0] * b[1] - a[1] * b[0]));
  // zeta0 = -J b; the generator is A = tau0 C = -J.
  fam.ivp.xi0 = -j * b + 0.5 * j * (a + b);
  fam.ivp.tau0 = Vector::Constant(1, 0.5);
  return fam;
}

MarkedGeodesic marked_helical_to_geodesic(const MarkedHelicalCR& mh, const Tolerances& tol) {
  ContactEmbedding contact = helical_to_algebra(mh.base, tol);
  GeodesicIVP ivp;
  ivp.x0 = mh.v0();
  ivp.t0 = Vector::Constant(1, mh.w0().dot(mh.base.w) / mh.base.w.squaredNorm());
  ivp.tau0 = Vector::Constant(1, 1.0);
  ivp.xi0 = mh.v - 0.5 * mh.base.A.matrix() * mh.v0();
  return MarkedGeodesic{std::move(contact), std::move(ivp)};
}

MarkedHelicalCR geodesic_to_marked_helical(const StratifiedAlgebra2& g, const GeodesicIVP& ivp,
                                           const Vector& w, const Tolerances& tol) {
  if (g.p != 1) throw Error(Errc::not_contact, "algebra must have a one-dimensional vertical layer");
  if (std::abs(ivp.tau0[0] - 1.0) > 1e-12) {
    throw Error(Errc::invalid_argument, "tau0 must be normalized to 1 (see normalize_tau0)");
  }
  HelicalFromAlgebra hfa = algebra_to_helical(g, w, tol);
  const Matrix& embed = hfa.horizontal_embedding;
  const Vector x0 = embed.transpose() * ivp.x0;
  const Vector xi0 = embed.transpose() * ivp.xi0;
  MarkedHelicalCR mh;
  mh.v = 0.5 * hfa.helical.A.matrix() * x0 + xi0;
  mh.u0 = Vector(2 * hfa.helical.n + hfa.helical.p);
  mh.u0 << x0, ivp.t0[0] * w;
  mh.base = std::move(hfa.helical);
  return mh;
}

NormalizedContact normalize_tau0(const StratifiedAlgebra2& g, const GeodesicIVP& ivp,
                                 const Tolerances& tol) {
  if (g.p != 1) throw Error(Errc::not_contact, "algebra must have a one-dimensional vertical layer");
  const double tau = ivp.tau0[0];
  NormalizedContact out{g, ivp, 1.0};
  if (std::abs(tau) <= tol.freq_floor) {
    out.ivp.tau0 = Vector::Zero(1);
    return out;
  }
  // Absorb tau into the structure matrix (an equivalent algebra, generator
  // scaled by tau); the vertical coordinate rescales accordingly.
  out.algebra = StratifiedAlgebra2::create({SkewMatrix(tau * g.C.front().matrix(), tol)}, tol);
  out.ivp.tau0 = Vector::Constant(1, 1.0);
  out.ivp.t0 = tau * ivp.t0;
  out.vertical_scale = tau;
  return out;
}

}  // namespace carnoq

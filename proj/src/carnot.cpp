#include "carnoq/carnot.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <sstream>

namespace carnoq {

StratifiedAlgebra2 StratifiedAlgebra2::create(std::vector<SkewMatrix> structure,
                                              const Tolerances& tol) {
  if (structure.empty()) {
    throw Error(Errc::invalid_argument, "need at least one structure matrix");
  }
  const Eigen::Index m = structure.front().dim();
  if (m < 2) throw Error(Errc::invalid_argument, "horizontal dimension must be at least 2");
  for (const SkewMatrix& c : structure) {
    if (c.dim() != m) {
      throw Error(Errc::invalid_argument, "structure matrices must share one size");
    }
  }
  const Eigen::Index p = static_cast<Eigen::Index>(structure.size());
  if (p > m * (m - 1) / 2) {
    std::ostringstream os;
    os << "p = " << p << " exceeds m(m-1)/2 = " << m * (m - 1) / 2;
    throw Error(Errc::too_many_verticals, os.str());
  }
  // Linear independence of the C^a doubles as the bracket-generating
  // condition: the induced map onto the vertical layer is onto.
  Matrix stacked(p, m * m);
  for (Eigen::Index a = 0; a < p; ++a) {
    stacked.row(a) = Eigen::Map<const Vector>(structure[static_cast<std::size_t>(a)].matrix().data(),
                                              m * m);
  }
  Eigen::JacobiSVD<Matrix> svd(stacked);
  if (svd.singularValues().minCoeff() <= tol.dep_tol) {
    throw Error(Errc::dependent_structure_matrices,
                "structure matrices are linearly dependent; vertical layer is not spanned");
  }
  StratifiedAlgebra2 g;
  g.m = m;
  g.p = p;
  g.C = std::move(structure);
  return g;
}

Matrix StratifiedAlgebra2::weighted_structure(const Vector& tau) const {
  Matrix acc = Matrix::Zero(m, m);
  for (Eigen::Index a = 0; a < p; ++a) {
    acc += tau[a] * C[static_cast<std::size_t>(a)].matrix();
  }
  return acc;
}

StratifiedAlgebra2 new_algebra(const std::vector<Matrix>& structure, const Tolerances& tol) {
  std::vector<SkewMatrix> validated;
  validated.reserve(structure.size());
  for (const Matrix& c : structure) validated.emplace_back(c, tol);
  return StratifiedAlgebra2::create(std::move(validated), tol);
}

StratifiedAlgebra2 heisenberg(int n) {
  if (n < 1) throw Error(Errc::invalid_argument, "need n >= 1");
  Matrix c = Matrix::Zero(2 * n, 2 * n);
  for (int j = 0; j < n; ++j) c.block<2, 2>(2 * j, 2 * j) = standard_j();
  return StratifiedAlgebra2::create({SkewMatrix(std::move(c))});
}

StratifiedAlgebra2 free_nilpotent(int m) {
  if (m < 2) throw Error(Errc::invalid_argument, "need m >= 2");
  std::vector<SkewMatrix> cs;
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      Matrix c = Matrix::Zero(m, m);
      c(j, i) = 1.0;
      c(i, j) = -1.0;
      cs.emplace_back(std::move(c));
    }
  }
  return StratifiedAlgebra2::create(std::move(cs));
}

Vector bracket(const StratifiedAlgebra2& g, const Vector& u, const Vector& v) {
  if (u.size() != g.m || v.size() != g.m) {
    throw Error(Errc::invalid_argument, "bracket arguments must be horizontal vectors");
  }
  Vector out(g.p);
  for (Eigen::Index a = 0; a < g.p; ++a) {
    out[a] = v.dot(g.C[static_cast<std::size_t>(a)].matrix() * u);
  }
  return out;
}

Vector vector_field_at(const StratifiedAlgebra2& g, Eigen::Index i, const CarnotPoint& point) {
  if (i < 0 || i >= g.m) throw Error(Errc::invalid_argument, "field index out of range");
  if (point.x.size() != g.m || point.t.size() != g.p) {
    throw Error(Errc::invalid_argument, "point dimensions do not match the algebra");
  }
  Vector out = Vector::Zero(g.m + g.p);
  out[i] = 1.0;
  for (Eigen::Index a = 0; a < g.p; ++a) {
    out[g.m + a] = 0.5 * (g.C[static_cast<std::size_t>(a)].matrix() * point.x)[i];
  }
  return out;
}

CarnotPoint group_multiply(const StratifiedAlgebra2& g, const CarnotPoint& lhs,
                           const CarnotPoint& rhs) {
  if (lhs.x.size() != g.m || rhs.x.size() != g.m || lhs.t.size() != g.p || rhs.t.size() != g.p) {
    throw Error(Errc::invalid_argument, "point dimensions do not match the algebra");
  }
  CarnotPoint out;
  out.x = lhs.x + rhs.x;
  out.t = lhs.t + rhs.t;
  for (Eigen::Index a = 0; a < g.p; ++a) {
    out.t[a] += 0.5 * rhs.x.dot(g.C[static_cast<std::size_t>(a)].matrix() * lhs.x);
  }
  return out;
}

CarnotPoint group_identity(const StratifiedAlgebra2& g) {
  return CarnotPoint{Vector::Zero(g.m), Vector::Zero(g.p)};
}

CarnotPoint group_inverse(const CarnotPoint& point) { return CarnotPoint{-point.x, -point.t}; }

ContactEmbedding helical_to_algebra(const HelicalCR& h, const Tolerances& tol) {
  if (!h.completely_nontrivial()) {
    throw Error(Errc::not_completely_nontrivial,
                "helical structure must have n > 0 and p > 0");
  }
  const double wn = h.w.norm();
  if (wn <= tol.freq_floor) {
    throw Error(Errc::not_completely_nontrivial, "vertical direction must be nonzero");
  }
  ContactEmbedding out{StratifiedAlgebra2::create({h.A}, tol), h.w / wn, wn};
  return out;
}

HelicalFromAlgebra algebra_to_helical(const StratifiedAlgebra2& g, const Vector& w,
                                      const Tolerances& tol) {
  if (g.p != 1) throw Error(Errc::not_contact, "algebra must have a one-dimensional vertical layer");
  if (w.size() == 0 || w.norm() <= tol.freq_floor) {
    throw Error(Errc::invalid_argument, "vertical direction must be nonzero");
  }
  const SkewMatrix& b = g.C.front();
  const SpectralForm sf = spectral_form(b, tol);
  if (sf.n_blocks() == 0) {
    throw Error(Errc::zero_structure_matrix, "structure matrix has empty coimage");
  }
  if (sf.kernel_dim == 0) {
    // Already invertible: keep the matrix and the basis as they are.
    return HelicalFromAlgebra{HelicalCR::create(b, w, tol), Matrix::Identity(g.m, g.m)};
  }
  CoimageRestriction res = restrict_to_coimage(b, tol);
  return HelicalFromAlgebra{HelicalCR::create(std::move(res.restricted), w, tol),
                            std::move(res.embedding)};
}

AssembledTuple assemble_from_tuple(const std::vector<Q1Curve>& curves, const Tolerances& tol) {
  if (curves.empty()) throw Error(Errc::invalid_argument, "need at least one curve");
  const Eigen::Index p = static_cast<Eigen::Index>(curves.size());
  const Eigen::Index n = curves.front().structure.n;
  for (const Q1Curve& c : curves) {
    if (c.structure.p != p) {
      throw Error(Errc::invalid_argument,
                  "each vertical direction must live in R^p with p the number of curves");
    }
    if (c.structure.n != n) {
      throw Error(Errc::mismatched_horizontal_spaces,
                  "curves must share one horizontal space expressed in one basis");
    }
    const double scale = std::max(1.0, std::sqrt(c.v.squaredNorm() + c.structure.w.squaredNorm()));
    if (c.v.norm() <= tol.amp_tol * scale) {
      throw Error(Errc::affine_curve, "curve has constant derivative; no horizontal generator");
    }
  }
  Matrix w_basis(p, p);
  for (Eigen::Index a = 0; a < p; ++a) {
    w_basis.col(a) = curves[static_cast<std::size_t>(a)].structure.w;
  }
  {
    Eigen::JacobiSVD<Matrix> svd(w_basis);
    if (svd.singularValues().minCoeff() <= tol.dep_tol) {
      throw Error(Errc::dependent_verticals, "vertical directions are linearly dependent");
    }
  }
  std::vector<SkewMatrix> structure;
  std::vector<GeodesicIVP> ivps;
  const auto w_lu = w_basis.partialPivLu();
  for (Eigen::Index a = 0; a < p; ++a) {
    const Q1Curve& c = curves[static_cast<std::size_t>(a)];
    structure.push_back(c.structure.A);
    GeodesicIVP ivp;
    ivp.x0 = c.v0;
    ivp.t0 = w_lu.solve(c.w0);
    ivp.xi0 = c.v - 0.5 * c.structure.A.matrix() * c.v0;
    ivp.tau0 = Vector::Unit(p, a);
    ivps.push_back(std::move(ivp));
  }
  return AssembledTuple{StratifiedAlgebra2::create(std::move(structure), tol), std::move(w_basis),
                        std::move(ivps)};
}

std::vector<Q1Curve> algebra_to_tuple(const StratifiedAlgebra2& g,
                                      const std::vector<GeodesicIVP>& geodesics,
                                      const Tolerances& tol) {
  if (static_cast<Eigen::Index>(geodesics.size()) != g.p) {
    throw Error(Errc::invalid_argument, "need exactly one initial datum per vertical direction");
  }
  std::vector<Q1Curve> curves;
  for (Eigen::Index a = 0; a < g.p; ++a) {
    const SkewMatrix& c = g.C[static_cast<std::size_t>(a)];
    const SpectralForm sf = spectral_form(c, tol);
    if (sf.n_blocks() == 0) {
      std::ostringstream os;
      os << "structure matrix " << a << " is zero";
      throw Error(Errc::zero_structure_matrix, os.str());
    }
    SkewMatrix a_alpha = c;
    Matrix embed = Matrix::Identity(g.m, g.m);
    if (sf.kernel_dim != 0) {
      CoimageRestriction res = restrict_to_coimage(c, tol);
      a_alpha = std::move(res.restricted);
      embed = std::move(res.embedding);
    }
    const GeodesicIVP& ivp = geodesics[static_cast<std::size_t>(a)];
    if (ivp.x0.size() != g.m || ivp.xi0.size() != g.m || ivp.t0.size() != g.p) {
      throw Error(Errc::invalid_argument, "initial data dimensions do not match the algebra");
    }
    const Vector x0 = embed.transpose() * ivp.x0;
    const Vector xi0 = embed.transpose() * ivp.xi0;
    Q1Curve curve{HelicalCR::create(a_alpha, Vector::Unit(g.p, a), tol),
                  0.5 * a_alpha.matrix() * x0 + xi0, x0, ivp.t0};
    curves.push_back(std::move(curve));
  }
  return curves;
}

}  // namespace carnoq

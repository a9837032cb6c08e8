#pragma once

#include <cstdint>

namespace carnoq {

// Central tolerance record. All operations read from one of these; the
// defaults below are the library-wide contract and the CLI exposes each
// field as a --tol-<name> override.
struct Tolerances {
  // max |A + A^T| relative to max |A| accepted as skew-symmetric
  double skew_tol = 1e-12;
  // deviation of Q^T Q from the identity accepted as orthogonal
  double ortho_tol = 1e-9;
  // residual accepted when comparing block-diagonal reconstructions
  double block_tol = 1e-9;
  // coefficient trim threshold for polynomials (relative)
  double poly_tol = 1e-9;
  // frequencies at or below this count as zero (kernel directions)
  double freq_floor = 1e-10;
  // minimal gap between frequencies treated as distinct
  double freq_sep = 1e-8;
  // relative amplitude below which a plane component counts as inactive
  double amp_tol = 1e-10;
  // RMS residual accepted by the sample fitter
  double fit_tol = 1e-6;
  // smallest singular value of stacked structure matrices accepted as
  // linearly independent
  double dep_tol = 1e-10;
  // gap within which a frequency ratio counts as rational; kept below the
  // best error any quadratic irrational can reach at denominators within
  // rat_denom_bound, and well above the accuracy of spectral frequencies
  double rat_tol = 1e-13;
  // largest denominator searched during rationality detection
  std::int64_t rat_denom_bound = 1000000;
};

const Tolerances& default_tolerances() noexcept;

}  // namespace carnoq

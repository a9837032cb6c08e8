#pragma once

#include <cstdint>
#include <random>

#include "carnoq/carnot.hpp"
#include "carnoq/helical.hpp"

namespace carnoq {

using Rng = std::mt19937_64;

Matrix random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols);

Matrix random_orthogonal(Rng& rng, Eigen::Index d);

SkewMatrix random_skew(Rng& rng, Eigen::Index d);

// Invertible skew with frequencies drawn from [min_freq, max_freq] at pairwise
// separation min_gap (0 allows repetitions), conjugated by a random basis.
SkewMatrix random_invertible_skew(Rng& rng, Eigen::Index n, double min_freq = 0.3,
                                  double max_freq = 1.2, double min_gap = 0.0);

// Constant-norm curve with n in [1, max_n], p in [0, max_p]; amplitudes are
// kept order one so closed-form identities stay near machine precision.
Q0Curve random_q0(Rng& rng, int max_n = 4, int max_p = 2, bool unit_norm = false);

Q1Curve random_q1(Rng& rng, int max_n = 4, int max_p = 2);

// Contact algebra with an invertible structure matrix on R^{2n}.
StratifiedAlgebra2 random_contact(Rng& rng, int max_n);

GeodesicIVP random_ivp(Rng& rng, const StratifiedAlgebra2& g);

}  // namespace carnoq

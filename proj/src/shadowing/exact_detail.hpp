#pragma once

#include <gmpxx.h>

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "dchain/shadowing.hpp"

namespace dchain::detail {

using Vec2z = std::array<mpz_class, 2>;

// z mod 2^(64*limbs) as little-endian limbs.
std::vector<mp_limb_t> to_limbs(const mpz_class& z, int limbs);

// Nearest integer to P_u(z) * 2^shift, P_u the spectral projection onto the
// expanding eigenline of A.
Vec2z unstable_projection(const Vec2z& z, const Eigen::Matrix2i& A, long shift);

// Integer vector nearest to v * 2^64.
Vec2z quantize_vector(const Eigen::Vector2d& v);

// Fraction bits beyond the 64-bit lattice needed to follow `steps` iterations.
long guard_bits(const HyperbolicSplitting& H, long steps);

ExactToralPoint make_exact(const std::array<std::uint64_t, 2>& lattice, const Vec2z& offset, long shift,
                           int limbs);

// Signed difference a - b of the coordinates, as doubles, at full precision.
Eigen::Vector2d exact_difference(const ExactToralPoint& a, const ExactToralPoint& b);

double exact_distance(const ExactToralPoint& a, const ExactToralPoint& b);

}  // namespace dchain::detail

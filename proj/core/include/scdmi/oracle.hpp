#pragma once

// Reference evaluation of core integrals by direct summation over every tuple
// of masked pixels. Shares centering (ChannelSet) with the moment engine but
// never touches the symbolic expansion, so a disagreement isolates the
// algebra. Only meant for tiny images.

#include <cstdint>

#include "scdmi/algebra.hpp"
#include "scdmi/image.hpp"

namespace scdmi {

inline constexpr double kOracleTupleBudget = 1e8;

// Sum over all point tuples of prod S(i,j)^e * prod det(p,q,r)^e. Uses the
// k=0 or k=1 channel set selected by spec.k. Throws TooLarge when
// masked_count^points exceeds the budget.
double brute_force_core_integral(const RasterImage& img, const CoreSpec& spec);

// numerator / (m00^e * D2^(M/2)) with both integrals from direct summation.
// Throws Degenerate below the degeneracy threshold.
double brute_force_invariant(const RasterImage& img, const InvariantSpec& spec);

}  // namespace scdmi

#pragma once

// Subcritical background m > 1 with a local paradise Ṽ: the eigenproblem of
// L = L₀ + Ṽ - h, h = m - 1, solved through r(Q_λ) = 1 on λ > h.

#include "nlgs/eigensolver.hpp"
#include "nlgs/potential.hpp"

namespace nlgs {

/// The bracket starts at h + lambda_min. On success, lambda0 is the internal
/// root (> h) and lambda_hat() = lambda0 - h is the eigenvalue of L.
inline GroundStateOutcome find_ground_state_subcritical(const DispersalKernel& kernel, const SubcriticalPotential& sub,
                                                        const SolverConfig& cfg = {}) {
  return detail::solve_shifted(kernel, sub.field(), sub.h(), cfg);
}

}  // namespace nlgs

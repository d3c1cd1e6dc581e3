#pragma once

#include <functional>
#include <vector>

#include "ppdcpp/linalg.hpp"
#include "ppdcpp/rng.hpp"

namespace ppdcpp {

struct MhOptions {
  int iters = 6500;
  int burn_in = 1500;
  double proposal_scale = 0.0;  // 0 -> 2.38/sqrt(p) default
  double target_accept = 0.3;
};

struct MhResult {
  Matrix draws;            // retained draws x coefficients
  double acceptance_rate;  // post burn-in
  double final_scale;
};

// Random-walk Metropolis with a Gaussian proposal preconditioned by the
// given curvature factor. The scale is adapted toward the target acceptance
// by Robbins-Monro during burn-in only, then frozen; a post burn-in
// acceptance rate outside (0.05, 0.8) raises NumericError.
MhResult random_walk_mh(const std::function<double(const std::vector<double>&)>& log_target,
                        const std::vector<double>& init, const Cholesky& precondition,
                        const MhOptions& options, RngStream rng);

// Poisson log-link GLM with per-row weights and a flat prior on the
// coefficients; initialized at the weighted MLE with the curvature there as
// the proposal preconditioner.
MhResult poisson_glm_mh(const Matrix& x, const std::vector<double>& y,
                        const std::vector<double>& weights, const MhOptions& options,
                        RngStream rng);

}  // namespace ppdcpp

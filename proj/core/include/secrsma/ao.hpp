#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "secrsma/subproblems.hpp"

namespace secrsma {

enum class InitStrategy { mrt_equal_power, random_phase, identity_phase };

struct AOConfig {
  double p_max_w = dbm_to_watt(20.0);
  double rho = 5e-4;
  double eps_converge = 1e-4;
  double eps_solver = 1e-4;
  int max_outer_iters = 50;
  int max_ipm_iters = 300;
  InitStrategy init = InitStrategy::mrt_equal_power;
  std::uint64_t seed = 0;
  int verbosity = 0;
};

struct IterationRecord {
  int iter = 0;
  double objective = 0.0;   // t + dt after the reflection step
  double t_after_w = 0.0;   // t right after the precoder step
  double delta_t = 0.0;
  double penalty_residual = 0.0;  // trace(V) - top eigenvalue
  std::string w_status;
  std::string v_status;
  double wall_ms = 0.0;
};

struct AOTrace {
  std::vector<IterationRecord> iterations;
  bool converged = false;
  std::string stop_reason;
  double rho_final = 0.0;

  std::string to_jsonl() const;
};

struct AOResult {
  TransmitDesign design;
  LiftedPoint lifted;
  RateReport report;
  AOTrace trace;
  double lifted_objective = 0.0;
  double w_rank_residual_max = 0.0;
  double v_rank_residual = 0.0;
  bool solver_failed = false;
};

/// Matched filter precoders on the effective channels at the initial phases,
/// equal power split over the active streams, a small isotropic noise share,
/// and rate shares read off the achieved secrecy caps. Streams whose secrecy
/// cap is negative at this point start switched off so the first convex
/// restriction is feasible at its own base.
std::pair<LiftedPoint, TransmitDesign> initialize(const ChannelRealization& ch,
                                                  const AOConfig& cfg,
                                                  const SchemeRestriction& res = {});

/// Relative improvement below eps?
bool convergence_check(double prev, double cur, double eps);

/// Alternating rounds of the precoder and reflection restrictions, keeping
/// the best objective seen; on solver trouble the best iterate so far is
/// extracted. The reported design is the rank-one extraction with the common
/// split re-balanced on the achieved rates.
AOResult ao_solve(const ChannelRealization& ch, const AOConfig& cfg,
                  const SchemeRestriction& res = {});

}  // namespace secrsma

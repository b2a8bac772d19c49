#pragma once

#include <map>
#include <string>
#include <vector>

#include "secrsma/conic/program.hpp"
#include "secrsma/rates.hpp"

namespace secrsma {

enum class TaylorWrt { precoders, reflection };

/// First order upper bound of a log term around a lifted point. Gradients and
/// base copies are keyed by lifted slot name ("W_c", "W_1", .., "Z", "V").
struct TaylorExpansion {
  double base_value = 0.0;
  std::map<std::string, CMat> gradients;
  std::map<std::string, CMat> base_matrices;

  double upper_bound(const std::map<std::string, CMat>& at) const;
};

std::string lifted_slot_name(int lifted_index);  // 0 -> "W_c", i -> "W_i"

/// d log2(arg)/dX = H^H V H / (ln2 arg) per participating precoder slot, or
/// H (sum W + Z) H^H / (ln2 arg) for the reflection Gram matrix.
TaylorExpansion taylor_of_log_term(LogTermKind kind, const LiftedPoint& p,
                                   const ChannelRealization& ch, TaylorWrt wrt,
                                   int user = -1);

/// Stream activity pattern: which transmit covariances and rate shares exist.
/// Defaults describe the full rate splitting scheme.
struct SchemeRestriction {
  bool use_common = true;
  bool use_an = true;
  std::vector<bool> private_on;       // per user private stream, empty = all
  std::vector<bool> common_split_on;  // per user share of the common rate, empty = all

  bool private_active(int k) const {
    return private_on.empty() || private_on[static_cast<size_t>(k)];
  }
  bool split_active(int k) const {
    if (!use_common) return false;
    return common_split_on.empty() || common_split_on[static_cast<size_t>(k)];
  }
};

/// Convex restriction in the precoder covariances at fixed reflection Gram
/// matrix V: exact concave log terms through exponential cone epigraphs,
/// Taylor upper bounds for the subtracted terms around `prev`.
conic::Program build_w_subproblem(const ChannelRealization& ch, const CMat& V,
                                  const LiftedPoint& prev, double p_max_w,
                                  const SchemeRestriction& res = {});

struct PenaltyState {
  double rho = 5e-4;
  CVec lambda;  // unit top eigenvector of the previous V
};

/// Convex restriction in V at fixed precoders and rate shares, with slack
/// variables dt, drc_k, drp_k that take up the rate improvements and a
/// penalty steering V toward rank one.
conic::Program build_v_subproblem(const ChannelRealization& ch, const LiftedPoint& fixed,
                                  const CMat& V_prev, const PenaltyState& pen,
                                  const SchemeRestriction& res = {});

struct RankOne {
  CVec vec;
  double residual_ratio;  // (trace - top eigenvalue) / trace
};

/// Dominant eigenpair factor sqrt(lambda_1) u_1 of a PSD matrix.
RankOne extract_rank_one(const CMat& X, double degeneracy_warn_tol = 1e-6);

/// Entrywise phase projection with the last entry rotated to exactly 1.
CVec project_unit_modulus(const CVec& v_raw);

}  // namespace secrsma

#pragma once

#include <string>
#include <vector>

#include "secrsma/channels.hpp"
#include "secrsma/types.hpp"

namespace secrsma {

/// Vector form design: one common precoder, K private precoders, an
/// artificial noise covariance, the reflection phases v (last entry 1), and
/// the common secrecy rate split across users.
struct TransmitDesign {
  CVec w_c;
  std::vector<CVec> w;
  CMat Z;
  CVec v;
  RVec r_c_sec;

  int m() const { return static_cast<int>(w_c.size()); }
  int k() const { return static_cast<int>(w.size()); }

  double power_common() const { return w_c.squaredNorm(); }
  double power_private() const;
  double power_an() const { return Z.real().trace(); }
  double power_total() const { return power_common() + power_private() + power_an(); }
};

/// Matrix lifted counterpart used by the convex subproblems. W[0] carries the
/// common stream, W[1..K] the private streams.
struct LiftedPoint {
  std::vector<CMat> W;
  CMat Z;
  CMat V;
  RVec r_c;
  RVec r_p;
  double t = 0.0;

  int k() const { return static_cast<int>(W.size()) - 1; }
};

struct RateReport {
  RVec common_rate;        // per user decode rate of the common stream
  double common_rate_eve;  // eavesdropper rate on the common stream
  double common_cap;       // min_k common_rate - common_rate_eve
  RVec private_rate;       // per user private rate
  RVec private_rate_eve;   // eavesdropper rate on each private stream
  RVec secrecy;            // per user secrecy rate
  double min_secrecy = 0.0;
};

struct ConstraintResidual {
  std::string name;
  double violation;  // positive means violated
};

struct FeasibilityReport {
  std::vector<ConstraintResidual> residuals;
  double common_budget_slack;  // common secrecy budget minus allocated sum

  double max_violation() const;
  bool ok(double tol = 1e-6) const { return max_violation() <= tol; }
};

double sinr_common(const TransmitDesign& d, const ChannelRealization& ch, int receiver);
double sinr_private(const TransmitDesign& d, const ChannelRealization& ch, int user);
double sinr_eve_private(const TransmitDesign& d, const ChannelRealization& ch, int user);

/// All per stream rates plus the resulting per user secrecy rates. The
/// common stream contributes through the allocated split r_c_sec, the private
/// stream through [private_rate - private_rate_eve]^+.
RateReport rate_report(const TransmitDesign& d, const ChannelRealization& ch);

/// Checks power, unit modulus phases, PSD of the noise covariance, and the
/// common secrecy split budget.
FeasibilityReport validate_design(const TransmitDesign& d, const ChannelRealization& ch,
                                  double p_max_w);

/// The seven log2 terms of the lifted secrecy model. Receiver and stream
/// index sets are fixed per kind, see log_term_spec.
enum class LogTermKind { f_pk, g_pk, f_e, g_pe_k, f_ck, g_ck, g_ce };

const char* log_term_name(LogTermKind kind);

struct LogTermSpec {
  int receiver;             // 0..K-1 user, K eavesdropper
  std::vector<int> lifted;  // indices into LiftedPoint::W (0 = common)
};

/// Which receiver and which precoder covariances enter a given term.
LogTermSpec log_term_spec(LogTermKind kind, int user, int k_users);

/// log2(sigma_j^2 + sum_{i in S} tr(H_j^H V H_j W_i) + tr(H_j^H V H_j Z))
/// evaluated at the lifted point. `user` selects k for the per user kinds and
/// is ignored for f_e and g_ce.
double eval_log_term(LogTermKind kind, const LiftedPoint& p, const ChannelRealization& ch,
                     int user = -1);

/// Rank one lift of a vector design; r_c comes from the design split, r_p and
/// t from the achieved rates.
LiftedPoint lift(const TransmitDesign& d, const ChannelRealization& ch);

/// Max-min allocation of a common rate budget on top of per user base rates:
/// maximizes min_k (base_k + alloc_k) with alloc >= 0, sum alloc <= budget.
struct WaterfillResult {
  RVec alloc;
  double level;
};
WaterfillResult waterfill_common(const RVec& base, double budget);

}  // namespace secrsma

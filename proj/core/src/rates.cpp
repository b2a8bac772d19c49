#include "secrsma/rates.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace secrsma {

double TransmitDesign::power_private() const {
  double p = 0.0;
  for (const auto& wk : w) p += wk.squaredNorm();
  return p;
}

double FeasibilityReport::max_violation() const {
  double v = 0.0;
  for (const auto& r : residuals) v = std::max(v, r.violation);
  return v;
}

namespace {

double received_power(const CRow& row, const CVec& w) {
  return std::norm((row * w)(0));
}

double an_power(const CRow& row, const CMat& Z) {
  return ((row * Z) * row.adjoint())(0).real();
}

void check_receiver(const ChannelRealization& ch, int receiver) {
  if (receiver < 0 || receiver > ch.k())
    throw std::invalid_argument("receiver index out of range");
}

}  // namespace

double sinr_common(const TransmitDesign& d, const ChannelRealization& ch, int receiver) {
  check_receiver(ch, receiver);
  CRow row = effective_row(ch.H_of(receiver), d.v);
  double num = received_power(row, d.w_c);
  double den = ch.sigma2_of(receiver) + an_power(row, d.Z);
  for (const auto& wk : d.w) den += received_power(row, wk);
  return num / den;
}

double sinr_private(const TransmitDesign& d, const ChannelRealization& ch, int user) {
  if (user < 0 || user >= ch.k()) throw std::invalid_argument("user index out of range");
  CRow row = effective_row(ch.H_of(user), d.v);
  double num = received_power(row, d.w[user]);
  double den = ch.sigma2_of(user) + an_power(row, d.Z);
  for (int i = 0; i < ch.k(); ++i)
    if (i != user) den += received_power(row, d.w[i]);
  return num / den;
}

double sinr_eve_private(const TransmitDesign& d, const ChannelRealization& ch, int user) {
  if (user < 0 || user >= ch.k()) throw std::invalid_argument("user index out of range");
  CRow row = effective_row(ch.H_of(ch.eve()), d.v);
  double num = received_power(row, d.w[user]);
  double den = ch.sigma2_of(ch.eve()) + an_power(row, d.Z) + received_power(row, d.w_c);
  for (int i = 0; i < ch.k(); ++i)
    if (i != user) den += received_power(row, d.w[i]);
  return num / den;
}

RateReport rate_report(const TransmitDesign& d, const ChannelRealization& ch) {
  const int k = ch.k();
  RateReport rep;
  rep.common_rate = RVec(k);
  rep.private_rate = RVec(k);
  rep.private_rate_eve = RVec(k);
  rep.secrecy = RVec(k);
  for (int j = 0; j < k; ++j) {
    rep.common_rate(j) = std::log2(1.0 + sinr_common(d, ch, j));
    rep.private_rate(j) = std::log2(1.0 + sinr_private(d, ch, j));
    rep.private_rate_eve(j) = std::log2(1.0 + sinr_eve_private(d, ch, j));
  }
  rep.common_rate_eve = std::log2(1.0 + sinr_common(d, ch, ch.eve()));
  rep.common_cap = rep.common_rate.minCoeff() - rep.common_rate_eve;
  for (int j = 0; j < k; ++j) {
    double priv = std::max(0.0, rep.private_rate(j) - rep.private_rate_eve(j));
    rep.secrecy(j) = d.r_c_sec(j) + priv;
  }
  rep.min_secrecy = rep.secrecy.minCoeff();
  return rep;
}

FeasibilityReport validate_design(const TransmitDesign& d, const ChannelRealization& ch,
                                  double p_max_w) {
  FeasibilityReport rep;
  rep.residuals.push_back({"power_budget", d.power_total() - p_max_w});

  double mod_err = 0.0;
  for (Eigen::Index i = 0; i < d.v.size(); ++i)
    mod_err = std::max(mod_err, std::abs(std::abs(d.v(i)) - 1.0));
  rep.residuals.push_back({"unit_modulus", mod_err});
  rep.residuals.push_back(
      {"last_phase_fixed", std::abs(d.v(d.v.size() - 1) - cplx(1.0, 0.0))});

  Eigen::SelfAdjointEigenSolver<CMat> eig(d.Z);
  double min_eig = d.Z.rows() > 0 ? eig.eigenvalues().minCoeff() : 0.0;
  rep.residuals.push_back({"an_psd", std::max(0.0, -min_eig)});

  double rc_min = d.r_c_sec.size() > 0 ? d.r_c_sec.minCoeff() : 0.0;
  rep.residuals.push_back({"common_split_nonneg", std::max(0.0, -rc_min)});

  RateReport rates = rate_report(d, ch);
  double budget = std::max(0.0, rates.common_cap);
  double used = d.r_c_sec.sum();
  rep.residuals.push_back({"common_split_budget", used - budget});
  rep.common_budget_slack = budget - used;
  return rep;
}

const char* log_term_name(LogTermKind kind) {
  switch (kind) {
    case LogTermKind::f_pk: return "f_pk";
    case LogTermKind::g_pk: return "g_pk";
    case LogTermKind::f_e: return "f_e";
    case LogTermKind::g_pe_k: return "g_pe_k";
    case LogTermKind::f_ck: return "f_ck";
    case LogTermKind::g_ck: return "g_ck";
    case LogTermKind::g_ce: return "g_ce";
  }
  return "?";
}

LogTermSpec log_term_spec(LogTermKind kind, int user, int k_users) {
  auto users_only = [&](int excluded) {
    std::vector<int> s;
    for (int i = 1; i <= k_users; ++i)
      if (i != excluded) s.push_back(i);
    return s;
  };
  auto all_streams = [&](int excluded) {
    std::vector<int> s;
    for (int i = 0; i <= k_users; ++i)
      if (i != excluded) s.push_back(i);
    return s;
  };
  switch (kind) {
    case LogTermKind::f_pk: return {user, users_only(-1)};
    case LogTermKind::g_pk: return {user, users_only(user + 1)};
    case LogTermKind::f_e: return {k_users, all_streams(-1)};
    case LogTermKind::g_pe_k: return {k_users, all_streams(user + 1)};
    case LogTermKind::f_ck: return {user, all_streams(-1)};
    case LogTermKind::g_ck: return {user, users_only(-1)};
    case LogTermKind::g_ce: return {k_users, users_only(-1)};
  }
  throw std::logic_error("unknown log term kind");
}

namespace {

bool needs_user(LogTermKind kind) {
  return kind != LogTermKind::f_e && kind != LogTermKind::g_ce;
}

}  // namespace

double eval_log_term(LogTermKind kind, const LiftedPoint& p, const ChannelRealization& ch,
                     int user) {
  const int k = ch.k();
  if (needs_user(kind) && (user < 0 || user >= k))
    throw std::invalid_argument("log term requires a valid user index");
  LogTermSpec spec = log_term_spec(kind, user, k);
  const CMat& Hj = ch.H_of(spec.receiver);
  CMat A = Hj.adjoint() * p.V * Hj;
  double arg = ch.sigma2_of(spec.receiver) + herm_inner(A, p.Z);
  for (int idx : spec.lifted) arg += herm_inner(A, p.W[idx]);
  if (arg <= 0.0) throw std::domain_error(std::string("nonpositive log argument in ") +
                                          log_term_name(kind));
  return std::log2(arg);
}

LiftedPoint lift(const TransmitDesign& d, const ChannelRealization& ch) {
  LiftedPoint p;
  p.W.resize(d.k() + 1);
  p.W[0] = d.w_c * d.w_c.adjoint();
  for (int i = 0; i < d.k(); ++i) p.W[i + 1] = d.w[i] * d.w[i].adjoint();
  p.Z = d.Z;
  p.V = d.v * d.v.adjoint();
  p.r_c = d.r_c_sec;
  RateReport rep = rate_report(d, ch);
  p.r_p = (rep.private_rate - rep.private_rate_eve).cwiseMax(0.0);
  p.t = rep.min_secrecy;
  return p;
}

WaterfillResult waterfill_common(const RVec& base, double budget) {
  const int k = static_cast<int>(base.size());
  WaterfillResult out;
  out.alloc = RVec::Zero(k);
  if (k == 0) {
    out.level = 0.0;
    return out;
  }
  if (budget <= 0.0) {
    out.level = base.minCoeff();
    return out;
  }
  std::vector<double> s(base.data(), base.data() + k);
  std::sort(s.begin(), s.end());
  double level = s[0] + budget;
  double acc = 0.0;
  for (int i = 0; i < k; ++i) {
    acc += s[i];
    double tentative = (budget + acc) / (i + 1);
    if (i + 1 == k || tentative <= s[i + 1]) {
      level = tentative;
      break;
    }
  }
  for (int i = 0; i < k; ++i) out.alloc(i) = std::max(0.0, level - base(i));
  double used = out.alloc.sum();
  if (used > budget && used > 0.0) out.alloc *= budget / used;
  out.level = (base + out.alloc).minCoeff();
  return out;
}

}  // namespace secrsma

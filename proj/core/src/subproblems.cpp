#include "secrsma/subproblems.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace secrsma {

double TaylorExpansion::upper_bound(const std::map<std::string, CMat>& at) const {
  double v = base_value;
  for (const auto& [name, grad] : gradients) {
    const CMat& point = at.at(name);
    const CMat& base = base_matrices.at(name);
    v += herm_inner(grad, point - base);
  }
  return v;
}

std::string lifted_slot_name(int lifted_index) {
  if (lifted_index == 0) return "W_c";
  return "W_" + std::to_string(lifted_index);
}

TaylorExpansion taylor_of_log_term(LogTermKind kind, const LiftedPoint& p,
                                   const ChannelRealization& ch, TaylorWrt wrt,
                                   int user) {
  TaylorExpansion te;
  te.base_value = eval_log_term(kind, p, ch, user);
  LogTermSpec spec = log_term_spec(kind, user, ch.k());
  const CMat& Hj = ch.H_of(spec.receiver);
  CMat A = hermitize(Hj.adjoint() * p.V * Hj);
  double arg = ch.sigma2_of(spec.receiver) + herm_inner(A, p.Z);
  for (int idx : spec.lifted) arg += herm_inner(A, p.W[idx]);
  const double scale = 1.0 / (M_LN2 * arg);

  if (wrt == TaylorWrt::precoders) {
    CMat grad = scale * A;
    for (int idx : spec.lifted) {
      te.gradients[lifted_slot_name(idx)] = grad;
      te.base_matrices[lifted_slot_name(idx)] = p.W[idx];
    }
    te.gradients["Z"] = grad;
    te.base_matrices["Z"] = p.Z;
  } else {
    CMat M = p.Z;
    for (int idx : spec.lifted) M += p.W[idx];
    CMat B = hermitize(Hj * M * Hj.adjoint());
    te.gradients["V"] = scale * B;
    te.base_matrices["V"] = p.V;
  }
  return te;
}

namespace {

/// Receiver-normalized copy: stacked channels divided by the noise standard
/// deviation so every log argument is expressed in noise units. Only the H
/// blocks and sigma2 are consistent afterwards; the builders use nothing
/// else.
ChannelRealization scale_to_unit_noise(const ChannelRealization& ch) {
  ChannelRealization out = ch;
  for (int j = 0; j <= ch.k(); ++j) out.H[j] /= std::sqrt(ch.sigma2_of(j));
  out.sigma2.setConstant(1.0);
  return out;
}

std::vector<bool> resolve(const std::vector<bool>& v, int k, bool fallback) {
  if (v.empty()) return std::vector<bool>(k, fallback);
  if (static_cast<int>(v.size()) != k)
    throw std::invalid_argument("restriction mask size mismatch");
  return v;
}

struct StreamSet {
  bool common;
  bool an;
  std::vector<bool> priv;
  std::vector<bool> split;

  bool lifted_active(int idx) const { return idx == 0 ? common : priv[idx - 1]; }
};

StreamSet resolve_streams(const SchemeRestriction& res, int k) {
  StreamSet s;
  s.common = res.use_common;
  s.an = res.use_an;
  s.priv = resolve(res.private_on, k, true);
  s.split = resolve(res.common_split_on, k, res.use_common);
  if (!res.use_common) s.split.assign(k, false);
  return s;
}

/// Affine expression of a Taylor bound in the program's matrix variables;
/// slots without a matching variable must sit at zero in the base point.
conic::RealExpr taylor_expr(const conic::Program& prog, const TaylorExpansion& te) {
  conic::RealExpr e = conic::RealExpr::lit(te.base_value);
  for (const auto& [name, grad] : te.gradients) {
    const CMat& base = te.base_matrices.at(name);
    e.constant -= herm_inner(grad, base);
    bool have = true;
    int id = -1;
    try {
      id = prog.hermitian_id(name);
    } catch (const std::invalid_argument&) {
      have = false;
    }
    if (have)
      e += conic::RealExpr::trace_term(id, grad);
    else if (base.norm() > 0.0)
      throw std::logic_error("taylor term references absent stream with nonzero base");
  }
  return e;
}

void check_prev_point(const LiftedPoint& prev, int m, int k, const char* where) {
  if (static_cast<int>(prev.W.size()) != k + 1)
    throw std::invalid_argument(std::string(where) + ": lifted point has wrong stream count");
  for (const auto& W : prev.W)
    if (W.rows() != m || W.cols() != m)
      throw std::invalid_argument(std::string(where) + ": lifted covariance dimension mismatch");
  if (prev.Z.rows() != m || prev.Z.cols() != m)
    throw std::invalid_argument(std::string(where) + ": noise covariance dimension mismatch");
}

}  // namespace

conic::Program build_w_subproblem(const ChannelRealization& ch, const CMat& V,
                                  const LiftedPoint& prev, double p_max_w,
                                  const SchemeRestriction& res) {
  const int m = ch.m();
  const int k = ch.k();
  const int n1 = ch.n() + 1;
  check_prev_point(prev, m, k, "build_w_subproblem");
  if (V.rows() != n1 || V.cols() != n1)
    throw std::invalid_argument("build_w_subproblem: reflection Gram dimension mismatch");
  if (p_max_w < 0.0) throw std::invalid_argument("negative power budget");
  StreamSet st = resolve_streams(res, k);

  ChannelRealization sch = scale_to_unit_noise(ch);
  LiftedPoint base = prev;
  base.V = hermitize(V);

  conic::Program prog;
  std::vector<int> wid(k + 1, -1);
  if (st.common) wid[0] = prog.add_hermitian("W_c", m, true);
  for (int i = 1; i <= k; ++i)
    if (st.priv[i - 1]) wid[i] = prog.add_hermitian(lifted_slot_name(i), m, true);
  int zid = st.an ? prog.add_hermitian("Z", m, true) : -1;
  int t_id = prog.add_scalar("t", false);
  std::vector<int> rc(k, -1), rp(k, -1);
  for (int u = 0; u < k; ++u) {
    if (st.split[u]) rc[u] = prog.add_scalar("r_c_" + std::to_string(u + 1), true);
    if (st.priv[u]) rp[u] = prog.add_scalar("r_p_" + std::to_string(u + 1), true);
  }

  auto gram = [&](int receiver) {
    const CMat& Hj = sch.H_of(receiver);
    return hermitize(Hj.adjoint() * base.V * Hj);
  };
  std::vector<CMat> A(k + 1);
  for (int j = 0; j <= k; ++j) A[j] = gram(j);

  // exact concave side: epigraph u <= log2(1 + active traces)
  auto add_log_epigraph = [&](const std::string& uname, int receiver,
                              const std::vector<int>& streams) {
    int uid = prog.add_scalar(uname, false);
    conic::RealExpr arg = conic::RealExpr::lit(1.0);
    for (int idx : streams)
      if (st.lifted_active(idx) && wid[idx] >= 0)
        arg += conic::RealExpr::trace_term(wid[idx], A[receiver]);
    if (zid >= 0) arg += conic::RealExpr::trace_term(zid, A[receiver]);
    prog.add_log2_lower_bound(arg, conic::RealExpr::var(uid));
    return uid;
  };

  // rate target chain: r_c + r_p >= t per user
  for (int u = 0; u < k; ++u) {
    conic::RealExpr e = conic::RealExpr::var(t_id, -1.0);
    if (rc[u] >= 0) e += conic::RealExpr::var(rc[u]);
    if (rp[u] >= 0) e += conic::RealExpr::var(rp[u]);
    prog.add_constraint(e, conic::Sense::ge);
  }

  // power budget
  {
    conic::RealExpr e = conic::RealExpr::lit(p_max_w);
    CMat I = CMat::Identity(m, m);
    for (int idx = 0; idx <= k; ++idx)
      if (wid[idx] >= 0) e += conic::RealExpr::trace_term(wid[idx], -I);
    if (zid >= 0) e += conic::RealExpr::trace_term(zid, -I);
    prog.add_constraint(e, conic::Sense::ge);
  }

  conic::RealExpr fe_taylor =
      taylor_expr(prog, taylor_of_log_term(LogTermKind::f_e, base, sch, TaylorWrt::precoders));

  // private secrecy caps
  for (int u = 0; u < k; ++u) {
    if (rp[u] < 0) continue;
    LogTermSpec fp = log_term_spec(LogTermKind::f_pk, u, k);
    LogTermSpec gpe = log_term_spec(LogTermKind::g_pe_k, u, k);
    int u_fp = add_log_epigraph("u_fp_" + std::to_string(u + 1), fp.receiver, fp.lifted);
    int u_gpe = add_log_epigraph("u_gpe_" + std::to_string(u + 1), gpe.receiver, gpe.lifted);
    conic::RealExpr gpk_taylor = taylor_expr(
        prog, taylor_of_log_term(LogTermKind::g_pk, base, sch, TaylorWrt::precoders, u));
    conic::RealExpr e = conic::RealExpr::var(u_fp) + conic::RealExpr::var(u_gpe) -
                        gpk_taylor - fe_taylor - conic::RealExpr::var(rp[u]);
    prog.add_constraint(e, conic::Sense::ge);
  }

  // common secrecy caps, one per decoding user, shared eavesdropper epigraph
  if (st.common) {
    LogTermSpec gce = log_term_spec(LogTermKind::g_ce, -1, k);
    int u_gce = add_log_epigraph("u_gce", gce.receiver, gce.lifted);
    conic::RealExpr sum_rc;
    for (int u = 0; u < k; ++u)
      if (rc[u] >= 0) sum_rc += conic::RealExpr::var(rc[u]);
    for (int u = 0; u < k; ++u) {
      LogTermSpec fc = log_term_spec(LogTermKind::f_ck, u, k);
      int u_fc = add_log_epigraph("u_fc_" + std::to_string(u + 1), fc.receiver, fc.lifted);
      conic::RealExpr gck_taylor = taylor_expr(
          prog, taylor_of_log_term(LogTermKind::g_ck, base, sch, TaylorWrt::precoders, u));
      conic::RealExpr e = conic::RealExpr::var(u_fc) + conic::RealExpr::var(u_gce) -
                          gck_taylor - fe_taylor - sum_rc;
      prog.add_constraint(e, conic::Sense::ge);
    }
  }

  prog.set_objective(conic::RealExpr::var(t_id), true);
  return prog;
}

conic::Program build_v_subproblem(const ChannelRealization& ch, const LiftedPoint& fixed,
                                  const CMat& V_prev, const PenaltyState& pen,
                                  const SchemeRestriction& res) {
  const int m = ch.m();
  const int k = ch.k();
  const int n1 = ch.n() + 1;
  check_prev_point(fixed, m, k, "build_v_subproblem");
  if (V_prev.rows() != n1 || V_prev.cols() != n1)
    throw std::invalid_argument("build_v_subproblem: reflection Gram dimension mismatch");
  if (pen.lambda.size() != n1)
    throw std::invalid_argument("build_v_subproblem: penalty eigenvector dimension mismatch");
  if (pen.rho <= 0.0) throw std::invalid_argument("penalty weight must be positive");
  StreamSet st = resolve_streams(res, k);

  ChannelRealization sch = scale_to_unit_noise(ch);
  LiftedPoint base = fixed;
  base.V = hermitize(V_prev);

  conic::Program prog;
  int vid = prog.add_hermitian("V", n1, true);
  int dt = prog.add_scalar("dt", true);
  std::vector<int> drc(k, -1), drp(k, -1);
  for (int u = 0; u < k; ++u) {
    if (st.split[u]) drc[u] = prog.add_scalar("drc_" + std::to_string(u + 1), true);
    if (st.priv[u]) drp[u] = prog.add_scalar("drp_" + std::to_string(u + 1), true);
  }

  // unit modulus relaxation: fixed diagonal
  for (int d = 0; d < n1; ++d) {
    CMat E = CMat::Zero(n1, n1);
    E(d, d) = 1.0;
    prog.add_constraint(conic::RealExpr::trace_term(vid, E) + conic::RealExpr::lit(-1.0),
                        conic::Sense::eq);
  }

  // pairing matrix of a term: B = H (sum_{S} W + Z) H^H in noise units
  auto pairing = [&](int receiver, const std::vector<int>& streams) {
    CMat M = CMat::Zero(m, m);
    if (st.an) M += base.Z;
    for (int idx : streams)
      if (st.lifted_active(idx)) M += base.W[idx];
    const CMat& Hj = sch.H_of(receiver);
    return hermitize(Hj * M * Hj.adjoint());
  };

  auto add_log_epigraph = [&](const std::string& uname, int receiver,
                              const std::vector<int>& streams) {
    int uid = prog.add_scalar(uname, false);
    conic::RealExpr arg = conic::RealExpr::lit(1.0) +
                          conic::RealExpr::trace_term(vid, pairing(receiver, streams));
    prog.add_log2_lower_bound(arg, conic::RealExpr::var(uid));
    return uid;
  };

  // improvement chain: r_c + drc + r_p + drp >= t + dt per user
  for (int u = 0; u < k; ++u) {
    double fixed_part = 0.0;
    if (st.split[u]) fixed_part += fixed.r_c(u);
    if (st.priv[u]) fixed_part += fixed.r_p(u);
    conic::RealExpr e = conic::RealExpr::lit(fixed_part - fixed.t) +
                        conic::RealExpr::var(dt, -1.0);
    if (drc[u] >= 0) e += conic::RealExpr::var(drc[u]);
    if (drp[u] >= 0) e += conic::RealExpr::var(drp[u]);
    prog.add_constraint(e, conic::Sense::ge);
  }

  conic::RealExpr fe_taylor =
      taylor_expr(prog, taylor_of_log_term(LogTermKind::f_e, base, sch, TaylorWrt::reflection));

  for (int u = 0; u < k; ++u) {
    if (drp[u] < 0) continue;
    LogTermSpec fp = log_term_spec(LogTermKind::f_pk, u, k);
    LogTermSpec gpe = log_term_spec(LogTermKind::g_pe_k, u, k);
    int u_fp = add_log_epigraph("u_fp_" + std::to_string(u + 1), fp.receiver, fp.lifted);
    int u_gpe = add_log_epigraph("u_gpe_" + std::to_string(u + 1), gpe.receiver, gpe.lifted);
    conic::RealExpr gpk_taylor = taylor_expr(
        prog, taylor_of_log_term(LogTermKind::g_pk, base, sch, TaylorWrt::reflection, u));
    conic::RealExpr e = conic::RealExpr::var(u_fp) + conic::RealExpr::var(u_gpe) -
                        gpk_taylor - fe_taylor +
                        conic::RealExpr::lit(-fixed.r_p(u)) - conic::RealExpr::var(drp[u]);
    prog.add_constraint(e, conic::Sense::ge);
  }

  if (st.common) {
    LogTermSpec gce = log_term_spec(LogTermKind::g_ce, -1, k);
    int u_gce = add_log_epigraph("u_gce", gce.receiver, gce.lifted);
    double rc_sum = 0.0;
    conic::RealExpr drc_sum;
    for (int u = 0; u < k; ++u)
      if (drc[u] >= 0) {
        rc_sum += fixed.r_c(u);
        drc_sum += conic::RealExpr::var(drc[u]);
      }
    for (int u = 0; u < k; ++u) {
      LogTermSpec fc = log_term_spec(LogTermKind::f_ck, u, k);
      int u_fc = add_log_epigraph("u_fc_" + std::to_string(u + 1), fc.receiver, fc.lifted);
      conic::RealExpr gck_taylor = taylor_expr(
          prog, taylor_of_log_term(LogTermKind::g_ck, base, sch, TaylorWrt::reflection, u));
      conic::RealExpr e = conic::RealExpr::var(u_fc) + conic::RealExpr::var(u_gce) -
                          gck_taylor - fe_taylor + conic::RealExpr::lit(-rc_sum) - drc_sum;
      prog.add_constraint(e, conic::Sense::ge);
    }
  }

  // dt plus the rank-one alignment reward; the trace of V is pinned by the
  // diagonal, so maximizing lambda^H V lambda minimizes the nuclear-spectral
  // penalty gap
  CMat align = hermitize(pen.lambda * pen.lambda.adjoint()) / (2.0 * pen.rho);
  conic::RealExpr obj = conic::RealExpr::var(dt) + conic::RealExpr::trace_term(vid, align) +
                        conic::RealExpr::lit(-static_cast<double>(n1) / (2.0 * pen.rho));
  prog.set_objective(obj, true);
  return prog;
}

RankOne extract_rank_one(const CMat& X, double degeneracy_warn_tol) {
  RankOne out;
  CMat Xh = hermitize(X);
  double tr = Xh.trace().real();
  if (!(tr > 0.0)) {
    out.vec = CVec::Zero(X.rows());
    out.residual_ratio = 0.0;
    return out;
  }
  Eigen::SelfAdjointEigenSolver<CMat> eig(Xh);
  const auto& vals = eig.eigenvalues();
  const int d = static_cast<int>(vals.size());
  double top = vals(d - 1);
  if (top <= 0.0) {
    out.vec = CVec::Zero(X.rows());
    out.residual_ratio = 0.0;
    return out;
  }
  if (d > 1 && vals(d - 2) > (1.0 - degeneracy_warn_tol) * top)
    std::fprintf(stderr,
                 "extract_rank_one: near-degenerate top eigenvalues (%g vs %g), "
                 "picking the solver's ordering\n",
                 vals(d - 2), top);
  out.vec = std::sqrt(top) * eig.eigenvectors().col(d - 1);
  out.residual_ratio = (tr - top) / tr;
  return out;
}

CVec project_unit_modulus(const CVec& v_raw) {
  const auto n1 = v_raw.size();
  if (n1 == 0) throw std::invalid_argument("empty phase vector");
  CVec out(n1);
  cplx last = v_raw(n1 - 1);
  cplx rot = std::abs(last) > 0.0 ? cplx(std::conj(last) / std::abs(last)) : cplx(1.0, 0.0);
  for (Eigen::Index i = 0; i < n1; ++i) {
    cplx z = v_raw(i) * rot;
    double a = std::abs(z);
    out(i) = a > 0.0 ? z / a : cplx(1.0, 0.0);
  }
  out(n1 - 1) = cplx(1.0, 0.0);
  return out;
}

}  // namespace secrsma

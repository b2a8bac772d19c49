#include "secrsma/conic/solver.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace secrsma::conic {

const char* status_name(Status s) {
  switch (s) {
    case Status::optimal: return "optimal";
    case Status::infeasible: return "infeasible";
    case Status::unbounded: return "unbounded";
    case Status::numerical_limit: return "numerical_limit";
  }
  return "?";
}

void svec_into(const CMat& X, double* out) {
  const int d = static_cast<int>(X.rows());
  int idx = 0;
  for (int i = 0; i < d; ++i) out[idx++] = X(i, i).real();
  for (int j = 1; j < d; ++j)
    for (int i = 0; i < j; ++i) {
      out[idx++] = M_SQRT2 * X(i, j).real();
      out[idx++] = M_SQRT2 * X(i, j).imag();
    }
}

RVec svec(const CMat& X) {
  RVec v(X.rows() * X.rows());
  svec_into(X, v.data());
  return v;
}

CMat unsvec(const double* p, int d) {
  CMat X(d, d);
  int idx = 0;
  for (int i = 0; i < d; ++i) X(i, i) = p[idx++];
  const double inv = 1.0 / M_SQRT2;
  for (int j = 1; j < d; ++j)
    for (int i = 0; i < j; ++i) {
      double re = p[idx++] * inv;
      double im = p[idx++] * inv;
      X(i, j) = cplx(re, im);
      X(j, i) = cplx(re, -im);
    }
  return X;
}

namespace {

constexpr double kBetaPred = 0.85;   // neighborhood bound accepted after a predictor step
constexpr double kBetaCentered = 0.30;  // target proximity after centering
constexpr int kMaxCorrectors = 8;
constexpr double kStepShrink = 0.80;
constexpr double kMinAlpha = 1e-10;

struct ExpPoint {
  double zeta = 0.0;
  Eigen::Vector3d g = Eigen::Vector3d::Zero();
  Eigen::Matrix3d H = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d Hinv = Eigen::Matrix3d::Zero();
};

bool exp_primal_interior(double x, double y, double z) {
  if (!(y > 0.0) || !(z > 0.0)) return false;
  double zeta = y * (std::log(z) - std::log(y)) - x;
  return zeta > 0.0 && std::isfinite(zeta);
}

bool exp_dual_interior(double u, double v, double w) {
  if (!(u < 0.0) || !(w > 0.0)) return false;
  double val = u * (std::log(-u) - std::log(w)) + v - u;
  return val > 0.0 && std::isfinite(val);
}

/// Gradient and Hessian of the standard barrier
/// F(x,y,z) = -log(y log(z/y) - x) - log y - log z.
ExpPoint exp_eval(double x, double y, double z) {
  ExpPoint p;
  double lr = std::log(z) - std::log(y);
  p.zeta = y * lr - x;
  double iz = 1.0 / p.zeta;
  Eigen::Vector3d dzeta(-1.0, lr - 1.0, y / z);
  p.g(0) = iz;
  p.g(1) = -iz * (lr - 1.0) - 1.0 / y;
  p.g(2) = -iz * y / z - 1.0 / z;
  Eigen::Matrix3d curv = Eigen::Matrix3d::Zero();
  curv(1, 1) = 1.0 / y;
  curv(1, 2) = curv(2, 1) = -1.0 / z;
  curv(2, 2) = y / (z * z);
  p.H = iz * iz * dzeta * dzeta.transpose() + iz * curv;
  p.H(1, 1) += 1.0 / (y * y);
  p.H(2, 2) += 1.0 / (z * z);
  p.Hinv = p.H.inverse();
  return p;
}

/// Cached barrier state for one primal point. The layout's free segment is
/// carried along untouched; apply_hinv and grad write zeros there.
class BarrierState {
 public:
  explicit BarrierState(const ConeLayout& lay) : lay_(lay) {}

  bool load(const RVec& x) {
    const int nb = static_cast<int>(lay_.herm_dims.size());
    X_.resize(nb);
    llt_.resize(nb);
    exp_.resize(lay_.n_exp);
    for (int i = 0; i < lay_.n_nonneg; ++i)
      if (!(x(lay_.nonneg_offset() + i) > 0.0)) return false;
    for (int b = 0; b < nb; ++b) {
      X_[b] = unsvec(x.data() + lay_.herm_offset(b), lay_.herm_dims[b]);
      llt_[b].compute(X_[b]);
      if (llt_[b].info() != Eigen::Success) return false;
    }
    for (int t = 0; t < lay_.n_exp; ++t) {
      const double* e = x.data() + lay_.exp_offset(t);
      if (!exp_primal_interior(e[0], e[1], e[2])) return false;
      exp_[t] = exp_eval(e[0], e[1], e[2]);
    }
    x_ = x;
    return true;
  }

  void grad(RVec& g) const {
    g.setZero(lay_.total());
    for (int i = 0; i < lay_.n_nonneg; ++i) {
      int idx = lay_.nonneg_offset() + i;
      g(idx) = -1.0 / x_(idx);
    }
    for (size_t b = 0; b < X_.size(); ++b) {
      CMat Xinv = llt_[b].solve(CMat::Identity(X_[b].rows(), X_[b].cols()));
      CMat neginv = -0.5 * (Xinv + Xinv.adjoint());
      svec_into(neginv, g.data() + lay_.herm_offset(static_cast<int>(b)));
    }
    for (int t = 0; t < lay_.n_exp; ++t) {
      int off = lay_.exp_offset(t);
      for (int q = 0; q < 3; ++q) g(off + q) = exp_[t].g(q);
    }
  }

  /// out = H(x)^{-1} v on the barrier blocks, zero on the free block.
  void apply_hinv(const RVec& v, RVec& out) const {
    out.setZero(lay_.total());
    for (int i = 0; i < lay_.n_nonneg; ++i) {
      int idx = lay_.nonneg_offset() + i;
      out(idx) = x_(idx) * x_(idx) * v(idx);
    }
    for (size_t b = 0; b < X_.size(); ++b) {
      int d = lay_.herm_dims[b];
      int off = lay_.herm_offset(static_cast<int>(b));
      CMat U = unsvec(v.data() + off, d);
      CMat R = X_[b] * U * X_[b];
      svec_into(hermitize(R), out.data() + off);
    }
    for (int t = 0; t < lay_.n_exp; ++t) {
      int off = lay_.exp_offset(t);
      Eigen::Vector3d vv(v(off), v(off + 1), v(off + 2));
      Eigen::Vector3d r = exp_[t].Hinv * vv;
      for (int q = 0; q < 3; ++q) out(off + q) = r(q);
    }
  }

  /// out = H(x) v on the barrier blocks, zero on the free block.
  void apply_h(const RVec& v, RVec& out) const {
    out.setZero(lay_.total());
    for (int i = 0; i < lay_.n_nonneg; ++i) {
      int idx = lay_.nonneg_offset() + i;
      out(idx) = v(idx) / (x_(idx) * x_(idx));
    }
    for (size_t b = 0; b < X_.size(); ++b) {
      int d = lay_.herm_dims[b];
      int off = lay_.herm_offset(static_cast<int>(b));
      CMat U = unsvec(v.data() + off, d);
      CMat Xinv = llt_[b].solve(CMat::Identity(d, d));
      CMat R = Xinv * U * Xinv;
      svec_into(hermitize(R), out.data() + off);
    }
    for (int t = 0; t < lay_.n_exp; ++t) {
      int off = lay_.exp_offset(t);
      Eigen::Vector3d vv(v(off), v(off + 1), v(off + 2));
      Eigen::Vector3d r = exp_[t].H * vv;
      for (int q = 0; q < 3; ++q) out(off + q) = r(q);
    }
  }

 private:
  const ConeLayout& lay_;
  RVec x_;
  std::vector<CMat> X_;
  std::vector<Eigen::LLT<CMat>> llt_;
  std::vector<ExpPoint> exp_;
};

bool primal_interior(const ConeLayout& lay, const RVec& x) {
  for (int i = 0; i < lay.n_nonneg; ++i)
    if (!(x(lay.nonneg_offset() + i) > 0.0)) return false;
  for (size_t b = 0; b < lay.herm_dims.size(); ++b) {
    CMat X = unsvec(x.data() + lay.herm_offset(static_cast<int>(b)), lay.herm_dims[b]);
    Eigen::LLT<CMat> llt(X);
    if (llt.info() != Eigen::Success) return false;
  }
  for (int t = 0; t < lay.n_exp; ++t) {
    const double* e = x.data() + lay.exp_offset(t);
    if (!exp_primal_interior(e[0], e[1], e[2])) return false;
  }
  return true;
}

bool dual_interior(const ConeLayout& lay, const RVec& s) {
  for (int i = 0; i < lay.n_nonneg; ++i)
    if (!(s(lay.nonneg_offset() + i) > 0.0)) return false;
  for (size_t b = 0; b < lay.herm_dims.size(); ++b) {
    CMat S = unsvec(s.data() + lay.herm_offset(static_cast<int>(b)), lay.herm_dims[b]);
    Eigen::LLT<CMat> llt(S);
    if (llt.info() != Eigen::Success) return false;
  }
  for (int t = 0; t < lay.n_exp; ++t) {
    const double* e = s.data() + lay.exp_offset(t);
    if (!exp_dual_interior(e[0], e[1], e[2])) return false;
  }
  return true;
}

/// Distance to the central path at parameter mu:
/// eta^2 = ( |s + mu g(x)|^2_{H(x)^{-1}} + (tau kappa - mu)^2 ) / mu^2.
double proximity(const BarrierState& bar, const ConeLayout& lay, const RVec& x,
                 const RVec& s, double tau, double kappa, double mu, RVec& psi,
                 RVec& hpsi) {
  bar.grad(psi);
  psi = s + mu * psi;
  psi.head(lay.n_free).setZero();
  bar.apply_hinv(psi, hpsi);
  double v = psi.dot(hpsi);
  double tk = tau * kappa - mu;
  return std::sqrt(std::max(0.0, v + tk * tk)) / mu;
}

struct Direction {
  RVec dx, dy, ds;
  double dtau = 0.0, dkappa = 0.0;
};

struct Kkt {
  RMat hat;  // n x m, Hinvhat applied to the rows of A
  RVec hc;   // Hinvhat c
  Eigen::PartialPivLU<RMat> lu;
  double mu = 0.0, tau = 1.0;
};

struct Workspace {
  std::vector<int> free_cols;
  RMat A_F;  // m x n_free
  RVec c_F;
};

/// Factors the reduced KKT system in (dy, dx_free, dtau). The barrier block
/// of dx is eliminated through H^{-1}; free columns stay explicit.
Kkt factor(const StandardForm& sf, const Workspace& ws, const BarrierState& bar,
           double mu, double tau) {
  const int m = static_cast<int>(sf.A.rows());
  const int n = static_cast<int>(sf.A.cols());
  const int nf = sf.cones.n_free;
  Kkt k;
  k.mu = mu;
  k.tau = tau;
  k.hat.resize(n, m);
  RVec tmp(n), out(n);
  for (int i = 0; i < m; ++i) {
    tmp = sf.A.row(i).transpose();
    bar.apply_hinv(tmp, out);
    k.hat.col(i) = out / mu;
  }
  bar.apply_hinv(sf.c, out);
  k.hc = out / mu;

  RMat K(m + nf + 1, m + nf + 1);
  K.setZero();
  K.topLeftCorner(m, m) = sf.A * k.hat;
  K.block(0, m, m, nf) = ws.A_F;
  RVec Ahc = sf.A * k.hc;
  K.block(0, m + nf, m, 1) = -(sf.b + Ahc);
  K.block(m, 0, nf, m) = ws.A_F.transpose();
  K.block(m, m + nf, nf, 1) = -ws.c_F;
  K.block(m + nf, 0, 1, m) = (sf.b - Ahc).transpose();
  K.block(m + nf, m, 1, nf) = -ws.c_F.transpose();
  K(m + nf, m + nf) = sf.c.dot(k.hc) + mu / (tau * tau);
  k.lu.compute(K);
  return k;
}

void solve_reduced(const StandardForm& sf, const Workspace& ws, const BarrierState& bar,
                   const Kkt& k, const RVec& p, const RVec& d, double gamma,
                   const RVec& q, double phi, Direction& dir) {
  const int m = static_cast<int>(sf.A.rows());
  const int nf = sf.cones.n_free;
  RVec dq = d + q;
  RVec hv(sf.A.cols());
  bar.apply_hinv(dq, hv);
  hv /= k.mu;

  RVec rhs(m + nf + 1);
  rhs.head(m) = p - sf.A * hv;
  for (int j = 0; j < nf; ++j) rhs(m + j) = -d(ws.free_cols[j]) - q(ws.free_cols[j]);
  rhs(m + nf) = gamma + phi + sf.c.dot(hv);

  RVec sol = k.lu.solve(rhs);
  dir.dy = sol.head(m);
  dir.dtau = sol(m + nf);

  RVec w = sf.A.transpose() * dir.dy - sf.c * dir.dtau;
  RVec hw(sf.A.cols());
  bar.apply_hinv(w, hw);
  dir.dx = hv + hw / k.mu;
  for (int j = 0; j < nf; ++j) dir.dx(ws.free_cols[j]) = sol(m + j);

  dir.ds = -sf.A.transpose() * dir.dy + sf.c * dir.dtau - d;
  dir.dkappa = phi - (k.mu / (k.tau * k.tau)) * dir.dtau;
}

/// One pass of iterative refinement against the full homogeneous system.
void refine(const StandardForm& sf, const Workspace& ws, const BarrierState& bar,
            const Kkt& k, const RVec& p, const RVec& d, double gamma, const RVec& q,
            double phi, Direction& dir) {
  const int nf = sf.cones.n_free;
  RVec r1 = p - (sf.A * dir.dx - sf.b * dir.dtau);
  RVec r2 = d - (-sf.A.transpose() * dir.dy + sf.c * dir.dtau - dir.ds);
  double r3 = gamma - (sf.b.dot(dir.dy) - sf.c.dot(dir.dx) - dir.dkappa);
  RVec hdx(sf.A.cols());
  bar.apply_h(dir.dx, hdx);
  RVec r4 = q - (dir.ds + k.mu * hdx);
  for (int j = 0; j < nf; ++j) {
    int idx = ws.free_cols[j];
    r4(idx) = q(idx) - dir.ds(idx);
  }
  double r5 = phi - (dir.dkappa + (k.mu / (k.tau * k.tau)) * dir.dtau);

  double scale = std::max({1.0, dir.dx.norm(), dir.ds.norm()});
  double resid = std::max({r1.norm(), r2.norm(), r4.norm(), std::abs(r3), std::abs(r5)});
  if (resid < 1e-13 * scale) return;

  Direction corr;
  solve_reduced(sf, ws, bar, k, r1, r2, r3, r4, r5, corr);
  dir.dx += corr.dx;
  dir.dy += corr.dy;
  dir.ds += corr.ds;
  dir.dtau += corr.dtau;
  dir.dkappa += corr.dkappa;
}

/// Largest step keeping the sign-constrained components positive; curved
/// boundaries are handled by the caller's backtracking.
double ratio_bound(const ConeLayout& lay, const RVec& x, const RVec& s, double tau,
                   double kappa, const Direction& dir) {
  double alpha = 1.0;
  auto cap = [&alpha](double v, double dv) {
    if (dv < 0.0) alpha = std::min(alpha, -v / dv);
  };
  for (int i = 0; i < lay.n_nonneg; ++i) {
    int idx = lay.nonneg_offset() + i;
    cap(x(idx), dir.dx(idx));
    cap(s(idx), dir.ds(idx));
  }
  for (int t = 0; t < lay.n_exp; ++t) {
    int off = lay.exp_offset(t);
    cap(x(off + 1), dir.dx(off + 1));
    cap(x(off + 2), dir.dx(off + 2));
    cap(-s(off), -dir.ds(off));
    cap(s(off + 2), dir.ds(off + 2));
  }
  cap(tau, dir.dtau);
  cap(kappa, dir.dkappa);
  return 0.99 * alpha;
}

}  // namespace

IpmResult solve_standard_form(const StandardForm& sf, const IpmOptions& opt) {
  const ConeLayout& lay = sf.cones;
  const int n = lay.total();
  const int m = static_cast<int>(sf.A.rows());
  if (sf.A.cols() != n || sf.b.size() != m || sf.c.size() != n)
    throw std::invalid_argument("standard form dimension mismatch");

  Workspace ws;
  for (int j = 0; j < lay.n_free; ++j) ws.free_cols.push_back(j);
  ws.A_F = sf.A.leftCols(lay.n_free);
  ws.c_F = sf.c.head(lay.n_free);

  const double nu = lay.barrier_nu();
  RVec x = RVec::Zero(n), s = RVec::Zero(n);
  for (int i = 0; i < lay.n_nonneg; ++i) x(lay.nonneg_offset() + i) = 1.0;
  for (size_t b = 0; b < lay.herm_dims.size(); ++b) {
    CMat I = CMat::Identity(lay.herm_dims[b], lay.herm_dims[b]);
    svec_into(I, x.data() + lay.herm_offset(static_cast<int>(b)));
  }
  for (int t = 0; t < lay.n_exp; ++t) {
    int off = lay.exp_offset(t);
    x(off) = -0.5;
    x(off + 1) = 1.0;
    x(off + 2) = 1.5;
  }
  {
    BarrierState bar(lay);
    if (!bar.load(x)) throw std::logic_error("initial point not interior");
    RVec g(n);
    bar.grad(g);
    s = -g;
  }
  RVec y = RVec::Zero(m);
  double tau = 1.0, kappa = 1.0;

  const double nb = sf.b.norm();
  const double nc = sf.c.norm();
  const double tol_cert = std::max(opt.tol, 1e-8);

  IpmResult best;
  double best_score = std::numeric_limits<double>::infinity();
  auto record = [&](double pres, double dres, double gap, double pobj, double dobj,
                    int iter) {
    double score = std::max({pres, dres, gap});
    if (score < best_score) {
      best_score = score;
      best.x = x / tau;
      best.y = y / tau;
      best.s = s / tau;
      best.pobj = pobj;
      best.dobj = dobj;
      best.primal_res = pres;
      best.dual_res = dres;
      best.rel_gap = gap;
      best.iters = iter;
    }
  };

  BarrierState bar(lay);
  RVec psi(n), hpsi(n), g(n);
  int stall = 0;

  for (int iter = 0; iter <= opt.max_iters; ++iter) {
    double mu = (x.dot(s) + tau * kappa) / (nu + 1.0);

    RVec xh = x / tau, yh = y / tau, sh = s / tau;
    double pres = (sf.A * xh - sf.b).norm() / (1.0 + nb);
    double dres = (sf.A.transpose() * yh + sh - sf.c).norm() / (1.0 + nc);
    double pobj = sf.c.dot(xh);
    double dobj = sf.b.dot(yh);
    double gap = std::abs(pobj - dobj) / (1.0 + std::max(std::abs(pobj), std::abs(dobj)));
    record(pres, dres, gap, pobj, dobj, iter);
    if (opt.verbosity > 0)
      std::fprintf(stderr, "ipm %3d mu=%9.2e pres=%9.2e dres=%9.2e gap=%9.2e tau=%8.2e\n",
                   iter, mu, pres, dres, gap, tau);

    if (pres <= opt.tol && dres <= opt.tol && gap <= opt.tol) {
      IpmResult r;
      r.status = Status::optimal;
      r.x = xh;
      r.y = yh;
      r.s = sh;
      r.pobj = pobj;
      r.dobj = dobj;
      r.primal_res = pres;
      r.dual_res = dres;
      r.rel_gap = gap;
      r.iters = iter;
      return r;
    }
    double by = sf.b.dot(y);
    if (by > 1e-12 && (sf.A.transpose() * y + s).norm() * std::max(1.0, nb) / by <= tol_cert) {
      IpmResult r = best;
      r.status = Status::infeasible;
      r.x = x;
      r.y = y;
      r.s = s;
      r.iters = iter;
      return r;
    }
    double cx = -sf.c.dot(x);
    if (cx > 1e-12 && (sf.A * x).norm() * std::max(1.0, nc) / cx <= tol_cert) {
      IpmResult r = best;
      r.status = Status::unbounded;
      r.x = x;
      r.y = y;
      r.s = s;
      r.iters = iter;
      return r;
    }
    if (iter == opt.max_iters || stall >= 3) break;

    // predictor
    if (!bar.load(x)) break;
    Kkt k = factor(sf, ws, bar, mu, tau);
    RVec rP = sf.A * x - sf.b * tau;
    RVec rD = -sf.A.transpose() * y + sf.c * tau - s;
    double rG = sf.b.dot(y) - sf.c.dot(x) - kappa;
    Direction dir;
    RVec q = -s;
    solve_reduced(sf, ws, bar, k, -rP, -rD, -rG, q, -kappa, dir);
    refine(sf, ws, bar, k, -rP, -rD, -rG, q, -kappa, dir);

    double alpha = std::min(1.0, ratio_bound(lay, x, s, tau, kappa, dir));
    bool stepped = false;
    BarrierState trial(lay);
    while (alpha >= kMinAlpha) {
      RVec xn = x + alpha * dir.dx;
      RVec sn = s + alpha * dir.ds;
      double taun = tau + alpha * dir.dtau;
      double kappan = kappa + alpha * dir.dkappa;
      if (taun > 0.0 && kappan > 0.0 && trial.load(xn) && dual_interior(lay, sn)) {
        double mun = (xn.dot(sn) + taun * kappan) / (nu + 1.0);
        double eta = proximity(trial, lay, xn, sn, taun, kappan, mun, psi, hpsi);
        if (eta <= kBetaPred) {
          x = xn;
          s = sn;
          tau = taun;
          kappa = kappan;
          stepped = true;
          break;
        }
      }
      alpha *= kStepShrink;
    }
    if (!stepped) {
      ++stall;
      continue;
    }
    stall = 0;

    // centering correctors
    for (int corr = 0; corr < kMaxCorrectors; ++corr) {
      if (!bar.load(x)) break;
      mu = (x.dot(s) + tau * kappa) / (nu + 1.0);
      double eta = proximity(bar, lay, x, s, tau, kappa, mu, psi, hpsi);
      if (eta <= kBetaCentered) break;
      Kkt kc = factor(sf, ws, bar, mu, tau);
      bar.grad(g);
      RVec qc = -s - mu * g;
      qc.head(lay.n_free) = -s.head(lay.n_free);
      double phic = -kappa + mu / tau;
      Direction cdir;
      RVec zero_n = RVec::Zero(n), zero_m = RVec::Zero(m);
      solve_reduced(sf, ws, bar, kc, zero_m, zero_n, 0.0, qc, phic, cdir);
      refine(sf, ws, bar, kc, zero_m, zero_n, 0.0, qc, phic, cdir);

      double ac = std::min(1.0, ratio_bound(lay, x, s, tau, kappa, cdir));
      bool improved = false;
      while (ac >= kMinAlpha) {
        RVec xn = x + ac * cdir.dx;
        RVec sn = s + ac * cdir.ds;
        double taun = tau + ac * cdir.dtau;
        double kappan = kappa + ac * cdir.dkappa;
        if (taun > 0.0 && kappan > 0.0 && trial.load(xn) && dual_interior(lay, sn)) {
          double mun = (xn.dot(sn) + taun * kappan) / (nu + 1.0);
          double etan = proximity(trial, lay, xn, sn, taun, kappan, mun, psi, hpsi);
          if (etan < eta) {
            x = xn;
            s = sn;
            tau = taun;
            kappa = kappan;
            improved = true;
            break;
          }
        }
        ac *= kStepShrink;
      }
      if (!improved) break;
    }
  }

  best.status = Status::numerical_limit;
  return best;
}

}  // namespace secrsma::conic

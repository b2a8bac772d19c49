#include "secrsma/channels.hpp"

#include <cmath>
#include <stdexcept>

namespace secrsma {

void SystemGeometry::validate() const {
  if (m_antennas < 1) throw std::invalid_argument("m_antennas must be >= 1");
  if (n_elements < 0) throw std::invalid_argument("n_elements must be >= 0");
  if (lu_pos.empty()) throw std::invalid_argument("at least one user required");
}

double pathloss_linear(double distance_m, double exponent, double pl0_db) {
  if (distance_m <= 0.0) throw std::invalid_argument("distance must be positive");
  return db_to_linear(pl0_db) * std::pow(distance_m, -exponent);
}

CVec sample_direct(int dim, double gain, Rng& rng) {
  if (dim < 0) throw std::invalid_argument("negative dimension");
  if (gain < 0.0) throw std::invalid_argument("negative gain");
  CVec out(dim);
  double a = std::sqrt(gain);
  for (int i = 0; i < dim; ++i) out(i) = a * rng.cnormal();
  return out;
}

CVec steering(int count, double angle_rad) {
  CVec out(count);
  double s = std::sin(angle_rad);
  for (int i = 0; i < count; ++i) {
    double phase = M_PI * i * s;
    out(i) = cplx(std::cos(phase), std::sin(phase));
  }
  return out;
}

CMat sample_cascaded_link(int rows, int cols, double gain, double rician_k_db,
                          double rx_angle_rad, double tx_angle_rad, Rng& rng) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("negative dimension");
  if (gain < 0.0) throw std::invalid_argument("negative gain");
  double kappa = db_to_linear(rician_k_db);
  CMat los = steering(rows, rx_angle_rad) * steering(cols, tx_angle_rad).adjoint();
  CMat nlos(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) nlos(i, j) = rng.cnormal();
  double a = std::sqrt(gain);
  return a * (std::sqrt(kappa / (1.0 + kappa)) * los +
              std::sqrt(1.0 / (1.0 + kappa)) * nlos);
}

namespace {

double angle_between(const Eigen::Vector2d& from, const Eigen::Vector2d& to) {
  Eigen::Vector2d d = to - from;
  return std::atan2(d.y(), d.x());
}

}  // namespace

ChannelRealization assemble_channels(const SystemGeometry& geo,
                                     const FadingConfig& fading, Rng& rng,
                                     double noise_dbm) {
  geo.validate();
  const int m = geo.m_antennas;
  const int n = geo.n_elements;
  const int k = geo.k_users();

  ChannelRealization ch;
  ch.h_d.resize(k);
  ch.h_r.resize(k);
  ch.sigma2 = RVec::Constant(k + 1, dbm_to_watt(noise_dbm));

  for (int j = 0; j < k; ++j) {
    double d = (geo.lu_pos[j] - geo.ap_pos).norm();
    ch.h_d[j] = sample_direct(m, pathloss_linear(d, fading.alpha_direct, fading.pl0_db), rng);
  }
  {
    double d = (geo.eve_pos - geo.ap_pos).norm();
    ch.h_de = sample_direct(m, pathloss_linear(d, fading.alpha_direct, fading.pl0_db), rng);
  }

  if (n > 0) {
    double d_ai = (geo.irs_pos - geo.ap_pos).norm();
    double aod = angle_between(geo.ap_pos, geo.irs_pos);
    double aoa = angle_between(geo.irs_pos, geo.ap_pos);
    ch.G = sample_cascaded_link(n, m, pathloss_linear(d_ai, fading.alpha_cascaded, fading.pl0_db),
                                fading.rician_k_db, aoa, aod, rng);
    for (int j = 0; j < k; ++j) {
      double d = (geo.lu_pos[j] - geo.irs_pos).norm();
      double dep = angle_between(geo.irs_pos, geo.lu_pos[j]);
      ch.h_r[j] = sample_cascaded_link(n, 1, pathloss_linear(d, fading.alpha_cascaded, fading.pl0_db),
                                       fading.rician_k_db, dep, 0.0, rng)
                      .col(0);
    }
    double d_ie = (geo.eve_pos - geo.irs_pos).norm();
    double dep = angle_between(geo.irs_pos, geo.eve_pos);
    ch.h_re = sample_cascaded_link(n, 1, pathloss_linear(d_ie, fading.alpha_cascaded, fading.pl0_db),
                                   fading.rician_k_db, dep, 0.0, rng)
                  .col(0);
  } else {
    ch.G = CMat::Zero(0, m);
    for (int j = 0; j < k; ++j) ch.h_r[j] = CVec::Zero(0);
    ch.h_re = CVec::Zero(0);
  }

  ch.Q.resize(k + 1);
  ch.H.resize(k + 1);
  for (int j = 0; j <= k; ++j) {
    const CVec& hr = (j < k) ? ch.h_r[j] : ch.h_re;
    const CVec& hd = (j < k) ? ch.h_d[j] : ch.h_de;
    CMat q(n, m);
    for (int r = 0; r < n; ++r) q.row(r) = std::conj(hr(r)) * ch.G.row(r);
    ch.Q[j] = q;
    CMat h(n + 1, m);
    h.topRows(n) = q;
    h.row(n) = hd.adjoint();
    ch.H[j] = h;
  }
  return ch;
}

CRow effective_row(const CMat& H_j, const CVec& v) {
  if (v.size() != H_j.rows())
    throw std::invalid_argument("phase vector length must match stacked channel rows");
  return v.adjoint() * H_j;
}

ChannelRealization truncate_to_direct(const ChannelRealization& ch) {
  ChannelRealization out;
  const int m = ch.m();
  const int k = ch.k();
  out.G = CMat::Zero(0, m);
  out.h_d = ch.h_d;
  out.h_de = ch.h_de;
  out.h_r.assign(k, CVec::Zero(0));
  out.h_re = CVec::Zero(0);
  out.sigma2 = ch.sigma2;
  out.Q.resize(k + 1);
  out.H.resize(k + 1);
  for (int j = 0; j <= k; ++j) {
    out.Q[j] = CMat::Zero(0, m);
    CMat h(1, m);
    h.row(0) = ((j < k) ? ch.h_d[j] : ch.h_de).adjoint();
    out.H[j] = h;
  }
  return out;
}

}  // namespace secrsma

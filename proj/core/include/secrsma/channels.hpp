#pragma once

#include <vector>

#include "secrsma/rng.hpp"
#include "secrsma/types.hpp"

namespace secrsma {

/// Node placement on the 2D ground plane plus array sizes. N = 0 models a
/// deployment without the reflecting surface.
struct SystemGeometry {
  Eigen::Vector2d ap_pos{0.0, 0.0};
  Eigen::Vector2d irs_pos{50.0, 0.0};
  Eigen::Vector2d eve_pos{45.0, 0.0};
  std::vector<Eigen::Vector2d> lu_pos;
  int m_antennas = 2;
  int n_elements = 0;

  int k_users() const { return static_cast<int>(lu_pos.size()); }
  void validate() const;
};

struct FadingConfig {
  double pl0_db = -30.0;
  double alpha_direct = 3.5;
  double alpha_cascaded = 2.2;
  double rician_k_db = 3.0;
  std::uint64_t seed = 1;
};

/// One draw of every link. Receivers are indexed 0..K-1 for the legitimate
/// users and K for the eavesdropper throughout the library.
struct ChannelRealization {
  CMat G;                 // N x M, AP to surface
  std::vector<CVec> h_d;  // direct AP to user, length M each
  CVec h_de;              // direct AP to eavesdropper
  std::vector<CVec> h_r;  // surface to user, length N each
  CVec h_re;              // surface to eavesdropper
  std::vector<CMat> Q;    // cascaded diag(h_r^H) G per receiver, N x M
  std::vector<CMat> H;    // stacked [Q; h_d^H] per receiver, (N+1) x M
  RVec sigma2;            // noise power per receiver, watts

  int m() const { return h_d.empty() ? 0 : static_cast<int>(h_d[0].size()); }
  int n() const { return static_cast<int>(G.rows()); }
  int k() const { return static_cast<int>(h_d.size()); }
  int eve() const { return k(); }

  const CMat& H_of(int receiver) const { return H.at(receiver); }
  double sigma2_of(int receiver) const { return sigma2(receiver); }
};

/// pl0 * d^(-alpha) with pl0 the linear gain at 1 m.
double pathloss_linear(double distance_m, double exponent, double pl0_db);

/// Rayleigh vector with per-entry variance `gain`.
CVec sample_direct(int dim, double gain, Rng& rng);

/// Half wavelength ULA response, entries exp(j pi i sin(angle)).
CVec steering(int count, double angle_rad);

/// Rician block with a rank-one line of sight component built from the
/// receive and transmit steering vectors, scaled so E[|entry|^2] = gain.
CMat sample_cascaded_link(int rows, int cols, double gain, double rician_k_db,
                          double rx_angle_rad, double tx_angle_rad, Rng& rng);

/// Draws every link for the given deployment. Draw order is fixed so a seed
/// pins the full realization. Noise power defaults to -80 dBm per receiver.
ChannelRealization assemble_channels(const SystemGeometry& geo,
                                     const FadingConfig& fading, Rng& rng,
                                     double noise_dbm = -80.0);

/// Row vector v^H H_j seen after the surface applies the phases encoded in v.
CRow effective_row(const CMat& H_j, const CVec& v);

/// Drops the reflected path, keeping only the direct row (N becomes 0).
ChannelRealization truncate_to_direct(const ChannelRealization& ch);

}  // namespace secrsma

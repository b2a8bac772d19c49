#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>

namespace secrsma {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using CRow = Eigen::RowVectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

/// Tolerances shared by validation helpers and property checks.
struct Numerics {
  double eq_tol = 1e-9;
  double feas_tol = 1e-6;
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }
inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watt_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

inline double log2_safe(double x) { return std::log2(x); }

/// Symmetric part of a nominally Hermitian matrix. Relative asymmetry of the
/// input can be queried separately to detect upstream mistakes.
inline CMat hermitize(const CMat& x) { return 0.5 * (x + x.adjoint()); }

inline double hermitian_asymmetry(const CMat& x) {
  double n = x.norm();
  if (n == 0.0) return 0.0;
  return (x - x.adjoint()).norm() / (2.0 * n);
}

/// Real inner product tr(A B) of two Hermitian matrices.
inline double herm_inner(const CMat& a, const CMat& b) {
  return (a.cwiseProduct(b.transpose())).sum().real();
}

}  // namespace secrsma

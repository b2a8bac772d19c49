#pragma once

#include <map>

#include "secrsma/types.hpp"

namespace secrsma::conic {

/// Real affine expression over scalar variables and Hermitian matrix
/// variables: constant + sum coef_s x_s + sum tr(C_h X_h). Coefficient
/// matrices must be Hermitian so every trace term is real.
struct RealExpr {
  double constant = 0.0;
  std::map<int, double> scalars;
  std::map<int, CMat> matrices;

  static RealExpr lit(double v) {
    RealExpr e;
    e.constant = v;
    return e;
  }
  static RealExpr var(int scalar_id, double coef = 1.0) {
    RealExpr e;
    e.scalars[scalar_id] = coef;
    return e;
  }
  static RealExpr trace_term(int herm_id, CMat coef) {
    RealExpr e;
    e.matrices[herm_id] = std::move(coef);
    return e;
  }

  RealExpr& operator+=(const RealExpr& o) {
    constant += o.constant;
    for (const auto& [id, c] : o.scalars) scalars[id] += c;
    for (const auto& [id, c] : o.matrices) {
      auto it = matrices.find(id);
      if (it == matrices.end())
        matrices[id] = c;
      else
        it->second += c;
    }
    return *this;
  }
  RealExpr& operator-=(const RealExpr& o) {
    *this += o * -1.0;
    return *this;
  }
  RealExpr& operator*=(double a) {
    constant *= a;
    for (auto& [id, c] : scalars) c *= a;
    for (auto& [id, c] : matrices) c *= a;
    return *this;
  }
  friend RealExpr operator*(const RealExpr& e, double a) {
    RealExpr r = e;
    r *= a;
    return r;
  }
  friend RealExpr operator*(double a, const RealExpr& e) { return e * a; }
  friend RealExpr operator+(RealExpr a, const RealExpr& b) {
    a += b;
    return a;
  }
  friend RealExpr operator-(RealExpr a, const RealExpr& b) {
    a -= b;
    return a;
  }
};

/// Hermitian matrix valued affine expression:
/// constant + sum x_s B_s + sum a_h X_h.
struct HermExpr {
  int dim = 0;
  CMat constant;
  std::map<int, CMat> scalar_terms;  // scalar var id -> Hermitian B
  std::map<int, double> herm_terms;  // herm var id -> real multiplier

  static HermExpr of_var(int herm_id, int dim, double coef = 1.0) {
    HermExpr e;
    e.dim = dim;
    e.constant = CMat::Zero(dim, dim);
    e.herm_terms[herm_id] = coef;
    return e;
  }
  static HermExpr of_const(CMat c) {
    HermExpr e;
    e.dim = static_cast<int>(c.rows());
    e.constant = std::move(c);
    return e;
  }

  HermExpr& operator+=(const HermExpr& o) {
    constant += o.constant;
    for (const auto& [id, c] : o.scalar_terms) {
      auto it = scalar_terms.find(id);
      if (it == scalar_terms.end())
        scalar_terms[id] = c;
      else
        it->second += c;
    }
    for (const auto& [id, a] : o.herm_terms) herm_terms[id] += a;
    return *this;
  }
  HermExpr& operator*=(double a) {
    constant *= a;
    for (auto& [id, c] : scalar_terms) c *= a;
    for (auto& [id, v] : herm_terms) v *= a;
    return *this;
  }
  friend HermExpr operator-(HermExpr a, const HermExpr& b) {
    HermExpr nb = b;
    nb *= -1.0;
    a += nb;
    return a;
  }
  friend HermExpr operator+(HermExpr a, const HermExpr& b) {
    a += b;
    return a;
  }
};

}  // namespace secrsma::conic

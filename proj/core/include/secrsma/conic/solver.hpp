#pragma once

#include <vector>

#include "secrsma/types.hpp"

namespace secrsma::conic {

enum class Status { optimal, infeasible, unbounded, numerical_limit };
const char* status_name(Status s);

/// Parameter vector layout: [ free | nonneg | Hermitian PSD blocks | exp
/// triples ]. Hermitian blocks are stored through the isometric svec map
/// (diagonal first, then sqrt(2) Re / sqrt(2) Im of the upper triangle
/// column by column) so the flat Euclidean inner product equals tr(XY).
struct ConeLayout {
  int n_free = 0;
  int n_nonneg = 0;
  std::vector<int> herm_dims;
  int n_exp = 0;

  int herm_params() const {
    int s = 0;
    for (int d : herm_dims) s += d * d;
    return s;
  }
  int total() const { return n_free + n_nonneg + herm_params() + 3 * n_exp; }
  int nonneg_offset() const { return n_free; }
  int herm_offset(int block) const {
    int off = n_free + n_nonneg;
    for (int b = 0; b < block; ++b) off += herm_dims[b] * herm_dims[b];
    return off;
  }
  int exp_offset(int triple) const {
    return n_free + n_nonneg + herm_params() + 3 * triple;
  }
  double barrier_nu() const {
    double nu = n_nonneg + 3.0 * n_exp;
    for (int d : herm_dims) nu += d;
    return nu;
  }
};

/// min c.x  s.t.  A x = b,  x in K(layout).
struct StandardForm {
  ConeLayout cones;
  RMat A;
  RVec b;
  RVec c;
};

struct IpmOptions {
  double tol = 1e-8;
  int max_iters = 400;
  int verbosity = 0;
};

struct IpmResult {
  Status status = Status::numerical_limit;
  RVec x, y, s;  // de-homogenized when status == optimal, raw ray otherwise
  double pobj = 0.0, dobj = 0.0;
  double primal_res = 0.0, dual_res = 0.0, rel_gap = 0.0;
  int iters = 0;
};

/// Homogeneous self-dual predictor-corrector interior point method over the
/// nonnegative orthant, complex Hermitian PSD cones, and exponential cones.
IpmResult solve_standard_form(const StandardForm& sf, const IpmOptions& opt = {});

void svec_into(const CMat& X, double* out);
RVec svec(const CMat& X);
CMat unsvec(const double* p, int d);

}  // namespace secrsma::conic

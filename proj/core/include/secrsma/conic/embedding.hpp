#pragma once

#include <stdexcept>

#include "secrsma/types.hpp"

namespace secrsma::conic {

/// Real symmetric embedding [[Re H, -Im H], [Im H, Re H]] of a Hermitian
/// matrix. Eigenvalues of the embedding are those of H, each doubled in
/// multiplicity, so PSD-ness is preserved. The solver itself works on
/// Hermitian blocks natively; this map exists as a documented bridge for
/// offline cross-checking against real-only SDP tooling.
inline RMat hermitian_embedding(const CMat& h) {
  if (h.rows() != h.cols()) throw std::invalid_argument("matrix must be square");
  const auto n = h.rows();
  RMat out(2 * n, 2 * n);
  out.topLeftCorner(n, n) = h.real();
  out.topRightCorner(n, n) = -h.imag();
  out.bottomLeftCorner(n, n) = h.imag();
  out.bottomRightCorner(n, n) = h.real();
  return out;
}

}  // namespace secrsma::conic

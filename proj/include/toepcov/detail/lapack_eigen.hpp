#pragma once

// Largest-magnitude eigenvalue of real symmetric matrices through LAPACK.
// Both routes reduce to tridiagonal form and run the root-free QL/QR
// iteration (dsterf), so the result is exact to rounding.

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "toepcov/error.hpp"

namespace toepcov::detail {

inline double max_abs_of_sorted(const std::vector<double>& ascending) {
  return std::max(std::abs(ascending.front()), std::abs(ascending.back()));
}

/// `a` holds a full p×p symmetric matrix (row or column major, it is symmetric);
/// it is overwritten.
inline double max_abs_eigenvalue_dense(std::vector<double>& a, std::size_t p) {
  if (p == 1) return std::abs(a[0]);
  const auto n = static_cast<lapack_int>(p);
  std::vector<double> diag(p), off(p - 1), tau(p - 1);
  lapack_int info =
      LAPACKE_dsytrd(LAPACK_COL_MAJOR, 'L', n, a.data(), n, diag.data(), off.data(), tau.data());
  if (info != 0) throw Error(ErrorCode::NonConverged, "dsytrd failed, info=" + std::to_string(info));
  info = LAPACKE_dsterf(n, diag.data(), off.data());
  if (info != 0) throw Error(ErrorCode::NonConverged, "dsterf failed, info=" + std::to_string(info));
  return max_abs_of_sorted(diag);
}

/// Symmetric Toeplitz matrix with first row `row` whose entries vanish beyond
/// lag `bandwidth`.
inline double max_abs_eigenvalue_banded_toeplitz(std::span<const double> row, std::size_t bandwidth) {
  const std::size_t p = row.size();
  const std::size_t ld = bandwidth + 1;
  // Column-major lower band storage: ab[d + j*ld] = A(j+d, j).
  std::vector<double> ab(ld * p, 0.0);
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t d = 0; d <= bandwidth && j + d < p; ++d) ab[d + j * ld] = row[d];
  }
  std::vector<double> w(p);
  double unused = 0.0;
  const lapack_int info =
      LAPACKE_dsbev(LAPACK_COL_MAJOR, 'N', 'L', static_cast<lapack_int>(p),
                    static_cast<lapack_int>(bandwidth), ab.data(), static_cast<lapack_int>(ld),
                    w.data(), &unused, 1);
  if (info != 0) throw Error(ErrorCode::NonConverged, "dsbev failed, info=" + std::to_string(info));
  return max_abs_of_sorted(w);
}

}  // namespace toepcov::detail

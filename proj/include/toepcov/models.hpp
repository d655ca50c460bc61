#pragma once

// Dimension-free covariance descriptions used by `gen-cov` and sweep configs.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "toepcov/bounds.hpp"
#include "toepcov/error.hpp"
#include "toepcov/toeplitz.hpp"

namespace toepcov {

/// s_0 = 1 and s_r = amplitude (1 - r / (max S + 1)) for r in S \ {0}.
/// s_0 is raised if needed so that f >= 0 on the 4p and circulant grids; for
/// S = {0, ..., q} the density is a Fejér kernel and no shift happens.
inline ToeplitzMatrix sparse_cov(std::size_t p, std::vector<std::size_t> support, double amplitude = 1.0) {
  if (p < 1) throw Error(ErrorCode::BadParams, "p must be >= 1");
  if (!(amplitude > 0.0) || !std::isfinite(amplitude)) throw Error(ErrorCode::BadParams, "amplitude must be positive");
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());
  if (!support.empty() && support.back() >= p) throw Error(ErrorCode::BadParams, "support index out of range");
  const double top = support.empty() ? 1.0 : static_cast<double>(support.back() + 1);
  std::vector<double> row(p, 0.0);
  row[0] = 1.0;
  for (std::size_t r : support) {
    if (r > 0) row[r] = amplitude * (1.0 - static_cast<double>(r) / top);
  }
  ToeplitzMatrix t(row);
  double low = 0.0;
  for (GridKind kind : {GridKind::FourP, GridKind::Circulant}) {
    const auto g = density_grid(t, kind);
    low = std::min(low, *std::min_element(g.values.begin(), g.values.end()));
  }
  if (low < 0.0) {
    row[0] -= low;
    t = ToeplitzMatrix(std::move(row));
  }
  return t;
}

struct CovarianceModel {
  enum class Kind { Identity, Geometric, Polynomial, Sparse, Explicit };

  Kind kind = Kind::Identity;
  double rho = 0.5;
  double beta = 1.0;
  double L0 = 1e300;  ///< no cap unless given
  double L = 1.0;
  double amplitude = 1.0;
  std::vector<std::size_t> support;
  std::optional<ToeplitzMatrix> matrix;

  ToeplitzMatrix build(std::size_t p) const {
    switch (kind) {
      case Kind::Identity: return ToeplitzMatrix::identity(p);
      case Kind::Geometric:
      case Kind::Polynomial: {
        DecayModel d;
        d.kind = kind == Kind::Geometric ? DecayModel::Kind::Geometric : DecayModel::Kind::Polynomial;
        d.rho = rho;
        d.amplitude = amplitude;
        return smooth_class_cov(p, SmoothnessParams{beta, L0, L}, d);
      }
      case Kind::Sparse: return sparse_cov(p, support, amplitude);
      case Kind::Explicit:
        if (!matrix || matrix->size() != p) {
          throw Error(ErrorCode::DimensionMismatch, "explicit covariance does not have p=" + std::to_string(p));
        }
        return *matrix;
    }
    throw Error(ErrorCode::BadParams, "unknown covariance model");
  }
};

}  // namespace toepcov

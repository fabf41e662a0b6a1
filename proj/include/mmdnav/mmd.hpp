#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "mmdnav/vo.hpp"

namespace mmdnav {

struct KernelConfig {
  double gamma = 0.1;  // RBF bandwidth over violation values, 1/m^4
};

/// Weights b of the Dirac-Delta embedding. Only their sum enters the MMD.
class DeltaWeights {
 public:
  explicit DeltaWeights(std::vector<double> b);
  static DeltaWeights uniform(std::size_t n);

  const std::vector<double>& values() const { return b_; }
  double total() const;

 private:
  std::vector<double> b_;
};

inline double rbf(double c1, double c2, double gamma) {
  const double d = c1 - c2;
  return std::exp(-gamma * d * d);
}

/**
 * Squared MMD between the weighted violation samples and a point mass at zero,
 * M_cc - 2 M_c0 + M_00, evaluated through kernel matrices:
 *
 *   M_cc = a^T K_cc a        (upper triangle of K_cc only)
 *   M_c0 = (a^T kappa) sum(b) kappa_p = k(h_p, 0); every column of K_c0 is kappa
 *   M_00 = sum(b)^2          K_00 is all ones
 *
 * Entries with h_p == 0 share the row kappa of K_cc, so they are merged into a
 * single weight before the O(N^2) pass. Weights a are normalized to sum to one.
 */
double mmd_cost(std::span<const double> h, std::span<const double> a, const DeltaWeights& delta,
                const KernelConfig& kernel);

double mmd_cost(const ViolationVector& viol, const DeltaWeights& delta, const KernelConfig& kernel);

/// Uniform Dirac weights sized to the violation vector.
double mmd_cost(const ViolationVector& viol, const KernelConfig& kernel);

/**
 * Same quantity as mmd_cost, with a^T K_cc a expanded around the midpoint c of
 * the violation range, d_p = h_p - c:
 *
 *   k(h_p, h_q) = g_p g_q exp(2 gamma d_p d_q),  g_p = exp(-gamma d_p^2)
 *   a^T K_cc a  = sum_k (2 gamma)^k / k! (sum_p a_p g_p d_p^k)^2
 *
 * All series terms are non-negative; the sum is truncated once the remaining
 * tail is below 1e-18. Costs O(N * terms) instead of O(N^2). Falls back to
 * mmd_cost when gamma * (range / 2)^2 > kSeriesLimit.
 */
double mmd_cost_series(std::span<const double> h, std::span<const double> a, const DeltaWeights& delta,
                       const KernelConfig& kernel);

inline constexpr double kSeriesLimit = 50.0;

/// Reference evaluation as explicit double sums of inner products. Test oracle, O(N^2) with no shortcuts.
double mmd_direct(std::span<const double> h, std::span<const double> a, const DeltaWeights& delta,
                  const KernelConfig& kernel);

double mmd_direct(const ViolationVector& viol, const DeltaWeights& delta, const KernelConfig& kernel);

}  // namespace mmdnav

#include "mmdnav/mmd.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace mmdnav {
namespace {

void check_inputs(std::span<const double> h, std::span<const double> a, const KernelConfig& kernel) {
  if (h.size() != a.size()) throw std::invalid_argument("violation values and weights differ in length");
  if (!(kernel.gamma > 0.0)) throw std::invalid_argument("kernel gamma must be positive");
}

double weight_total(std::span<const double> a) {
  double total = 0.0;
  for (double w : a) {
    if (!(w >= 0.0)) throw std::invalid_argument("violation weights must be non-negative");
    total += w;
  }
  if (!(total > 0.0)) throw std::invalid_argument("violation weights sum to zero");
  return total;
}

}  // namespace

DeltaWeights::DeltaWeights(std::vector<double> b) : b_(std::move(b)) {
  if (b_.empty()) throw std::invalid_argument("delta weights must not be empty");
  for (double w : b_)
    if (!(w >= 0.0)) throw std::invalid_argument("delta weights must be non-negative");
  if (std::abs(total() - 1.0) > 1e-9) throw std::invalid_argument("delta weights must sum to 1");
}

DeltaWeights DeltaWeights::uniform(std::size_t n) {
  if (n == 0) throw std::invalid_argument("delta weights need at least one entry");
  return DeltaWeights(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

double DeltaWeights::total() const { return std::accumulate(b_.begin(), b_.end(), 0.0); }

double mmd_cost(std::span<const double> h, std::span<const double> a, const DeltaWeights& delta,
                const KernelConfig& kernel) {
  check_inputs(h, a, kernel);
  if (h.empty()) throw std::invalid_argument("mmd_cost: empty violation vector");
  const double a_total = weight_total(a);
  const double b_total = delta.total();
  const double gamma = kernel.gamma;

  // Zero violations collapse to one sample at the Dirac location.
  double zero_mass = 0.0;
  thread_local std::vector<double> hv;
  thread_local std::vector<double> av;
  hv.clear();
  av.clear();
  for (std::size_t p = 0; p < h.size(); ++p) {
    const double w = a[p] / a_total;
    if (h[p] == 0.0) {
      zero_mass += w;
    } else {
      hv.push_back(h[p]);
      av.push_back(w);
    }
  }

  const auto m = static_cast<Eigen::Index>(hv.size());
  if (m == 0) return 0.0;  // the violation samples are the Dirac itself
  const Eigen::Map<const Eigen::ArrayXd> hs(hv.data(), m);
  const Eigen::Map<const Eigen::ArrayXd> as(av.data(), m);

  // kappa_p = k(h_p, 0)
  const Eigen::ArrayXd kappa = (-gamma * hs.square()).exp();
  const double a_kappa = (as * kappa).sum();

  // a^T K_cc a over the upper triangle: diagonal (k = 1) plus twice the strict upper part.
  double upper = 0.0;
  for (Eigen::Index p = 0; p + 1 < m; ++p) {
    const Eigen::Index len = m - p - 1;
    const auto row = (-gamma * (hs.tail(len) - hs(p)).square()).exp();
    upper += as(p) * (as.tail(len) * row).sum();
  }
  const double m_cc = zero_mass * zero_mass + 2.0 * zero_mass * a_kappa + as.square().sum() + 2.0 * upper;
  const double m_c0 = (zero_mass + a_kappa) * b_total;
  const double m_00 = b_total * b_total;
  return m_cc - 2.0 * m_c0 + m_00;
}

double mmd_cost_series(std::span<const double> h, std::span<const double> a, const DeltaWeights& delta,
                       const KernelConfig& kernel) {
  check_inputs(h, a, kernel);
  if (h.empty()) throw std::invalid_argument("mmd_cost_series: empty violation vector");
  const double gamma = kernel.gamma;
  const double a_total = weight_total(a);
  const double b_total = delta.total();

  double zero_mass = 0.0;
  thread_local std::vector<double> hv;
  thread_local std::vector<double> av;
  hv.clear();
  av.clear();
  for (std::size_t p = 0; p < h.size(); ++p) {
    const double w = a[p] / a_total;
    if (h[p] == 0.0) {
      zero_mass += w;
    } else {
      hv.push_back(h[p]);
      av.push_back(w);
    }
  }
  if (hv.empty()) return 0.0;  // the violation samples are the Dirac itself

  const auto n = static_cast<Eigen::Index>(hv.size());
  const Eigen::Map<const Eigen::ArrayXd> hs(hv.data(), n);
  const Eigen::Map<const Eigen::ArrayXd> as(av.data(), n);
  const double a_kappa = zero_mass + (as * (-gamma * hs.square()).exp()).sum();

  double lo = hs.minCoeff();
  double hi = hs.maxCoeff();
  if (zero_mass > 0.0) {
    lo = std::min(lo, 0.0);
    hi = std::max(hi, 0.0);
  }
  const double center = 0.5 * (lo + hi);
  const double half_range = 0.5 * (hi - lo);
  if (gamma * half_range * half_range > kSeriesLimit) return mmd_cost(h, a, delta, kernel);

  // With d_p = h_p - c, k(h_p, h_q) = g_p g_q exp(2 gamma d_p d_q) and g_p = exp(-gamma d_p^2).
  // u_p,k = a_p g_p (sqrt(2 gamma) d_p)^k / sqrt(k!), so term k is (sum_p u_p,k)^2.
  const Eigen::ArrayXd d = hs - center;
  Eigen::ArrayXd us = as * (-gamma * d.square()).exp();
  const Eigen::ArrayXd steps = std::sqrt(2.0 * gamma) * d;
  const double d0 = -center;  // merged zero entries
  double u0 = zero_mass * std::exp(-gamma * d0 * d0);
  const double step0 = std::sqrt(2.0 * gamma) * d0;

  double s = us.sum() + u0;
  double m_cc = s * s;
  // Term k is at most x^k / k! because |d_p| <= half_range and the weights sum to one.
  const double x = 2.0 * gamma * half_range * half_range;
  double bound = 1.0;
  constexpr int kMaxTerms = 1000;
  for (int k = 1; k <= kMaxTerms; ++k) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(k));
    us *= steps * scale;
    u0 *= step0 * scale;
    s = us.sum() + u0;
    m_cc += s * s;
    // Remaining tail is below bound_{k+1} / (1 - ratio) <= 2 bound_{k+1} once ratio <= 1/2.
    const double ratio = x / static_cast<double>(k + 1);
    bound *= ratio;
    if (ratio <= 0.5 && 2.0 * bound <= 1e-18) break;
  }
  const double m_c0 = a_kappa * b_total;
  const double m_00 = b_total * b_total;
  return m_cc - 2.0 * m_c0 + m_00;
}

double mmd_cost(const ViolationVector& viol, const DeltaWeights& delta, const KernelConfig& kernel) {
  return mmd_cost(viol.h, viol.weights, delta, kernel);
}

double mmd_cost(const ViolationVector& viol, const KernelConfig& kernel) {
  return mmd_cost(viol, DeltaWeights::uniform(viol.size()), kernel);
}

double mmd_direct(std::span<const double> h, std::span<const double> a, const DeltaWeights& delta,
                  const KernelConfig& kernel) {
  check_inputs(h, a, kernel);
  if (h.empty()) throw std::invalid_argument("mmd_direct: empty violation vector");
  const double a_total = weight_total(a);
  const auto& b = delta.values();
  const double gamma = kernel.gamma;
  // identical embeddings; the sums below would leave a rounding residue
  if (std::all_of(h.begin(), h.end(), [](double x) { return x == 0.0; })) return 0.0;

  // <mu_h, mu_h>
  double m_cc = 0.0;
  for (std::size_t p = 0; p < h.size(); ++p)
    for (std::size_t q = 0; q < h.size(); ++q) m_cc += (a[p] / a_total) * (a[q] / a_total) * rbf(h[p], h[q], gamma);

  // <mu_h, mu_delta>, Dirac samples all at zero
  double m_c0 = 0.0;
  for (std::size_t p = 0; p < h.size(); ++p)
    for (double bq : b) m_c0 += (a[p] / a_total) * bq * rbf(h[p], 0.0, gamma);

  // <mu_delta, mu_delta>
  double m_00 = 0.0;
  for (double bq : b)
    for (double br : b) m_00 += bq * br * rbf(0.0, 0.0, gamma);

  return m_cc - 2.0 * m_c0 + m_00;
}

double mmd_direct(const ViolationVector& viol, const DeltaWeights& delta, const KernelConfig& kernel) {
  return mmd_direct(viol.h, viol.weights, delta, kernel);
}

}  // namespace mmdnav

#include "mmdnav/noise.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "mmdnav/errors.hpp"

namespace mmdnav {
namespace {

constexpr double kWeightTolerance = 1e-9;
constexpr double kPsdTolerance = -1e-12;

// Symmetric square root; tolerates singular (e.g. zero) covariances.
Eigen::Matrix2d psd_sqrt(const Eigen::Matrix2d& cov) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(cov);
  const Eigen::Vector2d root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace

MixtureModel::MixtureModel(std::vector<MixtureComponent> components) : components_(std::move(components)) {
  if (components_.empty()) throw ConfigError("mixture model needs at least one component");
  double total = 0.0;
  for (std::size_t i = 0; i < components_.size(); ++i) {
    const auto& c = components_[i];
    const std::string tag = "mixture component " + std::to_string(i);
    if (!std::isfinite(c.weight) || c.weight < 0.0 || c.weight > 1.0)
      throw ConfigError(tag + ": weight must lie in [0, 1]");
    if (!c.mean.allFinite() || !c.covariance.allFinite()) throw ConfigError(tag + ": non-finite parameters");
    if (std::abs(c.covariance(0, 1) - c.covariance(1, 0)) > 1e-12) throw ConfigError(tag + ": covariance not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(c.covariance, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < kPsdTolerance) throw ConfigError(tag + ": covariance not positive semi-definite");
    total += c.weight;
  }
  if (std::abs(total - 1.0) > kWeightTolerance)
    throw ConfigError("mixture weights sum to " + std::to_string(total) + ", expected 1");
}

MixtureModel MixtureModel::point_mass(const Eigen::Vector2d& at) {
  return MixtureModel({MixtureComponent{1.0, at, Eigen::Matrix2d::Zero()}});
}

MixtureModel MixtureModel::gaussian(const Eigen::Vector2d& mean, const Eigen::Matrix2d& covariance) {
  return MixtureModel({MixtureComponent{1.0, mean, covariance}});
}

Eigen::Vector2d MixtureModel::mean() const {
  Eigen::Vector2d m = Eigen::Vector2d::Zero();
  for (const auto& c : components_) m += c.weight * c.mean;
  return m;
}

Eigen::Matrix2d MixtureModel::covariance() const {
  const Eigen::Vector2d m = mean();
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  for (const auto& c : components_) {
    const Eigen::Vector2d d = c.mean - m;
    cov += c.weight * (c.covariance + d * d.transpose());
  }
  return cov;
}

SampleSet::SampleSet(Eigen::MatrixXd samples) : samples_(std::move(samples)) {
  if (samples_.rows() < 1) throw std::invalid_argument("sample set needs at least one sample");
  if (!samples_.allFinite()) throw std::invalid_argument("sample set contains non-finite entries");
}

SampleSet sample_mixture(const MixtureModel& model, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_mixture: n must be >= 1");
  const auto& comps = model.components();

  std::vector<double> weights;
  std::vector<Eigen::Matrix2d> roots;
  weights.reserve(comps.size());
  roots.reserve(comps.size());
  for (const auto& c : comps) {
    weights.push_back(c.weight);
    roots.push_back(psd_sqrt(c.covariance));
  }

  std::mt19937_64 gen(seed);
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  std::normal_distribution<double> normal(0.0, 1.0);

  Eigen::MatrixXd out(static_cast<Eigen::Index>(n), 2);
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const std::size_t k = comps.size() == 1 ? 0 : pick(gen);
    Eigen::Vector2d z;
    z(0) = normal(gen);
    z(1) = normal(gen);
    out.row(i) = (comps[k].mean + roots[k] * z).transpose();
  }
  return SampleSet(std::move(out));
}

MixtureModel gaussian_approximation(const SampleSet& samples) {
  if (samples.count() < 2) throw InsufficientDataError("gaussian_approximation needs at least 2 samples");
  if (samples.dim() < 2) throw std::invalid_argument("gaussian_approximation expects 2-D samples");
  const Eigen::MatrixXd x = samples.matrix().leftCols(2);
  const Eigen::Vector2d mean = x.colwise().mean().transpose();
  const Eigen::MatrixXd centered = x.rowwise() - mean.transpose();
  Eigen::Matrix2d cov = (centered.transpose() * centered) / static_cast<double>(samples.count());
  cov(0, 1) = cov(1, 0) = 0.5 * (cov(0, 1) + cov(1, 0));
  return MixtureModel::gaussian(mean, cov);
}

MixtureModel bias_sweep_model(int k, const BiasSweepParams& params) {
  if (k < 1 || k > 8) throw std::invalid_argument("bias_sweep_model: k must be in 1..8, got " + std::to_string(k));
  const double step = static_cast<double>(k - 1);
  const double tail_weight = params.weight_per_step * step;
  const Eigen::Matrix2d base_cov = params.base_sigma * params.base_sigma * Eigen::Matrix2d::Identity();
  if (k == 1) return MixtureModel::gaussian(Eigen::Vector2d::Zero(), base_cov);
  const Eigen::Matrix2d tail_cov = params.tail_sigma * params.tail_sigma * Eigen::Matrix2d::Identity();
  return MixtureModel({
      MixtureComponent{1.0 - tail_weight, Eigen::Vector2d::Zero(), base_cov},
      MixtureComponent{tail_weight, Eigen::Vector2d(params.offset_per_step * step, 0.0), tail_cov},
  });
}

}  // namespace mmdnav

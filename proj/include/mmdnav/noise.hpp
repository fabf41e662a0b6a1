#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace mmdnav {

struct MixtureComponent {
  double weight = 1.0;
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  Eigen::Matrix2d covariance = Eigen::Matrix2d::Zero();
};

/**
 * Finite mixture of 2-D Gaussians used as a non-parametric noise source.
 *
 * Components are validated on construction: weights in [0, 1] summing to one
 * within 1e-9, covariances symmetric and positive semi-definite (eigenvalues
 * no smaller than -1e-12). Violations throw ConfigError, so every existing
 * MixtureModel is valid.
 */
class MixtureModel {
 public:
  explicit MixtureModel(std::vector<MixtureComponent> components);

  static MixtureModel point_mass(const Eigen::Vector2d& at = Eigen::Vector2d::Zero());
  static MixtureModel gaussian(const Eigen::Vector2d& mean, const Eigen::Matrix2d& covariance);

  const std::vector<MixtureComponent>& components() const { return components_; }
  std::size_t size() const { return components_.size(); }

  Eigen::Vector2d mean() const;
  Eigen::Matrix2d covariance() const;

 private:
  std::vector<MixtureComponent> components_;
};

/// n x d matrix of i.i.d. samples, one sample per row. All entries finite, n >= 1.
class SampleSet {
 public:
  SampleSet() = default;
  explicit SampleSet(Eigen::MatrixXd samples);

  const Eigen::MatrixXd& matrix() const { return samples_; }
  std::size_t count() const { return static_cast<std::size_t>(samples_.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(samples_.cols()); }
  double operator()(std::size_t i, std::size_t j) const { return samples_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)); }

 private:
  Eigen::MatrixXd samples_;
};

/// Draws n i.i.d. samples. Deterministic for a fixed seed.
SampleSet sample_mixture(const MixtureModel& model, std::size_t n, std::uint64_t seed);

/// Moment-matched single Gaussian (ML covariance, divisor n) of the first two columns.
MixtureModel gaussian_approximation(const SampleSet& samples);

/// Parameters of the Gaussian-to-bimodal noise family indexed by k = 1..8.
struct BiasSweepParams {
  double base_sigma = 0.05;      // component A standard deviation, m
  double tail_sigma = 0.08;      // component B standard deviation, m
  double offset_per_step = 0.12; // component B mean x-offset per unit of (k-1), m
  double weight_per_step = 0.06; // component B weight per unit of (k-1)
};

/// k = 1 is a single Gaussian; increasing k shifts weight into a biased second mode along +x.
MixtureModel bias_sweep_model(int k, const BiasSweepParams& params = {});

}  // namespace mmdnav

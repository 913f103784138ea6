#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "autostroke/image.hpp"

namespace autostroke {

/// Full-covariance Gaussian mixture over normalized Lab colors.
class ColorGmm {
 public:
  static constexpr double kCovarianceFloor = 1e-5;

  explicit ColorGmm(int components = 5) : k_(components) {}

  int components() const { return static_cast<int>(weights_.size()); }
  bool trained() const { return !weights_.empty(); }

  /// Deterministic k-means initialization (farthest-point seeding) followed
  /// by Lloyd iterations, then one maximum-likelihood fit per cluster.
  void fit_kmeans(std::span<const Lab> samples, int lloyd_iterations = 10) {
    if (samples.empty()) return;
    std::vector<Eigen::Vector3d> centers;
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (const auto& s : samples) mean += as_vec(s);
    mean /= static_cast<double>(samples.size());
    // first center: sample closest to the mean
    centers.push_back(as_vec(samples[nearest_index(samples, mean)]));
    std::vector<double> dmin(samples.size(), std::numeric_limits<double>::infinity());
    while (static_cast<int>(centers.size()) < k_) {
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < samples.size(); ++i) {
        dmin[i] = std::min(dmin[i], (as_vec(samples[i]) - centers.back()).squaredNorm());
        if (dmin[i] > far_d) { far_d = dmin[i]; far = i; }
      }
      if (far_d <= 0.0) break;  // fewer distinct colors than components
      centers.push_back(as_vec(samples[far]));
    }
    std::vector<int> assign(samples.size(), 0);
    for (int it = 0; it < lloyd_iterations; ++it) {
      for (std::size_t i = 0; i < samples.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < centers.size(); ++c) {
          const double d = (as_vec(samples[i]) - centers[c]).squaredNorm();
          if (d < best) { best = d; assign[i] = static_cast<int>(c); }
        }
      }
      std::vector<Eigen::Vector3d> sum(centers.size(), Eigen::Vector3d::Zero());
      std::vector<int> count(centers.size(), 0);
      for (std::size_t i = 0; i < samples.size(); ++i) {
        sum[assign[i]] += as_vec(samples[i]);
        ++count[assign[i]];
      }
      for (std::size_t c = 0; c < centers.size(); ++c)
        if (count[c] > 0) centers[c] = sum[c] / count[c];
    }
    fit_assigned(samples, assign, static_cast<int>(centers.size()));
  }

  /// Index of the most likely component for each sample.
  int best_component(const Lab& z) const {
    int best = 0;
    double best_l = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < components(); ++c) {
      const double l = log_component(c, z);
      if (l > best_l) { best_l = l; best = c; }
    }
    return best;
  }

  /// Refit using the most likely component of each sample (GrabCut step).
  void refit(std::span<const Lab> samples) {
    if (samples.empty() || !trained()) return;
    std::vector<int> assign(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) assign[i] = best_component(samples[i]);
    fit_assigned(samples, assign, components());
  }

  /// -log p(z).
  double neg_log_likelihood(const Lab& z) const {
    double best = -std::numeric_limits<double>::infinity();
    std::array<double, 16> logs{};
    const int n = components();
    for (int c = 0; c < n; ++c) {
      logs[c] = std::log(weights_[c]) + log_component(c, z);
      best = std::max(best, logs[c]);
    }
    double sum = 0.0;
    for (int c = 0; c < n; ++c) sum += std::exp(logs[c] - best);
    return -(best + std::log(sum));
  }

  const std::vector<Eigen::Vector3d>& means() const { return means_; }

 private:
  static Eigen::Vector3d as_vec(const Lab& l) { return {l[0], l[1], l[2]}; }

  static std::size_t nearest_index(std::span<const Lab> samples, const Eigen::Vector3d& p) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const double d = (as_vec(samples[i]) - p).squaredNorm();
      if (d < best_d) { best_d = d; best = i; }
    }
    return best;
  }

  void fit_assigned(std::span<const Lab> samples, const std::vector<int>& assign, int count) {
    std::vector<Eigen::Vector3d> sum(count, Eigen::Vector3d::Zero());
    std::vector<Eigen::Matrix3d> prod(count, Eigen::Matrix3d::Zero());
    std::vector<double> n(count, 0.0);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const Eigen::Vector3d z = as_vec(samples[i]);
      sum[assign[i]] += z;
      prod[assign[i]] += z * z.transpose();
      n[assign[i]] += 1.0;
    }
    weights_.clear();
    means_.clear();
    inv_cov_.clear();
    log_norm_.clear();
    const double total = static_cast<double>(samples.size());
    for (int c = 0; c < count; ++c) {
      if (n[c] <= 0.0) continue;
      const Eigen::Vector3d mu = sum[c] / n[c];
      Eigen::Matrix3d cov = prod[c] / n[c] - mu * mu.transpose();
      cov += Eigen::Matrix3d::Identity() * kCovarianceFloor;
      weights_.push_back(n[c] / total);
      means_.push_back(mu);
      inv_cov_.push_back(cov.inverse());
      log_norm_.push_back(-0.5 * (3.0 * std::log(2.0 * kPi) + std::log(cov.determinant())));
    }
  }

  double log_component(int c, const Lab& z) const {
    const Eigen::Vector3d d = as_vec(z) - means_[c];
    return log_norm_[c] - 0.5 * d.dot(inv_cov_[c] * d);
  }

  int k_;
  std::vector<double> weights_;
  std::vector<Eigen::Vector3d> means_;
  std::vector<Eigen::Matrix3d> inv_cov_;
  std::vector<double> log_norm_;
};

}  // namespace autostroke

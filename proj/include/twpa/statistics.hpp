#pragma once

// Streaming first and second moments of multi-channel quadrature samples.
// A row is (I_0, Q_0, I_1, Q_1, ...). Partial accumulators merge
// associatively, so chunks may be reduced in any grouping.

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace twpa::stats {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class QuadratureStatistics {
 public:
  explicit QuadratureStatistics(std::vector<std::string> channels);

  // rows: n x (2 * channels) block of samples.
  void add_rows(const Eigen::Ref<const RowMatrix>& rows);
  void add_row(const double* row);
  // Throws InvalidArgument when the channel labels differ.
  void merge(const QuadratureStatistics& other);

  const std::vector<std::string>& channels() const { return channels_; }
  Eigen::Index dimension() const { return static_cast<Eigen::Index>(2 * channels_.size()); }
  std::uint64_t count() const { return count_; }
  const Eigen::VectorXd& mean() const { return mean_; }
  // Sum of outer products of deviations from the mean.
  const Eigen::MatrixXd& co_moment() const { return co_moment_; }
  // Unbiased sample covariance (divides by n - 1). Needs count() >= 2.
  Eigen::MatrixXd covariance() const;

 private:
  void merge_moments(std::uint64_t n, const Eigen::VectorXd& mean, const Eigen::MatrixXd& m2);

  std::vector<std::string> channels_;
  std::uint64_t count_ = 0;
  Eigen::VectorXd mean_;
  Eigen::MatrixXd co_moment_;
};

struct ShapeMoments {
  double skewness = 0.0;
  double kurtosis = 3.0;  // non-excess
};

// Central moments up to fourth order about fixed column centers (normally
// the means from a first pass), one accumulator per column.
class CentralMomentAccumulator {
 public:
  explicit CentralMomentAccumulator(Eigen::VectorXd center);

  void add_rows(const Eigen::Ref<const RowMatrix>& rows);
  std::uint64_t count() const { return count_; }
  // Moments of column k, corrected for any offset between the center and
  // the sample mean.
  ShapeMoments moments(Eigen::Index column) const;

 private:
  Eigen::VectorXd center_;
  std::uint64_t count_ = 0;
  std::vector<long double> s1_, s2_, s3_, s4_;
};

// Two-pass sample skewness and kurtosis.
ShapeMoments shape_moments(const std::vector<double>& x);

}  // namespace twpa::stats

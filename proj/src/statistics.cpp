#include "twpa/statistics.hpp"

#include "twpa/errors.hpp"

#include <cmath>

namespace twpa::stats {

QuadratureStatistics::QuadratureStatistics(std::vector<std::string> channels)
    : channels_(std::move(channels)) {
  if (channels_.empty()) {
    throw InvalidArgument("QuadratureStatistics needs at least one channel");
  }
  mean_ = Eigen::VectorXd::Zero(dimension());
  co_moment_ = Eigen::MatrixXd::Zero(dimension(), dimension());
}

void QuadratureStatistics::merge_moments(std::uint64_t n, const Eigen::VectorXd& mean,
                                         const Eigen::MatrixXd& m2) {
  if (n == 0) {
    return;
  }
  if (count_ == 0) {
    count_ = n;
    mean_ = mean;
    co_moment_ = m2;
    return;
  }
  const double na = static_cast<double>(count_);
  const double nb = static_cast<double>(n);
  const double total = na + nb;
  const Eigen::VectorXd delta = mean - mean_;
  mean_ += delta * (nb / total);
  co_moment_ += m2 + delta * delta.transpose() * (na * nb / total);
  count_ += n;
}

void QuadratureStatistics::add_rows(const Eigen::Ref<const RowMatrix>& rows) {
  if (rows.cols() != dimension()) {
    throw InvalidArgument("QuadratureStatistics: row width does not match the channel count");
  }
  if (rows.rows() == 0) {
    return;
  }
  const Eigen::VectorXd block_mean = rows.colwise().mean().transpose();
  const RowMatrix centered = rows.rowwise() - block_mean.transpose();
  const Eigen::MatrixXd m2 = centered.transpose() * centered;
  merge_moments(static_cast<std::uint64_t>(rows.rows()), block_mean, m2);
}

void QuadratureStatistics::add_row(const double* row) {
  const Eigen::Map<const Eigen::VectorXd> x(row, dimension());
  ++count_;
  const Eigen::VectorXd delta = x - mean_;
  mean_ += delta / static_cast<double>(count_);
  co_moment_ += delta * (x - mean_).transpose();
}

void QuadratureStatistics::merge(const QuadratureStatistics& other) {
  if (other.channels_ != channels_) {
    throw InvalidArgument("QuadratureStatistics::merge: channel sets differ");
  }
  merge_moments(other.count_, other.mean_, other.co_moment_);
}

Eigen::MatrixXd QuadratureStatistics::covariance() const {
  if (count_ < 2) {
    throw InvalidArgument("QuadratureStatistics: covariance needs at least two samples");
  }
  const Eigen::MatrixXd c = co_moment_ / static_cast<double>(count_ - 1);
  return 0.5 * (c + c.transpose());
}

CentralMomentAccumulator::CentralMomentAccumulator(Eigen::VectorXd center)
    : center_(std::move(center)) {
  const auto n = static_cast<std::size_t>(center_.size());
  s1_.assign(n, 0.0L);
  s2_.assign(n, 0.0L);
  s3_.assign(n, 0.0L);
  s4_.assign(n, 0.0L);
}

void CentralMomentAccumulator::add_rows(const Eigen::Ref<const RowMatrix>& rows) {
  if (rows.cols() != center_.size()) {
    throw InvalidArgument("CentralMomentAccumulator: row width mismatch");
  }
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    for (Eigen::Index c = 0; c < rows.cols(); ++c) {
      const long double d = static_cast<long double>(rows(r, c)) - center_(c);
      const long double d2 = d * d;
      const auto k = static_cast<std::size_t>(c);
      s1_[k] += d;
      s2_[k] += d2;
      s3_[k] += d2 * d;
      s4_[k] += d2 * d2;
    }
  }
  count_ += static_cast<std::uint64_t>(rows.rows());
}

ShapeMoments CentralMomentAccumulator::moments(Eigen::Index column) const {
  if (column < 0 || column >= center_.size()) {
    throw InvalidArgument("CentralMomentAccumulator: column out of range");
  }
  if (count_ < 2) {
    throw InvalidArgument("CentralMomentAccumulator: needs at least two samples");
  }
  const auto k = static_cast<std::size_t>(column);
  const long double n = static_cast<long double>(count_);
  // Raw moments about the center, shifted to the sample mean.
  const long double a1 = s1_[k] / n;
  const long double a2 = s2_[k] / n;
  const long double a3 = s3_[k] / n;
  const long double a4 = s4_[k] / n;
  const long double m2 = a2 - a1 * a1;
  const long double m3 = a3 - 3.0L * a1 * a2 + 2.0L * a1 * a1 * a1;
  const long double m4 = a4 - 4.0L * a1 * a3 + 6.0L * a1 * a1 * a2 - 3.0L * a1 * a1 * a1 * a1;
  if (!(m2 > 0.0L)) {
    throw InvalidArgument("shape moments: zero variance");
  }
  ShapeMoments out;
  out.skewness = static_cast<double>(m3 / std::pow(m2, 1.5L));
  out.kurtosis = static_cast<double>(m4 / (m2 * m2));
  return out;
}

ShapeMoments shape_moments(const std::vector<double>& x) {
  if (x.size() < 2) {
    throw InvalidArgument("shape_moments needs at least two samples");
  }
  long double sum = 0.0L;
  for (double v : x) {
    sum += v;
  }
  Eigen::VectorXd center(1);
  center(0) = static_cast<double>(sum / static_cast<long double>(x.size()));
  CentralMomentAccumulator acc(center);
  acc.add_rows(Eigen::Map<const RowMatrix>(x.data(), static_cast<Eigen::Index>(x.size()), 1));
  return acc.moments(0);
}

}  // namespace twpa::stats

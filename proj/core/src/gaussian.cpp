#include "acl/gaussian.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <stdexcept>

namespace acl {

GaussianDist GaussianDist::from_stddev(const Vec& mean, const Vec& stddev) {
  if (mean.size() != stddev.size()) throw std::invalid_argument("mean and stddev differ in length");
  GaussianDist g;
  g.mean = mean;
  g.covariance = stddev.array().square().matrix().asDiagonal();
  g.diagonal = true;
  return g;
}

Vec GaussianDist::sample(Rng& rng) const {
  if (diagonal) {
    Vec out(mean.size());
    for (Eigen::Index d = 0; d < mean.size(); ++d) out[d] = mean[d] + std::sqrt(covariance(d, d)) * rng.normal();
    return out;
  }
  return sample_gaussian(mean, covariance, rng);
}

nlohmann::json GaussianDist::to_json() const {
  nlohmann::json cov = nlohmann::json::array();
  for (Eigen::Index r = 0; r < covariance.rows(); ++r) {
    std::vector<double> row(static_cast<std::size_t>(covariance.cols()));
    for (Eigen::Index c = 0; c < covariance.cols(); ++c) row[static_cast<std::size_t>(c)] = covariance(r, c);
    cov.push_back(row);
  }
  return {{"mean", std::vector<double>(mean.data(), mean.data() + mean.size())},
          {"covariance", cov},
          {"diagonal", diagonal}};
}

GaussianDist GaussianDist::from_json(const nlohmann::json& j) {
  GaussianDist g;
  const auto m = j.at("mean").get<std::vector<double>>();
  g.mean = Eigen::Map<const Vec>(m.data(), static_cast<Eigen::Index>(m.size()));
  const auto rows = j.at("covariance").get<std::vector<std::vector<double>>>();
  g.covariance.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != rows.size()) throw std::invalid_argument("covariance must be square");
    for (std::size_t c = 0; c < rows.size(); ++c)
      g.covariance(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  }
  g.diagonal = j.value("diagonal", false);
  return g;
}

Vec sample_gaussian(const Vec& mean, const Mat& cov, Rng& rng) {
  Eigen::LLT<Mat> llt(cov);
  double jitter = 1e-12;
  while (llt.info() != Eigen::Success && jitter < 1.0) {
    llt.compute(cov + jitter * Mat::Identity(cov.rows(), cov.cols()));
    jitter *= 10.0;
  }
  Vec z(mean.size());
  for (Eigen::Index d = 0; d < z.size(); ++d) z[d] = rng.normal();
  return mean + llt.matrixL() * z;
}

double kl_divergence(const GaussianDist& p, const GaussianDist& q) {
  const auto dims = static_cast<double>(p.mean.size());
  Eigen::LLT<Mat> q_llt(q.covariance);
  Eigen::LLT<Mat> p_llt(p.covariance);
  if (q_llt.info() != Eigen::Success || p_llt.info() != Eigen::Success) {
    throw std::invalid_argument("KL needs positive definite covariances");
  }
  const Vec diff = q.mean - p.mean;
  const double trace = q_llt.solve(p.covariance).trace();
  const double maha = diff.dot(q_llt.solve(diff));
  const double logdet_q = 2.0 * q_llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  const double logdet_p = 2.0 * p_llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  return 0.5 * (trace + maha - dims + logdet_q - logdet_p);
}

double kl_diagonal(const Vec& mean_p, const Vec& var_p, const Vec& mean_q, const Vec& var_q) {
  double kl = 0.0;
  for (Eigen::Index d = 0; d < mean_p.size(); ++d) {
    const double ratio = var_p[d] / var_q[d];
    const double diff = mean_q[d] - mean_p[d];
    kl += 0.5 * (ratio + diff * diff / var_q[d] - 1.0 - std::log(ratio));
  }
  return kl;
}

}  // namespace acl

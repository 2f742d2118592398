#include "acl/gmm.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "acl/gaussian.hpp"

namespace acl {

namespace {

struct Factor {
  Eigen::LLT<Mat> llt;
  double log_norm = 0.0;  // log of the Gaussian normalizer, weight excluded
};

Factor factorize(const Mat& cov) {
  Factor f;
  Mat c = cov;
  double jitter = 0.0;
  for (;;) {
    f.llt.compute(c);
    if (f.llt.info() == Eigen::Success) break;
    jitter = jitter == 0.0 ? 1e-9 : jitter * 10.0;
    c = cov + jitter * Mat::Identity(cov.rows(), cov.cols());
  }
  const Mat& l = f.llt.matrixLLT();
  double logdet = 0.0;
  for (Eigen::Index d = 0; d < l.rows(); ++d) logdet += 2.0 * std::log(l(d, d));
  f.log_norm = -0.5 * (static_cast<double>(cov.rows()) * std::log(2.0 * std::numbers::pi) + logdet);
  return f;
}

// n x k matrix of log(w_j) + log N(x_i | j) - 0.5 * penalty * tr(inv(Sigma_j)).
Mat weighted_log_densities(const std::vector<GaussianComponent>& comps, const Mat& points, double penalty = 0.0) {
  const Eigen::Index n = points.rows();
  Mat out(n, static_cast<Eigen::Index>(comps.size()));
  for (std::size_t j = 0; j < comps.size(); ++j) {
    const Factor f = factorize(comps[j].covariance);
    const Mat centred = (points.rowwise() - comps[j].mean.transpose()).transpose();
    const Mat solved = f.llt.matrixL().solve(centred);
    const Vec maha = solved.colwise().squaredNorm().transpose();
    const double lw = comps[j].weight > 0.0 ? std::log(comps[j].weight) : -std::numeric_limits<double>::infinity();
    double shrink = 0.0;
    if (penalty > 0.0) {
      const Mat l_inv = f.llt.matrixL().solve(Mat::Identity(points.cols(), points.cols()));
      shrink = 0.5 * penalty * l_inv.squaredNorm();
    }
    out.col(static_cast<Eigen::Index>(j)) = (lw + f.log_norm - shrink - 0.5 * maha.array()).matrix();
  }
  return out;
}

// Row-wise log-sum-exp; also normalizes `logp` in place into responsibilities.
double normalize_rows(Mat& logp) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < logp.rows(); ++i) {
    const double m = logp.row(i).maxCoeff();
    const double lse = m + std::log((logp.row(i).array() - m).exp().sum());
    total += lse;
    logp.row(i) = (logp.row(i).array() - lse).exp().matrix();
  }
  return total;
}

Mat sample_covariance(const Mat& points) {
  const Vec mean = points.colwise().mean().transpose();
  const Mat centred = points.rowwise() - mean.transpose();
  return centred.transpose() * centred / static_cast<double>(points.rows());
}

std::vector<Eigen::Index> farthest_point_seeds(const Mat& points, std::size_t k, Rng& rng) {
  const Eigen::Index n = points.rows();
  Vec scale = points.colwise().maxCoeff() - points.colwise().minCoeff();
  for (Eigen::Index d = 0; d < scale.size(); ++d) {
    if (scale[d] <= 0.0) scale[d] = 1.0;
  }
  const Mat z = points.array().rowwise() / scale.transpose().array();
  std::vector<Eigen::Index> seeds{static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(n)))};
  Vec nearest = (z.rowwise() - z.row(seeds[0])).rowwise().squaredNorm();
  while (seeds.size() < k) {
    Eigen::Index next = 0;
    nearest.maxCoeff(&next);
    seeds.push_back(next);
    nearest = nearest.cwiseMin((z.rowwise() - z.row(next)).rowwise().squaredNorm());
  }
  return seeds;
}

}  // namespace

Mat GaussianMixture::responsibilities(const Mat& points) const {
  Mat logp = weighted_log_densities(components, points);
  normalize_rows(logp);
  return logp;
}

double GaussianMixture::log_likelihood(const Mat& points) const {
  Mat logp = weighted_log_densities(components, points);
  return normalize_rows(logp);
}

std::size_t GaussianMixture::pick_component(Rng& rng) const {
  std::vector<double> w;
  w.reserve(components.size());
  for (const auto& c : components) w.push_back(c.weight);
  return pick_proportional(w, rng);
}

Vec GaussianMixture::sample(Rng& rng) const {
  const auto& c = components[pick_component(rng)];
  return sample_gaussian(c.mean, c.covariance, rng);
}

nlohmann::json GaussianMixture::to_json() const {
  nlohmann::json comps = nlohmann::json::array();
  for (const auto& c : components) {
    nlohmann::json cov = nlohmann::json::array();
    for (Eigen::Index r = 0; r < c.covariance.rows(); ++r) {
      std::vector<double> row;
      for (Eigen::Index col = 0; col < c.covariance.cols(); ++col) row.push_back(c.covariance(r, col));
      cov.push_back(row);
    }
    comps.push_back({{"weight", c.weight},
                     {"mean", std::vector<double>(c.mean.data(), c.mean.data() + c.mean.size())},
                     {"covariance", cov}});
  }
  return {{"components", comps}, {"log_likelihood", log_likelihood()}};
}

GaussianMixture em_fit(const Mat& points, std::size_t k, Rng& rng, const EmOptions& options) {
  if (k == 0) throw std::invalid_argument("em_fit needs at least one component");
  if (static_cast<std::size_t>(points.rows()) < k) {
    throw std::invalid_argument("em_fit needs at least as many points as components");
  }
  const Eigen::Index n = points.rows();
  const Eigen::Index dims = points.cols();
  const Mat reg = options.covariance_regularization * Mat::Identity(dims, dims);

  GaussianMixture gm;
  const Mat global_cov = sample_covariance(points) + reg;
  for (const Eigen::Index s : farthest_point_seeds(points, k, rng)) {
    gm.components.push_back({1.0 / static_cast<double>(k), points.row(s).transpose(), global_cov});
  }

  const double penalty = options.covariance_regularization;
  Mat resp = weighted_log_densities(gm.components, points, penalty);
  double ll = normalize_rows(resp);
  gm.log_likelihood_trace.push_back(ll);

  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    const Vec nk = resp.colwise().sum().transpose();
    for (std::size_t j = 0; j < k; ++j) {
      auto& c = gm.components[j];
      const double mass = nk[static_cast<Eigen::Index>(j)];
      if (mass <= 1e-12) {
        // Empty component: park it on a random point with the global spread.
        c.weight = 1e-12;
        c.mean = points.row(static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(n)))).transpose();
        c.covariance = global_cov;
        continue;
      }
      const Vec r = resp.col(static_cast<Eigen::Index>(j));
      c.weight = mass / static_cast<double>(n);
      c.mean = points.transpose() * r / mass;
      const Mat centred = points.rowwise() - c.mean.transpose();
      c.covariance = centred.transpose() * r.asDiagonal() * centred / mass + reg;
      c.covariance = 0.5 * (c.covariance + c.covariance.transpose()).eval();
    }
    double wsum = 0.0;
    for (const auto& c : gm.components) wsum += c.weight;
    for (auto& c : gm.components) c.weight /= wsum;

    resp = weighted_log_densities(gm.components, points, penalty);
    const double next = normalize_rows(resp);
    gm.log_likelihood_trace.push_back(next);
    const double change = std::abs(next - ll) / std::max(std::abs(ll), 1e-12);
    ll = next;
    if (change < options.relative_tolerance) break;
  }
  return gm;
}

std::size_t mixture_parameter_count(std::size_t k, std::size_t dims) {
  return k * (1 + dims + dims * (dims + 1) / 2) - 1;
}

double aic(const GaussianMixture& mixture) {
  return 2.0 * static_cast<double>(mixture_parameter_count(mixture.size(), mixture.dims())) -
         2.0 * mixture.log_likelihood();
}

GaussianMixture select_k_by_aic(const Mat& points, std::size_t k_max, Rng& rng, const EmOptions& options) {
  const auto n = static_cast<std::size_t>(points.rows());
  if (n < 2) throw std::invalid_argument("select_k_by_aic needs at least two points");
  const std::size_t top = std::max<std::size_t>(2, std::min(k_max, n));
  GaussianMixture best;
  double best_aic = std::numeric_limits<double>::infinity();
  for (std::size_t k = 2; k <= top; ++k) {
    GaussianMixture gm = em_fit(points, k, rng, options);
    const double score = aic(gm);
    if (score < best_aic) {
      best_aic = score;
      best = std::move(gm);
    }
  }
  return best;
}

std::size_t pick_proportional(const std::vector<double>& scores, Rng& rng) {
  if (scores.empty()) throw std::invalid_argument("pick_proportional needs at least one score");
  double total = 0.0;
  for (const double s : scores) total += std::max(0.0, s);
  if (!(total > 0.0)) return rng.index(scores.size());
  double u = rng.uniform() * total;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double s = std::max(0.0, scores[i]);
    if (u < s) return i;
    u -= s;
  }
  for (std::size_t i = scores.size(); i-- > 0;) {
    if (scores[i] > 0.0) return i;
  }
  return scores.size() - 1;
}

Mat stack_rows(const std::vector<Vec>& rows) {
  if (rows.empty()) return {};
  Mat out(static_cast<Eigen::Index>(rows.size()), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  return out;
}

}  // namespace acl

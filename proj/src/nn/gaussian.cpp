#include "gchr/nn/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gchr/errors.hpp"

namespace gchr::nn {

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;  // 0.5 * ln(2 pi)

double clamp_action(double a) { return std::clamp(a, -kSquashBound, kSquashBound); }

// log(1 - tanh(u)^2), stable for large |u|.
double log_one_minus_tanh_sq(double u) {
  const double x = -2.0 * std::abs(u);
  return 2.0 * (std::numbers::ln2 - std::abs(u) - std::log1p(std::exp(x)));
}

}  // namespace

DiagGaussianHead::DiagGaussianHead(Vector mean_, Vector log_std_, bool squash_)
    : mean(std::move(mean_)), log_std(std::move(log_std_)), squash(squash_) {
  require(mean.size() == log_std.size(), "DiagGaussianHead: mean/log_std size mismatch");
  log_std = log_std.cwiseMax(kLogStdMin).cwiseMin(kLogStdMax);
}

double gaussian_log_prob(const DiagGaussianHead& head, const Vector& action) {
  require(action.size() == head.mean.size(), "gaussian_log_prob: action dimension mismatch");
  double lp = 0.0;
  for (int i = 0; i < head.dim(); ++i) {
    double u = action(i);
    if (head.squash) {
      const double a = clamp_action(action(i));
      u = std::atanh(a);
      lp -= std::log1p(-a * a);
    }
    const double sigma = std::exp(head.log_std(i));
    const double z = (u - head.mean(i)) / sigma;
    lp += -0.5 * z * z - head.log_std(i) - kHalfLog2Pi;
  }
  return lp;
}

GaussianSample gaussian_sample(const DiagGaussianHead& head, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector noise(head.dim());
  for (int i = 0; i < head.dim(); ++i) noise(i) = normal(rng);
  return gaussian_sample_from_noise(head, noise);
}

GaussianSample gaussian_sample_from_noise(const DiagGaussianHead& head, const Vector& noise) {
  require(noise.size() == head.mean.size(), "gaussian_sample: noise dimension mismatch");
  GaussianSample s;
  s.noise = noise;
  s.pre_squash = head.mean + head.stddev().cwiseProduct(noise);
  s.action = head.squash ? Vector(s.pre_squash.array().tanh().matrix()) : s.pre_squash;
  s.log_prob = gaussian_log_prob(head, s.action);
  return s;
}

PathwiseJacobian pathwise_jacobian(const DiagGaussianHead& head, const GaussianSample& sample) {
  PathwiseJacobian j;
  j.wrt_mean = Vector::Ones(head.dim());
  if (head.squash) j.wrt_mean = (1.0 - sample.action.array().square()).matrix();
  j.wrt_log_std = j.wrt_mean.cwiseProduct(head.stddev()).cwiseProduct(sample.noise);
  return j;
}

double log_std_from_raw(double raw) {
  return kLogStdMin + 0.5 * (kLogStdMax - kLogStdMin) * (std::tanh(raw) + 1.0);
}

double log_std_raw_derivative(double raw) {
  const double t = std::tanh(raw);
  return 0.5 * (kLogStdMax - kLogStdMin) * (1.0 - t * t);
}

DiagGaussianHead head_from_raw(const Vector& raw, bool squash) {
  require(raw.size() % 2 == 0, "head_from_raw: raw output must have even length");
  const auto dim = raw.size() / 2;
  Vector log_std(dim);
  for (Eigen::Index i = 0; i < dim; ++i) log_std(i) = log_std_from_raw(raw(dim + i));
  return DiagGaussianHead(raw.head(dim), log_std, squash);
}

double raw_log_prob(const double* raw, const double* action, int dim, bool squash, double scale,
                    double* grad_raw) {
  double lp = 0.0;
  for (int i = 0; i < dim; ++i) {
    const double mean = raw[i];
    const double log_std = log_std_from_raw(raw[dim + i]);
    double u = action[i];
    if (squash) {
      const double a = clamp_action(action[i]);
      u = std::atanh(a);
      lp -= std::log1p(-a * a);
    }
    const double sigma = std::exp(log_std);
    const double z = (u - mean) / sigma;
    lp += -0.5 * z * z - log_std - kHalfLog2Pi;
    if (grad_raw != nullptr) {
      grad_raw[i] += scale * z / sigma;
      grad_raw[dim + i] += scale * (z * z - 1.0) * log_std_raw_derivative(raw[dim + i]);
    }
  }
  return lp;
}

double raw_log_prob_pre_squash(const double* raw, const double* u, int dim, bool squash,
                               double scale, double* grad_raw) {
  double lp = 0.0;
  for (int i = 0; i < dim; ++i) {
    const double mean = raw[i];
    const double log_std = log_std_from_raw(raw[dim + i]);
    if (squash) lp -= log_one_minus_tanh_sq(u[i]);
    const double sigma = std::exp(log_std);
    const double z = (u[i] - mean) / sigma;
    lp += -0.5 * z * z - log_std - kHalfLog2Pi;
    if (grad_raw != nullptr) {
      grad_raw[i] += scale * z / sigma;
      grad_raw[dim + i] += scale * (z * z - 1.0) * log_std_raw_derivative(raw[dim + i]);
    }
  }
  return lp;
}

double raw_reparam_sample(const double* raw, const double* noise, int dim, bool squash,
                          double* action) {
  double lp = 0.0;
  for (int i = 0; i < dim; ++i) {
    const double log_std = log_std_from_raw(raw[dim + i]);
    const double u = raw[i] + std::exp(log_std) * noise[i];
    action[i] = squash ? std::tanh(u) : u;
    lp += -0.5 * noise[i] * noise[i] - log_std - kHalfLog2Pi;
    if (squash) lp -= log_one_minus_tanh_sq(u);
  }
  return lp;
}

void raw_reparam_backward(const double* raw, const double* noise, int dim, bool squash,
                          const double* d_action, double logp_scale, double* grad_raw) {
  for (int i = 0; i < dim; ++i) {
    const double sigma = std::exp(log_std_from_raw(raw[dim + i]));
    const double u = raw[i] + sigma * noise[i];
    const double t = squash ? std::tanh(u) : 0.0;
    const double da_du = squash ? 1.0 - t * t : 1.0;
    // d u / d mean = 1, d u / d log_std = sigma * noise
    double d_u = (d_action != nullptr ? d_action[i] : 0.0) * da_du;
    double d_log_std = 0.0;
    if (logp_scale != 0.0) {
      // log p = sum(-0.5 xi^2 - log_std) - log(1 - tanh(u)^2); xi is held fixed.
      if (squash) d_u += logp_scale * 2.0 * t;
      d_log_std -= logp_scale;
    }
    grad_raw[i] += d_u;
    grad_raw[dim + i] += (d_u * sigma * noise[i] + d_log_std) * log_std_raw_derivative(raw[dim + i]);
  }
}

}  // namespace gchr::nn

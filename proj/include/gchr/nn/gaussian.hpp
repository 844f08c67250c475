#pragma once

#include <random>

#include "gchr/nn/mlp.hpp"

namespace gchr::nn {

inline constexpr double kLogStdMin = -5.0;
inline constexpr double kLogStdMax = 2.0;
// Squashed actions are clamped to |a| <= kSquashBound before the inverse tanh.
inline constexpr double kSquashBound = 1.0 - 1e-6;

using Rng = std::mt19937_64;

/// Diagonal Gaussian over pre-squash actions. With squash set, actions are
/// tanh of the Gaussian variate and live in (-1, 1).
struct DiagGaussianHead {
  Vector mean;
  Vector log_std;  // clamped to [kLogStdMin, kLogStdMax] on construction
  bool squash = true;

  DiagGaussianHead(Vector mean_, Vector log_std_, bool squash_);
  int dim() const { return static_cast<int>(mean.size()); }
  Vector stddev() const { return log_std.array().exp().matrix(); }
};

/// Log density of `action`, including the -sum log(1 - a^2) change of
/// variables when squashed.
double gaussian_log_prob(const DiagGaussianHead& head, const Vector& action);

struct GaussianSample {
  Vector action;
  Vector pre_squash;  // mean + std * noise
  Vector noise;       // standard normal draw
  double log_prob = 0.0;
};

GaussianSample gaussian_sample(const DiagGaussianHead& head, Rng& rng);
GaussianSample gaussian_sample_from_noise(const DiagGaussianHead& head, const Vector& noise);

// Diagonal Jacobians of a reparameterized sample.
struct PathwiseJacobian {
  Vector wrt_mean;
  Vector wrt_log_std;
};
PathwiseJacobian pathwise_jacobian(const DiagGaussianHead& head, const GaussianSample& sample);

// ---------------------------------------------------------------------------
// Policy-network parameterization. A policy net emits 2*dim raw outputs:
// the mean, then unconstrained log-std values mapped smoothly into
// [kLogStdMin, kLogStdMax] with a rescaled tanh.

double log_std_from_raw(double raw);
double log_std_raw_derivative(double raw);
DiagGaussianHead head_from_raw(const Vector& raw, bool squash);

/// Log density of `action` under the head encoded by raw[0..2*dim). Adds the
/// gradient of the log density w.r.t. the raw outputs, times `scale`, into
/// grad_raw.
double raw_log_prob(const double* raw, const double* action, int dim, bool squash, double scale,
                    double* grad_raw);

/// Same as raw_log_prob, for an action given by its pre-squash variate u.
/// Avoids the inverse tanh, which loses |u| beyond the squash bound.
double raw_log_prob_pre_squash(const double* raw, const double* u, int dim, bool squash,
                               double scale, double* grad_raw);

/// Reparameterized sample a = squash(mean + std * noise) from raw outputs.
/// Writes the action, returns its log density.
double raw_reparam_sample(const double* raw, const double* noise, int dim, bool squash,
                          double* action);

/// Backpropagates an upstream gradient on the reparameterized action, plus
/// `logp_scale` times the gradient of the sample's own log density, to the
/// raw outputs (accumulated into grad_raw).
void raw_reparam_backward(const double* raw, const double* noise, int dim, bool squash,
                          const double* d_action, double logp_scale, double* grad_raw);

}  // namespace gchr::nn

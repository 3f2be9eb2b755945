#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "v2g/rng.hpp"

namespace v2g {

enum class Act { Identity, ReLU, Tanh };

struct Dense {
  int in = 0;
  int out = 0;
  std::vector<double> w;  // row-major, out x in
  std::vector<double> b;  // out
};

// Flat parameter collection for one MLP. Hidden layers share one activation;
// the output layer has its own (identity for critics, tanh for actors).
struct ParamSet {
  std::vector<Dense> layers;
  Act hidden = Act::Tanh;
  Act output = Act::Identity;

  int input_dim() const { return layers.empty() ? 0 : layers.front().in; }
  int output_dim() const { return layers.empty() ? 0 : layers.back().out; }
  std::size_t param_count() const;
};

// Weights ~ U(-1/sqrt(fan_in), +1/sqrt(fan_in)), biases zero.
ParamSet make_mlp(std::span<const int> layer_sizes, Act hidden, Act output, Rng& rng);

// Zero-valued parameter set congruent to `shape`, for gradient accumulation.
ParamSet make_congruent_zeros(const ParamSet& shape);

struct FwdCache {
  std::vector<std::vector<double>> x;  // input to each layer
  std::vector<std::vector<double>> z;  // pre-activations
  std::vector<double> y;               // network output (post-activation)
};

std::vector<double> forward(const ParamSet& p, std::span<const double> x);
std::vector<double> forward(const ParamSet& p, std::span<const double> x, FwdCache& cache);

// Exact reverse-mode gradients of y.dy with respect to all parameters and the
// input. Gradients accumulate into `grads` (caller zeroes between batches);
// the returned vector is dx, needed to differentiate a critic through its
// action inputs.
std::vector<double> backward(const ParamSet& p, const FwdCache& cache, std::span<const double> dy,
                             ParamSet& grads);

struct OptState {
  std::vector<Dense> m;  // first moments, congruent to the ParamSet
  std::vector<Dense> v;  // second moments
  std::int64_t step = 0;
};

OptState make_opt_state(const ParamSet& p);

struct AdamParams {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Standard Adam with bias correction, in place.
void adam_step(ParamSet& p, const ParamSet& grads, OptState& opt, const AdamParams& ap);

// target <- tau * main + (1 - tau) * target, elementwise.
void soft_update(ParamSet& target, const ParamSet& main, double tau);

void zero_params(ParamSet& p);
void scale_params(ParamSet& p, double s);

// FNV-1a over the raw little-endian bytes of every weight and bias, in layer
// order. Used for bit-identity assertions between training configurations.
std::uint64_t param_checksum(const ParamSet& p);

}  // namespace v2g

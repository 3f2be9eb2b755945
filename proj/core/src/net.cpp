#include "v2g/net.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace v2g {

namespace {

inline double activate(double z, Act act) {
  switch (act) {
    case Act::Identity: return z;
    case Act::ReLU: return z > 0.0 ? z : 0.0;
    case Act::Tanh: return std::tanh(z);
  }
  return z;
}

// Derivative expressed via the post-activation value a = act(z).
inline double activate_grad_from_value(double a, double z, Act act) {
  switch (act) {
    case Act::Identity: return 1.0;
    case Act::ReLU: return z > 0.0 ? 1.0 : 0.0;
    case Act::Tanh: return 1.0 - a * a;
  }
  return 1.0;
}

}  // namespace

std::size_t ParamSet::param_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.w.size() + l.b.size();
  return n;
}

ParamSet make_mlp(std::span<const int> layer_sizes, Act hidden, Act output, Rng& rng) {
  if (layer_sizes.size() < 2)
    throw std::invalid_argument("make_mlp: need at least input and output sizes");
  for (int s : layer_sizes)
    if (s <= 0) throw std::invalid_argument("make_mlp: layer sizes must be positive");
  ParamSet p;
  p.hidden = hidden;
  p.output = output;
  p.layers.resize(layer_sizes.size() - 1);
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    Dense& d = p.layers[l];
    d.in = layer_sizes[l];
    d.out = layer_sizes[l + 1];
    d.w.resize(static_cast<std::size_t>(d.in) * d.out);
    d.b.assign(d.out, 0.0);
    const double bound = 1.0 / std::sqrt(static_cast<double>(d.in));
    for (auto& w : d.w) w = rng.uniform(-bound, bound);
  }
  return p;
}

ParamSet make_congruent_zeros(const ParamSet& shape) {
  ParamSet g = shape;
  zero_params(g);
  return g;
}

std::vector<double> forward(const ParamSet& p, std::span<const double> x) {
  FwdCache cache;
  return forward(p, x, cache);
}

std::vector<double> forward(const ParamSet& p, std::span<const double> x, FwdCache& cache) {
  if (p.layers.empty()) throw std::invalid_argument("forward: empty network");
  if (static_cast<int>(x.size()) != p.input_dim())
    throw std::invalid_argument("forward: input dimension mismatch");
  const std::size_t nl = p.layers.size();
  cache.x.resize(nl);
  cache.z.resize(nl);
  std::vector<double> cur(x.begin(), x.end());
  for (std::size_t l = 0; l < nl; ++l) {
    const Dense& d = p.layers[l];
    cache.x[l] = cur;
    std::vector<double>& z = cache.z[l];
    z.assign(d.out, 0.0);
    const double* w = d.w.data();
    for (int o = 0; o < d.out; ++o) {
      const double* row = w + static_cast<std::size_t>(o) * d.in;
      double acc = d.b[o];
      for (int i = 0; i < d.in; ++i) acc += row[i] * cur[i];
      z[o] = acc;
    }
    const Act act = (l + 1 == nl) ? p.output : p.hidden;
    cur.resize(d.out);
    for (int o = 0; o < d.out; ++o) cur[o] = activate(z[o], act);
  }
  cache.y = cur;
  return cur;
}

std::vector<double> backward(const ParamSet& p, const FwdCache& cache, std::span<const double> dy,
                             ParamSet& grads) {
  const std::size_t nl = p.layers.size();
  if (cache.x.size() != nl || cache.z.size() != nl)
    throw std::invalid_argument("backward: cache does not match network");
  if (grads.layers.size() != nl)
    throw std::invalid_argument("backward: grads not congruent");
  if (static_cast<int>(dy.size()) != p.output_dim())
    throw std::invalid_argument("backward: dy dimension mismatch");

  std::vector<double> delta(dy.begin(), dy.end());
  for (std::size_t li = nl; li-- > 0;) {
    const Dense& d = p.layers[li];
    Dense& g = grads.layers[li];
    if (g.in != d.in || g.out != d.out)
      throw std::invalid_argument("backward: grads layer shape mismatch");
    const Act act = (li + 1 == nl) ? p.output : p.hidden;
    const std::vector<double>& z = cache.z[li];
    const std::vector<double>& xin = cache.x[li];
    // post-activation of this layer: next layer's input, or the output
    const std::vector<double>& a = (li + 1 == nl) ? cache.y : cache.x[li + 1];
    for (int o = 0; o < d.out; ++o) delta[o] *= activate_grad_from_value(a[o], z[o], act);

    double* gw = g.w.data();
    for (int o = 0; o < d.out; ++o) {
      const double dz = delta[o];
      g.b[o] += dz;
      double* grow = gw + static_cast<std::size_t>(o) * d.in;
      for (int i = 0; i < d.in; ++i) grow[i] += dz * xin[i];
    }
    std::vector<double> dx(d.in, 0.0);
    const double* w = d.w.data();
    for (int o = 0; o < d.out; ++o) {
      const double dz = delta[o];
      const double* row = w + static_cast<std::size_t>(o) * d.in;
      for (int i = 0; i < d.in; ++i) dx[i] += row[i] * dz;
    }
    delta = std::move(dx);
  }
  return delta;
}

OptState make_opt_state(const ParamSet& p) {
  OptState s;
  s.m.resize(p.layers.size());
  s.v.resize(p.layers.size());
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    const Dense& d = p.layers[l];
    s.m[l] = Dense{d.in, d.out, std::vector<double>(d.w.size(), 0.0),
                   std::vector<double>(d.b.size(), 0.0)};
    s.v[l] = s.m[l];
  }
  return s;
}

void adam_step(ParamSet& p, const ParamSet& grads, OptState& opt, const AdamParams& ap) {
  if (grads.layers.size() != p.layers.size() || opt.m.size() != p.layers.size())
    throw std::invalid_argument("adam_step: shape mismatch");
  opt.step += 1;
  const double bc1 = 1.0 - std::pow(ap.beta1, static_cast<double>(opt.step));
  const double bc2 = 1.0 - std::pow(ap.beta2, static_cast<double>(opt.step));
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    auto update = [&](std::vector<double>& w, const std::vector<double>& g, std::vector<double>& m,
                      std::vector<double>& v) {
      for (std::size_t i = 0; i < w.size(); ++i) {
        m[i] = ap.beta1 * m[i] + (1.0 - ap.beta1) * g[i];
        v[i] = ap.beta2 * v[i] + (1.0 - ap.beta2) * g[i] * g[i];
        const double mhat = m[i] / bc1;
        const double vhat = v[i] / bc2;
        w[i] -= ap.lr * mhat / (std::sqrt(vhat) + ap.eps);
      }
    };
    update(p.layers[l].w, grads.layers[l].w, opt.m[l].w, opt.v[l].w);
    update(p.layers[l].b, grads.layers[l].b, opt.m[l].b, opt.v[l].b);
  }
}

void soft_update(ParamSet& target, const ParamSet& main, double tau) {
  if (target.layers.size() != main.layers.size())
    throw std::invalid_argument("soft_update: shape mismatch");
  for (std::size_t l = 0; l < target.layers.size(); ++l) {
    auto blend = [tau](std::vector<double>& t, const std::vector<double>& m) {
      for (std::size_t i = 0; i < t.size(); ++i) t[i] = tau * m[i] + (1.0 - tau) * t[i];
    };
    blend(target.layers[l].w, main.layers[l].w);
    blend(target.layers[l].b, main.layers[l].b);
  }
}

void zero_params(ParamSet& p) {
  for (auto& l : p.layers) {
    std::fill(l.w.begin(), l.w.end(), 0.0);
    std::fill(l.b.begin(), l.b.end(), 0.0);
  }
}

void scale_params(ParamSet& p, double s) {
  for (auto& l : p.layers) {
    for (auto& w : l.w) w *= s;
    for (auto& b : l.b) b *= s;
  }
}

std::uint64_t param_checksum(const ParamSet& p) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const std::vector<double>& xs) {
    for (double x : xs) {
      std::uint64_t bits;
      std::memcpy(&bits, &x, sizeof bits);
      for (int k = 0; k < 8; ++k) {
        h ^= (bits >> (8 * k)) & 0xffULL;
        h *= 0x100000001b3ULL;
      }
    }
  };
  for (const auto& l : p.layers) {
    mix(l.w);
    mix(l.b);
  }
  return h;
}

}  // namespace v2g

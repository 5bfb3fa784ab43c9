#pragma once

// Test-only oracles. These deliberately avoid the library's recursive
// stepping code: traces come from direct convolution with closed-form
// impulse-response kernels, probabilities from locally written logistic
// helpers, and expectations from exhaustive enumeration.

#include <cmath>
#include <cstdint>
#include <vector>

#include "snn/network.hpp"
#include "snn/topology.hpp"
#include "snn/types.hpp"

namespace oracle {

// Impulse responses of the trace filters, measured at lag d >= 1 between a
// spike consumed at step m and the trace value at step m + d:
//   q: a^(d-1)              with a = exp(-1/tau_syn)
//   p: (b^(d-1) - a^(d-1)) / (b - a)   with b = exp(-1/tau_mem), b != a
//   r: c^(d-1)              with c = exp(-1/tau_ref)
inline std::vector<double> kernel_q(double tau_syn, int max_lag) {
  const double a = std::exp(-1.0 / tau_syn);
  std::vector<double> k(max_lag + 1, 0.0);
  for (int d = 1; d <= max_lag; ++d) k[d] = std::pow(a, d - 1);
  return k;
}

inline std::vector<double> kernel_p(double tau_mem, double tau_syn, int max_lag) {
  const double a = std::exp(-1.0 / tau_syn);
  const double b = std::exp(-1.0 / tau_mem);
  std::vector<double> k(max_lag + 1, 0.0);
  for (int d = 1; d <= max_lag; ++d) k[d] = (std::pow(b, d - 1) - std::pow(a, d - 1)) / (b - a);
  return k;
}

inline std::vector<double> kernel_r(double tau_ref, int max_lag) {
  return kernel_q(tau_ref, max_lag);
}

// trace[n] (n = 1..T, index 0 unused) after consuming spikes[0..n-1].
inline std::vector<double> convolve_trace(const std::vector<std::uint8_t>& spikes,
                                          const std::vector<double>& kernel) {
  const int horizon = static_cast<int>(spikes.size());
  std::vector<double> trace(horizon + 1, 0.0);
  for (int n = 1; n <= horizon; ++n)
    for (int m = 0; m < n; ++m)
      if (spikes[m]) trace[n] += kernel[n - m];
  return trace;
}

// Potentials of a fully specified record, derived purely from the
// convolution kernels. The potential at column t sees spikes through
// column t-1 only, so it reads the convolution at lag t - m for a spike in
// column m (kernel value 0 at lag 0).
inline snn::Matrix conv_potentials(const snn::SpikeRecord& record, const snn::SpikeRecord& exo,
                                   const snn::Parameters& params, const snn::Topology& topo,
                                   const snn::HyperParams& hyper) {
  const int horizon = record.horizon;
  const auto kp = kernel_p(hyper.tau_mem, hyper.tau_syn, horizon);
  const auto kr = kernel_r(hyper.tau_ref, horizon);

  auto channel_spikes = [&](snn::NodeId ch) {
    std::vector<std::uint8_t> s(horizon, 0);
    for (int t = 0; t < horizon; ++t)
      s[t] = topo.is_neuron(ch) ? record.get(static_cast<int>(ch), t)
                                : exo.get(static_cast<int>(ch - topo.neuron_count), t);
    return s;
  };

  std::vector<std::vector<double>> p(topo.channel_count());
  for (snn::NodeId ch = 0; ch < topo.channel_count(); ++ch)
    p[ch] = convolve_trace(channel_spikes(ch), kp);
  std::vector<std::vector<double>> r(topo.neuron_count);
  for (snn::NodeId i = 0; i < topo.neuron_count; ++i)
    r[i] = convolve_trace(channel_spikes(i), kr);

  snn::Matrix u(static_cast<int>(topo.neuron_count), horizon);
  for (snn::NodeId i = 0; i < topo.neuron_count; ++i)
    for (int t = 0; t < horizon; ++t) {
      double acc = params.bias[i] - r[i][t];
      for (std::size_t k = 0; k < topo.parents[i].size(); ++k)
        acc += params.weights[i][k] * p[topo.parents[i][k]][t];
      u.at(static_cast<int>(i), t) = acc;
    }
  return u;
}

inline double sigmoid(double v) {
  if (v >= 0) return 1.0 / (1.0 + std::exp(-v));
  const double e = std::exp(v);
  return e / (1.0 + e);
}

// ell(s, sigmoid(v)) in softplus form.
inline double bce(int s, double v) {
  const double z = s ? -v : v;
  return z > 30.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

// Relaxed read-out loss at T = 1 from an arbitrary initial state, written
// out by hand: one trace advance, then the cross-entropy of the smoothed
// output sigmoid(slope * (u - threshold)) against the target bits.
inline double relaxed_loss_t1(const snn::Parameters& params, const snn::Topology& topo,
                              const snn::HyperParams& hyper, const snn::NetworkState& init,
                              const std::vector<std::uint8_t>& targets, double slope) {
  const double dm = std::exp(-1.0 / hyper.tau_mem);
  const double dr = std::exp(-1.0 / hyper.tau_ref);
  std::vector<double> p(topo.channel_count());
  for (snn::NodeId j = 0; j < topo.channel_count(); ++j)
    p[j] = dm * init.syn_p[j] + init.syn_q[j];
  double loss = 0.0;
  for (std::size_t v = 0; v < topo.visible.size(); ++v) {
    const snn::NodeId i = topo.visible[v];
    double u = params.bias[i] - (dr * init.ref_r[i] + init.last_spikes[i]);
    for (std::size_t k = 0; k < topo.parents[i].size(); ++k)
      u += params.weights[i][k] * p[topo.parents[i][k]];
    loss += bce(targets[v], slope * (u - hyper.threshold));
  }
  return loss;
}

// One enumerated hidden trajectory of a tiny GLM instance.
struct HiddenOutcome {
  snn::SpikeRecord record;  // full record, visible rows clamped
  double log_p_hidden = 0.0;
  double visible_nll = 0.0;  // sum over visible of bce terms
};

// Walks all 2^(|H| * T) hidden assignments; potentials via conv_potentials.
inline std::vector<HiddenOutcome> enumerate_hidden(const snn::SpikeRecord& visible,
                                                   const snn::SpikeRecord& exo,
                                                   const snn::Parameters& params,
                                                   const snn::Topology& topo,
                                                   const snn::HyperParams& hyper) {
  const int horizon = visible.horizon;
  const std::size_t bits = topo.hidden.size() * static_cast<std::size_t>(horizon);
  std::vector<HiddenOutcome> outcomes;
  snn::SpikeRecord record(static_cast<int>(topo.neuron_count), horizon);
  for (std::size_t v = 0; v < topo.visible.size(); ++v)
    for (int t = 0; t < horizon; ++t)
      record.set(static_cast<int>(topo.visible[v]), t, visible.get(static_cast<int>(v), t));

  for (std::uint64_t m = 0; m < (std::uint64_t{1} << bits); ++m) {
    std::size_t bit = 0;
    for (int t = 0; t < horizon; ++t)
      for (snn::NodeId h : topo.hidden) record.set(static_cast<int>(h), t, (m >> bit++) & 1u);

    const snn::Matrix u = conv_potentials(record, exo, params, topo, hyper);
    HiddenOutcome out;
    out.record = record;
    for (int t = 0; t < horizon; ++t) {
      for (snn::NodeId h : topo.hidden)
        out.log_p_hidden -= bce(record.get(static_cast<int>(h), t),
                                hyper.bandwidth * u.at(static_cast<int>(h), t));
      for (std::size_t v = 0; v < topo.visible.size(); ++v)
        out.visible_nll += bce(visible.get(static_cast<int>(v), t),
                               hyper.bandwidth * u.at(static_cast<int>(topo.visible[v]), t));
    }
    outcomes.push_back(std::move(out));
  }
  return outcomes;
}

}  // namespace oracle

#include "snn/learn_srm.hpp"

#include <cmath>
#include <cstring>

#include "snn/glm.hpp"
#include "snn/rng.hpp"

namespace snn {

SurrogateKind parse_surrogate(const std::string& name, double slope) {
  require_arg(slope > 0, "surrogate: slope must be positive");
  SurrogateKind kind;
  kind.slope = slope;
  if (name == "sigmoid") kind.variant = SurrogateKind::Variant::sigmoid;
  else if (name == "rectifier") kind.variant = SurrogateKind::Variant::rectifier;
  else if (name == "exponential") kind.variant = SurrogateKind::Variant::exponential;
  else throw std::invalid_argument("surrogate: unknown variant '" + name + "'");
  return kind;
}

double surrogate_derivative(double u, double threshold, const SurrogateKind& kind) {
  const double d = u - threshold;
  switch (kind.variant) {
    case SurrogateKind::Variant::sigmoid: {
      // sigma'(v) = sigma(v) * sigma(-v); the raw form decays to zero at
      // saturation instead of flooring at the probability clamp
      return kind.slope * stable_sigmoid(kind.slope * d) * stable_sigmoid(-kind.slope * d);
    }
    case SurrogateKind::Variant::rectifier:
      return kind.slope * std::max(0.0, 1.0 - kind.slope * std::fabs(d));
    case SurrogateKind::Variant::exponential:
      return kind.slope * std::exp(-kind.slope * std::fabs(d));
  }
  return 0.0;
}

LocalLoss local_loss(int target, double u, double threshold, double slope) {
  const double v = slope * (u - threshold);
  LocalLoss out;
  out.loss = softplus(target ? -v : v);
  const double s = clamped_sigmoid(v);
  out.d_loss = (s - target) / (s * (1.0 - s));
  return out;
}

ErrorModeKind parse_error_mode(const std::string& name) {
  if (name == "readout_direct") return ErrorModeKind::readout_direct;
  if (name == "random_feedback") return ErrorModeKind::random_feedback;
  if (name == "local_layer") return ErrorModeKind::local_layer;
  throw std::invalid_argument("error_mode: unknown mode '" + name + "'");
}

std::uint64_t FeedbackSignals::content_hash() const {
  // FNV-1a over the raw matrix bytes.
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const Matrix& m) {
    for (double x : m.v) {
      std::uint64_t bits;
      std::memcpy(&bits, &x, sizeof bits);
      for (int k = 0; k < 8; ++k) {
        h ^= (bits >> (8 * k)) & 0xffu;
        h *= 1099511628211ull;
      }
    }
  };
  mix(hidden_projection);
  for (const auto& m : layer_readouts) mix(m);
  return h;
}

FeedbackSignals make_feedback_signals(const Topology& topo, ErrorModeKind mode,
                                      std::uint64_t feedback_seed) {
  FeedbackSignals fb;
  fb.mode = mode;
  fb.feedback_seed = feedback_seed;
  if (mode == ErrorModeKind::random_feedback) {
    Rng rng(feedback_seed);
    const double c = topo.visible.empty() ? 0.0 : 1.0 / std::sqrt(static_cast<double>(topo.visible.size()));
    fb.hidden_projection = Matrix(static_cast<int>(topo.hidden.size()), static_cast<int>(topo.visible.size()));
    for (double& x : fb.hidden_projection.v) x = rng.uniform(-c, c);
  } else if (mode == ErrorModeKind::local_layer) {
    require_arg(topo.layered(), "error_mode: local_layer requires a layered topology");
    Rng rng(feedback_seed);
    const double x_count = static_cast<double>(topo.visible.size());
    for (const auto& layer : topo.layers) {
      Matrix readout(static_cast<int>(topo.visible.size()), static_cast<int>(layer.size()));
      const double c = 1.0 / std::sqrt(std::max(1.0, x_count));
      for (double& x : readout.v) x = rng.uniform(-c, c);
      fb.layer_readouts.push_back(std::move(readout));
    }
  }
  return fb;
}

std::vector<double> error_signals(const FeedbackSignals& fb, const Topology& topo,
                                  const ErrorStepContext& ctx) {
  require_arg(ctx.visible_errors.size() == topo.visible.size(),
              "error_signals: visible error count mismatch");
  std::vector<double> e(topo.neuron_count, 0.0);
  for (std::size_t v = 0; v < topo.visible.size(); ++v) e[topo.visible[v]] = ctx.visible_errors[v];

  if (fb.mode == ErrorModeKind::random_feedback) {
    require_arg(ctx.visible_residuals.size() == topo.visible.size(),
                "error_signals: visible residual count mismatch");
    for (std::size_t hi = 0; hi < topo.hidden.size(); ++hi) {
      double acc = 0.0;
      for (std::size_t v = 0; v < topo.visible.size(); ++v)
        acc += fb.hidden_projection.at(static_cast<int>(hi), static_cast<int>(v)) *
               ctx.visible_residuals[v];
      e[topo.hidden[hi]] = acc;
    }
  } else if (fb.mode == ErrorModeKind::local_layer) {
    require_arg(topo.layered(), "error_signals: local_layer requires a layered topology");
    require_arg(ctx.spikes.size() == topo.neuron_count && ctx.targets.size() == topo.visible.size(),
                "error_signals: step context incomplete for local_layer");
    // Hidden layers score their own random readout against the global
    // target; the last (visible) layer keeps its direct errors.
    for (std::size_t l = 0; l + 1 < topo.layers.size(); ++l) {
      const auto& layer = topo.layers[l];
      const Matrix& readout = fb.layer_readouts[l];
      std::vector<double> margin(topo.visible.size(), 0.0);
      for (std::size_t k = 0; k < topo.visible.size(); ++k) {
        double y = 0.0;
        for (std::size_t n = 0; n < layer.size(); ++n)
          y += readout.at(static_cast<int>(k), static_cast<int>(n)) * ctx.spikes[layer[n]];
        margin[k] = clamped_sigmoid(y) - ctx.targets[k];
      }
      for (std::size_t n = 0; n < layer.size(); ++n) {
        double acc = 0.0;
        for (std::size_t k = 0; k < topo.visible.size(); ++k)
          acc += readout.at(static_cast<int>(k), static_cast<int>(n)) * margin[k];
        e[layer[n]] = acc;
      }
    }
  }
  return e;
}

UpdateAccumulator UpdateAccumulator::zero(const Topology& topo) {
  UpdateAccumulator acc;
  acc.grads.resize(topo.neuron_count);
  for (NodeId i = 0; i < topo.neuron_count; ++i) acc.grads[i].assign(topo.parents[i].size(), 0.0);
  acc.bias_grads.assign(topo.neuron_count, 0.0);
  return acc;
}

void UpdateAccumulator::reset() {
  for (auto& row : grads) std::fill(row.begin(), row.end(), 0.0);
  std::fill(bias_grads.begin(), bias_grads.end(), 0.0);
  count = 0;
}

void UpdateAccumulator::merge(const UpdateAccumulator& other) {
  require_arg(grads.size() == other.grads.size(), "accumulator merge: shape mismatch");
  for (std::size_t i = 0; i < grads.size(); ++i) {
    require_arg(grads[i].size() == other.grads[i].size(), "accumulator merge: shape mismatch");
    for (std::size_t k = 0; k < grads[i].size(); ++k) grads[i][k] += other.grads[i][k];
    bias_grads[i] += other.bias_grads[i];
  }
  count += other.count;
}

double train_step_srm(const Parameters& params, const Topology& topo, const HyperParams& hyper,
                      const SpikeRecord& exogenous, const SpikeRecord& targets,
                      const FeedbackSignals& fb, const SrmTrainConfig& cfg,
                      UpdateAccumulator& acc, const NetworkState* initial) {
  require_arg(targets.rows == static_cast<int>(topo.visible.size()),
              "train_step_srm: target rows != visible count");
  require_arg(targets.horizon == exogenous.horizon, "train_step_srm: target horizon mismatch");
  require_arg(acc.grads.size() == topo.neuron_count, "train_step_srm: accumulator shape mismatch");

  const Trajectory traj = run_trajectory(params, topo, hyper, exogenous,
                                         SpikeMode::deterministic, nullptr, nullptr, initial);

  double total_loss = 0.0;
  std::vector<double> visible_errors(topo.visible.size(), 0.0);
  std::vector<double> visible_residuals(topo.visible.size(), 0.0);
  std::vector<std::uint8_t> spikes_t(topo.neuron_count, 0);
  std::vector<std::uint8_t> targets_t(topo.visible.size(), 0);
  for (int t = 0; t < targets.horizon; ++t) {
    for (std::size_t v = 0; v < topo.visible.size(); ++v) {
      const int i = static_cast<int>(topo.visible[v]);
      const int target = targets.get(static_cast<int>(v), t);
      const double u = traj.potentials.at(i, t);
      const LocalLoss ll = local_loss(target, u, hyper.threshold, cfg.surrogate.slope);
      total_loss += ll.loss;
      visible_errors[v] = ll.d_loss;
      visible_residuals[v] =
          cfg.surrogate.slope *
          (clamped_sigmoid(cfg.surrogate.slope * (u - hyper.threshold)) - target);
      targets_t[v] = target;
    }
    for (NodeId i = 0; i < topo.neuron_count; ++i) spikes_t[i] = traj.spikes.get(static_cast<int>(i), t);

    const std::vector<double> e = error_signals(
        fb, topo, ErrorStepContext{visible_errors, visible_residuals, spikes_t, targets_t});
    for (NodeId i = 0; i < topo.neuron_count; ++i) {
      if (e[i] == 0.0) continue;
      const double post = e[i] * surrogate_derivative(traj.potentials.at(static_cast<int>(i), t),
                                                      hyper.threshold, cfg.surrogate);
      const auto& parents = topo.parents[i];
      auto& g = acc.grads[i];
      for (std::size_t k = 0; k < parents.size(); ++k)
        g[k] += post * traj.pre_traces.at(static_cast<int>(parents[k]), t);
      if (cfg.train_bias) acc.bias_grads[i] += post;
    }
  }
  acc.count += 1;
  return total_loss;
}

void apply_updates(Parameters& params, UpdateAccumulator& acc, double learning_rate,
                   long batch_size) {
  require_arg(batch_size > 0, "apply_updates: batch size must be positive");
  require_arg(acc.count == batch_size, "apply_updates: accumulator count != batch size");
  const double scale = learning_rate / static_cast<double>(batch_size);
  for (std::size_t i = 0; i < params.weights.size(); ++i) {
    for (std::size_t k = 0; k < params.weights[i].size(); ++k)
      params.weights[i][k] -= scale * acc.grads[i][k];
    params.bias[i] -= scale * acc.bias_grads[i];
  }
  acc.reset();
}

}  // namespace snn

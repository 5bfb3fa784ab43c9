#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "snn/network.hpp"
#include "snn/types.hpp"

namespace snn {

struct SurrogateKind {
  enum class Variant { sigmoid, rectifier, exponential };
  Variant variant = Variant::sigmoid;
  double slope = 1.0;
};

SurrogateKind parse_surrogate(const std::string& name, double slope);

// Smooth stand-in for the threshold derivative, evaluated at u.
double surrogate_derivative(double u, double threshold, const SurrogateKind& kind);

// Cross-entropy of the target spike against the surrogate-smoothed output
// sigma(slope * (u - threshold)), and its derivative with respect to that
// smoothed output (the per-neuron error fed into the three-factor rule).
struct LocalLoss {
  double loss = 0.0;
  double d_loss = 0.0;
};
LocalLoss local_loss(int target, double u, double threshold, double slope);

enum class ErrorModeKind { readout_direct, random_feedback, local_layer };

ErrorModeKind parse_error_mode(const std::string& name);

// Fixed projections used to route visible errors to hidden neurons. Built
// once per training run; training never writes to them.
struct FeedbackSignals {
  ErrorModeKind mode = ErrorModeKind::readout_direct;
  std::uint64_t feedback_seed = 0;
  Matrix hidden_projection;            // |H| x |X|, random_feedback
  std::vector<Matrix> layer_readouts;  // per layer, |X| x layer size, local_layer

  std::uint64_t content_hash() const;
};

FeedbackSignals make_feedback_signals(const Topology& topo, ErrorModeKind mode,
                                      std::uint64_t feedback_seed);

// Inputs available at one time step for computing error signals.
// visible_errors are the raw loss derivatives that pair with the visible
// neuron's own surrogate factor; visible_residuals are the bounded errors
// (smoothed output minus target, times slope) that feedback projections
// carry to hidden neurons. Projecting the raw derivative instead blows up
// whenever a visible output saturates on the wrong side.
struct ErrorStepContext {
  std::span<const double> visible_errors;     // per visible neuron, visible order
  std::span<const double> visible_residuals;  // per visible neuron, visible order
  std::span<const std::uint8_t> spikes;       // actual outputs of all neurons at t
  std::span<const std::uint8_t> targets;      // target visible spikes at t, visible order
};

// Per-neuron error e_i at one step under the configured strategy.
std::vector<double> error_signals(const FeedbackSignals& fb, const Topology& topo,
                                  const ErrorStepContext& ctx);

// One term of the three-factor rule: error x post sensitivity x pre trace.
inline double sg_contribution(double e, double u, double threshold, const SurrogateKind& kind,
                              double pre_trace) {
  return e * surrogate_derivative(u, threshold, kind) * pre_trace;
}

// Summed per-step weight updates, aligned with Topology::parents.
struct UpdateAccumulator {
  std::vector<std::vector<double>> grads;
  std::vector<double> bias_grads;
  long count = 0;

  static UpdateAccumulator zero(const Topology& topo);
  void reset();
  void merge(const UpdateAccumulator& other);
};

struct SrmTrainConfig {
  SurrogateKind surrogate;
  ErrorModeKind error_mode = ErrorModeKind::readout_direct;
  bool train_bias = false;
};

// Forward-simulates one example deterministically and accumulates the
// three-factor contributions for every edge. No credit flows backward
// through time: each step's contribution uses that step's traces only.
// Returns the summed local loss over visible neurons and steps.
double train_step_srm(const Parameters& params, const Topology& topo, const HyperParams& hyper,
                      const SpikeRecord& exogenous, const SpikeRecord& targets,
                      const FeedbackSignals& fb, const SrmTrainConfig& cfg,
                      UpdateAccumulator& acc, const NetworkState* initial = nullptr);

// w <- w - lr * grad / batch_size, then clears the accumulator.
void apply_updates(Parameters& params, UpdateAccumulator& acc, double learning_rate,
                   long batch_size);

}  // namespace snn

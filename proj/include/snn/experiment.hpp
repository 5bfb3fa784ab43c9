#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "snn/checkpoint.hpp"
#include "snn/encoding.hpp"
#include "snn/events.hpp"
#include "snn/learn_glm.hpp"
#include "snn/learn_srm.hpp"

namespace snn {

enum class ModelKind { srm, glm };

struct TopologyConfig {
  std::string kind;                    // "layered" or "fully_connected"; empty = model default
  std::vector<NodeId> hidden_layers;   // layered: hidden layer sizes (read-out appended)
  NodeId hidden = 8;                   // fully connected: hidden neuron count
};

struct TrainerConfig {
  double learning_rate = 0.05;
  long batch_size = 1;
  // SRM
  SurrogateKind surrogate;
  ErrorModeKind error_mode = ErrorModeKind::readout_direct;
  std::uint64_t feedback_seed = 7;
  bool srm_train_bias = false;
  // GLM
  GlmTrainConfig glm;
};

struct DatasetConfig {
  std::string kind = "synthetic";  // "synthetic" or "manifest"
  SynthSpec synth;
  int coarsen = 1;  // OR-rebin factor applied to the input records
  // manifest / event-file options
  std::string manifest_path;
  int sensor_w = 128, sensor_h = 128;
  int crop_w = 26, crop_h = 26;
  std::uint32_t period_us = 25000;
  std::uint32_t duration_cap_us = 2000000;
  PolarityMode polarity = PolarityMode::per_sign;
};

struct ExperimentConfig {
  ModelKind model = ModelKind::srm;
  std::uint64_t seed = 1;
  TopologyConfig topology;
  HyperParams hyper;
  TrainerConfig trainer;
  DatasetConfig dataset;
  double target_max_rate = 1.0;  // deterministic rate code of the read-out targets
  long examples_budget = 5000;
  long eval_every = 500;
  std::string eval_mode = "sampled";  // GLM: "sampled" or "expected"
  std::string output_dir = "run";

  void validate() const;
};

// Parses the JSON configuration document; `overrides` are dotted
// key=value assignments applied on top (values parsed as JSON when
// possible, else taken as strings).
ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});
ExperimentConfig parse_config_text(const std::string& text, const std::string& origin,
                                   const std::vector<std::string>& overrides = {});

struct MaterializedDataset {
  std::vector<LabeledExample> train;
  std::vector<LabeledExample> test;
  int input_channels = 0;
  int horizon = 0;
  int classes = 0;
};

MaterializedDataset load_dataset(const DatasetConfig& cfg);

struct MetricsRecord {
  long examples_seen = 0;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  double mean_loss = 0.0;   // mean SRM loss or GLM bound since the last record
  double wall_time_s = 0.0; // console-only; never written to the metrics log
};

// One self-describing JSON record per line; excludes wall time so that a
// (config, seed) pair fully determines the log bytes.
std::string metrics_to_jsonl(const std::vector<MetricsRecord>& records);
std::vector<MetricsRecord> parse_metrics_jsonl(const std::string& text, const std::string& origin);

struct TrainOutcome {
  Checkpoint checkpoint;
  std::vector<MetricsRecord> metrics;
  std::string metrics_text;
  double final_test_accuracy = 0.0;
};

// Draws training examples with replacement, runs the configured trainer,
// and evaluates on both splits every eval_every examples. Progress lines
// (including wall time) go to `progress` when non-null.
TrainOutcome run_training(const ExperimentConfig& cfg, std::ostream* progress = nullptr);

struct EvalOutcome {
  double accuracy = 0.0;
  int classes = 0;
  std::vector<long> confusion;  // classes x classes, row = true label

  long confusion_at(int truth, int predicted) const {
    return confusion[static_cast<std::size_t>(truth) * classes + predicted];
  }
};

// Deterministic evaluation: SRM runs the threshold network; GLM either
// samples hidden/visible spikes with a fixed seed ("sampled") or decodes
// expected rates sum_t sigma(u) ("expected").
EvalOutcome evaluate_model(const Checkpoint& ckpt, ModelKind model,
                           const std::vector<LabeledExample>& examples, int classes,
                           const std::string& eval_mode, std::uint64_t seed);

ModelKind parse_model_kind(const std::string& name);

// Writes a synthetic dataset to disk: one text event file per example plus
// a manifest. Returns the manifest path.
std::string write_synthetic_dataset(const SynthSpec& spec, const std::string& dir,
                                    std::uint32_t period_us);

}  // namespace snn

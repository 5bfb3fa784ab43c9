#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "snn/checkpoint.hpp"
#include "snn/experiment.hpp"
#include "snn/text.hpp"

namespace {

int verbosity() {
  const char* env = std::getenv("SNNLAB_LOG");
  if (!env) return 1;
  const std::string v(env);
  if (v == "quiet") return 0;
  if (v == "debug") return 2;
  return 1;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  snn::require_run(out.good(), path + ": cannot open for writing");
  out << content;
  snn::require_run(out.good(), path + ": write failed");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  snn::require_run(in.good(), path + ": cannot open");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int cmd_train(const std::string& config_path, const std::vector<std::string>& overrides) {
  snn::ExperimentConfig cfg = snn::load_config(config_path, overrides);
  std::ostream* progress = verbosity() >= 1 ? &std::cerr : nullptr;
  const snn::TrainOutcome outcome = snn::run_training(cfg, progress);

  std::filesystem::create_directories(cfg.output_dir);
  const auto dir = std::filesystem::path(cfg.output_dir);
  write_file((dir / "metrics.jsonl").string(), outcome.metrics_text);
  snn::save_checkpoint((dir / "checkpoint.txt").string(), outcome.checkpoint);
  std::cout << "checkpoint " << (dir / "checkpoint.txt").string() << "\n"
            << "metrics " << (dir / "metrics.jsonl").string() << "\n"
            << "final_test_accuracy " << snn::format_double(outcome.final_test_accuracy) << "\n";
  return 0;
}

int cmd_eval(const std::string& checkpoint_path, const std::string& config_path,
             const std::vector<std::string>& overrides, const std::string& split,
             const std::string& eval_mode, std::uint64_t seed) {
  const snn::Checkpoint ckpt = snn::load_checkpoint(checkpoint_path);
  const snn::ExperimentConfig cfg = snn::load_config(config_path, overrides);
  const snn::MaterializedDataset data = snn::load_dataset(cfg.dataset);
  const auto& examples = split == "train" ? data.train : data.test;
  const snn::ModelKind model = snn::parse_model_kind(ckpt.model);
  const snn::EvalOutcome out =
      snn::evaluate_model(ckpt, model, examples, data.classes, eval_mode, seed);

  std::cout << "examples " << examples.size() << "\n"
            << "accuracy " << snn::format_double(out.accuracy) << "\n"
            << "confusion rows=true cols=predicted\n";
  for (int r = 0; r < out.classes; ++r) {
    for (int c = 0; c < out.classes; ++c) std::cout << (c ? " " : "") << out.confusion_at(r, c);
    std::cout << "\n";
  }
  return 0;
}

int cmd_inspect(const std::string& checkpoint_path) {
  const snn::Checkpoint ckpt = snn::load_checkpoint(checkpoint_path);
  const snn::Topology& topo = ckpt.topology;

  double min_w = 0.0, max_w = 0.0, sum_w = 0.0;
  std::size_t n_w = 0;
  for (const auto& row : ckpt.params.weights)
    for (double w : row) {
      if (n_w == 0) min_w = max_w = w;
      min_w = std::min(min_w, w);
      max_w = std::max(max_w, w);
      sum_w += w;
      ++n_w;
    }

  std::cout << "model " << ckpt.model << "\n"
            << "neurons " << topo.neuron_count << " (visible " << topo.visible.size()
            << ", hidden " << topo.hidden.size() << ")\n"
            << "exogenous " << topo.exogenous_count << "\n"
            << "edges " << topo.edge_count() << "\n";
  if (!topo.layers.empty()) {
    std::cout << "layers";
    for (const auto& layer : topo.layers) std::cout << " " << layer.size();
    std::cout << "\n";
  }
  if (n_w > 0) {
    std::cout << "weight_min " << snn::format_double(min_w) << "\n"
              << "weight_max " << snn::format_double(max_w) << "\n"
              << "weight_mean " << snn::format_double(sum_w / static_cast<double>(n_w)) << "\n";
  }
  std::cout << "hyper tau_mem " << snn::format_double(ckpt.hyper.tau_mem) << "\n"
            << "hyper tau_syn " << snn::format_double(ckpt.hyper.tau_syn) << "\n"
            << "hyper tau_ref " << snn::format_double(ckpt.hyper.tau_ref) << "\n"
            << "hyper threshold " << snn::format_double(ckpt.hyper.threshold) << "\n"
            << "hyper bandwidth " << snn::format_double(ckpt.hyper.bandwidth) << "\n";
  return 0;
}

int cmd_synth(const snn::SynthSpec& spec, const std::string& dir, std::uint32_t period_us) {
  const std::string manifest = snn::write_synthetic_dataset(spec, dir, period_us);
  std::cout << "manifest " << manifest << "\n"
            << "hint: dataset config for training on these files:\n"
            << "  {\"kind\":\"manifest\",\"manifest\":\"" << manifest << "\",\n"
            << "   \"sensor\":[" << spec.inputs << ",1],\"crop\":[" << spec.inputs << ",1],\n"
            << "   \"period_us\":" << period_us << ",\"duration_cap_us\":"
            << static_cast<std::uint64_t>(spec.horizon) * period_us
            << ",\"polarity\":\"binary\"}\n";
  return 0;
}

int cmd_plot(const std::string& metrics_path, const std::string& out_path) {
  const auto records = snn::parse_metrics_jsonl(read_file(metrics_path), metrics_path);
  std::ostringstream tsv;
  tsv << "examples_seen\ttrain_accuracy\ttest_accuracy\tmean_loss\n";
  for (const auto& r : records)
    tsv << r.examples_seen << '\t' << snn::format_double(r.train_accuracy) << '\t'
        << snn::format_double(r.test_accuracy) << '\t' << snn::format_double(r.mean_loss) << '\n';
  if (out_path.empty() || out_path == "-")
    std::cout << tsv.str();
  else
    write_file(out_path, tsv.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"snnlab - spiking network training and evaluation"};
  app.require_subcommand(1);

  std::string config_path, checkpoint_path, split = "test", eval_mode = "sampled";
  std::string out_dir = "synth-data", metrics_path, plot_out;
  std::vector<std::string> overrides;
  std::uint64_t eval_seed = 1;
  std::uint32_t period_us = 1000;
  snn::SynthSpec synth;

  auto* train = app.add_subcommand("train", "train a model from a config file");
  train->add_option("--config", config_path, "JSON experiment config")->required();
  train->add_option("--set", overrides, "override a config key, e.g. --set trainer.learning_rate=0.01");

  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on a dataset");
  eval->add_option("--checkpoint", checkpoint_path, "checkpoint file")->required();
  eval->add_option("--config", config_path, "config providing the dataset section")->required();
  eval->add_option("--set", overrides, "config override");
  eval->add_option("--split", split, "train or test (default test)");
  eval->add_option("--eval-mode", eval_mode, "sampled or expected (GLM)");
  eval->add_option("--seed", eval_seed, "evaluation seed");

  auto* inspect = app.add_subcommand("inspect", "summarize a checkpoint");
  inspect->add_option("checkpoint", checkpoint_path, "checkpoint file")->required();

  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic event dataset");
  synth_cmd->add_option("--out", out_dir, "output directory");
  synth_cmd->add_option("--classes", synth.classes, "class count");
  synth_cmd->add_option("--inputs", synth.inputs, "input channels");
  synth_cmd->add_option("--horizon", synth.horizon, "steps per example");
  synth_cmd->add_option("--jitter", synth.jitter, "per-spike jitter in steps");
  synth_cmd->add_option("--noise", synth.noise, "spurious/deletion probability");
  synth_cmd->add_option("--train-count", synth.train_count, "train examples");
  synth_cmd->add_option("--test-count", synth.test_count, "test examples");
  synth_cmd->add_option("--seed", synth.seed, "dataset seed");
  synth_cmd->add_option("--period", period_us, "microseconds per step in the event files");

  auto* plot = app.add_subcommand("plot", "emit plot data (TSV) from a metrics log");
  plot->add_option("--metrics", metrics_path, "metrics.jsonl file")->required();
  plot->add_option("--out", plot_out, "output TSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (train->parsed()) return cmd_train(config_path, overrides);
    if (eval->parsed())
      return cmd_eval(checkpoint_path, config_path, overrides, split, eval_mode, eval_seed);
    if (inspect->parsed()) return cmd_inspect(checkpoint_path);
    if (synth_cmd->parsed()) return cmd_synth(synth, out_dir, period_us);
    if (plot->parsed()) return cmd_plot(metrics_path, plot_out);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error (validation): " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

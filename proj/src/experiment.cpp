#include "snn/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "snn/text.hpp"

namespace snn {

namespace {

using nlohmann::json;

// splitmix64 finalizer; derives independent child seeds from (seed, tag).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (tag + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  require_arg(eq != std::string::npos && eq > 0,
              "override '" + assignment + "' is not key=value");
  const std::string path = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);

  json* node = &doc;
  std::size_t pos = 0;
  while (true) {
    const std::size_t dot = path.find('.', pos);
    const std::string key = path.substr(pos, dot == std::string::npos ? dot : dot - pos);
    require_arg(!key.empty(), "override '" + assignment + "' has an empty key segment");
    if (dot == std::string::npos) {
      json parsed = json::parse(value, nullptr, false);
      (*node)[key] = parsed.is_discarded() ? json(value) : parsed;
      break;
    }
    node = &(*node)[key];
    pos = dot + 1;
  }
}

SurrogateKind surrogate_from_json(const json& doc) {
  return parse_surrogate(doc.value("variant", "sigmoid"), doc.value("slope", 1.0));
}

}  // namespace

ModelKind parse_model_kind(const std::string& name) {
  if (name == "srm") return ModelKind::srm;
  if (name == "glm") return ModelKind::glm;
  throw std::invalid_argument("model: unknown kind '" + name + "'");
}

void ExperimentConfig::validate() const {
  hyper.validate();
  require_arg(examples_budget > 0, "config: examples_budget must be positive");
  require_arg(eval_every > 0, "config: eval_every must be positive");
  require_arg(trainer.learning_rate > 0, "config: learning_rate must be positive");
  require_arg(trainer.batch_size > 0, "config: batch_size must be positive");
  require_arg(trainer.glm.samples_per_example > 0, "config: samples_per_example must be positive");
  require_arg(trainer.glm.baseline_decay >= 0 && trainer.glm.baseline_decay < 1,
              "config: baseline.decay must be in [0, 1)");
  require_arg(target_max_rate > 0 && target_max_rate <= 1, "config: target.max_rate in (0, 1]");
  require_arg(dataset.kind == "synthetic" || dataset.kind == "manifest",
              "config: dataset.kind must be synthetic or manifest");
  require_arg(dataset.coarsen >= 1, "config: dataset.coarsen must be >= 1");
  require_arg(eval_mode == "sampled" || eval_mode == "expected",
              "config: eval_mode must be sampled or expected");
  if (dataset.kind == "manifest")
    require_arg(!dataset.manifest_path.empty(), "config: dataset.manifest path missing");
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin,
                                   const std::vector<std::string>& overrides) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(origin + ": " + e.what());
  }
  for (const auto& o : overrides) apply_override(doc, o);

  ExperimentConfig cfg;
  try {
    cfg.model = parse_model_kind(doc.value("model", "srm"));
    cfg.seed = doc.value("seed", std::uint64_t{1});
    cfg.examples_budget = doc.value("examples_budget", 5000L);
    cfg.eval_every = doc.value("eval_every", 500L);
    cfg.eval_mode = doc.value("eval_mode", "sampled");
    cfg.output_dir = doc.value("output_dir", "run");

    if (doc.contains("topology")) {
      const json& t = doc["topology"];
      cfg.topology.kind = t.value("kind", "");
      cfg.topology.hidden = t.value("hidden", NodeId{8});
      if (t.contains("hidden_layers"))
        cfg.topology.hidden_layers = t["hidden_layers"].get<std::vector<NodeId>>();
    }
    if (doc.contains("hyper")) {
      const json& h = doc["hyper"];
      cfg.hyper.tau_mem = h.value("tau_mem", cfg.hyper.tau_mem);
      cfg.hyper.tau_syn = h.value("tau_syn", cfg.hyper.tau_syn);
      cfg.hyper.tau_ref = h.value("tau_ref", cfg.hyper.tau_ref);
      cfg.hyper.threshold = h.value("threshold", cfg.hyper.threshold);
      cfg.hyper.bandwidth = h.value("bandwidth", cfg.hyper.bandwidth);
    }
    if (doc.contains("trainer")) {
      const json& tr = doc["trainer"];
      cfg.trainer.learning_rate = tr.value("learning_rate", cfg.trainer.learning_rate);
      cfg.trainer.batch_size = tr.value("batch_size", cfg.trainer.batch_size);
      if (tr.contains("surrogate")) cfg.trainer.surrogate = surrogate_from_json(tr["surrogate"]);
      cfg.trainer.error_mode = parse_error_mode(tr.value("error_mode", "readout_direct"));
      cfg.trainer.feedback_seed = tr.value("feedback_seed", std::uint64_t{7});
      cfg.trainer.srm_train_bias = tr.value("train_bias", false);
      if (tr.contains("baseline")) {
        cfg.trainer.glm.baseline_enabled = tr["baseline"].value("enabled", true);
        cfg.trainer.glm.baseline_decay = tr["baseline"].value("decay", 0.99);
      }
      cfg.trainer.glm.samples_per_example = tr.value("samples_per_example", 1);
      cfg.trainer.glm.train_bias = tr.value("glm_train_bias", true);
    }
    if (doc.contains("dataset")) {
      const json& d = doc["dataset"];
      cfg.dataset.kind = d.value("kind", "synthetic");
      cfg.dataset.coarsen = d.value("coarsen", 1);
      cfg.dataset.synth.classes = d.value("classes", cfg.dataset.synth.classes);
      cfg.dataset.synth.inputs = d.value("inputs", cfg.dataset.synth.inputs);
      cfg.dataset.synth.horizon = d.value("horizon", cfg.dataset.synth.horizon);
      cfg.dataset.synth.jitter = d.value("jitter", cfg.dataset.synth.jitter);
      cfg.dataset.synth.noise = d.value("noise", cfg.dataset.synth.noise);
      cfg.dataset.synth.train_count = d.value("train_count", cfg.dataset.synth.train_count);
      cfg.dataset.synth.test_count = d.value("test_count", cfg.dataset.synth.test_count);
      cfg.dataset.synth.seed = d.value("seed", cfg.dataset.synth.seed);
      cfg.dataset.manifest_path = d.value("manifest", "");
      if (d.contains("sensor")) {
        cfg.dataset.sensor_w = d["sensor"][0].get<int>();
        cfg.dataset.sensor_h = d["sensor"][1].get<int>();
      }
      if (d.contains("crop")) {
        cfg.dataset.crop_w = d["crop"][0].get<int>();
        cfg.dataset.crop_h = d["crop"][1].get<int>();
      }
      cfg.dataset.period_us = d.value("period_us", cfg.dataset.period_us);
      cfg.dataset.duration_cap_us = d.value("duration_cap_us", cfg.dataset.duration_cap_us);
      cfg.dataset.polarity = parse_polarity_mode(d.value("polarity", "per_sign"));
    }
    if (doc.contains("target"))
      cfg.target_max_rate = doc["target"].value("max_rate", 1.0);
  } catch (const json::exception& e) {
    throw std::invalid_argument(origin + ": " + e.what());
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  require_arg(in.good(), path + ": cannot open config");
  std::stringstream buf;
  buf << in.rdbuf();
  ExperimentConfig cfg = parse_config_text(buf.str(), path, overrides);
  if (cfg.dataset.kind == "manifest")
    require_arg(std::filesystem::exists(cfg.dataset.manifest_path),
                cfg.dataset.manifest_path + ": manifest does not exist");
  return cfg;
}

MaterializedDataset load_dataset(const DatasetConfig& cfg) {
  MaterializedDataset data;
  if (cfg.kind == "synthetic") {
    SyntheticDataset synth = synthesize_patterns(cfg.synth);
    data.classes = cfg.synth.classes;
    data.train = std::move(synth.train);
    data.test = std::move(synth.test);
  } else {
    require_arg(cfg.kind == "manifest", "dataset: unknown kind '" + cfg.kind + "'");
    const DatasetManifest manifest = load_manifest(cfg.manifest_path);
    data.classes = manifest.class_count;
    const std::filesystem::path base = std::filesystem::path(cfg.manifest_path).parent_path();
    for (const auto& entry : manifest.entries) {
      const std::string file = (base / entry.path).string();
      require_arg(std::filesystem::exists(file), file + ": event file does not exist");
      const EventStream stream = load_events(file);
      const FrameSequence frames =
          crop_and_bin(stream, cfg.sensor_w, cfg.sensor_h, cfg.crop_w, cfg.crop_h, cfg.period_us,
                       cfg.duration_cap_us, cfg.polarity);
      LabeledExample ex{flatten(frames), entry.label};
      (entry.split == "test" ? data.test : data.train).push_back(std::move(ex));
    }
  }
  if (cfg.coarsen > 1) {
    for (auto& ex : data.train) ex.inputs = coarsen_record(ex.inputs, cfg.coarsen);
    for (auto& ex : data.test) ex.inputs = coarsen_record(ex.inputs, cfg.coarsen);
  }
  require_arg(!data.train.empty(), "dataset: empty train split");
  data.input_channels = data.train[0].inputs.rows;
  data.horizon = data.train[0].inputs.horizon;
  for (const auto& ex : data.train)
    require_arg(ex.inputs.rows == data.input_channels && ex.inputs.horizon == data.horizon,
                "dataset: inconsistent example shapes in train split");
  for (const auto& ex : data.test)
    require_arg(ex.inputs.rows == data.input_channels && ex.inputs.horizon == data.horizon,
                "dataset: inconsistent example shapes in test split");
  return data;
}

namespace {

Topology make_model_topology(const ExperimentConfig& cfg, const MaterializedDataset& data) {
  std::string kind = cfg.topology.kind;
  if (kind.empty()) kind = cfg.model == ModelKind::srm ? "layered" : "fully_connected";
  const NodeId exo = static_cast<NodeId>(data.input_channels);
  if (kind == "layered") {
    std::vector<NodeId> sizes = cfg.topology.hidden_layers;
    if (sizes.empty()) sizes.push_back(cfg.topology.hidden);
    sizes.push_back(static_cast<NodeId>(data.classes));
    return build_topology(layered_spec(sizes, exo));
  }
  require_arg(kind == "fully_connected", "topology: unknown kind '" + kind + "'");
  return build_topology(
      fully_connected_spec(static_cast<NodeId>(data.classes), cfg.topology.hidden, exo));
}

int argmax_counts(const std::vector<double>& counts) {
  int best = 0;
  for (std::size_t i = 1; i < counts.size(); ++i)
    if (counts[i] > counts[best]) best = static_cast<int>(i);
  return best;
}

}  // namespace

EvalOutcome evaluate_model(const Checkpoint& ckpt, ModelKind model,
                           const std::vector<LabeledExample>& examples, int classes,
                           const std::string& eval_mode, std::uint64_t seed) {
  require_arg(!examples.empty(), "eval: empty dataset");
  const Topology& topo = ckpt.topology;
  require_arg(static_cast<int>(topo.visible.size()) == classes,
              "eval: visible count != class count");

  EvalOutcome out;
  out.classes = classes;
  out.confusion.assign(static_cast<std::size_t>(classes) * classes, 0);
  Rng rng(mix_seed(seed, 0xe7a1));
  long correct = 0;
  for (const auto& ex : examples) {
    require_arg(ex.inputs.rows == static_cast<int>(topo.exogenous_count),
                "eval: input channels do not match checkpoint topology");
    int predicted = 0;
    if (model == ModelKind::srm) {
      const Trajectory traj =
          run_trajectory(ckpt.params, topo, ckpt.hyper, ex.inputs, SpikeMode::deterministic);
      SpikeRecord visible(classes, ex.inputs.horizon);
      for (int v = 0; v < classes; ++v)
        for (int t = 0; t < ex.inputs.horizon; ++t)
          visible.set(v, t, traj.spikes.get(static_cast<int>(topo.visible[v]), t));
      predicted = rate_decode(visible);
    } else {
      const Trajectory traj = run_trajectory(ckpt.params, topo, ckpt.hyper, ex.inputs,
                                             SpikeMode::stochastic, nullptr, &rng);
      if (eval_mode == "expected") {
        std::vector<double> counts(classes, 0.0);
        for (int v = 0; v < classes; ++v)
          for (int t = 0; t < ex.inputs.horizon; ++t)
            counts[v] += spike_probability(
                traj.potentials.at(static_cast<int>(topo.visible[v]), t), ckpt.hyper.bandwidth);
        predicted = argmax_counts(counts);
      } else {
        SpikeRecord visible(classes, ex.inputs.horizon);
        for (int v = 0; v < classes; ++v)
          for (int t = 0; t < ex.inputs.horizon; ++t)
            visible.set(v, t, traj.spikes.get(static_cast<int>(topo.visible[v]), t));
        predicted = rate_decode(visible);
      }
    }
    out.confusion[static_cast<std::size_t>(ex.label) * classes + predicted] += 1;
    if (predicted == ex.label) ++correct;
  }
  out.accuracy = static_cast<double>(correct) / static_cast<double>(examples.size());
  return out;
}

std::string metrics_to_jsonl(const std::vector<MetricsRecord>& records) {
  std::ostringstream out;
  for (const auto& r : records) {
    out << "{\"examples_seen\":" << r.examples_seen
        << ",\"train_accuracy\":" << format_double(r.train_accuracy)
        << ",\"test_accuracy\":" << format_double(r.test_accuracy)
        << ",\"mean_loss\":" << format_double(r.mean_loss) << "}\n";
  }
  return out.str();
}

std::vector<MetricsRecord> parse_metrics_jsonl(const std::string& text, const std::string& origin) {
  std::vector<MetricsRecord> records;
  std::istringstream in(text);
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json doc;
    try {
      doc = json::parse(line);
      MetricsRecord r;
      r.examples_seen = doc.at("examples_seen").get<long>();
      r.train_accuracy = doc.at("train_accuracy").get<double>();
      r.test_accuracy = doc.at("test_accuracy").get<double>();
      r.mean_loss = doc.at("mean_loss").get<double>();
      records.push_back(r);
    } catch (const json::exception& e) {
      throw std::runtime_error(origin + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

TrainOutcome run_training(const ExperimentConfig& cfg, std::ostream* progress) {
  cfg.validate();
  const MaterializedDataset data = load_dataset(cfg.dataset);
  require_arg(data.classes >= 2, "training: need at least two classes");

  const Topology topo = make_model_topology(cfg, data);
  Parameters params = init_parameters(topo, mix_seed(cfg.seed, 1));

  EncoderSpec target_spec;
  target_spec.scheme = EncodingScheme::rate;
  target_spec.window = data.horizon;
  target_spec.max_rate = cfg.target_max_rate;
  target_spec.deterministic = true;
  std::vector<SpikeRecord> targets;
  targets.reserve(data.classes);
  for (int c = 0; c < data.classes; ++c) targets.push_back(make_target(c, data.classes, target_spec));

  const FeedbackSignals fb =
      make_feedback_signals(topo, cfg.trainer.error_mode, cfg.trainer.feedback_seed);
  const SrmTrainConfig srm_cfg{cfg.trainer.surrogate, cfg.trainer.error_mode,
                               cfg.trainer.srm_train_bias};
  UpdateAccumulator acc = UpdateAccumulator::zero(topo);
  GlmTrainState glm_state = GlmTrainState::zero(topo);

  Rng train_rng(mix_seed(cfg.seed, 2));
  const auto t0 = std::chrono::steady_clock::now();
  TrainOutcome outcome;
  double loss_sum = 0.0;
  long loss_count = 0;

  if (progress) {
    *progress << "train model=" << (cfg.model == ModelKind::srm ? "srm" : "glm")
              << " seed=" << cfg.seed << " batch_size=" << cfg.trainer.batch_size
              << " budget=" << cfg.examples_budget << " neurons=" << topo.neuron_count
              << " inputs=" << data.input_channels << " horizon=" << data.horizon << "\n";
  }

  auto flush_batch = [&](UpdateAccumulator& a) {
    if (a.count > 0) apply_updates(params, a, cfg.trainer.learning_rate, a.count);
  };

  for (long seen = 1; seen <= cfg.examples_budget; ++seen) {
    const LabeledExample& ex = data.train[train_rng.below(data.train.size())];
    const SpikeRecord& target = targets[ex.label];
    if (cfg.model == ModelKind::srm) {
      loss_sum += train_step_srm(params, topo, cfg.hyper, ex.inputs, target, fb, srm_cfg, acc);
      if (acc.count >= cfg.trainer.batch_size)
        apply_updates(params, acc, cfg.trainer.learning_rate, cfg.trainer.batch_size);
    } else {
      loss_sum += train_step_glm(params, topo, cfg.hyper, ex.inputs, target, cfg.trainer.glm,
                                 glm_state, train_rng);
      if (glm_state.acc.count >= cfg.trainer.batch_size)
        apply_updates(params, glm_state.acc, cfg.trainer.learning_rate, cfg.trainer.batch_size);
    }
    ++loss_count;

    if (seen % cfg.eval_every == 0) {
      Checkpoint current{cfg.model == ModelKind::srm ? "srm" : "glm", topo, cfg.hyper, params};
      MetricsRecord rec;
      rec.examples_seen = seen;
      rec.mean_loss = loss_count > 0 ? loss_sum / static_cast<double>(loss_count) : 0.0;
      rec.train_accuracy = evaluate_model(current, cfg.model, data.train, data.classes,
                                          cfg.eval_mode, mix_seed(cfg.seed, 0x10000 + 2 * seen))
                               .accuracy;
      rec.test_accuracy = data.test.empty()
                              ? 0.0
                              : evaluate_model(current, cfg.model, data.test, data.classes,
                                               cfg.eval_mode, mix_seed(cfg.seed, 0x10001 + 2 * seen))
                                    .accuracy;
      rec.wall_time_s =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      outcome.metrics.push_back(rec);
      loss_sum = 0.0;
      loss_count = 0;
      if (progress) {
        *progress << "examples " << rec.examples_seen << "  train_acc "
                  << format_double(rec.train_accuracy) << "  test_acc "
                  << format_double(rec.test_accuracy) << "  mean_loss "
                  << format_double(rec.mean_loss) << "  wall " << format_double(rec.wall_time_s)
                  << "s\n";
      }
    }
  }
  flush_batch(cfg.model == ModelKind::srm ? acc : glm_state.acc);

  outcome.checkpoint =
      Checkpoint{cfg.model == ModelKind::srm ? "srm" : "glm", topo, cfg.hyper, params};
  outcome.metrics_text = metrics_to_jsonl(outcome.metrics);
  outcome.final_test_accuracy = outcome.metrics.empty() ? 0.0 : outcome.metrics.back().test_accuracy;
  return outcome;
}

std::string write_synthetic_dataset(const SynthSpec& spec, const std::string& dir,
                                    std::uint32_t period_us) {
  require_arg(period_us > 0, "synth: period must be positive");
  const SyntheticDataset data = synthesize_patterns(spec);
  std::filesystem::create_directories(dir);

  DatasetManifest manifest;
  manifest.class_count = spec.classes;
  manifest.seed = spec.seed;

  auto write_split = [&](const std::vector<LabeledExample>& split, const std::string& name) {
    for (std::size_t k = 0; k < split.size(); ++k) {
      const LabeledExample& ex = split[k];
      EventStream stream;
      for (int t = 0; t < ex.inputs.horizon; ++t)
        for (int ch = 0; ch < ex.inputs.rows; ++ch)
          if (ex.inputs.get(ch, t))
            stream.events.push_back(Event{static_cast<std::uint32_t>(t) * period_us,
                                          static_cast<std::uint16_t>(ch), 0, 1});
      char name_buf[64];
      std::snprintf(name_buf, sizeof name_buf, "%s_%05zu_c%d.txt", name.c_str(), k, ex.label);
      write_events_text((std::filesystem::path(dir) / name_buf).string(), stream);
      manifest.entries.push_back({name_buf, ex.label, name});
    }
  };
  write_split(data.train, "train");
  write_split(data.test, "test");

  const std::string manifest_path = (std::filesystem::path(dir) / "manifest.json").string();
  save_manifest(manifest_path, manifest);
  return manifest_path;
}

}  // namespace snn

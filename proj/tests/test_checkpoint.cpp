#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "snn/checkpoint.hpp"

using namespace snn;

namespace {

Checkpoint sample_checkpoint() {
  Checkpoint ckpt;
  ckpt.model = "glm";
  ckpt.topology = build_topology(layered_spec({3, 2}, 4));
  ckpt.hyper.tau_mem = 17.5;
  ckpt.hyper.bandwidth = 2.25;
  ckpt.params = init_parameters(ckpt.topology, 123);
  // awkward values that need full round-trip precision
  ckpt.params.weights[0][0] = 1.0 / 3.0;
  ckpt.params.weights[3][2] = 1e-17;
  ckpt.params.weights[4][0] = -0.1;
  ckpt.params.bias[1] = std::nextafter(0.5, 1.0);
  return ckpt;
}

}  // namespace

TEST_CASE("checkpoint round trip preserves every value bit-for-bit") {
  const Checkpoint ckpt = sample_checkpoint();
  const std::string text = checkpoint_text(ckpt);
  const Checkpoint loaded = parse_checkpoint(text, "mem");

  CHECK(loaded.model == ckpt.model);
  CHECK(loaded.topology.neuron_count == ckpt.topology.neuron_count);
  CHECK(loaded.topology.exogenous_count == ckpt.topology.exogenous_count);
  CHECK(loaded.topology.visible == ckpt.topology.visible);
  CHECK(loaded.topology.parents == ckpt.topology.parents);
  CHECK(loaded.topology.layers == ckpt.topology.layers);
  CHECK(loaded.hyper.tau_mem == ckpt.hyper.tau_mem);
  CHECK(loaded.hyper.bandwidth == ckpt.hyper.bandwidth);
  CHECK(loaded.params.weights == ckpt.params.weights);
  CHECK(loaded.params.bias == ckpt.params.bias);

  // canonical writer: serialize(parse(text)) is byte-identical
  CHECK(checkpoint_text(loaded) == text);
}

TEST_CASE("checkpoint file round trip") {
  const auto path = std::filesystem::temp_directory_path() /
                    ("snn_ckpt_" + std::to_string(::getpid()) + ".txt");
  const Checkpoint ckpt = sample_checkpoint();
  save_checkpoint(path.string(), ckpt);
  const Checkpoint loaded = load_checkpoint(path.string());
  CHECK(loaded.params.weights == ckpt.params.weights);
  std::filesystem::remove(path);
}

TEST_CASE("corrupt checkpoints report the byte offset") {
  const Checkpoint ckpt = sample_checkpoint();
  std::string text = checkpoint_text(ckpt);

  SUBCASE("bad magic") {
    CHECK_THROWS_WITH_AS(parse_checkpoint("garbage\n", "mem"),
                         doctest::Contains("not a checkpoint"), std::runtime_error);
  }
  SUBCASE("mangled number") {
    const auto pos = text.find("bias 0 ");
    REQUIRE(pos != std::string::npos);
    text.replace(pos + 7, 1, "x");
    CHECK_THROWS_WITH_AS(parse_checkpoint(text, "mem"), doctest::Contains("byte offset"),
                         std::runtime_error);
  }
  SUBCASE("unknown key") {
    text += "mystery 42\n";
    CHECK_THROWS_WITH_AS(parse_checkpoint(text, "mem"), doctest::Contains("unknown key"),
                         std::runtime_error);
  }
  SUBCASE("missing biases") {
    const auto pos = text.find("bias 0 ");
    const auto eol = text.find('\n', pos);
    text.erase(pos, eol - pos + 1);
    CHECK_THROWS_AS(parse_checkpoint(text, "mem"), std::runtime_error);
  }
  SUBCASE("topology errors surface as parse failures") {
    text += "edge 0 0 1.5\n";  // self-loop
    CHECK_THROWS_AS(parse_checkpoint(text, "mem"), std::runtime_error);
  }
}

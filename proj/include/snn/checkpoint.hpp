#pragma once

#include <string>

#include "snn/network.hpp"
#include "snn/topology.hpp"

namespace snn {

// Model snapshot: graph, constants, and every weight and bias. Serialized
// as a flat key-value text document with one fact per line; numbers use
// shortest round-trip decimals, so save -> load -> save is byte-stable.
struct Checkpoint {
  std::string model;  // "srm" or "glm"
  Topology topology;
  HyperParams hyper;
  Parameters params;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
std::string checkpoint_text(const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);
Checkpoint parse_checkpoint(const std::string& text, const std::string& origin);

}  // namespace snn

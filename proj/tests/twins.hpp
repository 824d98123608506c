#pragma once

#include <string>

#include "modalnet/dsl/elaborate.hpp"
#include "modalnet/fixtures.hpp"

// Structural comparison of an elaborated .mdn network with its module-built
// twin: same tree shape, equal morphisms at every node, extensionally equal
// leaf systems. Returns an empty string on success, else the first mismatch.
namespace twins {

inline std::string fixture_path(const std::string& file) { return std::string(MODALNET_FIXTURES_DIR) + "/" + file; }

inline std::string same_system(const mnet::ModalDynamicalSystem& a, const mnet::ModalDynamicalSystem& b,
                               const std::string& where) {
  if (!(a.over == b.over)) return where + ": boxes differ";
  if (!(a.states == b.states)) return where + ": state spaces differ: " + a.states.to_string() + " vs " + b.states.to_string();
  if (a.default_state != b.default_state) return where + ": default states differ";
  mnet::CheckOptions opts;
  opts.state_cap = 4096;
  opts.state_samples = 64;
  opts.input_cap = 256;
  opts.input_samples = 8;
  auto r = mnet::compare_systems(a, b, opts);
  if (!r.ok()) return where + ": " + r.witnesses.front().what + " at " + r.witnesses.front().state.to_string();
  return {};
}

inline std::string same_network(const mnet::NetworkNode& a, const mnet::NetworkNode& b, const std::string& where = "root") {
  using K = mnet::NetworkNode::Kind;
  if (a.kind != b.kind) return where + ": node kinds differ";
  if (a.kind == K::Leaf) return same_system(*a.system, *b.system, where);
  if (a.kind == K::Apply && !(*a.morphism == *b.morphism)) return where + ": morphisms differ";
  if (a.children.size() != b.children.size()) return where + ": child counts differ";
  for (std::size_t i = 0; i < a.children.size(); ++i) {
    auto s = same_network(a.children[i], b.children[i], where + "/" + std::to_string(i));
    if (!s.empty()) return s;
  }
  return {};
}

struct Pair {
  std::string file, composition;
  mnet::NetworkNode twin;
};

inline std::vector<Pair> all() {
  using namespace mnet::fixtures;
  return {
      {"retina.mdn", "retina", retina().network},
      {"retina_discrete.mdn", "retina", retina_discrete().network},
      {"eye.mdn", "eye", eye(3).network},
      {"blink.mdn", "blink", blink().network},
      {"layers.mdn", "layers", layers().network},
      {"visual_system.mdn", "visual_system", visual_system().network},
  };
}

}  // namespace twins

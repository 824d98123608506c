#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "modalnet/algebra.hpp"

namespace mnet {

struct StepResult {
  Assignment output;
  Value next;
};

// One synchronous step: read out the current state, then update it with the
// input. Errors: InputShapeError when the input is not over the inputs of
// the current mode, ShapeError when the system breaks its own shape.
StepResult step(const ModalDynamicalSystem& d, const Value& s, const Assignment& input);

struct TraceStep {
  std::size_t index = 0;
  Mode mode;
  Value state;
  Assignment input;
  Assignment output;
  Value next_state;
};

// Per-step port values; a step may mention ports the current mode lacks.
using PortValues = std::map<std::string, Value>;
using InputTrace = std::vector<PortValues>;

struct RunOptions {
  bool strict_ports = false;  // reject values for ports absent in the current mode
  // Number of steps; defaults to the trace length. When longer than the
  // trace, the last line is held.
  std::optional<std::size_t> steps;
};

// Builds the input of one step from the ports of the current mode.
Assignment select_inputs(const TypedFinSet& ports, const PortValues& values, bool strict);

std::vector<TraceStep> run(const ModalDynamicalSystem& d, const Value& s0, const InputTrace& inputs,
                           const RunOptions& opts = {});

struct Witness {
  Value state;
  std::optional<Assignment> input;  // absent for mode/readout disagreements
  std::string what;
};

struct CheckOptions {
  std::uint64_t state_cap = 1 << 16;  // enumerate S up to this many states, else sample
  std::size_t state_samples = 200;
  std::size_t input_cap = 4096;     // enumerate inputs up to this many, else sample
  std::size_t input_samples = 32;
  std::uint64_t seed = 0;
  Exec exec = Exec::Parallel;
};

struct CheckReport {
  std::vector<Witness> witnesses;
  std::uint64_t states_checked = 0;
  std::uint64_t inputs_checked = 0;
  bool exhaustive = true;
  bool ok() const { return witnesses.empty(); }
};

// Extensional comparison of two systems over the same box and state space:
// modes, readouts and updates at every (enumerated or sampled) state and
// input. Exceptions raised by either side are reported as witnesses.
CheckReport compare_systems(const ModalDynamicalSystem& a, const ModalDynamicalSystem& b,
                            const CheckOptions& opts = {});

// P(f1 . f0)(d) against P(f1)(P(f0)(d)).
CheckReport check_functoriality(const MdnMorphism& f0, const MdnMorphism& f1, const ModalDynamicalSystem& d,
                                const CheckOptions& opts = {});

// A network as written: leaves carry systems, inner nodes apply a morphism
// to the tensor of their children, or just tensor them.
struct NetworkNode {
  enum class Kind { Leaf, Apply, Tensor };
  Kind kind = Kind::Leaf;
  std::optional<ModalDynamicalSystem> system;  // Leaf
  std::optional<MdnMorphism> morphism;         // Apply
  std::vector<NetworkNode> children;

  static NetworkNode leaf(ModalDynamicalSystem d);
  static NetworkNode apply(MdnMorphism f, std::vector<NetworkNode> children);
  static NetworkNode tensor(std::vector<NetworkNode> children);

  ModalBox box() const;
};

struct Flattened {
  MdnMorphism morphism;                       // from the tensor of all leaf boxes
  std::vector<ModalDynamicalSystem> leaves;  // in order
};

Flattened flatten(const NetworkNode& node);
// Applies each level's morphism in turn, so routing happens level by level.
ModalDynamicalSystem build_hierarchical(const NetworkNode& node, Exec exec = Exec::Parallel);
// One morphism applied to the tensor of the leaves.
ModalDynamicalSystem build_flat(const NetworkNode& node, Exec exec = Exec::Parallel);

struct ComparisonReport {
  bool equal = true;
  std::size_t steps_compared = 0;
  std::optional<std::size_t> first_divergence;
  std::string detail;
};

ComparisonReport compare_traces(const std::vector<TraceStep>& a, const std::vector<TraceStep>& b);
ComparisonReport check_nested_vs_flat(const NetworkNode& node, const Value& s0, const InputTrace& inputs,
                                      const RunOptions& opts = {});

}  // namespace mnet

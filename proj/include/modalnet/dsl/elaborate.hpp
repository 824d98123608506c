#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "modalnet/dsl/parser.hpp"
#include "modalnet/sim.hpp"

namespace mnet::dsl {

struct ElaboratedMorphism {
  MdnMorphism morphism;
  std::vector<std::string> instances;     // one per source factor, e.g. "R[0]"
  std::vector<std::string> source_boxes;  // box name of each instance
  std::string target;
};

struct ElaboratedDynamics {
  std::string box;
  ModalDynamicalSystem system;
};

// A composition as written, before folding: applications of named
// morphisms (or identities) to the arrows of the next level, ending in
// leaves that are box names.
struct CompositionNode {
  enum class Kind { Leaf, Apply, Tensor };
  Kind kind = Kind::Leaf;
  std::string label;  // morphism name or "id(Box)"; the box name for leaves
  std::string box;    // leaf box, or the target box of an application
  std::optional<MdnMorphism> morphism;
  std::vector<CompositionNode> children;

  std::vector<std::string> leaf_boxes() const;
};

struct Composition {
  CompositionNode tree;
  MdnMorphism morphism;                // from the tensor of the leaf boxes
  std::optional<NetworkNode> network;  // absent when some leaf box has no dynamics
  std::vector<std::string> leaf_labels;
};

struct Elaboration {
  std::map<std::string, Value> constants;
  std::map<std::string, ValueType> types;
  std::map<std::string, ModalBox> boxes;
  std::map<std::string, ElaboratedMorphism> morphisms;
  std::map<std::string, ElaboratedDynamics> dynamics;
  std::map<std::string, Composition> compositions;
  std::vector<Diagnostic> warnings;

  // The dynamics declared on a box, if any.
  const ElaboratedDynamics* dynamics_on(const std::string& box) const;
};

// Constant overrides (name -> expression text) replace the declared values
// before anything else is elaborated. Errors are thrown as DslError.
Elaboration elaborate(const Document& doc, const std::map<std::string, std::string>& overrides = {});

// Reads, parses and elaborates a file. Errors: Io, plus anything above.
Elaboration load_file(const std::string& path, const std::map<std::string, std::string>& overrides = {});
std::string read_file(const std::string& path);

}  // namespace mnet::dsl

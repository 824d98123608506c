#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "modalnet/typed_set.hpp"

namespace mnet {

// Interface of a component: input ports and output ports live in separate
// namespaces, so a name may appear on both sides.
struct Box {
  TypedFinSet inputs;
  TypedFinSet outputs;

  std::string to_string() const;
  friend bool operator==(const Box&, const Box&) = default;
};

Box tensor(const Box& a, const Box& b);
Box tensor(std::span<const Box> boxes);

enum class PortSide { SourceIn, SourceOut, TargetIn, TargetOut };
const char* to_string(PortSide side);

struct PortRef {
  PortSide side;
  std::string port;
};

// Where an inner input port (of the source box X) takes its value from.
struct Feed {
  enum class From : std::uint8_t { TargetInput, SourceOutput };
  From from;
  std::size_t index;
  friend bool operator==(const Feed&, const Feed&) = default;
};

// A wiring diagram X -> Y: every input of X is fed from an input of Y or an
// output of X, and every output of Y is fed from an output of X. Being two
// functions, a diagram can split a wire but never merge two into one port.
class WiringDiagram {
 public:
  static WiringDiagram make(Box source, Box target, const std::map<std::string, PortRef>& in_map,
                            const std::map<std::string, PortRef>& out_map);
  static WiringDiagram from_feeds(Box source, Box target, std::vector<Feed> in_feeds,
                                  std::vector<std::size_t> out_feeds);

  const Box& source() const { return source_; }
  const Box& target() const { return target_; }
  std::span<const Feed> in_feeds() const { return in_feeds_; }
  std::span<const std::size_t> out_feeds() const { return out_feeds_; }

  // phi_in : X.in -> Y.in + X.out, phi_out : Y.out -> X.out
  TypedFunction phi_in() const;
  TypedFunction phi_out() const;

  std::string to_string() const;
  friend bool operator==(const WiringDiagram&, const WiringDiagram&) = default;

 private:
  WiringDiagram() = default;
  Box source_;
  Box target_;
  std::vector<Feed> in_feeds_;
  std::vector<std::size_t> out_feeds_;
};

WiringDiagram identity_wd(const Box& box);
// psi ∘ phi for phi: X -> Y, psi: Y -> Z.
WiringDiagram compose_wd(const WiringDiagram& phi, const WiringDiagram& psi);
WiringDiagram tensor_wd(const WiringDiagram& a, const WiringDiagram& b);
WiringDiagram tensor_wd(std::span<const WiringDiagram> parts);
// Relabeling A ⊗ B -> B ⊗ A.
WiringDiagram symmetry_wd(const Box& a, const Box& b);

struct Routed {
  Assignment inner_inputs;   // over X.in
  Assignment outer_outputs;  // over Y.out
};

// The dependent-product maps of a diagram: inner inputs are the pullback of
// (external, internal) along phi_in, outer outputs the pullback of internal
// along phi_out.
Routed route(const WiringDiagram& phi, const Assignment& external, const Assignment& internal);
Assignment route_in(const WiringDiagram& phi, const Assignment& external, const Assignment& internal);
Assignment route_out(const WiringDiagram& phi, const Assignment& internal);

// Builds a diagram out of X1 ⊗ ... ⊗ Xn by naming the inner boxes, so
// callers never deal with the tagged port names of the tensor.
class WiringBuilder {
 public:
  WiringBuilder(std::vector<std::pair<std::string, Box>> inner, Box outer);

  // Each inner input takes exactly one feed (MergedWire otherwise).
  WiringBuilder& from_outer(std::string_view inst, std::string_view port, std::string_view outer_port);
  WiringBuilder& from_inner(std::string_view inst, std::string_view port, std::string_view src_inst,
                            std::string_view src_port);
  // Each outer output takes exactly one feed.
  WiringBuilder& export_from(std::string_view outer_port, std::string_view src_inst, std::string_view src_port);

  bool has_inner(std::string_view inst) const;
  bool has_inner_input(std::string_view inst, std::string_view port) const;
  bool has_inner_output(std::string_view inst, std::string_view port) const;
  const Box& source() const { return source_; }
  const Box& outer() const { return outer_; }

  // Errors: PartialMap naming the first unfed port.
  WiringDiagram build() const;

 private:
  std::size_t inner_index(std::string_view inst) const;
  std::size_t input_slot(std::string_view inst, std::string_view port) const;
  std::size_t output_slot(std::string_view inst, std::string_view port) const;
  std::string input_label(std::size_t slot) const;

  std::vector<std::pair<std::string, Box>> inner_;
  std::vector<std::size_t> in_offset_, out_offset_;
  Box source_;
  Box outer_;
  std::vector<std::optional<Feed>> in_feeds_;
  std::vector<std::optional<std::size_t>> out_feeds_;
};

// An operad arrow (X1, ..., Xn) -> Y backed by a diagram out of X1 ⊗ ... ⊗ Xn.
struct OperadArrow {
  std::vector<Box> sources;
  Box target;
  WiringDiagram diagram;
};

OperadArrow operadic_arrow(std::vector<Box> sources, Box target, const std::map<std::string, PortRef>& in_map,
                           const std::map<std::string, PortRef>& out_map);
OperadArrow operadic_arrow(std::vector<Box> sources, WiringDiagram diagram);
OperadArrow identity_arrow(const Box& box);
OperadArrow operadic_compose(const OperadArrow& outer, std::span<const OperadArrow> inners);

}  // namespace mnet

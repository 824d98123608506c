#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "modalnet/wiring.hpp"

namespace mnet {

// A mode of a tensor of atomic modal boxes: one label per atomic factor.
// Atomic boxes have one-label modes, the unit has the empty mode.
using Mode = std::vector<std::string>;

std::string mode_to_string(const Mode& mode);
// Inverse of mode_to_string: labels separated by ','; "()" is the empty mode.
Mode parse_mode(std::string_view text);

// A modal box that is not itself a tensor: a mode set with one box per mode.
struct ModalFactor {
  std::vector<std::string> labels;  // sorted
  std::vector<Box> boxes;           // aligned with labels
  friend bool operator==(const ModalFactor&, const ModalFactor&) = default;
};

// (M, X): a finite mode set with an interface box per mode. A ModalBox is a
// list of atomic factors; tensoring concatenates the lists, so the tensor is
// strictly associative and the unit (no factors, one empty mode) is strict.
// Modes are enumerated in mixed radix with the last factor fastest.
class ModalBox {
 public:
  ModalBox();  // the unit ({()}, empty box)

  // Atomic box; errors EmptyModeSet, MissingInterface, ModeError (bad label).
  static ModalBox make(const std::vector<std::string>& modes, const std::map<std::string, Box>& interface);
  static ModalBox make(const std::vector<std::pair<std::string, Box>>& interface);
  // I(X) = ({*}, X)
  static ModalBox of_box(const Box& box);

  std::span<const ModalFactor> factors() const;
  std::uint64_t mode_count() const;
  Mode mode_at(std::uint64_t index) const;
  std::optional<std::uint64_t> index_of(const Mode& mode) const;
  bool contains(const Mode& mode) const { return index_of(mode).has_value(); }
  std::vector<Mode> modes() const;

  // X(m); throws UnknownMode.
  Box interface(const Mode& mode) const;
  Box interface_at(std::uint64_t index) const;
  bool mode_independent() const;

  std::string to_string() const;
  friend bool operator==(const ModalBox& a, const ModalBox& b);

 private:
  struct Data;
  static ModalBox from_factors(std::vector<ModalFactor> factors);
  std::shared_ptr<const Data> data_;
  friend ModalBox tensor(std::span<const ModalBox> parts);
};

ModalBox tensor(const ModalBox& a, const ModalBox& b);
ModalBox tensor(std::span<const ModalBox> parts);

struct Event {
  WiringDiagram diagram;  // epsilon(m) : X(m) -> Y(sigma(m))
  Mode sigma;
};

// A mode-dependent network (epsilon, sigma) : (M, X) -> (N, Y). Tables are
// explicit for declared morphisms; composites and tensors evaluate their
// event map lazily per mode (the product mode sets of a flattened network
// are far too large to tabulate) and memoize the result. Equality is
// extensional over all source modes.
class MdnMorphism {
 public:
  struct Impl;

  const ModalBox& source() const;
  const ModalBox& target() const;

  // The event at a mode. Composites and tensors check the commuting square
  // whenever they compute an event.
  Event event(const Mode& mode) const;
  Event event_at(std::uint64_t index) const;
  WiringDiagram epsilon(const Mode& mode) const { return event(mode).diagram; }
  Mode sigma(const Mode& mode) const { return event(mode).sigma; }

  std::vector<std::pair<Mode, Event>> tabulate() const;
  // Distinct diagrams used by epsilon, in order of first use.
  std::vector<WiringDiagram> image() const;

  friend bool operator==(const MdnMorphism& a, const MdnMorphism& b);

  explicit MdnMorphism(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  const std::shared_ptr<const Impl>& impl() const { return impl_; }

 private:
  std::shared_ptr<const Impl> impl_;
};

// Events listed for every source mode. Errors: PartialMap, UnknownMode,
// CommutingSquareViolation.
MdnMorphism make_mdn_morphism(ModalBox source, ModalBox target, const std::map<Mode, Event>& table);
MdnMorphism identity_mdn(const ModalBox& box);
// f1 ∘ f0
MdnMorphism compose_mdn(const MdnMorphism& f0, const MdnMorphism& f1);
MdnMorphism tensor_mdn(const MdnMorphism& f, const MdnMorphism& g);
MdnMorphism tensor_mdn(std::span<const MdnMorphism> parts);
MdnMorphism symmetry_mdn(const ModalBox& a, const ModalBox& b);
MdnMorphism include_wd(const WiringDiagram& phi);

// Equality after renaming modes along the enumeration order: same mode
// counts, same interfaces, diagrams and sigma indices mode by mode. This is
// the sense in which I(phi ⊗ psi) and I(phi) ⊗ I(psi) agree, since the
// first has mode * and the second (*, *).
bool equal_up_to_mode_names(const MdnMorphism& a, const MdnMorphism& b);

struct MdnOperadArrow {
  std::vector<ModalBox> sources;
  ModalBox target;
  MdnMorphism morphism;
};

MdnOperadArrow mdn_operadic_arrow(std::vector<ModalBox> sources, MdnMorphism morphism);
MdnOperadArrow mdn_identity_arrow(const ModalBox& box);
MdnOperadArrow mdn_operadic_compose(const MdnOperadArrow& outer, std::span<const MdnOperadArrow> inners);

}  // namespace mnet

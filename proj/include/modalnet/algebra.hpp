#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "modalnet/mdn.hpp"

namespace mnet {

// The state set S of a system. Payloads: a symbol for Finite, a tuple of
// field values for Record, a tuple of component payloads for Product.
// Products flatten nested products, and a product of one space is that
// space, so tensoring systems is strictly associative on states too.
class StateSpace {
 public:
  enum class Kind { Finite, Record, Product };
  struct Field {
    std::string name;
    ValueType type;
    friend bool operator==(const Field&, const Field&) = default;
  };

  StateSpace();  // the one-point product of no spaces

  static StateSpace finite(std::vector<std::string> symbols);
  static StateSpace record(std::vector<Field> fields);
  static StateSpace product(std::vector<StateSpace> components);

  Kind kind() const { return kind_; }
  const std::vector<std::string>& symbols() const { return symbols_; }
  const std::vector<Field>& fields() const { return fields_; }
  const std::vector<StateSpace>& components() const { return components_; }
  // Number of slots this space occupies in a product state.
  std::size_t arity() const { return kind_ == Kind::Product ? components_.size() : 1; }

  bool contains(const Value& v) const;
  // Coerces integer literals in real-valued record fields, then checks membership.
  std::optional<Value> coerce(const Value& v) const;
  bool is_finite() const;
  std::optional<std::uint64_t> cardinality() const;
  Value value_at(std::uint64_t index) const;
  std::vector<Value> enumerate() const;
  Value sample(std::mt19937_64& rng) const;

  std::string to_string() const;
  friend bool operator==(const StateSpace&, const StateSpace&) = default;

 private:
  Kind kind_ = Kind::Product;
  std::vector<std::string> symbols_;
  std::vector<Field> fields_;
  std::vector<StateSpace> components_;
};

// (S, q, f_in, f_out) over a modal box: q picks the mode of a state, the
// update consumes an assignment over the inputs of that mode, the readout
// is an assignment over its outputs.
struct ModalDynamicalSystem {
  using ModeFn = std::function<Mode(const Value&)>;
  using UpdateFn = std::function<Value(const Value&, const Assignment&)>;
  using ReadoutFn = std::function<Assignment(const Value&)>;

  ModalBox over;
  StateSpace states;
  ModeFn mode_of;
  UpdateFn update;
  ReadoutFn readout;
  std::optional<Value> default_state;
};

struct ValidateOptions {
  std::size_t samples = 1000;        // states checked when S is infinite
  std::size_t inputs_per_state = 16;  // sampled inputs when enumeration is too large
  std::uint64_t seed = 0;
};

// Builds and validates a system: every state (or a seeded sample of them
// when S is infinite) must map to a mode of `over`, read out exactly the
// outputs of that mode and update into S. Errors: ModeError, ShapeError.
ModalDynamicalSystem make_mds(ModalBox over, StateSpace states, ModalDynamicalSystem::ModeFn mode_of,
                              ModalDynamicalSystem::UpdateFn update, ModalDynamicalSystem::ReadoutFn readout,
                              std::optional<Value> default_state = std::nullopt, const ValidateOptions& opts = {});
void validate_mds(const ModalDynamicalSystem& d, const ValidateOptions& opts = {});

// P(eps, sigma): states unchanged, mode sigma . q, readout exported along
// phi_out, update fed through phi_in with the system's own readout.
ModalDynamicalSystem apply_morphism(const MdnMorphism& f, const ModalDynamicalSystem& d);

enum class Exec { Serial, Parallel };

// Lax coherence map: product of states, modes and dynamics. With
// Exec::Parallel the factor updates of one step run as OpenMP tasks over
// independent slots; Exec::Serial is the reference loop.
ModalDynamicalSystem tensor_mds(std::span<const ModalDynamicalSystem> parts, Exec exec = Exec::Parallel);
ModalDynamicalSystem tensor_mds(const ModalDynamicalSystem& a, const ModalDynamicalSystem& b,
                                Exec exec = Exec::Parallel);
ModalDynamicalSystem unit_mds();

}  // namespace mnet

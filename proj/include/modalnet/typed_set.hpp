#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "modalnet/value.hpp"

namespace mnet {

struct Port {
  std::string name;
  ValueType type;
  friend bool operator==(const Port&, const Port&) = default;
};

// A finite set of named, typed ports. Ports are kept in a canonical order
// (by name for plain sets, by summand then name for disjoint unions), so
// equality is order-insensitive at the API while remaining a plain vector
// comparison internally. Copies share the immutable port table.
//
// Port names may not contain '/': that character is reserved for the tags
// written by disjoint_union ("<summand>/<name>").
class TypedFinSet {
 public:
  TypedFinSet();

  std::span<const Port> ports() const;
  std::size_t size() const;
  bool empty() const { return size() == 0; }
  const Port& port(std::size_t i) const { return ports()[i]; }
  std::optional<std::size_t> index_of(std::string_view name) const;
  bool contains(std::string_view name) const { return index_of(name).has_value(); }

  // True when this set was built by disjoint_union from at least two nonempty summands.
  bool is_union() const;
  // Nonempty plain summands in order; a plain set is its own single summand.
  std::vector<TypedFinSet> summands() const;

  std::string to_string() const;

  friend bool operator==(const TypedFinSet& a, const TypedFinSet& b);

  // Trusted constructor for ports that are already validated; sorts canonically.
  static TypedFinSet from_ports_unchecked(std::vector<Port> ports);

  struct Data;  // opaque, interned

 private:
  std::shared_ptr<const Data> data_;
};

TypedFinSet make_typed_finset(std::vector<Port> ports);
TypedFinSet make_typed_finset(std::initializer_list<std::pair<std::string, ValueType>> ports);

// Strictly associative disjoint union: summands of unions are spliced in and
// empty summands dropped, so (A+B)+C == A+(B+C) and {}+A == A.
TypedFinSet disjoint_union(const TypedFinSet& left, const TypedFinSet& right);
TypedFinSet disjoint_union(std::span<const TypedFinSet> parts);

// Name of `name` from summand `summand_index` after tagging.
std::string union_tag(std::size_t summand_index, std::string_view name);

// A type-preserving total map between typed finite sets, stored as codomain
// indices aligned with the domain's canonical order.
class TypedFunction {
 public:
  static TypedFunction make(TypedFinSet domain, TypedFinSet codomain,
                            const std::map<std::string, std::string>& map);
  static TypedFunction from_indices(TypedFinSet domain, TypedFinSet codomain,
                                    std::vector<std::size_t> targets);
  static TypedFunction identity(const TypedFinSet& set);

  const TypedFinSet& domain() const { return domain_; }
  const TypedFinSet& codomain() const { return codomain_; }
  std::span<const std::size_t> targets() const { return targets_; }
  const std::string& apply(std::string_view domain_port) const;

  friend bool operator==(const TypedFunction&, const TypedFunction&) = default;

 private:
  TypedFunction(TypedFinSet d, TypedFinSet c, std::vector<std::size_t> t)
      : domain_(std::move(d)), codomain_(std::move(c)), targets_(std::move(t)) {}

  TypedFinSet domain_;
  TypedFinSet codomain_;
  std::vector<std::size_t> targets_;
};

// outer ∘ inner
TypedFunction compose(const TypedFunction& outer, const TypedFunction& inner);

// An element of the dependent product of a typed finite set.
class Assignment {
 public:
  Assignment() = default;  // the unique assignment over the empty set

  static Assignment make(TypedFinSet over, std::vector<Value> values);
  static Assignment from_map(TypedFinSet over, const std::map<std::string, Value>& values);
  // Caller guarantees values align with `over` and inhabit their types.
  static Assignment unchecked(TypedFinSet over, std::vector<Value> values);

  const TypedFinSet& over() const { return over_; }
  std::span<const Value> values() const { return values_; }
  const Value& operator[](std::size_t i) const { return values_[i]; }
  const Value& at(std::string_view port) const;
  std::map<std::string, Value> to_map() const;
  std::string to_string() const;

  friend bool operator==(const Assignment&, const Assignment&) = default;

 private:
  TypedFinSet over_;
  std::vector<Value> values_;
};

// result(a) = asg(q(a))
Assignment pullback(const TypedFunction& q, const Assignment& asg);

// Strength isomorphism between assignments over left+right and pairs.
Assignment merge_assignment(const Assignment& left, const Assignment& right);
std::pair<Assignment, Assignment> split_assignment(const Assignment& asg, const TypedFinSet& left,
                                                   const TypedFinSet& right);
// Splits along consecutive parts whose disjoint union is asg.over().
std::vector<Assignment> split_assignment(const Assignment& asg, std::span<const TypedFinSet> parts);

bool is_finite(const TypedFinSet& set);
// Number of assignments; throws InfiniteType for sets with an infinite port type.
std::uint64_t assignment_count(const TypedFinSet& set);
// The index-th assignment in row-major order (last port fastest).
Assignment assignment_at(const TypedFinSet& set, std::uint64_t index);
std::vector<Assignment> enumerate_assignments(const TypedFinSet& set);
Assignment sample_assignment(const TypedFinSet& set, std::mt19937_64& rng);

}  // namespace mnet

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "modalnet/dsl/ast.hpp"
#include "modalnet/typed_set.hpp"

// Static typing and evaluation of dynamics expressions. An expression is
// checked once against a scope and compiled into a closure; evaluation
// never looks names up again.
namespace mnet::dsl {

struct SType {
  // IntLit is an integer known at elaboration time (a literal or an integer
  // constant); it fits any numeric type. Int only fits bits and integer
  // ranges, Real only the real-valued types.
  enum class Kind { Bool, Int, IntLit, Real, Sym, Tuple, Unit };
  Kind kind = Kind::Unit;
  std::set<std::string> labels;  // Sym
  std::vector<SType> items;      // Tuple

  static SType of(Kind k) { return SType{k, {}, {}}; }
  std::string to_string() const;
  friend bool operator==(const SType&, const SType&) = default;
};

SType static_type(const ValueType& t);
SType static_type(const Value& constant);
bool fits(const SType& s, const ValueType& t);

struct Scope {
  const std::map<std::string, Value>* constants = nullptr;
  // State fields, read from the tuple in Frame::fields.
  std::vector<std::pair<std::string, SType>> fields;
  // Input ports of the mode being compiled, by port name.
  std::map<std::string, SType> inputs;
  std::string inputs_context;  // for diagnostics, e.g. "mode polarized of N"
  // Enumeration and mode labels usable as bare names.
  const std::set<std::string>* labels = nullptr;
};

struct Frame {
  static constexpr std::size_t kMaxLoops = 16;
  const Value::Tuple* fields = nullptr;
  const Assignment* inputs = nullptr;
  const std::map<std::string, Value>* input_map = nullptr;
  std::array<std::int64_t, kMaxLoops> loops{};
};

struct CompiledExpr {
  SType type;
  std::function<Value(Frame&)> fn;
  Value operator()(Frame& f) const { return fn(f); }
};

// Errors: UnboundReference, DynamicsTypeError (as DslError with a span).
CompiledExpr compile(const Expr& e, const Scope& scope);
// Evaluates an expression over constants only (loop bounds, widths).
Value eval_const(const Expr& e, const std::map<std::string, Value>& constants,
                 const std::set<std::string>* labels = nullptr);
std::int64_t eval_count(const Expr& e, const std::map<std::string, Value>& constants);

// Converts a value of static type `from` into the representation of `to`
// (integers into reals), checking membership. Throws ShapeError.
Value conform(const Value& v, const ValueType& to, const Span& where);

struct Bindings {
  std::map<std::string, Value> names;
  std::map<std::string, Value> inputs;  // `in.p`
  std::set<std::string> labels;
};

// Type-checks against the bindings, then evaluates.
Value eval_expr(const Expr& e, const Bindings& env);

}  // namespace mnet::dsl

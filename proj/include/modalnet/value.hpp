#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

namespace mnet {

// A runtime value carried on a port or stored in a state. Bits and integer
// ranges use the integer alternative, the real-valued types use double,
// enumeration labels are symbols, and products are tuples.
struct Value {
  using Tuple = std::vector<Value>;
  using Data = std::variant<std::monostate, std::int64_t, double, std::string, Tuple>;

  Data data;

  Value() = default;
  static Value unit() { return Value{}; }
  static Value integer(std::int64_t v) { return Value{Data{v}}; }
  static Value real(double v) { return Value{Data{v}}; }
  static Value symbol(std::string s) { return Value{Data{std::move(s)}}; }
  static Value tuple(Tuple t) { return Value{Data{std::move(t)}}; }

  bool is_unit() const { return std::holds_alternative<std::monostate>(data); }
  bool is_int() const { return std::holds_alternative<std::int64_t>(data); }
  bool is_real() const { return std::holds_alternative<double>(data); }
  bool is_symbol() const { return std::holds_alternative<std::string>(data); }
  bool is_tuple() const { return std::holds_alternative<Tuple>(data); }
  bool is_numeric() const { return is_int() || is_real(); }

  std::int64_t as_int() const { return std::get<std::int64_t>(data); }
  double as_real() const { return std::get<double>(data); }
  const std::string& as_symbol() const { return std::get<std::string>(data); }
  const Tuple& as_tuple() const { return std::get<Tuple>(data); }
  double numeric() const { return is_int() ? static_cast<double>(as_int()) : as_real(); }

  std::string to_string() const;

  friend bool operator==(const Value& a, const Value& b) { return a.data == b.data; }
  friend bool operator<(const Value& a, const Value& b) { return a.data < b.data; }

 private:
  explicit Value(Data d) : data(std::move(d)) {}
};

// Closed grammar of port and state-field types.
class ValueType {
 public:
  enum class Kind { Unit, Bit, Enum, IntRange, UnitInterval, NonNegReal, Real, Product };

  ValueType() = default;  // Unit

  static ValueType unit() { return ValueType{}; }
  static ValueType bit();
  static ValueType enumeration(std::vector<std::string> labels);
  static ValueType int_range(std::int64_t lo, std::int64_t hi);
  static ValueType unit_interval();
  static ValueType non_neg_real();
  static ValueType real();
  static ValueType product(std::vector<ValueType> components);

  Kind kind() const { return kind_; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::int64_t lo() const { return lo_; }
  std::int64_t hi() const { return hi_; }
  const std::vector<ValueType>& components() const { return components_; }

  bool is_finite() const;
  // nullopt for infinite types; saturates at UINT64_MAX.
  std::optional<std::uint64_t> cardinality() const;
  // Deterministic enumeration order: labels in declaration order, integers
  // ascending, products in row-major (last component fastest).
  std::vector<Value> enumerate() const;
  Value value_at(std::uint64_t index) const;

  // Membership; NaN is never a member of a real-valued type.
  bool contains(const Value& v) const;
  // Coerces integer literals into real-valued types, then checks membership.
  std::optional<Value> coerce(const Value& v) const;
  // First element of the type in enumeration order (0 for reals).
  Value default_value() const;
  Value sample(std::mt19937_64& rng) const;

  bool is_integral() const { return kind_ == Kind::Bit || kind_ == Kind::IntRange; }
  bool is_real_valued() const {
    return kind_ == Kind::UnitInterval || kind_ == Kind::NonNegReal || kind_ == Kind::Real;
  }

  // Concrete syntax used by the description language and diagnostics.
  std::string to_string() const;

  friend bool operator==(const ValueType&, const ValueType&) = default;

 private:
  Kind kind_ = Kind::Unit;
  std::vector<std::string> labels_;
  std::int64_t lo_ = 0;
  std::int64_t hi_ = 0;
  std::vector<ValueType> components_;
};

}  // namespace mnet

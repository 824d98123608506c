#include "modalnet/value.hpp"

#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "modalnet/error.hpp"

namespace mnet {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DuplicatePortName: return "DuplicatePortName";
    case ErrorKind::InvalidPortName: return "InvalidPortName";
    case ErrorKind::InvalidType: return "InvalidType";
    case ErrorKind::InvalidValue: return "InvalidValue";
    case ErrorKind::PartialMap: return "PartialMap";
    case ErrorKind::UnknownTarget: return "UnknownTarget";
    case ErrorKind::TypeMismatch: return "TypeMismatch";
    case ErrorKind::DomainMismatch: return "DomainMismatch";
    case ErrorKind::NotAUnion: return "NotAUnion";
    case ErrorKind::InfiniteType: return "InfiniteType";
    case ErrorKind::SideError: return "SideError";
    case ErrorKind::BoxMismatch: return "BoxMismatch";
    case ErrorKind::ArityMismatch: return "ArityMismatch";
    case ErrorKind::MergedWire: return "MergedWire";
    case ErrorKind::EmptyModeSet: return "EmptyModeSet";
    case ErrorKind::MissingInterface: return "MissingInterface";
    case ErrorKind::UnknownMode: return "UnknownMode";
    case ErrorKind::CommutingSquareViolation: return "CommutingSquareViolation";
    case ErrorKind::ShapeError: return "ShapeError";
    case ErrorKind::ModeError: return "ModeError";
    case ErrorKind::InputShapeError: return "InputShapeError";
    case ErrorKind::InitialStateError: return "InitialStateError";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::NameResolutionError: return "NameResolutionError";
    case ErrorKind::DynamicsTypeError: return "DynamicsTypeError";
    case ErrorKind::BusWidthMismatch: return "BusWidthMismatch";
    case ErrorKind::DivisionByZero: return "DivisionByZero";
    case ErrorKind::UnboundReference: return "UnboundReference";
    case ErrorKind::UnknownName: return "UnknownName";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

namespace {

std::string format_real(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  std::string s = os.str();
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

}  // namespace

std::string Value::to_string() const {
  struct Printer {
    std::string operator()(std::monostate) const { return "()"; }
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(double v) const { return format_real(v); }
    std::string operator()(const std::string& s) const { return s; }
    std::string operator()(const Tuple& t) const {
      std::string out = "(";
      for (std::size_t i = 0; i < t.size(); ++i) {
        if (i) out += ", ";
        out += t[i].to_string();
      }
      return out + ")";
    }
  };
  return std::visit(Printer{}, data);
}

ValueType ValueType::bit() {
  ValueType t;
  t.kind_ = Kind::Bit;
  t.lo_ = 0;
  t.hi_ = 1;
  return t;
}

ValueType ValueType::enumeration(std::vector<std::string> labels) {
  if (labels.empty()) throw Error(ErrorKind::InvalidType, "enum needs at least one label");
  std::set<std::string> seen;
  for (const auto& l : labels) {
    if (l.empty()) throw Error(ErrorKind::InvalidType, "enum label must be nonempty");
    if (!seen.insert(l).second) throw Error(ErrorKind::InvalidType, "duplicate enum label '" + l + "'");
  }
  ValueType t;
  t.kind_ = Kind::Enum;
  t.labels_ = std::move(labels);
  return t;
}

ValueType ValueType::int_range(std::int64_t lo, std::int64_t hi) {
  if (lo > hi) {
    throw Error(ErrorKind::InvalidType,
                "int range needs lo <= hi, got " + std::to_string(lo) + " > " + std::to_string(hi));
  }
  ValueType t;
  t.kind_ = Kind::IntRange;
  t.lo_ = lo;
  t.hi_ = hi;
  return t;
}

ValueType ValueType::unit_interval() {
  ValueType t;
  t.kind_ = Kind::UnitInterval;
  return t;
}

ValueType ValueType::non_neg_real() {
  ValueType t;
  t.kind_ = Kind::NonNegReal;
  return t;
}

ValueType ValueType::real() {
  ValueType t;
  t.kind_ = Kind::Real;
  return t;
}

ValueType ValueType::product(std::vector<ValueType> components) {
  ValueType t;
  t.kind_ = Kind::Product;
  t.components_ = std::move(components);
  return t;
}

bool ValueType::is_finite() const {
  switch (kind_) {
    case Kind::Unit:
    case Kind::Bit:
    case Kind::Enum:
    case Kind::IntRange:
      return true;
    case Kind::Product:
      for (const auto& c : components_)
        if (!c.is_finite()) return false;
      return true;
    default:
      return false;
  }
}

std::optional<std::uint64_t> ValueType::cardinality() const {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  switch (kind_) {
    case Kind::Unit: return 1;
    case Kind::Bit: return 2;
    case Kind::Enum: return labels_.size();
    case Kind::IntRange: {
      auto span = static_cast<std::uint64_t>(hi_ - lo_);
      return span == kMax ? kMax : span + 1;
    }
    case Kind::Product: {
      std::uint64_t n = 1;
      for (const auto& c : components_) {
        auto k = c.cardinality();
        if (!k) return std::nullopt;
        if (*k != 0 && n > kMax / *k) return kMax;
        n *= *k;
      }
      return n;
    }
    default:
      return std::nullopt;
  }
}

Value ValueType::value_at(std::uint64_t index) const {
  switch (kind_) {
    case Kind::Unit: return Value::unit();
    case Kind::Bit:
    case Kind::IntRange: return Value::integer(lo_ + static_cast<std::int64_t>(index));
    case Kind::Enum: return Value::symbol(labels_.at(index));
    case Kind::Product: {
      Value::Tuple parts(components_.size());
      for (std::size_t i = components_.size(); i-- > 0;) {
        auto k = *components_[i].cardinality();
        parts[i] = components_[i].value_at(index % k);
        index /= k;
      }
      return Value::tuple(std::move(parts));
    }
    default:
      throw Error(ErrorKind::InfiniteType, "cannot index into " + to_string());
  }
}

std::vector<Value> ValueType::enumerate() const {
  if (!is_finite()) throw Error(ErrorKind::InfiniteType, to_string() + " is not finite");
  auto n = *cardinality();
  std::vector<Value> out;
  out.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) out.push_back(value_at(i));
  return out;
}

bool ValueType::contains(const Value& v) const {
  switch (kind_) {
    case Kind::Unit: return v.is_unit();
    case Kind::Bit:
    case Kind::IntRange: return v.is_int() && v.as_int() >= lo_ && v.as_int() <= hi_;
    case Kind::Enum:
      if (!v.is_symbol()) return false;
      for (const auto& l : labels_)
        if (l == v.as_symbol()) return true;
      return false;
    case Kind::UnitInterval: return v.is_real() && v.as_real() >= 0.0 && v.as_real() <= 1.0;
    case Kind::NonNegReal: return v.is_real() && v.as_real() >= 0.0 && !std::isnan(v.as_real());
    case Kind::Real: return v.is_real() && !std::isnan(v.as_real());
    case Kind::Product: {
      if (!v.is_tuple() || v.as_tuple().size() != components_.size()) return false;
      for (std::size_t i = 0; i < components_.size(); ++i)
        if (!components_[i].contains(v.as_tuple()[i])) return false;
      return true;
    }
  }
  return false;
}

std::optional<Value> ValueType::coerce(const Value& v) const {
  if (is_real_valued() && v.is_int()) {
    Value r = Value::real(static_cast<double>(v.as_int()));
    if (contains(r)) return r;
    return std::nullopt;
  }
  if (kind_ == Kind::Product && v.is_tuple() && v.as_tuple().size() == components_.size()) {
    Value::Tuple parts;
    parts.reserve(components_.size());
    for (std::size_t i = 0; i < components_.size(); ++i) {
      auto c = components_[i].coerce(v.as_tuple()[i]);
      if (!c) return std::nullopt;
      parts.push_back(std::move(*c));
    }
    return Value::tuple(std::move(parts));
  }
  if (contains(v)) return v;
  return std::nullopt;
}

Value ValueType::default_value() const {
  if (is_finite()) return value_at(0);
  if (kind_ == Kind::Product) {
    Value::Tuple parts;
    for (const auto& c : components_) parts.push_back(c.default_value());
    return Value::tuple(std::move(parts));
  }
  return Value::real(0.0);
}

Value ValueType::sample(std::mt19937_64& rng) const {
  switch (kind_) {
    case Kind::UnitInterval: return Value::real(std::uniform_real_distribution<double>(0.0, 1.0)(rng));
    case Kind::NonNegReal: return Value::real(std::uniform_real_distribution<double>(0.0, 4.0)(rng));
    case Kind::Real: return Value::real(std::uniform_real_distribution<double>(-4.0, 4.0)(rng));
    case Kind::Product: {
      Value::Tuple parts;
      for (const auto& c : components_) parts.push_back(c.sample(rng));
      return Value::tuple(std::move(parts));
    }
    default: {
      auto n = *cardinality();
      return value_at(std::uniform_int_distribution<std::uint64_t>(0, n - 1)(rng));
    }
  }
}

std::string ValueType::to_string() const {
  switch (kind_) {
    case Kind::Unit: return "unit";
    case Kind::Bit: return "bit";
    case Kind::Enum: {
      std::string s = "enum(";
      for (std::size_t i = 0; i < labels_.size(); ++i) s += (i ? ", " : "") + labels_[i];
      return s + ")";
    }
    case Kind::IntRange: return "int(" + std::to_string(lo_) + ", " + std::to_string(hi_) + ")";
    case Kind::UnitInterval: return "unit_interval";
    case Kind::NonNegReal: return "nonneg_real";
    case Kind::Real: return "real";
    case Kind::Product: {
      std::string s = "product(";
      for (std::size_t i = 0; i < components_.size(); ++i)
        s += (i ? ", " : "") + components_[i].to_string();
      return s + ")";
    }
  }
  return "?";
}

}  // namespace mnet

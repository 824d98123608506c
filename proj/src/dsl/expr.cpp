#include "modalnet/dsl/expr.hpp"

#include <cmath>

#include "modalnet/dsl/parser.hpp"

namespace mnet::dsl {

using K = SType::Kind;

std::string SType::to_string() const {
  switch (kind) {
    case K::Bool: return "bool";
    case K::Int: return "int";
    case K::IntLit: return "integer literal";
    case K::Real: return "real";
    case K::Unit: return "unit";
    case K::Sym: {
      std::string s = "label{";
      bool first = true;
      for (const auto& l : labels) {
        s += (first ? "" : ",") + l;
        first = false;
      }
      return s + "}";
    }
    case K::Tuple: {
      std::string s = "(";
      for (std::size_t i = 0; i < items.size(); ++i) s += (i ? ", " : "") + items[i].to_string();
      return s + ")";
    }
  }
  return "?";
}

SType static_type(const ValueType& t) {
  switch (t.kind()) {
    case ValueType::Kind::Unit: return SType::of(K::Unit);
    case ValueType::Kind::Bit:
    case ValueType::Kind::IntRange: return SType::of(K::Int);
    case ValueType::Kind::UnitInterval:
    case ValueType::Kind::NonNegReal:
    case ValueType::Kind::Real: return SType::of(K::Real);
    case ValueType::Kind::Enum: {
      SType s = SType::of(K::Sym);
      s.labels.insert(t.labels().begin(), t.labels().end());
      return s;
    }
    case ValueType::Kind::Product: {
      SType s = SType::of(K::Tuple);
      for (const auto& c : t.components()) s.items.push_back(static_type(c));
      return s;
    }
  }
  return SType::of(K::Unit);
}

namespace {

SType value_type(const Value& v, K int_kind) {
  if (v.is_int()) return SType::of(int_kind);
  if (v.is_real()) return SType::of(K::Real);
  if (v.is_symbol()) {
    SType s = SType::of(K::Sym);
    s.labels.insert(v.as_symbol());
    return s;
  }
  if (v.is_tuple()) {
    SType s = SType::of(K::Tuple);
    for (const auto& x : v.as_tuple()) s.items.push_back(value_type(x, int_kind));
    return s;
  }
  return SType::of(K::Unit);
}

}  // namespace

SType static_type(const Value& constant) { return value_type(constant, K::IntLit); }

bool fits(const SType& s, const ValueType& t) {
  using VK = ValueType::Kind;
  switch (s.kind) {
    case K::IntLit: return t.is_integral() || t.is_real_valued();
    case K::Int: return t.is_integral();
    case K::Bool: return t.kind() == VK::Bit;
    case K::Real: return t.is_real_valued();
    case K::Unit: return t.kind() == VK::Unit;
    case K::Sym:
      if (t.kind() != VK::Enum) return false;
      for (const auto& l : s.labels) {
        if (std::find(t.labels().begin(), t.labels().end(), l) == t.labels().end()) return false;
      }
      return true;
    case K::Tuple:
      if (t.kind() != VK::Product || t.components().size() != s.items.size()) return false;
      for (std::size_t i = 0; i < s.items.size(); ++i) {
        if (!fits(s.items[i], t.components()[i])) return false;
      }
      return true;
  }
  return false;
}

Value conform(const Value& v, const ValueType& to, const Span& where) {
  if (auto c = to.coerce(v)) return *c;
  fail_at(ErrorKind::ShapeError, where, "value " + v.to_string() + " is not in " + to.to_string());
}

namespace {

using Fn = std::function<Value(Frame&)>;

bool numeric(const SType& t) { return t.kind == K::Int || t.kind == K::IntLit || t.kind == K::Real; }
bool integral(const SType& t) { return t.kind == K::Int || t.kind == K::IntLit; }

// Least common type of two branches, or nullopt.
std::optional<SType> unify(const SType& a, const SType& b) {
  if (numeric(a) && numeric(b)) {
    if (a.kind == K::Real || b.kind == K::Real) return SType::of(K::Real);
    if (a.kind == K::Int || b.kind == K::Int) return SType::of(K::Int);
    return SType::of(K::IntLit);
  }
  if (a.kind != b.kind) return std::nullopt;
  if (a.kind == K::Sym) {
    SType s = a;
    s.labels.insert(b.labels.begin(), b.labels.end());
    return s;
  }
  if (a.kind == K::Tuple) {
    if (a.items.size() != b.items.size()) return std::nullopt;
    SType s = SType::of(K::Tuple);
    for (std::size_t i = 0; i < a.items.size(); ++i) {
      auto u = unify(a.items[i], b.items[i]);
      if (!u) return std::nullopt;
      s.items.push_back(*u);
    }
    return s;
  }
  return a;
}

// Runtime representation change from `from` to `to` (only ints to reals).
Value promote(const Value& v, const SType& to) {
  if (to.kind == K::Real && v.is_int()) return Value::real(static_cast<double>(v.as_int()));
  if (to.kind == K::Tuple && v.is_tuple()) {
    Value::Tuple out;
    out.reserve(v.as_tuple().size());
    for (std::size_t i = 0; i < v.as_tuple().size(); ++i) out.push_back(promote(v.as_tuple()[i], to.items[i]));
    return Value::tuple(std::move(out));
  }
  return v;
}

bool needs_promotion(const SType& from, const SType& to) {
  if (to.kind == K::Real) return from.kind != K::Real;
  if (to.kind == K::Tuple) {
    for (std::size_t i = 0; i < to.items.size(); ++i) {
      if (needs_promotion(from.items[i], to.items[i])) return true;
    }
  }
  return false;
}

Fn promoted(Fn fn, const SType& from, const SType& to) {
  if (!needs_promotion(from, to)) return fn;
  return [fn = std::move(fn), to](Frame& f) { return promote(fn(f), to); };
}

bool truthy(const Value& v) { return v.as_int() != 0; }
Value boolean(bool b) { return Value::integer(b ? 1 : 0); }

[[noreturn]] void type_error(const Expr& e, const std::string& msg) {
  fail_at(ErrorKind::DynamicsTypeError, e.span, msg);
}

class Compiler {
 public:
  explicit Compiler(const Scope& s) : sc_(s) {}

  CompiledExpr go(const Expr& e) {
    switch (e.kind) {
      case Expr::Kind::Int: {
        Value v = Value::integer(e.i);
        return {SType::of(K::IntLit), [v](Frame&) { return v; }};
      }
      case Expr::Kind::Real: {
        Value v = Value::real(e.r);
        return {SType::of(K::Real), [v](Frame&) { return v; }};
      }
      case Expr::Kind::Name: return name(e);
      case Expr::Kind::Port: return port(e);
      case Expr::Kind::Star: type_error(e, "'*' is only allowed in wire paths");
      case Expr::Kind::Unary: return unary(e);
      case Expr::Kind::Binary: return binary(e);
      case Expr::Kind::If: return conditional(e);
      case Expr::Kind::Tuple: {
        std::vector<Fn> fns;
        SType t = SType::of(K::Tuple);
        for (const auto& a : e.args) {
          auto c = go(a);
          t.items.push_back(c.type);
          fns.push_back(std::move(c.fn));
        }
        return {t, [fns](Frame& f) {
                  Value::Tuple out;
                  out.reserve(fns.size());
                  for (const auto& fn : fns) out.push_back(fn(f));
                  return Value::tuple(std::move(out));
                }};
      }
      case Expr::Kind::Index: return index(e);
      case Expr::Kind::Call: return call(e);
      case Expr::Kind::Sum: return sum(e);
    }
    type_error(e, "unknown expression");
  }

 private:
  const Scope& sc_;
  std::vector<std::string> loops_;

  std::optional<Value> constant(const std::string& n) const {
    if (!sc_.constants) return std::nullopt;
    auto it = sc_.constants->find(n);
    if (it == sc_.constants->end()) return std::nullopt;
    return it->second;
  }

  CompiledExpr name(const Expr& e) {
    for (std::size_t k = loops_.size(); k-- > 0;) {
      if (loops_[k] == e.name) return {SType::of(K::Int), [k](Frame& f) { return Value::integer(f.loops[k]); }};
    }
    for (std::size_t k = 0; k < sc_.fields.size(); ++k) {
      if (sc_.fields[k].first == e.name) return {sc_.fields[k].second, [k](Frame& f) { return (*f.fields)[k]; }};
    }
    if (auto c = constant(e.name)) {
      Value v = *c;
      return {static_type(v), [v](Frame&) { return v; }};
    }
    if (sc_.labels && sc_.labels->count(e.name)) {
      SType t = SType::of(K::Sym);
      t.labels.insert(e.name);
      Value v = Value::symbol(e.name);
      return {t, [v](Frame&) { return v; }};
    }
    fail_at(ErrorKind::UnboundReference, e.span, "unbound name '" + e.name + "'");
  }

  std::optional<std::int64_t> static_int(const Expr& e) const {
    if (e.kind == Expr::Kind::Int) return e.i;
    if (e.kind == Expr::Kind::Name) {
      for (const auto& l : loops_) {
        if (l == e.name) return std::nullopt;
      }
      for (const auto& fld : sc_.fields) {
        if (fld.first == e.name) return std::nullopt;
      }
      if (auto c = constant(e.name); c && c->is_int()) return c->as_int();
    }
    return std::nullopt;
  }

  static Fn port_reader(std::string name) {
    return [name](Frame& f) -> Value {
      if (f.inputs) return f.inputs->at(name);
      auto it = f.input_map->find(name);
      if (it == f.input_map->end()) throw Error(ErrorKind::InputShapeError, "missing input " + name);
      return it->second;
    };
  }

  CompiledExpr port(const Expr& e) {
    auto where = sc_.inputs_context.empty() ? std::string() : " of " + sc_.inputs_context;
    if (e.args.empty()) {
      auto it = sc_.inputs.find(e.name);
      if (it == sc_.inputs.end()) {
        fail_at(ErrorKind::UnboundReference, e.span, "'" + e.name + "' is not an input" + where);
      }
      return {it->second, port_reader(e.name)};
    }
    std::vector<std::string> names;
    std::optional<SType> t;
    for (std::size_t i = 0;; ++i) {
      auto it = sc_.inputs.find(e.name + "[" + std::to_string(i) + "]");
      if (it == sc_.inputs.end()) break;
      names.push_back(it->first);
      t = t ? unify(*t, it->second) : it->second;
      if (!t) type_error(e, "bus " + e.name + " mixes element types");
    }
    if (names.empty()) fail_at(ErrorKind::UnboundReference, e.span, "'" + e.name + "' is not an input bus" + where);
    if (auto k = static_int(e.args[0])) {
      if (*k < 0 || static_cast<std::size_t>(*k) >= names.size()) {
        fail_at(ErrorKind::BusWidthMismatch, e.span,
                "index " + std::to_string(*k) + " outside bus " + e.name + " of width " + std::to_string(names.size()));
      }
      return {*t, port_reader(names[*k])};
    }
    auto idx = go(e.args[0]);
    if (!integral(idx.type)) type_error(e.args[0], "bus index must be an integer, got " + idx.type.to_string());
    Span s = e.span;
    std::string bus = e.name;
    return {*t, [names, idx = idx.fn, s, bus](Frame& f) -> Value {
              auto i = idx(f).as_int();
              if (i < 0 || static_cast<std::size_t>(i) >= names.size()) {
                fail_at(ErrorKind::ShapeError, s, "index " + std::to_string(i) + " outside bus " + bus);
              }
              if (f.inputs) return f.inputs->at(names[i]);
              return f.input_map->at(names[i]);
            }};
  }

  CompiledExpr unary(const Expr& e) {
    auto a = go(e.args[0]);
    if (e.name == "not") {
      if (a.type.kind != K::Bool) type_error(e, "'not' needs a boolean, got " + a.type.to_string());
      return {a.type, [fn = a.fn](Frame& f) { return boolean(!truthy(fn(f))); }};
    }
    if (!numeric(a.type)) type_error(e, "'-' needs a number, got " + a.type.to_string());
    if (a.type.kind == K::Real) return {a.type, [fn = a.fn](Frame& f) { return Value::real(-fn(f).numeric()); }};
    return {a.type, [fn = a.fn](Frame& f) { return Value::integer(-fn(f).as_int()); }};
  }

  CompiledExpr binary(const Expr& e) {
    const std::string& op = e.name;
    auto a = go(e.args[0]);
    auto b = go(e.args[1]);
    if (op == "and" || op == "or") {
      if (a.type.kind != K::Bool || b.type.kind != K::Bool) {
        type_error(e, "'" + op + "' needs booleans, got " + a.type.to_string() + " and " + b.type.to_string());
      }
      if (op == "and") {
        return {a.type, [x = a.fn, y = b.fn](Frame& f) { return boolean(truthy(x(f)) && truthy(y(f))); }};
      }
      return {a.type, [x = a.fn, y = b.fn](Frame& f) { return boolean(truthy(x(f)) || truthy(y(f))); }};
    }
    if (op == "==" || op == "!=" || op == "<" || op == ">" || op == "<=" || op == ">=") return comparison(e, a, b);
    if (!numeric(a.type) || !numeric(b.type)) {
      type_error(e, "'" + op + "' needs numbers, got " + a.type.to_string() + " and " + b.type.to_string());
    }
    if (op == "/") {
      Span s = e.span;
      return {SType::of(K::Real), [x = a.fn, y = b.fn, s](Frame& f) {
                double num = x(f).numeric();
                double den = y(f).numeric();
                if (den == 0.0) fail_at(ErrorKind::DivisionByZero, s, "division by zero");
                return Value::real(num / den);
              }};
    }
    SType t = *unify(a.type, b.type);
    const char c = op[0];
    if (t.kind == K::Real) {
      return {t, [x = a.fn, y = b.fn, c](Frame& f) {
                double l = x(f).numeric(), r = y(f).numeric();
                return Value::real(c == '+' ? l + r : c == '-' ? l - r : l * r);
              }};
    }
    return {t, [x = a.fn, y = b.fn, c](Frame& f) {
              std::int64_t l = x(f).as_int(), r = y(f).as_int();
              return Value::integer(c == '+' ? l + r : c == '-' ? l - r : l * r);
            }};
  }

  CompiledExpr comparison(const Expr& e, const CompiledExpr& a, const CompiledExpr& b) {
    const std::string op = e.name;
    const SType t = SType::of(K::Bool);
    if (numeric(a.type) && numeric(b.type)) {
      auto cmp = [op](auto l, auto r) {
        if (op == "==") return l == r;
        if (op == "!=") return l != r;
        if (op == "<") return l < r;
        if (op == ">") return l > r;
        if (op == "<=") return l <= r;
        return l >= r;
      };
      if (a.type.kind == K::Real || b.type.kind == K::Real) {
        return {t, [x = a.fn, y = b.fn, cmp](Frame& f) { return boolean(cmp(x(f).numeric(), y(f).numeric())); }};
      }
      return {t, [x = a.fn, y = b.fn, cmp](Frame& f) { return boolean(cmp(x(f).as_int(), y(f).as_int())); }};
    }
    if (op != "==" && op != "!=") type_error(e, "'" + op + "' needs numbers");
    if (!unify(a.type, b.type)) {
      type_error(e, "cannot compare " + a.type.to_string() + " with " + b.type.to_string());
    }
    const bool eq = op == "==";
    return {t, [x = a.fn, y = b.fn, eq](Frame& f) { return boolean((x(f) == y(f)) == eq); }};
  }

  CompiledExpr conditional(const Expr& e) {
    auto c = go(e.args[0]);
    if (c.type.kind != K::Bool) type_error(e.args[0], "condition must be boolean, got " + c.type.to_string());
    auto a = go(e.args[1]);
    auto b = go(e.args[2]);
    auto t = unify(a.type, b.type);
    if (!t) type_error(e, "branches have types " + a.type.to_string() + " and " + b.type.to_string());
    return {*t, [c = c.fn, x = promoted(a.fn, a.type, *t), y = promoted(b.fn, b.type, *t)](Frame& f) {
              return truthy(c(f)) ? x(f) : y(f);
            }};
  }

  CompiledExpr index(const Expr& e) {
    auto base = go(e.args[0]);
    if (base.type.kind != K::Tuple) type_error(e, "only tuples can be indexed, got " + base.type.to_string());
    const std::size_t n = base.type.items.size();
    if (auto k = static_int(e.args[1])) {
      if (*k < 0 || static_cast<std::size_t>(*k) >= n) {
        type_error(e, "index " + std::to_string(*k) + " outside a tuple of " + std::to_string(n));
      }
      const auto i = static_cast<std::size_t>(*k);
      return {base.type.items[i], [fn = base.fn, i](Frame& f) { return fn(f).as_tuple()[i]; }};
    }
    auto idx = go(e.args[1]);
    if (!integral(idx.type)) type_error(e.args[1], "index must be an integer, got " + idx.type.to_string());
    if (n == 0) type_error(e, "indexing an empty tuple");
    std::optional<SType> t = base.type.items[0];
    for (const auto& it : base.type.items) {
      t = unify(*t, it);
      if (!t) type_error(e, "a computed index needs a tuple with one element type");
    }
    Span s = e.span;
    SType to = *t;
    return {to, [fn = base.fn, i = idx.fn, s, to](Frame& f) {
              auto k = i(f).as_int();
              Value v = fn(f);
              const auto& items = v.as_tuple();
              if (k < 0 || static_cast<std::size_t>(k) >= items.size()) {
                fail_at(ErrorKind::ShapeError, s, "index " + std::to_string(k) + " out of range");
              }
              return promote(items[k], to);
            }};
  }

  std::int64_t const_count(const Expr& e) const {
    if (auto k = static_int(e); k && *k >= 0) return *k;
    if (!sc_.constants) type_error(e, "expected a constant count");
    return eval_count(e, *sc_.constants);
  }

  CompiledExpr call(const Expr& e) {
    const std::string& fn = e.name;
    if (fn == "repeat") {
      if (e.args.size() != 2) type_error(e, "repeat takes a value and a count");
      auto v = go(e.args[0]);
      const auto n = static_cast<std::size_t>(const_count(e.args[1]));
      SType t = SType::of(K::Tuple);
      t.items.assign(n, v.type);
      return {t, [x = v.fn, n](Frame& f) { return Value::tuple(Value::Tuple(n, x(f))); }};
    }
    std::vector<CompiledExpr> args;
    for (const auto& a : e.args) {
      args.push_back(go(a));
      if (!numeric(args.back().type)) type_error(a, fn + " needs numbers, got " + args.back().type.to_string());
    }
    if (fn == "floor" || fn == "abs") {
      if (args.size() != 1) type_error(e, fn + " takes one argument");
      auto& a = args[0];
      if (fn == "floor") {
        if (a.type.kind != K::Real) return a;
        return {SType::of(K::Int), [x = a.fn](Frame& f) {
                  return Value::integer(static_cast<std::int64_t>(std::floor(x(f).numeric())));
                }};
      }
      if (a.type.kind == K::Real) return {a.type, [x = a.fn](Frame& f) { return Value::real(std::fabs(x(f).numeric())); }};
      return {a.type, [x = a.fn](Frame& f) { return Value::integer(std::llabs(x(f).as_int())); }};
    }
    // min / max
    if (args.size() < 2) type_error(e, fn + " takes at least two arguments");
    SType t = args[0].type;
    for (const auto& a : args) t = *unify(t, a.type);
    std::vector<Fn> fns;
    for (auto& a : args) fns.push_back(a.fn);
    const bool is_min = fn == "min";
    if (t.kind == K::Real) {
      return {t, [fns, is_min](Frame& f) {
                double best = fns[0](f).numeric();
                for (std::size_t i = 1; i < fns.size(); ++i) {
                  double v = fns[i](f).numeric();
                  best = is_min ? std::min(best, v) : std::max(best, v);
                }
                return Value::real(best);
              }};
    }
    return {t, [fns, is_min](Frame& f) {
              std::int64_t best = fns[0](f).as_int();
              for (std::size_t i = 1; i < fns.size(); ++i) {
                std::int64_t v = fns[i](f).as_int();
                best = is_min ? std::min(best, v) : std::max(best, v);
              }
              return Value::integer(best);
            }};
  }

  CompiledExpr sum(const Expr& e) {
    const std::int64_t n = const_count(e.args[0]);
    if (loops_.size() >= Frame::kMaxLoops) type_error(e, "loops nested too deeply");
    const std::size_t slot = loops_.size();
    loops_.push_back(e.name);
    auto body = go(e.args[1]);
    loops_.pop_back();
    if (!numeric(body.type)) type_error(e, "sum needs a numeric body, got " + body.type.to_string());
    if (body.type.kind == K::Real) {
      return {body.type, [b = body.fn, n, slot](Frame& f) {
                double total = 0.0;
                for (std::int64_t i = 0; i < n; ++i) {
                  f.loops[slot] = i;
                  total += b(f).numeric();
                }
                return Value::real(total);
              }};
    }
    return {body.type, [b = body.fn, n, slot](Frame& f) {
              std::int64_t total = 0;
              for (std::int64_t i = 0; i < n; ++i) {
                f.loops[slot] = i;
                total += b(f).as_int();
              }
              return Value::integer(total);
            }};
  }
};

}  // namespace

CompiledExpr compile(const Expr& e, const Scope& scope) { return Compiler(scope).go(e); }

Value eval_const(const Expr& e, const std::map<std::string, Value>& constants, const std::set<std::string>* labels) {
  Scope s;
  s.constants = &constants;
  s.labels = labels;
  auto c = compile(e, s);
  Frame f;
  return c(f);
}

std::int64_t eval_count(const Expr& e, const std::map<std::string, Value>& constants) {
  Value v = eval_const(e, constants);
  if (!v.is_int() || v.as_int() < 0) {
    fail_at(ErrorKind::DynamicsTypeError, e.span, "expected a non-negative integer, got " + v.to_string());
  }
  return v.as_int();
}

Value eval_expr(const Expr& e, const Bindings& env) {
  Scope s;
  Value::Tuple values;
  for (const auto& [name, v] : env.names) {
    s.fields.emplace_back(name, value_type(v, K::Int));
    values.push_back(v);
  }
  for (const auto& [name, v] : env.inputs) s.inputs.emplace(name, value_type(v, K::Int));
  s.labels = &env.labels;
  auto c = compile(e, s);
  Frame f;
  f.fields = &values;
  f.input_map = &env.inputs;
  return c(f);
}

}  // namespace mnet::dsl

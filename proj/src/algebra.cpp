#include "modalnet/algebra.hpp"

#include <algorithm>
#include <exception>
#include <limits>
#include <set>

#include "modalnet/error.hpp"

namespace mnet {

namespace {

std::optional<std::uint64_t> mul_sat(std::optional<std::uint64_t> a, std::optional<std::uint64_t> b) {
  if (!a || !b) return std::nullopt;
  if (*a != 0 && *b > std::numeric_limits<std::uint64_t>::max() / *a) return std::numeric_limits<std::uint64_t>::max();
  return *a * *b;
}

}  // namespace

StateSpace::StateSpace() = default;

StateSpace StateSpace::finite(std::vector<std::string> symbols) {
  if (symbols.empty()) throw Error(ErrorKind::InvalidType, "a finite state space needs at least one state");
  std::set<std::string> seen;
  for (const auto& s : symbols) {
    if (s.empty()) throw Error(ErrorKind::InvalidType, "empty state symbol");
    if (!seen.insert(s).second) throw Error(ErrorKind::InvalidType, "state '" + s + "' listed twice");
  }
  StateSpace sp;
  sp.kind_ = Kind::Finite;
  sp.symbols_ = std::move(symbols);
  return sp;
}

StateSpace StateSpace::record(std::vector<Field> fields) {
  if (fields.empty()) throw Error(ErrorKind::InvalidType, "a record state space needs at least one field");
  std::set<std::string> seen;
  for (const auto& f : fields) {
    if (!seen.insert(f.name).second) throw Error(ErrorKind::InvalidType, "state field '" + f.name + "' declared twice");
  }
  StateSpace sp;
  sp.kind_ = Kind::Record;
  sp.fields_ = std::move(fields);
  return sp;
}

StateSpace StateSpace::product(std::vector<StateSpace> components) {
  std::vector<StateSpace> flat;
  for (auto& c : components) {
    if (c.kind_ == Kind::Product) {
      flat.insert(flat.end(), c.components_.begin(), c.components_.end());
    } else {
      flat.push_back(std::move(c));
    }
  }
  if (flat.size() == 1) return flat.front();
  StateSpace sp;
  sp.components_ = std::move(flat);
  return sp;
}

bool StateSpace::contains(const Value& v) const {
  switch (kind_) {
    case Kind::Finite:
      return v.is_symbol() && std::find(symbols_.begin(), symbols_.end(), v.as_symbol()) != symbols_.end();
    case Kind::Record: {
      if (!v.is_tuple() || v.as_tuple().size() != fields_.size()) return false;
      for (std::size_t i = 0; i < fields_.size(); ++i)
        if (!fields_[i].type.contains(v.as_tuple()[i])) return false;
      return true;
    }
    case Kind::Product: {
      if (!v.is_tuple() || v.as_tuple().size() != components_.size()) return false;
      for (std::size_t i = 0; i < components_.size(); ++i)
        if (!components_[i].contains(v.as_tuple()[i])) return false;
      return true;
    }
  }
  return false;
}

std::optional<Value> StateSpace::coerce(const Value& v) const {
  switch (kind_) {
    case Kind::Finite:
      return contains(v) ? std::optional<Value>(v) : std::nullopt;
    case Kind::Record: {
      if (!v.is_tuple() || v.as_tuple().size() != fields_.size()) return std::nullopt;
      Value::Tuple out;
      for (std::size_t i = 0; i < fields_.size(); ++i) {
        auto c = fields_[i].type.coerce(v.as_tuple()[i]);
        if (!c) return std::nullopt;
        out.push_back(std::move(*c));
      }
      return Value::tuple(std::move(out));
    }
    case Kind::Product: {
      if (!v.is_tuple() || v.as_tuple().size() != components_.size()) return std::nullopt;
      Value::Tuple out;
      for (std::size_t i = 0; i < components_.size(); ++i) {
        auto c = components_[i].coerce(v.as_tuple()[i]);
        if (!c) return std::nullopt;
        out.push_back(std::move(*c));
      }
      return Value::tuple(std::move(out));
    }
  }
  return std::nullopt;
}

bool StateSpace::is_finite() const { return cardinality().has_value(); }

std::optional<std::uint64_t> StateSpace::cardinality() const {
  std::optional<std::uint64_t> n = 1;
  switch (kind_) {
    case Kind::Finite:
      return symbols_.size();
    case Kind::Record:
      for (const auto& f : fields_) n = mul_sat(n, f.type.cardinality());
      return n;
    case Kind::Product:
      for (const auto& c : components_) n = mul_sat(n, c.cardinality());
      return n;
  }
  return std::nullopt;
}

Value StateSpace::value_at(std::uint64_t index) const {
  switch (kind_) {
    case Kind::Finite:
      return Value::symbol(symbols_.at(index));
    case Kind::Record: {
      Value::Tuple t(fields_.size());
      for (std::size_t i = fields_.size(); i-- > 0;) {
        auto k = fields_[i].type.cardinality();
        if (!k) throw Error(ErrorKind::InfiniteType, "state field '" + fields_[i].name + "' is infinite");
        t[i] = fields_[i].type.value_at(index % *k);
        index /= *k;
      }
      return Value::tuple(std::move(t));
    }
    case Kind::Product: {
      Value::Tuple t(components_.size());
      for (std::size_t i = components_.size(); i-- > 0;) {
        auto k = components_[i].cardinality();
        if (!k) throw Error(ErrorKind::InfiniteType, "state component is infinite");
        t[i] = components_[i].value_at(index % *k);
        index /= *k;
      }
      return Value::tuple(std::move(t));
    }
  }
  return Value{};
}

std::vector<Value> StateSpace::enumerate() const {
  auto n = cardinality();
  if (!n) throw Error(ErrorKind::InfiniteType, "cannot enumerate the infinite state space " + to_string());
  std::vector<Value> out;
  out.reserve(*n);
  for (std::uint64_t i = 0; i < *n; ++i) out.push_back(value_at(i));
  return out;
}

Value StateSpace::sample(std::mt19937_64& rng) const {
  switch (kind_) {
    case Kind::Finite:
      return Value::symbol(symbols_[std::uniform_int_distribution<std::size_t>(0, symbols_.size() - 1)(rng)]);
    case Kind::Record: {
      Value::Tuple t;
      for (const auto& f : fields_) t.push_back(f.type.sample(rng));
      return Value::tuple(std::move(t));
    }
    case Kind::Product: {
      Value::Tuple t;
      for (const auto& c : components_) t.push_back(c.sample(rng));
      return Value::tuple(std::move(t));
    }
  }
  return Value{};
}

std::string StateSpace::to_string() const {
  std::string s;
  switch (kind_) {
    case Kind::Finite:
      s = "{";
      for (std::size_t i = 0; i < symbols_.size(); ++i) s += (i ? ", " : "") + symbols_[i];
      return s + "}";
    case Kind::Record:
      s = "record(";
      for (std::size_t i = 0; i < fields_.size(); ++i)
        s += (i ? ", " : "") + fields_[i].name + ": " + fields_[i].type.to_string();
      return s + ")";
    case Kind::Product:
      if (components_.empty()) return "()";
      for (std::size_t i = 0; i < components_.size(); ++i) s += (i ? " x " : "") + components_[i].to_string();
      return "(" + s + ")";
  }
  return s;
}

// ---------------------------------------------------------------------------

namespace {

void check_state(const ModalDynamicalSystem& d, const Value& s, const ValidateOptions& opts, std::mt19937_64& rng) {
  auto mode = d.mode_of(s);
  auto mi = d.over.index_of(mode);
  if (!mi) {
    throw Error(ErrorKind::ModeError, "state " + s.to_string() + " maps to '" + mode_to_string(mode) +
                                          "', which is not a mode of the box");
  }
  Box box = d.over.interface_at(*mi);
  auto out = d.readout(s);
  if (!(out.over() == box.outputs)) {
    throw Error(ErrorKind::ShapeError, "state " + s.to_string() + ": readout over " + out.over().to_string() +
                                           ", mode " + mode_to_string(mode) + " expects " + box.outputs.to_string());
  }
  for (std::size_t i = 0; i < out.values().size(); ++i) {
    if (!box.outputs.port(i).type.contains(out[i])) {
      throw Error(ErrorKind::ShapeError, "state " + s.to_string() + ": readout value " + out[i].to_string() +
                                             " on port '" + box.outputs.port(i).name + "' is outside its type");
    }
  }
  std::vector<Assignment> inputs;
  bool enumerable = is_finite(box.inputs) && assignment_count(box.inputs) <= opts.inputs_per_state;
  if (enumerable) {
    inputs = enumerate_assignments(box.inputs);
  } else {
    for (std::size_t k = 0; k < opts.inputs_per_state; ++k) inputs.push_back(sample_assignment(box.inputs, rng));
  }
  for (const auto& y : inputs) {
    auto next = d.update(s, y);
    if (!d.states.contains(next)) {
      throw Error(ErrorKind::ShapeError, "state " + s.to_string() + " on input " + y.to_string() + " updates to " +
                                             next.to_string() + ", outside " + d.states.to_string());
    }
  }
}

}  // namespace

void validate_mds(const ModalDynamicalSystem& d, const ValidateOptions& opts) {
  std::mt19937_64 rng(opts.seed);
  if (d.default_state && !d.states.contains(*d.default_state)) {
    throw Error(ErrorKind::InitialStateError, "default state " + d.default_state->to_string() + " is not in " +
                                                  d.states.to_string());
  }
  auto n = d.states.cardinality();
  if (n && *n <= std::max<std::uint64_t>(opts.samples, 1)) {
    for (std::uint64_t i = 0; i < *n; ++i) check_state(d, d.states.value_at(i), opts, rng);
  } else {
    for (std::size_t k = 0; k < opts.samples; ++k) check_state(d, d.states.sample(rng), opts, rng);
  }
}

ModalDynamicalSystem make_mds(ModalBox over, StateSpace states, ModalDynamicalSystem::ModeFn mode_of,
                              ModalDynamicalSystem::UpdateFn update, ModalDynamicalSystem::ReadoutFn readout,
                              std::optional<Value> default_state, const ValidateOptions& opts) {
  ModalDynamicalSystem d{std::move(over),   std::move(states),  std::move(mode_of),
                         std::move(update), std::move(readout), std::move(default_state)};
  validate_mds(d, opts);
  return d;
}

ModalDynamicalSystem apply_morphism(const MdnMorphism& f, const ModalDynamicalSystem& d) {
  if (!(d.over == f.source())) {
    throw Error(ErrorKind::BoxMismatch, "system lives over " + d.over.to_string() + ", morphism starts at " +
                                            f.source().to_string());
  }
  ModalDynamicalSystem r;
  r.over = f.target();
  r.states = d.states;
  r.default_state = d.default_state;
  r.mode_of = [f, q = d.mode_of](const Value& s) { return f.sigma(q(s)); };
  r.readout = [f, d](const Value& s) { return route_out(f.epsilon(d.mode_of(s)), d.readout(s)); };
  r.update = [f, d](const Value& s, const Assignment& y) {
    auto phi = f.epsilon(d.mode_of(s));
    return d.update(s, route_in(phi, y, d.readout(s)));
  };
  return r;
}

// ---------------------------------------------------------------------------

namespace {

struct TensorParts {
  std::vector<ModalDynamicalSystem> parts;
  std::vector<std::size_t> offsets;  // first state slot of each part
  std::size_t slots = 0;

  Value slice(const Value& s, std::size_t k) const {
    const auto& t = s.as_tuple();
    if (parts[k].states.kind() != StateSpace::Kind::Product) return t[offsets[k]];
    return Value::tuple(Value::Tuple(t.begin() + static_cast<std::ptrdiff_t>(offsets[k]),
                                     t.begin() + static_cast<std::ptrdiff_t>(offsets[k] + parts[k].states.arity())));
  }

  void place(Value::Tuple& out, std::size_t k, Value v) const {
    if (parts[k].states.kind() != StateSpace::Kind::Product) {
      out[offsets[k]] = std::move(v);
      return;
    }
    auto& t = std::get<Value::Tuple>(v.data);
    for (std::size_t i = 0; i < t.size(); ++i) out[offsets[k] + i] = std::move(t[i]);
  }
};

}  // namespace

ModalDynamicalSystem unit_mds() {
  ModalDynamicalSystem d;
  d.over = ModalBox{};
  d.states = StateSpace{};
  d.mode_of = [](const Value&) { return Mode{}; };
  d.update = [](const Value& s, const Assignment&) { return s; };
  d.readout = [](const Value&) { return Assignment{}; };
  d.default_state = Value::tuple({});
  return d;
}

ModalDynamicalSystem tensor_mds(std::span<const ModalDynamicalSystem> parts, Exec exec) {
  auto tp = std::make_shared<TensorParts>();
  for (const auto& p : parts) {
    if (p.over.factors().empty() && p.states.kind() == StateSpace::Kind::Product && p.states.components().empty()) {
      continue;  // unit system
    }
    tp->parts.push_back(p);
  }
  if (tp->parts.empty()) return unit_mds();
  if (tp->parts.size() == 1) return tp->parts.front();

  std::vector<ModalBox> boxes;
  std::vector<StateSpace> spaces;
  bool has_default = true;
  Value::Tuple dflt;
  for (const auto& p : tp->parts) {
    tp->offsets.push_back(tp->slots);
    tp->slots += p.states.arity();
    boxes.push_back(p.over);
    spaces.push_back(p.states);
    if (!p.default_state) {
      has_default = false;
    } else if (p.states.kind() == StateSpace::Kind::Product) {
      const auto& t = p.default_state->as_tuple();
      dflt.insert(dflt.end(), t.begin(), t.end());
    } else {
      dflt.push_back(*p.default_state);
    }
  }

  ModalDynamicalSystem d;
  d.over = tensor(boxes);
  d.states = StateSpace::product(std::move(spaces));
  if (has_default) d.default_state = Value::tuple(std::move(dflt));

  d.mode_of = [tp](const Value& s) {
    Mode m;
    for (std::size_t k = 0; k < tp->parts.size(); ++k) {
      auto mk = tp->parts[k].mode_of(tp->slice(s, k));
      m.insert(m.end(), mk.begin(), mk.end());
    }
    return m;
  };

  // Interfaces come from the tensor box, whose per-mode cache keeps port
  // sets shared instead of rebuilding tagged unions on every call.
  d.readout = [tp, over = d.over](const Value& s) {
    Mode m;
    std::vector<Value> values;
    for (std::size_t k = 0; k < tp->parts.size(); ++k) {
      auto local = tp->slice(s, k);
      auto mk = tp->parts[k].mode_of(local);
      m.insert(m.end(), mk.begin(), mk.end());
      auto out = tp->parts[k].readout(local);
      values.insert(values.end(), out.values().begin(), out.values().end());
    }
    auto outputs = over.interface(m).outputs;
    if (outputs.size() != values.size()) {
      throw Error(ErrorKind::ShapeError, "component readouts do not cover the outputs of mode " + mode_to_string(m));
    }
    return Assignment::unchecked(std::move(outputs), std::move(values));
  };

  d.update = [tp, exec, over = d.over](const Value& s, const Assignment& y) {
    const auto n = tp->parts.size();
    std::vector<Value> local(n);
    std::vector<TypedFinSet> ins(n);
    Mode m;
    for (std::size_t k = 0; k < n; ++k) {
      local[k] = tp->slice(s, k);
      auto mk = tp->parts[k].mode_of(local[k]);
      ins[k] = tp->parts[k].over.interface(mk).inputs;
      m.insert(m.end(), mk.begin(), mk.end());
    }
    if (!(y.over() == over.interface(m).inputs)) {
      throw Error(ErrorKind::DomainMismatch, "input over " + y.over().to_string() + " in mode " + mode_to_string(m));
    }
    std::vector<Assignment> split;
    split.reserve(n);
    std::size_t offset = 0;
    for (std::size_t k = 0; k < n; ++k) {
      auto first = y.values().begin() + static_cast<std::ptrdiff_t>(offset);
      offset += ins[k].size();
      split.push_back(Assignment::unchecked(ins[k], std::vector<Value>(first, y.values().begin() + static_cast<std::ptrdiff_t>(offset))));
    }
    std::vector<Value> next(n);
    std::vector<std::exception_ptr> errors(n);
    auto kernel = [&](std::size_t k) {
      try {
        next[k] = tp->parts[k].update(local[k], split[k]);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    };
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static) if (n > 1)
      for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(n); ++k) kernel(static_cast<std::size_t>(k));
    } else {
      for (std::size_t k = 0; k < n; ++k) kernel(k);
    }
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
    Value::Tuple out(tp->slots);
    for (std::size_t k = 0; k < n; ++k) tp->place(out, k, std::move(next[k]));
    return Value::tuple(std::move(out));
  };
  return d;
}

ModalDynamicalSystem tensor_mds(const ModalDynamicalSystem& a, const ModalDynamicalSystem& b, Exec exec) {
  const ModalDynamicalSystem parts[] = {a, b};
  return tensor_mds(std::span<const ModalDynamicalSystem>(parts), exec);
}

}  // namespace mnet

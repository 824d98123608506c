#include "modalnet/json_io.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "modalnet/error.hpp"

namespace mnet::json {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorKind::InvalidValue, "json: " + what); }

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad(std::string("missing field '") + key + "'");
  return j.at(key);
}

const char* kind_name(ValueType::Kind k) {
  switch (k) {
    case ValueType::Kind::Unit: return "unit";
    case ValueType::Kind::Bit: return "bit";
    case ValueType::Kind::Enum: return "enum";
    case ValueType::Kind::IntRange: return "int";
    case ValueType::Kind::UnitInterval: return "unit_interval";
    case ValueType::Kind::NonNegReal: return "nonneg_real";
    case ValueType::Kind::Real: return "real";
    case ValueType::Kind::Product: return "product";
  }
  return "unit";
}

const char* side_name(Feed::From f) { return f == Feed::From::TargetInput ? "outer_in" : "inner_out"; }

}  // namespace

Json from_type(const ValueType& t) {
  Json j;
  j["kind"] = kind_name(t.kind());
  switch (t.kind()) {
    case ValueType::Kind::Enum:
      j["labels"] = t.labels();
      break;
    case ValueType::Kind::IntRange:
      j["lo"] = t.lo();
      j["hi"] = t.hi();
      break;
    case ValueType::Kind::Product: {
      Json c = Json::array();
      for (const auto& x : t.components()) c.push_back(from_type(x));
      j["components"] = c;
      break;
    }
    default:
      break;
  }
  return j;
}

ValueType to_type(const Json& j) {
  const auto kind = field(j, "kind").get<std::string>();
  if (kind == "unit") return ValueType::unit();
  if (kind == "bit") return ValueType::bit();
  if (kind == "enum") return ValueType::enumeration(field(j, "labels").get<std::vector<std::string>>());
  if (kind == "int") return ValueType::int_range(field(j, "lo").get<std::int64_t>(), field(j, "hi").get<std::int64_t>());
  if (kind == "unit_interval") return ValueType::unit_interval();
  if (kind == "nonneg_real") return ValueType::non_neg_real();
  if (kind == "real") return ValueType::real();
  if (kind == "product") {
    std::vector<ValueType> cs;
    for (const auto& c : field(j, "components")) cs.push_back(to_type(c));
    return ValueType::product(std::move(cs));
  }
  bad("unknown type kind '" + kind + "'");
}

Json from_value(const Value& v) {
  if (v.is_unit()) return nullptr;
  if (v.is_int()) return v.as_int();
  if (v.is_real()) return v.as_real();
  if (v.is_symbol()) return v.as_symbol();
  Json a = Json::array();
  for (const auto& x : v.as_tuple()) a.push_back(from_value(x));
  return a;
}

Value to_value(const Json& j) {
  if (j.is_null()) return Value::unit();
  if (j.is_number_integer()) return Value::integer(j.get<std::int64_t>());
  if (j.is_number()) return Value::real(j.get<double>());
  if (j.is_string()) return Value::symbol(j.get<std::string>());
  if (j.is_boolean()) return Value::integer(j.get<bool>() ? 1 : 0);
  if (j.is_array()) {
    Value::Tuple t;
    for (const auto& x : j) t.push_back(to_value(x));
    return Value::tuple(std::move(t));
  }
  bad("cannot read a value from " + j.dump());
}

Value to_value(const Json& j, const ValueType& t) {
  auto v = to_value(j);
  if (t.kind() == ValueType::Kind::Product && v.is_tuple() && v.as_tuple().size() == t.components().size()) {
    Value::Tuple out;
    for (std::size_t i = 0; i < t.components().size(); ++i) out.push_back(to_value(j.at(i), t.components()[i]));
    v = Value::tuple(std::move(out));
  }
  auto c = t.coerce(v);
  if (!c) throw Error(ErrorKind::InvalidValue, "json: " + v.to_string() + " is not in " + t.to_string());
  return *c;
}

Json from_set(const TypedFinSet& s) {
  Json j = Json::object();
  for (const auto& p : s.ports()) j[p.name] = from_type(p.type);
  return j;
}

TypedFinSet to_set(const Json& j) {
  if (!j.is_object()) bad("a typed set is an object of port types");
  // Tagged names "k/name" come from a disjoint union; rebuild its summands.
  std::map<std::size_t, std::vector<Port>> summands;
  std::vector<Port> ports;
  for (const auto& [k, v] : j.items()) {
    const auto slash = k.find('/');
    if (slash == std::string::npos) {
      ports.push_back(Port{k, to_type(v)});
      continue;
    }
    std::size_t tag = 0;
    const auto [end, ec] = std::from_chars(k.data(), k.data() + slash, tag);
    if (ec != std::errc{} || end != k.data() + slash) bad("bad union tag in '" + k + "'");
    summands[tag].push_back(Port{k.substr(slash + 1), to_type(v)});
  }
  if (summands.empty()) return make_typed_finset(std::move(ports));
  if (!ports.empty()) bad("a typed set mixes tagged and plain port names");
  std::vector<TypedFinSet> parts;
  for (auto& [tag, ps] : summands) {
    if (tag != parts.size()) bad("union tags are not consecutive");
    parts.push_back(make_typed_finset(std::move(ps)));
  }
  return disjoint_union(parts);
}

Json from_function(const TypedFunction& f) {
  Json m = Json::object();
  for (std::size_t i = 0; i < f.domain().size(); ++i) m[f.domain().port(i).name] = f.codomain().port(f.targets()[i]).name;
  Json j;
  j["domain"] = from_set(f.domain());
  j["codomain"] = from_set(f.codomain());
  j["map"] = m;
  return j;
}

TypedFunction to_function(const Json& j) {
  std::map<std::string, std::string> m;
  for (const auto& [k, v] : field(j, "map").items()) m[k] = v.get<std::string>();
  return TypedFunction::make(to_set(field(j, "domain")), to_set(field(j, "codomain")), m);
}

Json from_assignment(const Assignment& a) {
  Json j = Json::object();
  for (std::size_t i = 0; i < a.over().size(); ++i) j[a.over().port(i).name] = from_value(a[i]);
  return j;
}

Assignment to_assignment(const Json& j, const TypedFinSet& over) {
  if (!j.is_object()) bad("an assignment is an object of port values");
  std::map<std::string, Value> m;
  for (const auto& [k, v] : j.items()) {
    auto i = over.index_of(k);
    if (!i) throw Error(ErrorKind::DomainMismatch, "json: no port '" + k + "' in " + over.to_string());
    m[k] = to_value(v, over.port(*i).type);
  }
  return Assignment::from_map(over, m);
}

Json from_box(const Box& b) {
  Json j;
  j["inputs"] = from_set(b.inputs);
  j["outputs"] = from_set(b.outputs);
  return j;
}

Box to_box(const Json& j) { return Box{to_set(field(j, "inputs")), to_set(field(j, "outputs"))}; }

Json from_diagram(const WiringDiagram& d) {
  Json in = Json::object();
  for (std::size_t i = 0; i < d.source().inputs.size(); ++i) {
    const auto& f = d.in_feeds()[i];
    const auto& pool = f.from == Feed::From::TargetInput ? d.target().inputs : d.source().outputs;
    Json e;
    e["from"] = side_name(f.from);
    e["port"] = pool.port(f.index).name;
    in[d.source().inputs.port(i).name] = e;
  }
  Json out = Json::object();
  for (std::size_t k = 0; k < d.target().outputs.size(); ++k)
    out[d.target().outputs.port(k).name] = d.source().outputs.port(d.out_feeds()[k]).name;
  Json j;
  j["source"] = from_box(d.source());
  j["target"] = from_box(d.target());
  j["in"] = in;
  j["out"] = out;
  return j;
}

WiringDiagram to_diagram(const Json& j) {
  std::map<std::string, PortRef> in, out;
  for (const auto& [k, v] : field(j, "in").items()) {
    const auto from = field(v, "from").get<std::string>();
    if (from != "outer_in" && from != "inner_out") bad("unknown feed side '" + from + "'");
    in[k] = PortRef{from == "outer_in" ? PortSide::TargetIn : PortSide::SourceOut, field(v, "port").get<std::string>()};
  }
  for (const auto& [k, v] : field(j, "out").items()) out[k] = PortRef{PortSide::SourceOut, v.get<std::string>()};
  return WiringDiagram::make(to_box(field(j, "source")), to_box(field(j, "target")), in, out);
}

Json from_arrow(const OperadArrow& a) {
  Json s = Json::array();
  for (const auto& b : a.sources) s.push_back(from_box(b));
  Json j;
  j["sources"] = s;
  j["target"] = from_box(a.target);
  j["diagram"] = from_diagram(a.diagram);
  return j;
}

Json from_modal_box(const ModalBox& m) {
  auto atomic = [](const ModalFactor& f) {
    Json interfaces = Json::object();
    for (std::size_t i = 0; i < f.labels.size(); ++i) interfaces[f.labels[i]] = from_box(f.boxes[i]);
    Json j;
    j["modes"] = f.labels;
    j["interfaces"] = interfaces;
    return j;
  };
  if (m.factors().size() == 1) return atomic(m.factors()[0]);
  Json t = Json::array();
  for (const auto& f : m.factors()) t.push_back(atomic(f));
  Json j;
  j["tensor"] = t;
  return j;
}

ModalBox to_modal_box(const Json& j) {
  if (j.contains("tensor")) {
    std::vector<ModalBox> parts;
    for (const auto& f : j.at("tensor")) parts.push_back(to_modal_box(f));
    return tensor(parts);
  }
  std::vector<std::pair<std::string, Box>> modes;
  const auto& interfaces = field(j, "interfaces");
  for (const auto& label : field(j, "modes")) {
    const auto l = label.get<std::string>();
    if (!interfaces.contains(l)) throw Error(ErrorKind::MissingInterface, "json: no interface for mode '" + l + "'");
    modes.emplace_back(l, to_box(interfaces.at(l)));
  }
  return ModalBox::make(modes);
}

Json from_morphism(const MdnMorphism& f, std::size_t max_events) {
  const auto n = f.source().mode_count();
  Json events = Json::object();
  for (std::uint64_t i = 0; i < n && i < max_events; ++i) {
    auto ev = f.event_at(i);
    Json e;
    e["diagram"] = from_diagram(ev.diagram);
    e["sigma"] = mode_to_string(ev.sigma);
    events[mode_to_string(f.source().mode_at(i))] = e;
  }
  Json j;
  j["source"] = from_modal_box(f.source());
  j["target"] = from_modal_box(f.target());
  j["mode_count"] = n;
  j["truncated"] = n > max_events;
  j["events"] = events;
  return j;
}

MdnMorphism to_morphism(const Json& j) {
  if (j.value("truncated", false)) bad("cannot rebuild a truncated morphism");
  std::map<Mode, Event> table;
  for (const auto& [k, v] : field(j, "events").items())
    table.emplace(parse_mode(k), Event{to_diagram(field(v, "diagram")), parse_mode(field(v, "sigma").get<std::string>())});
  return make_mdn_morphism(to_modal_box(field(j, "source")), to_modal_box(field(j, "target")), table);
}

Json from_state_space(const StateSpace& s) {
  Json j;
  switch (s.kind()) {
    case StateSpace::Kind::Finite:
      j["kind"] = "finite";
      j["symbols"] = s.symbols();
      break;
    case StateSpace::Kind::Record: {
      j["kind"] = "record";
      Json fs = Json::array();
      for (const auto& f : s.fields()) {
        Json e;
        e["name"] = f.name;
        e["type"] = from_type(f.type);
        fs.push_back(e);
      }
      j["fields"] = fs;
      break;
    }
    case StateSpace::Kind::Product: {
      j["kind"] = "product";
      Json cs = Json::array();
      for (const auto& c : s.components()) cs.push_back(from_state_space(c));
      j["components"] = cs;
      break;
    }
  }
  return j;
}

Json from_state(const StateSpace& s, const Value& v) {
  switch (s.kind()) {
    case StateSpace::Kind::Finite:
      return v.as_symbol();
    case StateSpace::Kind::Record: {
      Json j = Json::object();
      const auto& t = v.as_tuple();
      for (std::size_t i = 0; i < s.fields().size(); ++i) j[s.fields()[i].name] = from_value(t[i]);
      return j;
    }
    case StateSpace::Kind::Product: {
      Json a = Json::array();
      const auto& t = v.as_tuple();
      for (std::size_t i = 0; i < s.components().size(); ++i) a.push_back(from_state(s.components()[i], t[i]));
      return a;
    }
  }
  return nullptr;
}

Value to_state(const StateSpace& s, const Json& j) {
  auto fail = [&] { return Error(ErrorKind::InitialStateError, "state " + j.dump() + " does not fit " + s.to_string()); };
  switch (s.kind()) {
    case StateSpace::Kind::Finite: {
      if (!j.is_string()) throw fail();
      auto v = Value::symbol(j.get<std::string>());
      if (!s.contains(v)) throw fail();
      return v;
    }
    case StateSpace::Kind::Record: {
      Value::Tuple t;
      if (j.is_object()) {
        if (j.size() != s.fields().size()) throw fail();
        for (const auto& f : s.fields()) {
          if (!j.contains(f.name)) throw fail();
          t.push_back(to_value(j.at(f.name), f.type));
        }
      } else if (j.is_array() && j.size() == s.fields().size()) {
        for (std::size_t i = 0; i < j.size(); ++i) t.push_back(to_value(j.at(i), s.fields()[i].type));
      } else {
        throw fail();
      }
      return Value::tuple(std::move(t));
    }
    case StateSpace::Kind::Product: {
      if (!j.is_array() || j.size() != s.components().size()) throw fail();
      Value::Tuple t;
      for (std::size_t i = 0; i < j.size(); ++i) t.push_back(to_state(s.components()[i], j.at(i)));
      return Value::tuple(std::move(t));
    }
  }
  throw fail();
}

Json from_trace_step(const StateSpace& s, const TraceStep& t) {
  Json j;
  j["step"] = t.index;
  j["mode"] = mode_to_string(t.mode);
  j["state"] = from_state(s, t.state);
  j["input"] = from_assignment(t.input);
  j["output"] = from_assignment(t.output);
  j["next_state"] = from_state(s, t.next_state);
  return j;
}

InputTrace parse_input_trace(const std::string& text) {
  InputTrace out;
  std::istringstream in(text);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorKind::InvalidValue, "input trace line " + std::to_string(n) + ": " + e.what());
    }
    if (!j.is_object()) throw Error(ErrorKind::InvalidValue, "input trace line " + std::to_string(n) + " is not an object");
    PortValues pv;
    for (const auto& [k, v] : j.items()) pv[k] = to_value(v);
    out.push_back(std::move(pv));
  }
  return out;
}

}  // namespace mnet::json

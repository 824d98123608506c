#include "modalnet/dsl/elaborate.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "modalnet/dsl/expr.hpp"

namespace mnet::dsl {

std::vector<std::string> CompositionNode::leaf_boxes() const {
  if (kind == Kind::Leaf) return {box};
  std::vector<std::string> out;
  for (const auto& c : children) {
    auto sub = c.leaf_boxes();
    out.insert(out.end(), sub.begin(), sub.end());
  }
  return out;
}

const ElaboratedDynamics* Elaboration::dynamics_on(const std::string& box) const {
  for (const auto& [name, d] : dynamics) {
    if (d.box == box) return &d;
  }
  return nullptr;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorKind::Io, "cannot read " + path);
  return ss.str();
}

Elaboration load_file(const std::string& path, const std::map<std::string, std::string>& overrides) {
  return elaborate(parse_or_throw(read_file(path)), overrides);
}

namespace {

std::string idx(const std::string& base, std::int64_t i) { return base + "[" + std::to_string(i) + "]"; }

// Runs f, attaching `span` to library errors that carry no location.
template <class F>
auto located(Span span, const std::string& context, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const DslError&) {
    throw;
  } catch (const Error& e) {
    throw DslError(Diagnostic{e.kind(), span, context.empty() ? e.detail() : context + ": " + e.detail(), {}});
  }
}

void collect_labels(const TypeExpr& t, std::set<std::string>& out) {
  out.insert(t.labels.begin(), t.labels.end());
  for (const auto& c : t.components) collect_labels(c, out);
}

// A wire endpoint after loop variables and constant indices are resolved.
struct PathSpec {
  bool outer = false;
  std::string inst;  // base name when inst_star
  bool inst_star = false;
  bool input = true;
  std::string port;  // base name when port_star
  bool port_star = false;
  Span span;
};

struct WireSpec {
  PathSpec dest, src;
  bool optional = false;
  Span span;
};

class Elaborator {
 public:
  Elaborator(const Document& doc, const std::map<std::string, std::string>& overrides)
      : doc_(doc), overrides_(overrides) {}

  Elaboration run() {
    for (const auto& d : doc_.decls) {
      std::visit([&](const auto& x) { collect(x); }, d);
    }
    for (const auto& d : doc_.decls) {
      std::visit([&](const auto& x) { elaborate(x); }, d);
    }
    for (const auto& [name, text] : overrides_) {
      if (!out_.constants.count(name)) throw Error(ErrorKind::UnknownName, "no constant named " + name);
    }
    return std::move(out_);
  }

 private:
  const Document& doc_;
  const std::map<std::string, std::string>& overrides_;
  Elaboration out_;
  std::set<std::string> labels_;

  // ----- label collection

  void collect(const ConstDecl&) {}
  void collect(const TypeDecl& d) { collect_labels(d.type, labels_); }
  void collect(const BoxDecl& d) {
    for (const auto& p : d.ports) collect_labels(p.type, labels_);
    for (const auto& m : d.modes) {
      labels_.insert(m.labels.begin(), m.labels.end());
      for (const auto& p : m.ports) collect_labels(p.type, labels_);
    }
  }
  void collect(const MorphismDecl&) {}
  void collect(const DynamicsDecl& d) {
    for (const auto& f : d.fields) collect_labels(f.type, labels_);
  }
  void collect(const ComposeDecl&) {}

  [[noreturn]] static void unresolved(Span s, const std::string& msg) {
    fail_at(ErrorKind::NameResolutionError, s, msg);
  }

  // ----- constants and types

  void elaborate(const ConstDecl& d) {
    if (out_.constants.count(d.name)) unresolved(d.span, "constant " + d.name + " is already defined");
    Value v = eval_const(d.value, out_.constants, &labels_);
    if (auto it = overrides_.find(d.name); it != overrides_.end()) {
      Expr e = located(d.span, "override of " + d.name, [&] { return parse_expression(it->second); });
      Value o = eval_const(e, out_.constants, &labels_);
      if (v.is_real() && o.is_int()) o = Value::real(static_cast<double>(o.as_int()));
      if (static_type(o).kind != static_type(v).kind) {
        fail_at(ErrorKind::DynamicsTypeError, d.span,
                "override " + d.name + "=" + it->second + " does not match the declared " + static_type(v).to_string());
      }
      v = o;
    }
    out_.constants.emplace(d.name, v);
  }

  ValueType resolve(const TypeExpr& t) {
    switch (t.kind) {
      case TypeExpr::Kind::Named: {
        if (t.name == "unit") return ValueType::unit();
        if (t.name == "bit") return ValueType::bit();
        if (t.name == "unit_interval") return ValueType::unit_interval();
        if (t.name == "nonneg_real") return ValueType::non_neg_real();
        if (t.name == "real") return ValueType::real();
        auto it = out_.types.find(t.name);
        if (it == out_.types.end()) unresolved(t.span, "unknown type " + t.name);
        return it->second;
      }
      case TypeExpr::Kind::Int: {
        Value lo = eval_const(t.bounds[0], out_.constants);
        Value hi = eval_const(t.bounds[1], out_.constants);
        if (!lo.is_int() || !hi.is_int()) fail_at(ErrorKind::InvalidType, t.span, "int bounds must be integers");
        return located(t.span, "", [&] { return ValueType::int_range(lo.as_int(), hi.as_int()); });
      }
      case TypeExpr::Kind::Enum:
        return located(t.span, "", [&] { return ValueType::enumeration(t.labels); });
      case TypeExpr::Kind::Product: {
        std::vector<ValueType> comps;
        for (std::size_t i = 0; i < t.components.size(); ++i) {
          ValueType c = resolve(t.components[i]);
          std::int64_t n = t.repeat[i] ? eval_count(*t.repeat[i], out_.constants) : 1;
          for (std::int64_t k = 0; k < n; ++k) comps.push_back(c);
        }
        return ValueType::product(std::move(comps));
      }
    }
    fail_at(ErrorKind::InvalidType, t.span, "bad type");
  }

  void elaborate(const TypeDecl& d) {
    if (out_.types.count(d.name)) unresolved(d.span, "type " + d.name + " is already defined");
    out_.types.emplace(d.name, resolve(d.type));
  }

  // ----- boxes

  Box make_box(const std::vector<PortDecl>& ports) {
    std::vector<Port> in, outs;
    for (const auto& p : ports) {
      ValueType t = resolve(p.type);
      auto& side = p.input ? in : outs;
      if (!p.width) {
        side.push_back(Port{p.name, t});
        continue;
      }
      std::int64_t w = eval_count(*p.width, out_.constants);
      if (w < 1) fail_at(ErrorKind::BusWidthMismatch, p.span, "bus " + p.name + " needs width >= 1");
      for (std::int64_t i = 0; i < w; ++i) side.push_back(Port{idx(p.name, i), t});
    }
    const Span s = ports.empty() ? Span{} : ports.front().span;
    return located(s, "", [&] { return Box{make_typed_finset(std::move(in)), make_typed_finset(std::move(outs))}; });
  }

  void elaborate(const BoxDecl& d) {
    if (out_.boxes.count(d.name)) unresolved(d.span, "box " + d.name + " is already defined");
    if (!d.modal) {
      out_.boxes.emplace(d.name, ModalBox::of_box(make_box(d.ports)));
      return;
    }
    std::vector<std::pair<std::string, Box>> modes;
    for (const auto& m : d.modes) {
      Box b = make_box(m.ports);
      for (const auto& l : m.labels) modes.emplace_back(l, b);
    }
    out_.boxes.emplace(d.name, located(d.span, "modal " + d.name, [&] { return ModalBox::make(modes); }));
  }

  const ModalBox& box(const std::string& name, Span s) const {
    auto it = out_.boxes.find(name);
    if (it == out_.boxes.end()) unresolved(s, "unknown box " + name);
    return it->second;
  }

  static const std::vector<std::string>& labels_of(const ModalBox& b) { return b.factors()[0].labels; }

  // ----- morphisms

  struct Instances {
    std::vector<std::string> names;
    std::vector<std::string> boxes;
    std::vector<ModalBox> modal;

    std::optional<std::size_t> find(const std::string& n) const {
      for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == n) return i;
      }
      return std::nullopt;
    }
    std::size_t count_indexed(const std::string& base) const {
      std::size_t k = 0;
      while (find(idx(base, static_cast<std::int64_t>(k)))) ++k;
      return k;
    }
  };

  PathSpec path_spec(const PortPath& p, const std::map<std::string, Value>& env, const Instances& inst,
                     const std::string& target) {
    PathSpec s;
    s.span = p.span;
    s.input = p.input;
    auto index_of = [&](const Expr& e) {
      Value v = eval_const(e, env);
      if (!v.is_int()) fail_at(ErrorKind::DynamicsTypeError, e.span, "index must be an integer");
      return v.as_int();
    };
    if (p.inst_index) {
      if (p.inst_index->kind == Expr::Kind::Star) {
        s.inst_star = true;
        s.inst = p.inst;
        if (inst.count_indexed(p.inst) == 0) unresolved(p.span, "no instances " + p.inst + "[...]");
      } else {
        s.inst = idx(p.inst, index_of(*p.inst_index));
        if (!inst.find(s.inst)) unresolved(p.span, "unknown instance " + s.inst);
      }
    } else if (inst.find(p.inst)) {
      s.inst = p.inst;
    } else if (p.inst == target || p.inst == "outer") {
      s.outer = true;
    } else {
      unresolved(p.span, "'" + p.inst + "' is neither an instance nor the target " + target);
    }
    if (p.port_index) {
      if (p.port_index->kind == Expr::Kind::Star) {
        s.port_star = true;
        s.port = p.port;
      } else {
        s.port = idx(p.port, index_of(*p.port_index));
      }
    } else {
      s.port = p.port;
    }
    return s;
  }

  void unroll(const std::vector<Loop>& loops, std::size_t k, std::map<std::string, Value>& env,
              const std::function<void(const std::map<std::string, Value>&)>& body) {
    if (k == loops.size()) {
      body(env);
      return;
    }
    std::int64_t n = eval_count(loops[k].bound, env);
    auto saved = env.find(loops[k].var) == env.end() ? std::nullopt : std::optional<Value>(env[loops[k].var]);
    for (std::int64_t i = 0; i < n; ++i) {
      env[loops[k].var] = Value::integer(i);
      unroll(loops, k + 1, env, body);
    }
    if (saved) {
      env[loops[k].var] = *saved;
    } else {
      env.erase(loops[k].var);
    }
  }

  void elaborate(const MorphismDecl& d) {
    if (out_.morphisms.count(d.name) || out_.compositions.count(d.name)) {
      unresolved(d.span, "morphism " + d.name + " is already defined");
    }
    Instances inst;
    for (const auto& s : d.sources) {
      const ModalBox& b = box(s.box, s.span);
      const std::string base = s.alias.empty() ? s.box : s.alias;
      if (s.count) {
        std::int64_t n = eval_count(*s.count, out_.constants);
        for (std::int64_t i = 0; i < n; ++i) {
          inst.names.push_back(idx(base, i));
          inst.boxes.push_back(s.box);
          inst.modal.push_back(b);
        }
      } else {
        inst.names.push_back(base);
        inst.boxes.push_back(s.box);
        inst.modal.push_back(b);
      }
    }
    for (std::size_t i = 0; i < inst.names.size(); ++i) {
      if (inst.find(inst.names[i]) != i) unresolved(d.span, "instance " + inst.names[i] + " is declared twice");
    }
    const ModalBox& target = box(d.target, d.span);

    // Patterns are checked once, independently of the modes they match.
    for (const auto& e : d.events) {
      for (const auto& [who, label] : e.pattern.constraints) {
        std::size_t i = 0;
        if (who.empty()) {
          if (inst.names.size() != 1) {
            unresolved(e.pattern.span, "a bare mode label needs exactly one source; name the instance");
          }
        } else if (auto k = inst.find(who)) {
          i = *k;
        } else {
          unresolved(e.pattern.span, "unknown instance " + who);
        }
        const auto& ls = labels_of(inst.modal[i]);
        if (std::find(ls.begin(), ls.end(), label) == ls.end()) {
          fail_at(ErrorKind::UnknownMode, e.pattern.span, label + " is not a mode of " + inst.boxes[i]);
        }
      }
    }

    std::vector<std::vector<WireSpec>> wires(d.events.size());
    for (std::size_t k = 0; k < d.events.size(); ++k) {
      for (const auto& w : d.events[k].wires) {
        std::map<std::string, Value> env = out_.constants;
        unroll(w.loops, 0, env, [&](const std::map<std::string, Value>& e) {
          WireSpec ws{path_spec(w.dest, e, inst, d.target), path_spec(w.src, e, inst, d.target), w.optional, w.span};
          check_sides(ws);
          wires[k].push_back(std::move(ws));
        });
      }
    }

    ModalBox source = tensor(inst.modal);
    const std::uint64_t count = source.mode_count();
    if (count > (1u << 20)) fail_at(ErrorKind::ShapeError, d.span, "too many source modes to tabulate");
    std::map<Mode, Event> table;
    for (std::uint64_t mi = 0; mi < count; ++mi) {
      Mode m = source.mode_at(mi);
      std::size_t k = 0;
      while (k < d.events.size() && !matches(d.events[k].pattern, m, inst)) ++k;
      if (k == d.events.size()) {
        fail_at(ErrorKind::PartialMap, d.span, "no mode block of " + d.name + " matches " + mode_to_string(m));
      }
      const auto& ev = d.events[k];
      const auto& tl = labels_of(target);
      if (std::find(tl.begin(), tl.end(), ev.target_mode) == tl.end()) {
        fail_at(ErrorKind::CommutingSquareViolation, ev.span,
                "sigma sends " + mode_to_string(m) + " to " + ev.target_mode + ", which is not a mode of " + d.target);
      }
      Mode sigma{ev.target_mode};
      std::vector<std::pair<std::string, Box>> inner;
      for (std::size_t i = 0; i < inst.names.size(); ++i) {
        inner.emplace_back(inst.names[i], inst.modal[i].interface(Mode{m[i]}));
      }
      WiringBuilder b(inner, target.interface(sigma));
      const std::string where = "mode " + mode_to_string(m);
      for (const auto& w : wires[k]) wire(b, w, inner, where);
      WiringDiagram diagram = located(ev.span, d.name + " at " + where, [&] { return b.build(); });
      table.emplace(m, Event{std::move(diagram), std::move(sigma)});
    }
    MdnMorphism f = located(d.span, d.name, [&] { return make_mdn_morphism(source, target, table); });
    out_.morphisms.emplace(d.name, ElaboratedMorphism{std::move(f), inst.names, inst.boxes, d.target});
  }

  static void check_sides(const WireSpec& w) {
    auto side = [](const PathSpec& p) { return std::string(p.outer ? "outer " : "inner ") + (p.input ? "input" : "output"); };
    const bool dest_ok = w.dest.outer ? !w.dest.input : w.dest.input;
    if (!dest_ok) fail_at(ErrorKind::SideError, w.dest.span, "cannot wire into an " + side(w.dest));
    const bool src_ok = w.src.outer ? w.src.input : !w.src.input;
    if (!src_ok) fail_at(ErrorKind::SideError, w.src.span, "cannot take a value from an " + side(w.src));
    if (w.dest.outer && w.src.outer) {
      fail_at(ErrorKind::SideError, w.span, "an outer output must be fed from an inner output");
    }
  }

  static bool matches(const ModePattern& p, const Mode& m, const Instances& inst) {
    if (p.wildcard) return true;
    for (const auto& [who, label] : p.constraints) {
      const std::size_t i = who.empty() ? 0 : *inst.find(who);
      if (m[i] != label) return false;
    }
    return true;
  }

  static std::size_t bus_width(const TypedFinSet& s, const std::string& base) {
    std::size_t k = 0;
    while (s.contains(idx(base, static_cast<std::int64_t>(k)))) ++k;
    return k;
  }

  void wire(WiringBuilder& b, const WireSpec& w, const std::vector<std::pair<std::string, Box>>& inner,
            const std::string& where) {
    auto iface = [&](const PathSpec& p, std::size_t k) -> const TypedFinSet& {
      if (p.outer) return p.input ? b.outer().inputs : b.outer().outputs;
      std::string name = p.inst_star ? idx(p.inst, static_cast<std::int64_t>(k)) : p.inst;
      for (const auto& [n, bx] : inner) {
        if (n == name) return p.input ? bx.inputs : bx.outputs;
      }
      unresolved(p.span, "unknown instance " + name);
    };
    auto width = [&](const PathSpec& p) -> std::optional<std::size_t> {
      std::optional<std::size_t> wd;
      if (p.inst_star) {
        std::size_t n = 0;
        while (std::any_of(inner.begin(), inner.end(), [&](const auto& x) { return x.first == idx(p.inst, static_cast<std::int64_t>(n)); })) ++n;
        wd = n;
      }
      if (p.port_star) {
        std::size_t n = (wd && *wd == 0) ? 0 : bus_width(iface(p, 0), p.port);
        if (wd && *wd != n) {
          fail_at(ErrorKind::BusWidthMismatch, p.span,
                  std::to_string(*wd) + " instances against bus " + p.port + " of width " + std::to_string(n));
        }
        wd = n;
      }
      return wd;
    };
    auto dw = width(w.dest);
    auto sw = width(w.src);
    if (sw && !dw) fail_at(ErrorKind::BusWidthMismatch, w.span, "a bus cannot feed a single port");
    std::size_t n = 1;
    if (dw) {
      n = *dw;
      if (n == 0 && w.optional) return;
      if (sw && *sw != *dw) {
        fail_at(ErrorKind::BusWidthMismatch, w.span,
                "bus widths differ (" + std::to_string(*dw) + " and " + std::to_string(*sw) + ") in " + where);
      }
    }
    for (std::size_t k = 0; k < n; ++k) {
      auto inst_of = [&](const PathSpec& p) { return p.inst_star ? idx(p.inst, static_cast<std::int64_t>(k)) : p.inst; };
      auto port_of = [&](const PathSpec& p) { return p.port_star ? idx(p.port, static_cast<std::int64_t>(k)) : p.port; };
      const std::string dport = port_of(w.dest), sport = port_of(w.src);
      const std::string dinst = inst_of(w.dest), sinst = inst_of(w.src);
      if (!iface(w.dest, k).contains(dport)) {
        if (w.optional) continue;
        unresolved(w.dest.span, (w.dest.outer ? std::string("the target") : dinst) + " has no " +
                                    (w.dest.input ? "input " : "output ") + dport + " in " + where);
      }
      if (!iface(w.src, k).contains(sport)) {
        if (w.optional) continue;
        unresolved(w.src.span, (w.src.outer ? std::string("the target") : sinst) + " has no " +
                                   (w.src.input ? "input " : "output ") + sport + " in " + where);
      }
      located(w.span, where, [&] {
        if (w.dest.outer) {
          b.export_from(dport, sinst, sport);
        } else if (w.src.outer) {
          b.from_outer(dinst, dport, sport);
        } else {
          b.from_inner(dinst, dport, sinst, sport);
        }
        return 0;
      });
    }
  }

  // ----- dynamics

  void elaborate(const DynamicsDecl& d) {
    if (out_.dynamics.count(d.name)) unresolved(d.span, "dynamics " + d.name + " is already defined");
    const ModalBox& over = box(d.box, d.span);
    for (const auto& [n, other] : out_.dynamics) {
      if (other.box == d.box) unresolved(d.span, "box " + d.box + " already has dynamics " + n);
    }
    const std::vector<std::string> modes = labels_of(over);

    std::vector<StateSpace::Field> fields;
    Scope base;
    base.constants = &out_.constants;
    base.labels = &labels_;
    for (const auto& f : d.fields) {
      ValueType t = resolve(f.type);
      for (const auto& g : fields) {
        if (g.name == f.name) unresolved(f.span, "field " + f.name + " is declared twice");
      }
      fields.push_back(StateSpace::Field{f.name, t});
      base.fields.emplace_back(f.name, static_type(t));
    }
    StateSpace states = StateSpace::record(fields);

    auto check_state = [&](const SType& t, const Expr& e, const std::string& what) {
      bool ok;
      if (fields.size() == 1) {
        ok = fits(t, fields[0].type);
      } else {
        ok = t.kind == SType::Kind::Tuple && t.items.size() == fields.size();
        for (std::size_t i = 0; ok && i < fields.size(); ++i) ok = fits(t.items[i], fields[i].type);
      }
      if (!ok) {
        fail_at(ErrorKind::DynamicsTypeError, e.span, what + " has type " + t.to_string() + ", expected " + states.to_string());
      }
    };
    // Wraps a single-field value and converts each field to its type.
    auto to_state = [fields](const Value& v, const Span& s) {
      Value::Tuple t = fields.size() == 1 ? Value::Tuple{v} : v.as_tuple();
      for (std::size_t i = 0; i < fields.size(); ++i) t[i] = conform(t[i], fields[i].type, s);
      return Value::tuple(std::move(t));
    };

    // mode_of
    std::function<Mode(const Value&)> mode_of;
    if (d.mode_of) {
      auto c = compile(*d.mode_of, base);
      bool ok = c.type.kind == SType::Kind::Sym;
      for (const auto& l : c.type.labels) ok = ok && std::find(modes.begin(), modes.end(), l) != modes.end();
      if (!ok) {
        fail_at(ErrorKind::DynamicsTypeError, d.mode_of->span,
                "mode_of has type " + c.type.to_string() + ", expected a mode of " + d.box);
      }
      mode_of = [fn = c.fn](const Value& s) {
        Frame f;
        f.fields = &s.as_tuple();
        return Mode{fn(f).as_symbol()};
      };
    } else {
      if (modes.size() != 1) unresolved(d.span, "dynamics on the modal box " + d.box + " needs mode_of");
      mode_of = [m = Mode{modes[0]}](const Value&) { return m; };
    }

    auto rule_for = [&](const auto& rules, const std::string& label, const char* what) -> const auto* {
      using R = std::remove_reference_t<decltype(rules[0])>;
      const R* hit = nullptr;
      for (const auto& r : rules) {
        for (const auto& m : r.modes) {
          if (m != "_" && std::find(modes.begin(), modes.end(), m) == modes.end()) {
            fail_at(ErrorKind::UnknownMode, r.span, m + " is not a mode of " + d.box);
          }
          if (!hit && (m == "_" || m == label)) hit = &r;
        }
      }
      if (!hit) fail_at(ErrorKind::PartialMap, d.span, std::string("no ") + what + " rule for mode " + label + " of " + d.box);
      return hit;
    };

    // update and readout, compiled per mode against that mode's interface
    struct OutLine {
      std::size_t slot;
      CompiledExpr value;
      ValueType type;
      Span span;
    };
    auto updates = std::make_shared<std::map<std::string, std::pair<CompiledExpr, Span>>>();
    auto readouts = std::make_shared<std::map<std::string, std::pair<TypedFinSet, std::vector<OutLine>>>>();
    for (const auto& label : modes) {
      const Box iface = over.interface(Mode{label});
      Scope sc = base;
      sc.inputs_context = "mode " + label + " of " + d.box;
      for (const auto& p : iface.inputs.ports()) sc.inputs.emplace(p.name, static_type(p.type));

      const UpdateRule* u = rule_for(d.updates, label, "update");
      auto c = compile(u->body, sc);
      check_state(c.type, u->body, "update for mode " + label);
      updates->emplace(label, std::pair{std::move(c), u->span});

      const ReadoutRule* r = rule_for(d.readouts, label, "readout");
      std::vector<OutLine> lines;
      std::vector<bool> done(iface.outputs.size(), false);
      for (const auto& l : r->lines) {
        std::map<std::string, Value> env = out_.constants;
        unroll(l.loops, 0, env, [&](const std::map<std::string, Value>& e) {
          std::string port = l.port;
          if (l.index) {
            Value i = eval_const(*l.index, e);
            if (!i.is_int()) fail_at(ErrorKind::DynamicsTypeError, l.index->span, "index must be an integer");
            port = idx(l.port, i.as_int());
          }
          auto slot = iface.outputs.index_of(port);
          if (!slot) unresolved(l.span, port + " is not an output of mode " + label + " of " + d.box);
          if (done[*slot]) unresolved(l.span, "output " + port + " is assigned twice");
          done[*slot] = true;
          Scope lsc = sc;
          lsc.constants = &e;
          auto v = compile(l.value, lsc);
          const ValueType& pt = iface.outputs.port(*slot).type;
          if (!fits(v.type, pt)) {
            fail_at(ErrorKind::DynamicsTypeError, l.value.span,
                    "output " + port + " expects " + pt.to_string() + ", got " + v.type.to_string());
          }
          lines.push_back(OutLine{*slot, std::move(v), pt, l.span});
        });
      }
      for (std::size_t i = 0; i < done.size(); ++i) {
        if (!done[i]) {
          fail_at(ErrorKind::PartialMap, r->span, "readout for mode " + label + " leaves " + iface.outputs.port(i).name + " unset");
        }
      }
      readouts->emplace(label, std::pair{iface.outputs, std::move(lines)});
    }

    auto update = [mode_of, updates, to_state](const Value& s, const Assignment& in) {
      const auto& [c, span] = updates->at(mode_of(s)[0]);
      Frame f;
      f.fields = &s.as_tuple();
      f.inputs = &in;
      return to_state(c(f), span);
    };
    auto readout = [mode_of, readouts](const Value& s) {
      const auto& [outputs, lines] = readouts->at(mode_of(s)[0]);
      Frame f;
      f.fields = &s.as_tuple();
      std::vector<Value> values(outputs.size());
      for (const auto& l : lines) values[l.slot] = conform(l.value(f), l.type, l.span);
      return Assignment::unchecked(outputs, std::move(values));
    };

    std::optional<Value> init;
    if (d.init) {
      Scope sc;
      sc.constants = &out_.constants;
      sc.labels = &labels_;
      auto c = compile(*d.init, sc);
      check_state(c.type, *d.init, "init");
      Frame f;
      init = to_state(c(f), d.init->span);
    }

    auto system = located(d.span, "dynamics " + d.name, [&] {
      return make_mds(over, states, mode_of, update, readout, init);
    });
    out_.dynamics.emplace(d.name, ElaboratedDynamics{d.box, std::move(system)});
  }

  // ----- compositions

  std::vector<CompositionNode> expand(const CompTerm& t) {
    std::vector<CompositionNode> nodes;
    switch (t.kind) {
      case CompTerm::Kind::Name: {
        if (auto it = out_.morphisms.find(t.name); it != out_.morphisms.end()) {
          CompositionNode n;
          n.kind = CompositionNode::Kind::Apply;
          n.label = t.name;
          n.box = it->second.target;
          n.morphism = it->second.morphism;
          for (const auto& b : it->second.source_boxes) n.children.push_back(leaf(b));
          nodes.push_back(std::move(n));
        } else if (auto ct = out_.compositions.find(t.name); ct != out_.compositions.end()) {
          const auto& tree = ct->second.tree;
          if (tree.kind == CompositionNode::Kind::Tensor) {
            nodes = tree.children;
          } else {
            nodes.push_back(tree);
          }
          for (auto& n : nodes) close(n);
        } else {
          unresolved(t.span, "unknown morphism or composition " + t.name);
        }
        break;
      }
      case CompTerm::Kind::Id: {
        const ModalBox& b = box(t.name, t.span);
        CompositionNode n;
        n.kind = CompositionNode::Kind::Apply;
        n.label = "id(" + t.name + ")";
        n.box = t.name;
        n.morphism = identity_mdn(b);
        n.children.push_back(leaf(t.name));
        nodes.push_back(std::move(n));
        break;
      }
      case CompTerm::Kind::Tensor:
        for (const auto& p : t.parts) {
          auto sub = expand(p);
          nodes.insert(nodes.end(), sub.begin(), sub.end());
        }
        break;
    }
    if (t.repeat) {
      std::int64_t n = eval_count(*t.repeat, out_.constants);
      std::vector<CompositionNode> rep;
      for (std::int64_t i = 0; i < n; ++i) rep.insert(rep.end(), nodes.begin(), nodes.end());
      nodes = std::move(rep);
    }
    return nodes;
  }

  // Leaves of a referenced composition are already filled; `closed` marks
  // them so the next level does not try to fill them again.
  static constexpr const char* kClosed = "\x01";
  static CompositionNode leaf(const std::string& b) {
    CompositionNode n;
    n.kind = CompositionNode::Kind::Leaf;
    n.label = b;
    n.box = b;
    return n;
  }
  static void close(CompositionNode& n) {
    if (n.kind == CompositionNode::Kind::Leaf) n.label = kClosed + n.label;
    for (auto& c : n.children) close(c);
  }
  static void reopen(CompositionNode& n) {
    if (n.kind == CompositionNode::Kind::Leaf && !n.label.empty() && n.label[0] == kClosed[0]) n.label.erase(0, 1);
    for (auto& c : n.children) reopen(c);
  }
  static void open_leaves(CompositionNode& n, std::vector<CompositionNode*>& out) {
    if (n.kind == CompositionNode::Kind::Leaf) {
      if (n.label.empty() || n.label[0] != kClosed[0]) out.push_back(&n);
      return;
    }
    for (auto& c : n.children) open_leaves(c, out);
  }

  MdnMorphism fold(const CompositionNode& n) {
    switch (n.kind) {
      case CompositionNode::Kind::Leaf: return identity_mdn(out_.boxes.at(n.box));
      case CompositionNode::Kind::Tensor: {
        std::vector<MdnMorphism> parts;
        for (const auto& c : n.children) parts.push_back(fold(c));
        return tensor_mdn(parts);
      }
      case CompositionNode::Kind::Apply: {
        std::vector<MdnMorphism> parts;
        for (const auto& c : n.children) parts.push_back(fold(c));
        return compose_mdn(tensor_mdn(parts), *n.morphism);
      }
    }
    throw Error(ErrorKind::ShapeError, "bad composition node");
  }

  std::optional<NetworkNode> network(const CompositionNode& n, std::vector<std::string>& missing) {
    switch (n.kind) {
      case CompositionNode::Kind::Leaf: {
        if (const auto* d = out_.dynamics_on(n.box)) return NetworkNode::leaf(d->system);
        if (std::find(missing.begin(), missing.end(), n.box) == missing.end()) missing.push_back(n.box);
        return std::nullopt;
      }
      case CompositionNode::Kind::Tensor:
      case CompositionNode::Kind::Apply: {
        std::vector<NetworkNode> kids;
        for (const auto& c : n.children) {
          if (auto k = network(c, missing)) kids.push_back(std::move(*k));
        }
        if (!missing.empty()) return std::nullopt;
        if (n.kind == CompositionNode::Kind::Tensor) return NetworkNode::tensor(std::move(kids));
        return NetworkNode::apply(*n.morphism, std::move(kids));
      }
    }
    return std::nullopt;
  }

  void elaborate(const ComposeDecl& d) {
    if (out_.morphisms.count(d.name) || out_.compositions.count(d.name)) {
      unresolved(d.span, "composition " + d.name + " is already defined");
    }
    std::vector<CompositionNode> roots;
    for (const auto& t : d.levels[0]) {
      auto sub = expand(t);
      roots.insert(roots.end(), sub.begin(), sub.end());
    }
    if (roots.empty()) fail_at(ErrorKind::ArityMismatch, d.span, "empty composition");
    std::vector<CompositionNode*> open;
    for (auto& r : roots) open_leaves(r, open);
    for (std::size_t k = 1; k < d.levels.size(); ++k) {
      std::vector<CompositionNode> level;
      for (const auto& t : d.levels[k]) {
        auto sub = expand(t);
        level.insert(level.end(), sub.begin(), sub.end());
      }
      const Span s = d.levels[k].front().span;
      if (level.size() != open.size()) {
        fail_at(ErrorKind::ArityMismatch, s,
                "level " + std::to_string(k) + " supplies " + std::to_string(level.size()) + " arrows for " +
                    std::to_string(open.size()) + " open sources");
      }
      std::vector<CompositionNode*> next;
      for (std::size_t i = 0; i < level.size(); ++i) {
        if (level[i].box != open[i]->box) {
          fail_at(ErrorKind::BoxMismatch, s,
                  "source " + std::to_string(i) + " of level " + std::to_string(k - 1) + " is " + open[i]->box + ", but " +
                      level[i].label + " produces " + level[i].box);
        }
        *open[i] = std::move(level[i]);
        open_leaves(*open[i], next);
      }
      open = std::move(next);
    }
    CompositionNode tree;
    if (roots.size() == 1) {
      tree = std::move(roots[0]);
    } else {
      tree.kind = CompositionNode::Kind::Tensor;
      tree.label = d.name;
      tree.children = std::move(roots);
    }
    reopen(tree);

    MdnMorphism f = located(d.span, d.name, [&] { return fold(tree); });
    std::vector<std::string> missing;
    auto net = network(tree, missing);
    if (!missing.empty()) {
      std::string list;
      for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
      out_.warnings.push_back(Diagnostic{ErrorKind::UnknownName, d.span,
                                         "composition " + d.name + " has no dynamics for " + list + "; morphism only",
                                         {}});
    }
    std::vector<std::string> labels;
    std::map<std::string, std::size_t> seen;
    for (const auto& b : tree.leaf_boxes()) labels.push_back(idx(b, static_cast<std::int64_t>(seen[b]++)));
    out_.compositions.emplace(d.name, Composition{std::move(tree), std::move(f), std::move(net), std::move(labels)});
  }
};

}  // namespace

Elaboration elaborate(const Document& doc, const std::map<std::string, std::string>& overrides) {
  return Elaborator(doc, overrides).run();
}

}  // namespace mnet::dsl

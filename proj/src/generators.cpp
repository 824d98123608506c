#include "modalnet/generators.hpp"

#include <map>
#include <memory>

namespace mnet::gen {

namespace {

// Plain modulo keeps sequences identical across standard libraries.
std::size_t pick(Rng& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }
bool coin(Rng& rng, std::size_t one_in) { return pick(rng, one_in) == 0; }

std::string name(const char* prefix, std::size_t i) { return prefix + std::to_string(i); }

std::uint64_t fnv(std::uint64_t h, const std::string& s) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// Feeds for the inputs of x: from the shared outer input list `yin` (grown
// on demand) or from outputs of x.
std::map<std::string, PortRef> plan_inputs(Rng& rng, const Box& x, std::vector<Port>& yin, const Limits& lim) {
  std::map<std::string, PortRef> in_map;
  for (const auto& p : x.inputs.ports()) {
    std::vector<std::string> fb, shared;
    for (const auto& o : x.outputs.ports())
      if (o.type == p.type) fb.push_back(o.name);
    for (const auto& y : yin)
      if (y.type == p.type) shared.push_back(y.name);
    const bool room = yin.size() < lim.max_ports;
    if (!fb.empty() && (coin(rng, 3) || (shared.empty() && !room))) {
      in_map[p.name] = PortRef{PortSide::SourceOut, fb[pick(rng, fb.size())]};
    } else if (!shared.empty() && (coin(rng, 2) || !room)) {
      in_map[p.name] = PortRef{PortSide::TargetIn, shared[pick(rng, shared.size())]};
    } else {
      yin.push_back(Port{name("i", yin.size()), p.type});
      in_map[p.name] = PortRef{PortSide::TargetIn, yin.back().name};
    }
  }
  return in_map;
}

std::map<std::string, PortRef> plan_outputs(Rng& rng, const Box& x, const TypedFinSet& yout) {
  std::map<std::string, PortRef> out_map;
  for (const auto& p : yout.ports()) {
    std::vector<std::string> src;
    for (const auto& o : x.outputs.ports())
      if (o.type == p.type) src.push_back(o.name);
    out_map[p.name] = PortRef{PortSide::SourceOut, src[pick(rng, src.size())]};
  }
  return out_map;
}

// Output ports whose types occur among the outputs of every box in `xs`.
TypedFinSet common_outputs(Rng& rng, const std::vector<Box>& xs, const Limits& lim) {
  std::vector<ValueType> types;
  for (const auto& p : xs.front().outputs.ports()) {
    bool everywhere = true;
    for (const auto& x : xs) {
      bool found = false;
      for (const auto& q : x.outputs.ports()) found = found || q.type == p.type;
      everywhere = everywhere && found;
    }
    if (everywhere) types.push_back(p.type);
  }
  std::vector<Port> out;
  if (!types.empty()) {
    const auto k = pick(rng, lim.max_ports + 1);
    for (std::size_t i = 0; i < k; ++i) out.push_back(Port{name("o", i), types[pick(rng, types.size())]});
  }
  return make_typed_finset(std::move(out));
}

}  // namespace

ValueType finite_type(Rng& rng) {
  switch (pick(rng, 5)) {
    case 0:
      return ValueType::unit();
    case 1:
      return ValueType::bit();
    case 2:
      return ValueType::enumeration({"u", "v"});
    case 3:
      return ValueType::enumeration({"u", "v", "w"});
    default:
      return ValueType::int_range(0, 2);
  }
}

TypedFinSet typed_set(Rng& rng, const Limits& lim, const char* prefix) {
  std::vector<Port> ports;
  const auto k = pick(rng, lim.max_ports + 1);
  for (std::size_t i = 0; i < k; ++i) ports.push_back(Port{name(prefix, i), finite_type(rng)});
  return make_typed_finset(std::move(ports));
}

Box box(Rng& rng, const Limits& lim) { return Box{typed_set(rng, lim, "x"), typed_set(rng, lim, "y")}; }

WiringDiagram diagram_from(Rng& rng, const Box& x, const Limits& lim) {
  std::vector<Port> yin;
  const auto extra = pick(rng, 2);
  for (std::size_t i = 0; i < extra; ++i) yin.push_back(Port{name("i", i), finite_type(rng)});
  auto in_map = plan_inputs(rng, x, yin, lim);
  Box y{make_typed_finset(yin), common_outputs(rng, {x}, lim)};
  auto out_map = plan_outputs(rng, x, y.outputs);
  return WiringDiagram::make(x, y, in_map, out_map);
}

ModalBox modal_box(Rng& rng, const Limits& lim) {
  const auto k = 1 + pick(rng, lim.max_modes);
  std::vector<std::pair<std::string, Box>> modes;
  for (std::size_t i = 0; i < k; ++i) modes.emplace_back(name("m", i), box(rng, lim));
  return ModalBox::make(modes);
}

MdnMorphism morphism_from(Rng& rng, const ModalBox& source, const Limits& lim) {
  const auto n = 1 + pick(rng, lim.max_modes);
  const auto src_modes = source.modes();
  std::vector<std::size_t> sigma(src_modes.size());
  for (auto& s : sigma) s = pick(rng, n);

  std::vector<std::pair<std::string, Box>> target_modes;
  std::map<Mode, Event> table;
  for (std::size_t t = 0; t < n; ++t) {
    std::vector<std::size_t> pre;
    for (std::size_t i = 0; i < sigma.size(); ++i)
      if (sigma[i] == t) pre.push_back(i);
    const std::string label = name("n", t);
    if (pre.empty()) {
      target_modes.emplace_back(label, box(rng, lim));
      continue;
    }
    std::vector<Box> xs;
    for (auto i : pre) xs.push_back(source.interface_at(i));
    std::vector<Port> yin;
    std::vector<std::map<std::string, PortRef>> in_maps;
    for (const auto& x : xs) in_maps.push_back(plan_inputs(rng, x, yin, lim));
    Box y{make_typed_finset(yin), common_outputs(rng, xs, lim)};
    target_modes.emplace_back(label, y);
    for (std::size_t j = 0; j < pre.size(); ++j) {
      auto out_map = plan_outputs(rng, xs[j], y.outputs);
      table.emplace(src_modes[pre[j]], Event{WiringDiagram::make(xs[j], y, in_maps[j], out_map), Mode{label}});
    }
  }
  return make_mdn_morphism(source, ModalBox::make(target_modes), table);
}

ModalDynamicalSystem system_over(Rng& rng, const ModalBox& over, const Limits& lim) {
  const auto k = 1 + pick(rng, lim.max_states);
  std::vector<std::string> symbols;
  for (std::size_t i = 0; i < k; ++i) symbols.push_back(name("s", i));

  struct Tables {
    std::map<std::string, Mode> mode;
    std::map<std::string, Assignment> readout;
    std::vector<std::string> symbols;
    std::uint64_t salt = 0;
  };
  auto t = std::make_shared<Tables>();
  t->symbols = symbols;
  t->salt = rng();
  for (const auto& s : symbols) {
    auto m = over.mode_at(pick(rng, over.mode_count()));
    t->readout.emplace(s, sample_assignment(over.interface(m).outputs, rng));
    t->mode.emplace(s, std::move(m));
  }
  return make_mds(
      over, StateSpace::finite(symbols), [t](const Value& s) { return t->mode.at(s.as_symbol()); },
      [t](const Value& s, const Assignment& in) {
        std::uint64_t h = fnv(14695981039346656037ull ^ t->salt, s.as_symbol());
        for (const auto& v : in.values()) h = fnv(h, v.to_string() + ";");
        return Value::symbol(t->symbols[h % t->symbols.size()]);
      },
      [t](const Value& s) { return t->readout.at(s.as_symbol()); }, Value::symbol(symbols.front()));
}

}  // namespace mnet::gen

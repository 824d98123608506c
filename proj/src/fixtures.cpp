#include "modalnet/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace mnet::fixtures {

namespace {

const char* const kPolarized = "polarized";
const char* const kDepolarized = "depolarized";
const char* const kHyperpolarized = "hyperpolarized";

ValueType cell_modes() { return ValueType::enumeration({kPolarized, kDepolarized, kHyperpolarized}); }
ValueType lid_states() { return ValueType::enumeration({"open", "shut"}); }

std::string idx(const std::string& name, std::size_t i) { return name + "[" + std::to_string(i) + "]"; }

// Table morphism from a per-mode rule; sources are atomic boxes named `names`.
MdnMorphism tabulate(const std::vector<std::string>& names, const std::vector<ModalBox>& sources,
                     const ModalBox& target,
                     const std::function<std::pair<Mode, WiringDiagram>(const Mode&, const std::vector<std::pair<std::string, Box>>&)>& rule) {
  ModalBox src = tensor(sources);
  std::map<Mode, Event> table;
  for (const auto& m : src.modes()) {
    std::vector<std::pair<std::string, Box>> inner;
    for (std::size_t i = 0; i < names.size(); ++i) inner.emplace_back(names[i], sources[i].interface(Mode{m[i]}));
    auto [sigma, diagram] = rule(m, inner);
    table.emplace(m, Event{std::move(diagram), std::move(sigma)});
  }
  return make_mdn_morphism(src, target, table);
}

Value bit(bool b) { return Value::integer(b ? 1 : 0); }

bool fires(const std::string& mode, bool on_depolarized) {
  return mode == (on_depolarized ? kDepolarized : kPolarized);
}

ModalBox nerve_box(const ValueType& light) {
  Box live = make_box({{"light", light}}, {{"a", ValueType::bit()}});
  Box closed = make_box({}, {{"a", ValueType::bit()}});
  return ModalBox::make({{kPolarized, live}, {kDepolarized, closed}, {kHyperpolarized, closed}});
}

MdnMorphism nerve_morphism(const ModalBox& n, const ModalBox& r) {
  return tabulate({"N"}, {n}, r, [&](const Mode& m, const auto& inner) {
    WiringBuilder b(inner, r.interface(Mode{"*"}));
    if (m[0] == kPolarized) b.from_outer("N", "light", "light");
    b.export_from("a", "N", "a");
    return std::pair{Mode{"*"}, b.build()};
  });
}

Retina assemble_retina(ModalBox n, ModalBox r, ModalDynamicalSystem d) {
  auto f = nerve_morphism(n, r);
  auto net = NetworkNode::apply(f, {NetworkNode::leaf(d)});
  return Retina{std::move(n), std::move(r), std::move(f), std::move(d), std::move(net)};
}

}  // namespace

std::vector<Port> bus(const std::string& name, std::size_t width, const ValueType& type) {
  std::vector<Port> ports;
  for (std::size_t i = 0; i < width; ++i) ports.push_back(Port{idx(name, i), type});
  return ports;
}

Box make_box(std::vector<Port> inputs, std::vector<Port> outputs) {
  return Box{make_typed_finset(std::move(inputs)), make_typed_finset(std::move(outputs))};
}

Retina retina(const NerveParams& p) {
  auto light = ValueType::unit_interval();
  ModalBox n = nerve_box(light);
  ModalBox r = ModalBox::of_box(make_box({{"light", light}}, {{"a", ValueType::bit()}}));
  auto states = StateSpace::record({{"mode", cell_modes()}, {"adapt", ValueType::non_neg_real()}});
  auto d = make_mds(
      n, states, [](const Value& s) { return Mode{s.as_tuple()[0].as_symbol()}; },
      [p](const Value& s, const Assignment& in) {
        const auto& m = s.as_tuple()[0].as_symbol();
        double a = s.as_tuple()[1].as_real();
        auto next = [](const char* mode, double adapt) {
          return Value::tuple({Value::symbol(mode), Value::real(adapt)});
        };
        if (m == kPolarized) {
          double x = in.at("light").as_real();
          return x - a >= p.alpha ? next(kDepolarized, a + x / p.beta) : next(kPolarized, a / p.beta);
        }
        return next(m == kDepolarized ? kHyperpolarized : kPolarized, a / p.beta);
      },
      [n, p](const Value& s) {
        const auto& m = s.as_tuple()[0].as_symbol();
        return Assignment::make(n.interface(Mode{m}).outputs, {bit(fires(m, p.readout_on_depolarized))});
      },
      Value::tuple({Value::symbol(kPolarized), Value::real(0.0)}));
  return assemble_retina(std::move(n), std::move(r), std::move(d));
}

Retina retina_discrete(const DiscreteNerveParams& p) {
  auto grid = ValueType::int_range(0, p.levels);
  ModalBox n = nerve_box(grid);
  ModalBox r = ModalBox::of_box(make_box({{"light", grid}}, {{"a", ValueType::bit()}}));
  auto states = StateSpace::record({{"mode", cell_modes()}, {"adapt", grid}});
  auto d = make_mds(
      n, states, [](const Value& s) { return Mode{s.as_tuple()[0].as_symbol()}; },
      [p](const Value& s, const Assignment& in) {
        const auto& m = s.as_tuple()[0].as_symbol();
        std::int64_t a = s.as_tuple()[1].as_int();
        auto next = [](const char* mode, std::int64_t adapt) {
          return Value::tuple({Value::symbol(mode), Value::integer(adapt)});
        };
        if (m == kPolarized) {
          std::int64_t x = in.at("light").as_int();
          if (x - a >= p.alpha) return next(kDepolarized, std::min(p.levels, a + x / p.beta));
          return next(kPolarized, a / p.beta);
        }
        return next(m == kDepolarized ? kHyperpolarized : kPolarized, a / p.beta);
      },
      [n, p](const Value& s) {
        const auto& m = s.as_tuple()[0].as_symbol();
        return Assignment::make(n.interface(Mode{m}).outputs, {bit(fires(m, p.readout_on_depolarized))});
      },
      Value::tuple({Value::symbol(kPolarized), Value::integer(0)}));
  return assemble_retina(std::move(n), std::move(r), std::move(d));
}

Eye eye(std::size_t width, const DiscreteNerveParams& p) {
  Retina rt = retina_discrete(p);
  auto grid = ValueType::int_range(0, p.levels);
  ModalBox e = ModalBox::of_box(make_box(bus("light", width, grid), bus("a", width, ValueType::bit())));
  std::vector<std::string> names;
  std::vector<ModalBox> sources;
  for (std::size_t i = 0; i < width; ++i) {
    names.push_back(idx("R", i));
    sources.push_back(rt.r);
  }
  auto f = tabulate(names, sources, e, [&](const Mode&, const auto& inner) {
    WiringBuilder b(inner, e.interface(Mode{"*"}));
    for (std::size_t i = 0; i < width; ++i) {
      b.from_outer(names[i], "light", idx("light", i));
      b.export_from(idx("a", i), names[i], "a");
    }
    return std::pair{Mode{"*"}, b.build()};
  });
  std::vector<NetworkNode> kids(width, rt.network);
  auto net = NetworkNode::apply(f, std::move(kids));
  return Eye{std::move(rt), std::move(e), std::move(f), std::move(net)};
}

NetworkNode blink_network(const Blink& bl) {
  const std::size_t width = bl.e.interface(Mode{"open"}).outputs.size();
  std::vector<NetworkNode> eye_kids;
  eye_kids.push_back(NetworkNode::apply(identity_mdn(bl.lid), {NetworkNode::leaf(bl.lid_dynamics)}));
  for (std::size_t i = 0; i < width; ++i) eye_kids.push_back(bl.retina.network);
  auto eye_node = NetworkNode::apply(bl.eye, eye_kids);
  auto pons = NetworkNode::apply(identity_mdn(bl.p), {NetworkNode::apply(identity_mdn(bl.p), {NetworkNode::leaf(bl.pons_dynamics)})});
  return NetworkNode::apply(bl.blink, {eye_node, eye_node, pons});
}

Blink blink(const BlinkParams& p) {
  const std::size_t w = p.width;
  Retina rt = retina_discrete(p.nerve);
  auto grid = ValueType::int_range(0, p.nerve.levels);
  auto cmd = lid_states();

  Box lid_box = make_box({{"cmd", cmd}}, {{"shade", grid}});
  ModalBox lid = ModalBox::make({{"open", lid_box}, {"shut", lid_box}});

  auto open_in = bus("light", w, grid);
  open_in.push_back(Port{"lid", cmd});
  ModalBox e = ModalBox::make({{"open", make_box(open_in, bus("a", w, ValueType::bit()))},
                               {"shut", make_box({{"lid", cmd}}, bus("a", w, ValueType::bit()))}});

  auto p_in = bus("e1", w, ValueType::bit());
  auto e2 = bus("e2", w, ValueType::bit());
  p_in.insert(p_in.end(), e2.begin(), e2.end());
  ModalBox pbox = ModalBox::of_box(make_box(p_in, {{"lid1", cmd}, {"lid2", cmd}}));

  auto b_in = bus("left", w, grid);
  auto right = bus("right", w, grid);
  b_in.insert(b_in.end(), right.begin(), right.end());
  auto b_out = bus("sig1", w, ValueType::bit());
  auto sig2 = bus("sig2", w, ValueType::bit());
  b_out.insert(b_out.end(), sig2.begin(), sig2.end());
  ModalBox bbox = ModalBox::of_box(make_box(b_in, b_out));

  std::vector<std::string> names{"L"};
  std::vector<ModalBox> sources{lid};
  for (std::size_t i = 0; i < w; ++i) {
    names.push_back(idx("R", i));
    sources.push_back(rt.r);
  }
  auto eye_f = tabulate(names, sources, e, [&](const Mode& m, const auto& inner) {
    const bool open = m[0] == "open";
    WiringBuilder b(inner, e.interface(Mode{m[0]}));
    for (std::size_t i = 0; i < w; ++i) {
      if (open) {
        b.from_outer(names[i + 1], "light", idx("light", i));
      } else {
        b.from_inner(names[i + 1], "light", "L", "shade");
      }
      b.export_from(idx("a", i), names[i + 1], "a");
    }
    b.from_outer("L", "cmd", "lid");
    return std::pair{Mode{m[0]}, b.build()};
  });

  auto blink_f = tabulate({"E1", "E2", "P"}, {e, e, pbox}, bbox, [&](const Mode& m, const auto& inner) {
    WiringBuilder b(inner, bbox.interface(Mode{"*"}));
    for (std::size_t i = 0; i < w; ++i) {
      if (m[0] == "open") b.from_outer("E1", idx("light", i), idx("left", i));
      if (m[1] == "open") b.from_outer("E2", idx("light", i), idx("right", i));
      b.from_inner("P", idx("e1", i), "E1", idx("a", i));
      b.from_inner("P", idx("e2", i), "E2", idx("a", i));
      b.export_from(idx("sig1", i), "E1", idx("a", i));
      b.export_from(idx("sig2", i), "E2", idx("a", i));
    }
    b.from_inner("E1", "lid", "P", "lid1");
    b.from_inner("E2", "lid", "P", "lid2");
    return std::pair{Mode{"*"}, b.build()};
  });

  auto pos = StateSpace::record({{"pos", cmd}});
  auto lid_d = make_mds(
      lid, pos, [](const Value& s) { return Mode{s.as_tuple()[0].as_symbol()}; },
      [](const Value&, const Assignment& in) { return Value::tuple({in.at("cmd")}); },
      [lid](const Value& s) {
        return Assignment::make(lid.interface(Mode{s.as_tuple()[0].as_symbol()}).outputs, {Value::integer(0)});
      },
      Value::tuple({Value::symbol("open")}));

  auto pons_d = make_mds(
      pbox, pos, [](const Value&) { return Mode{"*"}; },
      [w, t = p.threshold](const Value&, const Assignment& in) {
        std::int64_t total = 0;
        for (const auto& v : in.values()) total += v.as_int();
        double average = static_cast<double>(total) / static_cast<double>(2 * w);
        return Value::tuple({Value::symbol(average > t ? "shut" : "open")});
      },
      [pbox](const Value& s) {
        const auto& v = s.as_tuple()[0];
        return Assignment::from_map(pbox.interface(Mode{"*"}).outputs, {{"lid1", v}, {"lid2", v}});
      },
      Value::tuple({Value::symbol("open")}));

  Blink out{std::move(rt), lid, e, pbox, bbox, std::move(eye_f), std::move(blink_f), std::move(lid_d),
            std::move(pons_d), NetworkNode{}};
  out.network = blink_network(out);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

ModalBox sum_box(std::size_t k) {
  return ModalBox::of_box(make_box(bus("x", k, ValueType::bit()), {{"s", ValueType::non_neg_real()}}));
}

ModalDynamicalSystem sum_dynamics(const ModalBox& box, std::size_t k) {
  std::vector<ValueType> reals(k, ValueType::non_neg_real());
  auto states = StateSpace::record({{"s", ValueType::non_neg_real()}, {"w", ValueType::product(reals)}});
  Value::Tuple ones(k, Value::real(1.0));
  return make_mds(
      box, states, [](const Value&) { return Mode{"*"}; },
      [k](const Value& s, const Assignment& in) {
        const auto& w = s.as_tuple()[1].as_tuple();
        double total = 0.0;
        for (std::size_t i = 0; i < k; ++i) total += w[i].as_real() * static_cast<double>(in.at(idx("x", i)).as_int());
        return Value::tuple({Value::real(total), s.as_tuple()[1]});
      },
      [box](const Value& s) { return Assignment::make(box.interface(Mode{"*"}).outputs, {s.as_tuple()[0]}); },
      Value::tuple({Value::real(0.0), Value::tuple(ones)}));
}

MdnMorphism neuron_morphism(const ModalBox& sum, const ModalBox& soma, const ModalBox& rn, std::size_t k) {
  return tabulate({"S", "N"}, {sum, soma}, rn, [&](const Mode& m, const auto& inner) {
    WiringBuilder b(inner, rn.interface(Mode{"*"}));
    for (std::size_t i = 0; i < k; ++i) b.from_outer("S", idx("x", i), idx("x", i));
    if (m[1] == kPolarized) b.from_inner("N", "x", "S", "s");
    b.export_from("a", "N", "a");
    return std::pair{Mode{"*"}, b.build()};
  });
}

MdnMorphism layer_morphism(const ModalBox& rn, const ModalBox& layer, std::size_t k, std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t j = 0; j < n; ++j) names.push_back(idx("R", j));
  return tabulate(names, std::vector<ModalBox>(n, rn), layer, [&](const Mode&, const auto& inner) {
    WiringBuilder b(inner, layer.interface(Mode{"*"}));
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < k; ++i) b.from_outer(names[j], idx("x", i), idx("x", i));
      b.export_from(idx("a", j), names[j], "a");
    }
    return std::pair{Mode{"*"}, b.build()};
  });
}

}  // namespace

NetworkNode layers_network(const Layers& l) {
  const std::size_t n = l.l_wide.interface(Mode{"*"}).outputs.size();
  auto neuron = [&](bool wide) {
    return NetworkNode::apply(wide ? l.neuron_wide : l.neuron_narrow,
                              {NetworkNode::leaf(wide ? l.sum_wide_dynamics : l.sum_narrow_dynamics),
                               NetworkNode::leaf(l.soma_dynamics)});
  };
  auto layer = [&](bool wide) {
    return NetworkNode::apply(wide ? l.layer_wide : l.layer_narrow, std::vector<NetworkNode>(n, neuron(wide)));
  };
  return NetworkNode::apply(l.v_net, {layer(true), layer(false), layer(false)});
}

Layers layers(const LayersParams& p) {
  const std::size_t k = p.inputs, n = p.neurons;
  ModalBox sum_wide = sum_box(k), sum_narrow = sum_box(n);
  Box soma_live = make_box({{"x", ValueType::non_neg_real()}}, {{"a", ValueType::bit()}});
  Box soma_closed = make_box({}, {{"a", ValueType::bit()}});
  ModalBox soma = ModalBox::make({{kPolarized, soma_live}, {kDepolarized, soma_closed}, {kHyperpolarized, soma_closed}});
  ModalBox rn_wide = ModalBox::of_box(make_box(bus("x", k, ValueType::bit()), {{"a", ValueType::bit()}}));
  ModalBox rn_narrow = ModalBox::of_box(make_box(bus("x", n, ValueType::bit()), {{"a", ValueType::bit()}}));
  ModalBox l_wide = ModalBox::of_box(make_box(bus("x", k, ValueType::bit()), bus("a", n, ValueType::bit())));
  ModalBox l_narrow = ModalBox::of_box(make_box(bus("x", n, ValueType::bit()), bus("a", n, ValueType::bit())));
  ModalBox v = ModalBox::of_box(make_box(bus("x", k, ValueType::bit()), bus("o", n, ValueType::bit())));

  auto v_net = tabulate({"V1", "V2", "V3"}, {l_wide, l_narrow, l_narrow}, v, [&](const Mode&, const auto& inner) {
    WiringBuilder b(inner, v.interface(Mode{"*"}));
    for (std::size_t i = 0; i < k; ++i) b.from_outer("V1", idx("x", i), idx("x", i));
    for (std::size_t i = 0; i < n; ++i) {
      b.from_inner("V2", idx("x", i), "V1", idx("a", i));
      b.from_inner("V3", idx("x", i), "V2", idx("a", i));
      b.export_from(idx("o", i), "V3", idx("a", i));
    }
    return std::pair{Mode{"*"}, b.build()};
  });

  auto soma_states = StateSpace::record({{"mode", cell_modes()}});
  auto soma_d = make_mds(
      soma, soma_states, [](const Value& s) { return Mode{s.as_tuple()[0].as_symbol()}; },
      [alpha = p.alpha](const Value& s, const Assignment& in) {
        const auto& m = s.as_tuple()[0].as_symbol();
        const char* next = kPolarized;
        if (m == kPolarized) {
          next = in.at("x").as_real() > alpha ? kDepolarized : kPolarized;
        } else if (m == kDepolarized) {
          next = kHyperpolarized;
        }
        return Value::tuple({Value::symbol(next)});
      },
      [soma, flag = p.readout_on_depolarized](const Value& s) {
        const auto& m = s.as_tuple()[0].as_symbol();
        return Assignment::make(soma.interface(Mode{m}).outputs, {bit(fires(m, flag))});
      },
      Value::tuple({Value::symbol(kPolarized)}));

  Layers out{sum_wide,
             sum_narrow,
             soma,
             rn_wide,
             rn_narrow,
             l_wide,
             l_narrow,
             v,
             neuron_morphism(sum_wide, soma, rn_wide, k),
             neuron_morphism(sum_narrow, soma, rn_narrow, n),
             layer_morphism(rn_wide, l_wide, k, n),
             layer_morphism(rn_narrow, l_narrow, n, n),
             v_net,
             sum_dynamics(sum_wide, k),
             sum_dynamics(sum_narrow, n),
             soma_d,
             NetworkNode{}};
  out.network = layers_network(out);
  return out;
}

VisualSystem visual_system(const VisualSystemParams& p) {
  BlinkParams bp;
  bp.width = p.width;
  bp.threshold = p.threshold;
  Blink bl = blink(bp);
  LayersParams lp;
  lp.inputs = 2 * p.width;
  lp.neurons = p.neurons;
  lp.alpha = p.alpha;
  Layers ly = layers(lp);

  auto grid = ValueType::int_range(0, bp.nerve.levels);
  auto in = bus("left", p.width, grid);
  auto right = bus("right", p.width, grid);
  in.insert(in.end(), right.begin(), right.end());
  ModalBox vs = ModalBox::of_box(make_box(in, bus("o", p.neurons, ValueType::bit())));

  auto vs_net = tabulate({"B", "V"}, {bl.b, ly.v}, vs, [&](const Mode&, const auto& inner) {
    WiringBuilder b(inner, vs.interface(Mode{"*"}));
    for (std::size_t i = 0; i < p.width; ++i) {
      b.from_outer("B", idx("left", i), idx("left", i));
      b.from_outer("B", idx("right", i), idx("right", i));
      b.from_inner("V", idx("x", i), "B", idx("sig1", i));
      b.from_inner("V", idx("x", p.width + i), "B", idx("sig2", i));
    }
    for (std::size_t j = 0; j < p.neurons; ++j) b.export_from(idx("o", j), "V", idx("o", j));
    return std::pair{Mode{"*"}, b.build()};
  });

  auto net = NetworkNode::apply(vs_net, {bl.network, ly.network});
  return VisualSystem{std::move(bl), std::move(ly), std::move(vs), std::move(vs_net), std::move(net)};
}

}  // namespace mnet::fixtures

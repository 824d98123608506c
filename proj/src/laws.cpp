#include "modalnet/laws.hpp"

#include <algorithm>
#include <exception>

#include "modalnet/error.hpp"
#include "modalnet/fixtures.hpp"

namespace mnet::laws {

void LawResult::fail(std::string what) {
  ++failures;
  if (examples.size() < 5) examples.push_back(std::move(what));
}

namespace {

// Runs one case, counting an exception as a failure.
template <class F>
void attempt(LawResult& r, const std::string& label, F&& body) {
  ++r.cases;
  try {
    if (auto why = body(); !why.empty()) r.fail(label + ": " + why);
  } catch (const std::exception& e) {
    r.fail(label + ": " + e.what());
  }
}

std::string case_label(std::size_t i) { return "case " + std::to_string(i); }

}  // namespace

LawResult strength(const SuiteOptions& o) {
  LawResult r{"strength", 0, 0, {}};
  gen::Rng rng(o.seed ^ 0x51);
  for (std::size_t i = 0; i < o.count; ++i) {
    attempt(r, case_label(i), [&]() -> std::string {
      auto a = gen::typed_set(rng, o.limits, "a");
      auto b = gen::typed_set(rng, o.limits, "b");
      auto u = disjoint_union(a, b);
      auto x = sample_assignment(a, rng);
      auto y = sample_assignment(b, rng);
      auto merged = merge_assignment(x, y);
      auto [x2, y2] = split_assignment(merged, a, b);
      if (!(x2 == x) || !(y2 == y)) return "split(merge(x, y)) != (x, y)";
      auto z = sample_assignment(u, rng);
      auto [zl, zr] = split_assignment(z, a, b);
      if (!(merge_assignment(zl, zr) == z)) return "merge(split(z)) != z";
      if (assignment_count(u) != assignment_count(a) * assignment_count(b)) return "|A+B| != |A||B|";
      return {};
    });
  }
  return r;
}

LawResult wd_category(const SuiteOptions& o) {
  LawResult r{"wd_category", 0, 0, {}};
  gen::Rng rng(o.seed ^ 0x52);
  for (std::size_t i = 0; i < o.count; ++i) {
    attempt(r, case_label(i), [&]() -> std::string {
      auto x = gen::box(rng, o.limits);
      auto f = gen::diagram_from(rng, x, o.limits);
      auto g = gen::diagram_from(rng, f.target(), o.limits);
      auto h = gen::diagram_from(rng, g.target(), o.limits);
      if (!(compose_wd(compose_wd(f, g), h) == compose_wd(f, compose_wd(g, h)))) return "associativity";
      if (!(compose_wd(identity_wd(f.source()), f) == f)) return "left unit";
      if (!(compose_wd(f, identity_wd(f.target())) == f)) return "right unit";
      auto x2 = gen::box(rng, o.limits);
      auto f2 = gen::diagram_from(rng, x2, o.limits);
      auto g2 = gen::diagram_from(rng, f2.target(), o.limits);
      if (!(compose_wd(tensor_wd(f, f2), tensor_wd(g, g2)) == tensor_wd(compose_wd(f, g), compose_wd(f2, g2)))) {
        return "tensor interchange";
      }
      return {};
    });
  }
  return r;
}

namespace {

// Exhaustive coherence of one composable pair; returns the first mismatch.
std::string coherence_of(const WiringDiagram& phi, const WiringDiagram& psi) {
  auto whole = compose_wd(phi, psi);
  for (const auto& ext : enumerate_assignments(psi.target().inputs)) {
    for (const auto& internal : enumerate_assignments(phi.source().outputs)) {
      auto y_out = route_out(phi, internal);
      auto y_in = route_in(psi, ext, y_out);
      auto x_in = route_in(phi, y_in, internal);
      auto z_out = route_out(psi, y_out);
      auto got = route(whole, ext, internal);
      if (!(got.inner_inputs == x_in) || !(got.outer_outputs == z_out)) {
        return "ext " + ext.to_string() + ", internal " + internal.to_string();
      }
    }
  }
  return {};
}

}  // namespace

LawResult routing_coherence(const SuiteOptions& o) {
  LawResult r{"routing_coherence", 0, 0, {}};
  gen::Rng rng(o.seed ^ 0x53);
  for (std::size_t i = 0; i < o.count; ++i) {
    attempt(r, case_label(i), [&] {
      auto x = gen::box(rng, o.limits);
      auto phi = gen::diagram_from(rng, x, o.limits);
      auto psi = gen::diagram_from(rng, phi.target(), o.limits);
      return coherence_of(phi, psi);
    });
  }
  // Fixture pairs: each nerve wiring inside the eye at every nerve mode.
  auto ey = fixtures::eye(2);
  auto nerves = tensor_mdn(std::vector<MdnMorphism>(2, ey.retina.nerve));
  for (const auto& [m, e] : nerves.tabulate()) {
    attempt(r, "eye at " + mode_to_string(m), [&] { return coherence_of(e.diagram, ey.eye.epsilon(e.sigma)); });
  }
  return r;
}

LawResult mdn_category(const SuiteOptions& o) {
  LawResult r{"mdn_category", 0, 0, {}};
  gen::Rng rng(o.seed ^ 0x54);
  for (std::size_t i = 0; i < o.count; ++i) {
    attempt(r, case_label(i), [&]() -> std::string {
      auto m = gen::modal_box(rng, o.limits);
      auto f = gen::morphism_from(rng, m, o.limits);
      auto g = gen::morphism_from(rng, f.target(), o.limits);
      auto h = gen::morphism_from(rng, g.target(), o.limits);
      if (!(compose_mdn(compose_mdn(f, g), h) == compose_mdn(f, compose_mdn(g, h)))) return "associativity";
      if (!(compose_mdn(identity_mdn(f.source()), f) == f)) return "left unit";
      if (!(compose_mdn(f, identity_mdn(f.target())) == f)) return "right unit";
      auto m2 = gen::modal_box(rng, o.limits);
      auto f2 = gen::morphism_from(rng, m2, o.limits);
      auto g2 = gen::morphism_from(rng, f2.target(), o.limits);
      if (!(compose_mdn(tensor_mdn(f, f2), tensor_mdn(g, g2)) == tensor_mdn(compose_mdn(f, g), compose_mdn(f2, g2)))) {
        return "tensor interchange";
      }
      return {};
    });
  }
  return r;
}

LawResult inclusion(const SuiteOptions& o) {
  LawResult r{"inclusion", 0, 0, {}};
  gen::Rng rng(o.seed ^ 0x55);
  for (std::size_t i = 0; i < o.count; ++i) {
    attempt(r, case_label(i), [&]() -> std::string {
      auto x = gen::box(rng, o.limits);
      auto phi = gen::diagram_from(rng, x, o.limits);
      auto psi = gen::diagram_from(rng, phi.target(), o.limits);
      auto chi = gen::diagram_from(rng, gen::box(rng, o.limits), o.limits);
      if (!(include_wd(identity_wd(x)) == identity_mdn(ModalBox::of_box(x)))) return "identity";
      if (!(include_wd(compose_wd(phi, psi)) == compose_mdn(include_wd(phi), include_wd(psi)))) return "composition";
      if (!equal_up_to_mode_names(include_wd(tensor_wd(phi, chi)), tensor_mdn(include_wd(phi), include_wd(chi)))) {
        return "tensor";
      }
      return {};
    });
  }
  return r;
}

namespace {

std::string first_witness(const CheckReport& rep) {
  if (rep.ok()) return {};
  const auto& w = rep.witnesses.front();
  return std::to_string(rep.witnesses.size()) + " witnesses, first at state " + w.state.to_string() +
         (w.input ? " input " + w.input->to_string() : std::string{}) + ": " + w.what;
}

}  // namespace

LawResult functoriality(const SuiteOptions& o) {
  LawResult r{"functoriality", 0, 0, {}};
  gen::Rng rng(o.seed ^ 0x56);
  CheckOptions co;
  co.seed = o.seed;
  for (std::size_t i = 0; i < o.count; ++i) {
    attempt(r, case_label(i), [&]() -> std::string {
      auto m = gen::modal_box(rng, o.limits);
      auto f0 = gen::morphism_from(rng, m, o.limits);
      auto f1 = gen::morphism_from(rng, f0.target(), o.limits);
      auto d = gen::system_over(rng, m, o.limits);
      auto rep = check_functoriality(f0, f1, d, co);
      if (!rep.exhaustive) return "not exhaustive";
      return first_witness(rep);
    });
  }
  return r;
}

LawResult fixture_functoriality(const SuiteOptions& o) {
  LawResult r{"fixture_functoriality", 0, 0, {}};
  CheckOptions co;
  co.seed = o.seed;
  if (o.quick) {
    co.state_cap = 0;
    co.state_samples = 40;
  }

  attempt(r, "eye . nerves", [&] {
    auto ey = fixtures::eye(2);
    std::vector<MdnMorphism> nerves(2, ey.retina.nerve);
    std::vector<ModalDynamicalSystem> cells(2, ey.retina.dynamics);
    return first_witness(check_functoriality(tensor_mdn(nerves), ey.eye, tensor_mds(cells), co));
  });

  fixtures::BlinkParams bp;
  bp.width = 1;
  auto bl = fixtures::blink(bp);
  auto lid = identity_mdn(bl.lid);
  auto pons = identity_mdn(bl.p);
  const MdnMorphism level0_parts[] = {lid, bl.retina.nerve, lid, bl.retina.nerve, pons};
  const MdnMorphism level1_parts[] = {bl.eye, bl.eye, pons};
  auto level0 = tensor_mdn(level0_parts);
  auto level1 = tensor_mdn(level1_parts);
  const ModalDynamicalSystem leaves[] = {bl.lid_dynamics, bl.retina.dynamics, bl.lid_dynamics, bl.retina.dynamics,
                                         bl.pons_dynamics};
  auto d = tensor_mds(leaves);
  // Every state of this level has up to 800 inputs; sampled states keep it quick.
  attempt(r, "blink eyes . nerves", [&] {
    auto sampled = co;
    sampled.state_cap = 0;
    sampled.state_samples = std::min<std::size_t>(sampled.state_samples, 200);
    return first_witness(check_functoriality(level0, level1, d, sampled));
  });
  attempt(r, "blink . eyes", [&] {
    return first_witness(check_functoriality(level1, bl.blink, apply_morphism(level0, d), co));
  });
  attempt(r, "blink . (eyes . nerves)", [&] {
    return first_witness(check_functoriality(compose_mdn(level0, level1), bl.blink, d, co));
  });

  attempt(r, "layer . neurons", [&] {
    fixtures::LayersParams lp;
    lp.inputs = 2;
    auto ly = fixtures::layers(lp);
    const MdnMorphism neurons[] = {ly.neuron_narrow, ly.neuron_narrow};
    const ModalDynamicalSystem cells[] = {ly.sum_narrow_dynamics, ly.soma_dynamics, ly.sum_narrow_dynamics,
                                          ly.soma_dynamics};
    return first_witness(check_functoriality(tensor_mdn(neurons), ly.layer_narrow, tensor_mds(cells), co));
  });
  return r;
}

InputTrace random_trace(gen::Rng& rng, const ModalBox& box, std::size_t steps) {
  std::map<std::string, ValueType> ports;
  for (std::uint64_t i = 0; i < box.mode_count(); ++i) {
    for (const auto& p : box.interface_at(i).inputs.ports()) ports.emplace(p.name, p.type);
  }
  InputTrace trace(steps);
  for (auto& line : trace) {
    for (const auto& [name, type] : ports) line[name] = type.sample(rng);
  }
  return trace;
}

LawResult nested_vs_flat(const SuiteOptions& o, std::size_t traces, std::size_t steps) {
  LawResult r{"nested_vs_flat", 0, 0, {}};
  gen::Rng rng(o.seed ^ 0x57);
  std::vector<std::pair<std::string, NetworkNode>> nets;
  nets.emplace_back("nerve", fixtures::retina_discrete().network);
  nets.emplace_back("eye", fixtures::eye(3).network);
  nets.emplace_back("blink", fixtures::blink().network);
  nets.emplace_back("visual_system", fixtures::visual_system().network);
  for (const auto& [name, net] : nets) {
    auto flat = build_flat(net);
    auto nested = build_hierarchical(net);
    for (std::size_t t = 0; t < traces; ++t) {
      attempt(r, name + " trace " + std::to_string(t), [&]() -> std::string {
        auto inputs = random_trace(rng, flat.over, steps);
        auto a = run(nested, *flat.default_state, inputs);
        auto b = run(flat, *flat.default_state, inputs);
        auto cmp = compare_traces(a, b);
        return cmp.equal ? std::string{} : cmp.detail;
      });
    }
  }
  return r;
}

std::vector<LawResult> run_all(const SuiteOptions& o) {
  return {strength(o),       wd_category(o),  routing_coherence(o),     mdn_category(o),
          inclusion(o),      functoriality(o), fixture_functoriality(o), nested_vs_flat(o)};
}

LawResult negative_control(fault::Site site, const SuiteOptions& o) {
  fault::Scope scope(site);
  auto quick = o;
  quick.quick = true;
  LawResult r{std::string("negative_control:") + fault::name(site), 0, 0, {}};
  for (const auto& part : {functoriality(quick), fixture_functoriality(quick)}) {
    r.cases += part.cases;
    r.failures += part.failures;
    for (const auto& e : part.examples)
      if (r.examples.size() < 5) r.examples.push_back(part.name + " " + e);
  }
  return r;
}

}  // namespace mnet::laws

#include <cmath>

#include "modalnet/fixtures.hpp"
#include "modalnet/generators.hpp"
#include "modalnet/laws.hpp"
#include "modalnet/sim.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace mnet;

namespace {

const Mode kStar{"*"};

Value nerve_state(const char* mode, double adapt) { return Value::tuple({Value::symbol(mode), Value::real(adapt)}); }

oracle::NerveState decode(const Value& s) { return {s.as_tuple()[0].as_symbol(), s.as_tuple()[1].as_real()}; }

Assignment light(const ModalDynamicalSystem& d, const Value& s, double x) {
  auto ports = d.over.interface(d.mode_of(s)).inputs;
  if (ports.empty()) return Assignment{};
  return Assignment::from_map(ports, {{"light", Value::real(x)}});
}

}  // namespace

TEST_CASE("unit system") {
  auto u = unit_mds();
  CHECK(u.over == ModalBox{});
  CHECK(u.states.cardinality() == 1u);
  auto s = u.states.value_at(0);
  CHECK(u.readout(s) == Assignment{});
  CHECK(u.update(s, Assignment{}) == s);
  auto twice = tensor_mds(u, tensor_mds(u, u));
  CHECK(twice.states.cardinality() == 1u);
}

TEST_CASE("retinal nerve dynamics") {
  auto rt = fixtures::retina();
  const auto& d = rt.dynamics;
  const double alpha = 0.5, beta = 2.0;
  std::vector<double> adapts{0.0, 0.1, 0.2, 0.3, 0.6, 1.5};
  std::vector<double> lights{0.0, 0.25, 0.5, 0.7, 0.8, 1.0};
  for (const char* m : {"polarized", "depolarized", "hyperpolarized"}) {
    for (double a : adapts) {
      auto s = nerve_state(m, a);
      CHECK(d.mode_of(s) == Mode{m});
      CHECK(d.readout(s).at("a") == Value::integer(std::string(m) == "polarized" ? 1 : 0));
      for (double x : lights) {
        auto got = decode(d.update(s, light(d, s, x)));
        auto want = oracle::nerve_update({m, a}, x, alpha, beta);
        CHECK(got.mode == want.mode);
        CHECK(got.adapt == doctest::Approx(want.adapt));
      }
    }
  }
  auto next = decode(d.update(nerve_state("polarized", 0.2), light(d, nerve_state("polarized", 0.2), 0.8)));
  CHECK(next.mode == "depolarized");
  CHECK(next.adapt == doctest::Approx(0.6));

  auto flipped = fixtures::retina({alpha, beta, true});
  CHECK(flipped.dynamics.readout(nerve_state("depolarized", 0)).at("a") == Value::integer(1));
  CHECK(flipped.dynamics.readout(nerve_state("polarized", 0)).at("a") == Value::integer(0));
}

TEST_CASE("system validation") {
  auto box = ModalBox::make({{"x", Box{}}, {"y", Box{make_typed_finset({{"b", ValueType::bit()}}), {}}}});
  auto states = StateSpace::finite({"s", "t"});
  auto mode = [](const Value& s) { return Mode{s.as_symbol() == "s" ? "x" : "y"}; };
  auto empty = [](const Value&) { return Assignment{}; };
  auto stay = [](const Value& s, const Assignment&) { return s; };
  CHECK_NOTHROW(make_mds(box, states, mode, stay, empty));
  CHECK_ERROR_KIND(make_mds(box, states, mode, [](const Value&, const Assignment&) { return Value::symbol("u"); }, empty),
                   ErrorKind::ShapeError);
  CHECK_ERROR_KIND(make_mds(box, states, [](const Value&) { return Mode{"z"}; }, stay, empty), ErrorKind::ModeError);
  auto other = ModalBox::make({{"x", Box{{}, make_typed_finset({{"o", ValueType::bit()}})}}, {"y", Box{}}});
  CHECK_ERROR_KIND(make_mds(other, states, mode, stay, empty), ErrorKind::ShapeError);

  auto rt = fixtures::retina();
  CHECK_ERROR_KIND(
      make_mds(rt.n, rt.dynamics.states, rt.dynamics.mode_of,
               [](const Value&, const Assignment&) { return nerve_state("polarized", -1.0); }, rt.dynamics.readout),
      ErrorKind::ShapeError);
}

TEST_CASE("applying the nerve morphism") {
  auto rt = fixtures::retina();
  auto r = apply_morphism(rt.nerve, rt.dynamics);
  CHECK(r.over == rt.r);
  CHECK(r.states == rt.dynamics.states);
  auto ext = [&](double x) {
    return Assignment::from_map(rt.r.interface(kStar).inputs, {{"light", Value::real(x)}});
  };
  // Polarized: the outer light reaches the nerve.
  auto s = nerve_state("polarized", 0.2);
  CHECK(r.mode_of(s) == kStar);
  CHECK(r.readout(s).at("a") == Value::integer(1));
  auto n = decode(r.update(s, ext(0.8)));
  CHECK(n.mode == "depolarized");
  CHECK(n.adapt == doctest::Approx(0.6));
  // Depolarized: no wire in, the light is ignored.
  auto t = nerve_state("depolarized", 0.6);
  CHECK(r.readout(t).at("a") == Value::integer(0));
  for (double x : {0.0, 0.5, 1.0}) {
    auto m = decode(r.update(t, ext(x)));
    CHECK(m.mode == "hyperpolarized");
    CHECK(m.adapt == doctest::Approx(0.3));
  }

  auto same = apply_morphism(identity_mdn(rt.n), rt.dynamics);
  CheckOptions o;
  o.state_cap = 0;
  CHECK(compare_systems(same, rt.dynamics, o).ok());
  CHECK_ERROR_KIND(apply_morphism(rt.nerve, r), ErrorKind::BoxMismatch);
}

TEST_CASE("tensor of systems") {
  auto rt = fixtures::retina_discrete();
  const auto k = rt.dynamics.states.cardinality().value();
  auto two = tensor_mds(rt.dynamics, rt.dynamics);
  CHECK(two.states.cardinality() == k * k);
  auto three = tensor_mds(std::vector<ModalDynamicalSystem>(3, rt.dynamics));
  CHECK(three.states.cardinality() == k * k * k);
  CHECK(three.states == tensor_mds(two, rt.dynamics).states);
  CHECK(three.over == tensor(std::vector<ModalBox>(3, rt.n)));

  // Componentwise behaviour against the single nerve.
  for (std::uint64_t i = 0; i < two.states.cardinality().value(); i += 7) {
    auto s = two.states.value_at(i);
    const auto& parts = s.as_tuple();
    CHECK(two.mode_of(s) == Mode{rt.dynamics.mode_of(parts[0])[0], rt.dynamics.mode_of(parts[1])[0]});
    auto out = two.readout(s);
    CHECK(out == merge_assignment(rt.dynamics.readout(parts[0]), rt.dynamics.readout(parts[1])));
    for (const auto& in : enumerate_assignments(two.over.interface(two.mode_of(s)).inputs)) {
      auto [a, b] = split_assignment(in, rt.n.interface(Mode{rt.dynamics.mode_of(parts[0])})
                                             .inputs, rt.n.interface(Mode{rt.dynamics.mode_of(parts[1])}).inputs);
      auto next = two.update(s, in);
      CHECK(next == Value::tuple({rt.dynamics.update(parts[0], a), rt.dynamics.update(parts[1], b)}));
    }
  }

  auto u = unit_mds();
  auto with_unit = tensor_mds(rt.dynamics, u);
  CHECK(with_unit.states == rt.dynamics.states);
  CheckOptions o;
  CHECK(compare_systems(with_unit, rt.dynamics, o).ok());
}

TEST_CASE("serial and parallel tensors agree") {
  auto rt = fixtures::retina_discrete();
  std::vector<ModalDynamicalSystem> parts(4, rt.dynamics);
  auto ser = tensor_mds(parts, Exec::Serial);
  auto par = tensor_mds(parts, Exec::Parallel);
  CheckOptions o;
  o.state_cap = 0;
  o.state_samples = 300;
  CHECK(compare_systems(ser, par, o).ok());
}

TEST_CASE("property: functoriality on generated systems") {
  gen::Rng rng(23);
  gen::Limits lim;
  std::uint64_t states = 0;
  for (int n = 0; n < 300; ++n) {
    auto f0 = gen::morphism_from(rng, gen::modal_box(rng, lim), lim);
    auto f1 = gen::morphism_from(rng, f0.target(), lim);
    auto d = gen::system_over(rng, f0.source(), lim);
    auto rep = check_functoriality(f0, f1, d);
    CHECK(rep.ok());
    CHECK(rep.exhaustive);
    states += rep.states_checked;
    CHECK(check_functoriality(f0, identity_mdn(f0.target()), d).ok());
  }
  CHECK(states > 300);
}

TEST_CASE("property: applying commutes with tensor") {
  gen::Rng rng(29);
  gen::Limits lim;
  lim.max_states = 3;
  for (int n = 0; n < 100; ++n) {
    auto f = gen::morphism_from(rng, gen::modal_box(rng, lim), lim);
    auto g = gen::morphism_from(rng, gen::modal_box(rng, lim), lim);
    auto d1 = gen::system_over(rng, f.source(), lim);
    auto d2 = gen::system_over(rng, g.source(), lim);
    auto lhs = apply_morphism(tensor_mdn(f, g), tensor_mds(d1, d2));
    auto rhs = tensor_mds(apply_morphism(f, d1), apply_morphism(g, d2));
    CHECK(compare_systems(lhs, rhs).ok());
  }
}

TEST_CASE("property: tensor of systems is associative") {
  gen::Rng rng(31);
  gen::Limits lim;
  lim.max_states = 3;
  for (int n = 0; n < 60; ++n) {
    auto a = gen::system_over(rng, gen::modal_box(rng, lim), lim);
    auto b = gen::system_over(rng, gen::modal_box(rng, lim), lim);
    auto c = gen::system_over(rng, gen::modal_box(rng, lim), lim);
    auto l = tensor_mds(tensor_mds(a, b), c);
    auto r = tensor_mds(a, tensor_mds(b, c));
    CHECK(l.over == r.over);
    CHECK(l.states == r.states);
    CHECK(compare_systems(l, r).ok());
  }
}

TEST_CASE("law suites on defaults") {
  laws::SuiteOptions o;
  o.count = 50;
  for (auto&& r : {laws::strength(o), laws::wd_category(o), laws::routing_coherence(o), laws::mdn_category(o),
                   laws::inclusion(o), laws::functoriality(o)}) {
    INFO(r.name);
    CHECK(r.ok());
    CHECK(r.cases > 0);
  }
}

TEST_CASE("negative controls are caught") {
  laws::SuiteOptions o;
  o.count = 60;
  o.quick = true;
  for (auto site : fault::all_sites()) {
    INFO(fault::name(site));
    CHECK_FALSE(laws::negative_control(site, o).ok());
  }
  CHECK(fault::active() == fault::Site::None);
}

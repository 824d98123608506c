#include <random>

#include "modalnet/fixtures.hpp"
#include "modalnet/laws.hpp"
#include "modalnet/sim.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace mnet;

namespace {

Value nerve_state(const char* mode, double adapt) { return Value::tuple({Value::symbol(mode), Value::real(adapt)}); }

PortValues bright(const std::vector<std::string>& ports, std::int64_t level) {
  PortValues v;
  for (const auto& p : ports) v[p] = Value::integer(level);
  return v;
}

std::vector<std::string> blink_lights(std::size_t w) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < w; ++i) {
    out.push_back("left[" + std::to_string(i) + "]");
    out.push_back("right[" + std::to_string(i) + "]");
  }
  return out;
}

}  // namespace

TEST_CASE("single steps") {
  auto u = unit_mds();
  auto r = step(u, u.states.value_at(0), Assignment{});
  CHECK(r.output == Assignment{});
  CHECK(r.next == u.states.value_at(0));

  auto rt = fixtures::retina();
  const auto& d = rt.dynamics;
  auto in = Assignment::from_map(d.over.interface(Mode{"polarized"}).inputs, {{"light", Value::real(0.8)}});
  auto a = step(d, nerve_state("polarized", 0.2), in);
  CHECK(a.output.at("a") == Value::integer(1));
  CHECK(a.next.as_tuple()[0] == Value::symbol("depolarized"));
  CHECK(a.next.as_tuple()[1].as_real() == doctest::Approx(0.6));

  auto b = step(d, nerve_state("depolarized", 0.6), Assignment{});
  CHECK(b.output.at("a") == Value::integer(0));
  CHECK(b.next.as_tuple()[0] == Value::symbol("hyperpolarized"));
  CHECK(b.next.as_tuple()[1].as_real() == doctest::Approx(0.3));

  CHECK_ERROR_KIND(step(d, nerve_state("depolarized", 0.6), in), ErrorKind::InputShapeError);
  CHECK_ERROR_KIND(step(d, nerve_state("polarized", 0.6), Assignment{}), ErrorKind::InputShapeError);
}

TEST_CASE("nerve under constant light") {
  auto rt = fixtures::retina();
  InputTrace light(1, PortValues{{"light", Value::real(1.0)}});
  auto trace = run(rt.dynamics, nerve_state("polarized", 0.0), light, RunOptions{false, 9});
  REQUIRE(trace.size() == 9);

  // Against the piecewise formula...
  oracle::NerveState s{"polarized", 0.0};
  for (const auto& t : trace) {
    CHECK(t.mode == Mode{s.mode});
    CHECK(t.state.as_tuple()[1].as_real() == doctest::Approx(s.adapt));
    s = oracle::nerve_update(s, 1.0, 0.5, 2.0);
  }
  // ...and the frozen cycle.
  const char* modes[] = {"polarized", "depolarized", "hyperpolarized"};
  const double adapt[] = {0.0, 0.5, 0.25, 0.125, 0.625, 0.3125, 0.15625, 0.65625, 0.328125};
  for (std::size_t i = 0; i < 9; ++i) {
    CHECK(trace[i].mode == Mode{modes[i % 3]});
    CHECK(trace[i].state.as_tuple()[1].as_real() == doctest::Approx(adapt[i]));
    CHECK(trace[i].output.at("a") == Value::integer(i % 3 == 0 ? 1 : 0));
  }
  CHECK(trace[3].input.at("light") == Value::real(1.0));
  CHECK(trace[4].input.over().empty());
}

TEST_CASE("run edge cases") {
  auto rt = fixtures::retina();
  CHECK(run(rt.dynamics, nerve_state("polarized", 0.0), {}).empty());
  CHECK_ERROR_KIND(run(rt.dynamics, nerve_state("resting", 0.0), {}), ErrorKind::InitialStateError);

  InputTrace missing{PortValues{{"light", Value::real(1.0)}}, PortValues{}, PortValues{}, PortValues{}};
  try {
    run(rt.dynamics, nerve_state("polarized", 0.0), missing);
    FAIL("expected an input shape error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InputShapeError);
    CHECK(e.detail().find("step 3") != std::string::npos);
    CHECK(e.detail().find("light") != std::string::npos);
  }

  InputTrace extra{PortValues{{"light", Value::real(1.0)}}, PortValues{{"light", Value::real(1.0)}}};
  CHECK(run(rt.dynamics, nerve_state("polarized", 0.0), extra).size() == 2);
  CHECK_ERROR_KIND(run(rt.dynamics, nerve_state("polarized", 0.0), extra, RunOptions{true, std::nullopt}),
                   ErrorKind::InputShapeError);
  CHECK_ERROR_KIND(run(rt.dynamics, nerve_state("polarized", 0.0), InputTrace{PortValues{{"light", Value::real(2.0)}}}),
                   ErrorKind::InputShapeError);
}

TEST_CASE("blink reflex") {
  fixtures::BlinkParams p;
  auto bl = fixtures::blink(p);
  auto sys = build_flat(bl.network);
  REQUIRE(sys.default_state);
  const std::size_t w = p.width;
  // Leaves: lid, nerves of the first eye, lid, nerves of the second, pons.
  const std::size_t lid1 = 0, lid2 = w + 1, pons = 2 * w + 2;
  InputTrace trace(1, bright(blink_lights(w), p.nerve.levels));
  auto t = run(sys, *sys.default_state, trace, RunOptions{false, 12});

  bool shut_seen = false;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    const auto& out = t[i].output;
    std::int64_t fired = 0;
    for (const auto& v : out.values()) fired += v.as_int();
    const bool avg_high = static_cast<double>(fired) / static_cast<double>(2 * w) > p.threshold;
    const auto& next = t[i + 1].state.as_tuple();
    CHECK(next[pons].as_tuple()[0] == Value::symbol(avg_high ? "shut" : "open"));
    // The lid follows the pons one step later.
    const auto& now = t[i].state.as_tuple();
    CHECK(next[lid1].as_tuple()[0] == now[pons].as_tuple()[0]);
    CHECK(next[lid2].as_tuple()[0] == now[pons].as_tuple()[0]);
    shut_seen = shut_seen || next[lid1].as_tuple()[0] == Value::symbol("shut");
  }
  CHECK(shut_seen);

  // With the lids shut the nerves see the lid's shade, whatever the outer light.
  std::size_t shut_steps = 0;
  for (const auto& step : t) {
    if (step.state.as_tuple()[lid1].as_tuple()[0] != Value::symbol("shut")) continue;
    ++shut_steps;
    auto dark = step.input;
    std::vector<Value> zeros(dark.values().size(), Value::integer(0));
    auto alt = sys.update(step.state, Assignment::make(dark.over(), zeros));
    const auto& a = alt.as_tuple();
    const auto& b = step.next_state.as_tuple();
    for (std::size_t i = 1; i <= w; ++i) CHECK(a[i] == b[i]);
  }
  CHECK(shut_steps > 0);
}

TEST_CASE("nested and flat evaluation agree") {
  std::mt19937_64 rng(41);
  SUBCASE("eye of three nerves, 20 steps") {
    auto e = fixtures::eye(3);
    auto flat = build_flat(e.network);
    for (int k = 0; k < 5; ++k) {
      auto tr = laws::random_trace(rng, flat.over, 20);
      auto r = check_nested_vs_flat(e.network, *flat.default_state, tr);
      CHECK_MESSAGE(r.equal, r.detail);
      CHECK(r.steps_compared == 20);
    }
  }
  SUBCASE("visual system at reduced width, 10 steps") {
    auto vs = fixtures::visual_system({2, 2, 0.5, 0.5});
    auto flat = build_flat(vs.network);
    for (int k = 0; k < 3; ++k) {
      auto tr = laws::random_trace(rng, flat.over, 10);
      auto r = check_nested_vs_flat(vs.network, *flat.default_state, tr);
      CHECK_MESSAGE(r.equal, r.detail);
      CHECK(r.steps_compared == 10);
    }
  }
  SUBCASE("single identity level") {
    auto rt = fixtures::retina_discrete();
    auto node = NetworkNode::apply(identity_mdn(rt.n), {NetworkNode::leaf(rt.dynamics)});
    auto tr = laws::random_trace(rng, rt.n, 10);
    CHECK(check_nested_vs_flat(node, *rt.dynamics.default_state, tr).equal);
  }
}

TEST_CASE("determinism across execution modes") {
  auto vs = fixtures::visual_system();
  auto a = build_flat(vs.network, Exec::Serial);
  auto b = build_flat(vs.network, Exec::Parallel);
  std::mt19937_64 rng(43);
  auto tr = laws::random_trace(rng, a.over, 15);
  auto ta = run(a, *a.default_state, tr);
  auto tb = run(b, *b.default_state, tr);
  auto tc = run(b, *b.default_state, tr);
  CHECK(compare_traces(ta, tb).equal);
  CHECK(compare_traces(tb, tc).equal);
}

TEST_CASE("functoriality on the discretized eye") {
  auto e = fixtures::eye(2);
  std::vector<MdnMorphism> nerves(2, e.retina.nerve);
  auto f0 = tensor_mdn(nerves);
  auto d = tensor_mds(std::vector<ModalDynamicalSystem>(2, e.retina.dynamics));
  auto rep = check_functoriality(f0, e.eye, d);
  CHECK(rep.ok());
  CHECK(rep.exhaustive);
  CHECK(rep.states_checked == d.states.cardinality().value());
  CHECK(check_functoriality(f0, identity_mdn(f0.target()), d).ok());

  fault::Scope broken(fault::Site::Compose);
  CHECK_FALSE(check_functoriality(f0, e.eye, d).ok());
}

TEST_CASE("fixture laws") {
  laws::SuiteOptions o;
  o.quick = true;
  auto f = laws::fixture_functoriality(o);
  CHECK_MESSAGE(f.ok(), (f.examples.empty() ? std::string() : f.examples.front()));
  auto n = laws::nested_vs_flat(o, 2, 10);
  CHECK_MESSAGE(n.ok(), (n.examples.empty() ? std::string() : n.examples.front()));
}

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

#include "modalnet/dsl/dot.hpp"
#include "modalnet/dsl/elaborate.hpp"
#include "modalnet/fault.hpp"
#include "modalnet/fixtures.hpp"
#include "modalnet/laws.hpp"
#include "twins.hpp"

using namespace mnet;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

int failures = 0;

void criterion(int n, const char* name, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0 && s > budget_s) {
    o.ok = false;
    o.detail += " (over the " + std::to_string(static_cast<int>(budget_s)) + " s budget)";
  }
  std::printf("%s %d %s: %s [%.2f s]\n", o.ok ? "PASS" : "FAIL", n, name, o.detail.c_str(), s);
  std::fflush(stdout);
  if (!o.ok) ++failures;
}

std::string summary(const laws::LawResult& r) {
  std::string s = r.name + " " + std::to_string(r.cases) + " cases, " + std::to_string(r.failures) + " failures";
  if (!r.examples.empty()) s += " (" + r.examples.front() + ")";
  return s;
}

Outcome from_laws(std::initializer_list<laws::LawResult> rs, std::uint64_t min_cases) {
  Outcome o;
  for (const auto& r : rs) {
    o.ok = o.ok && r.ok() && r.cases >= min_cases;
    o.detail += (o.detail.empty() ? "" : "; ") + summary(r);
  }
  return o;
}

const Value& field(const Value& v, std::size_t i) { return v.as_tuple()[i]; }

std::vector<std::string> blink_lights(std::size_t w) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < w; ++i) {
    out.push_back("left[" + std::to_string(i) + "]");
    out.push_back("right[" + std::to_string(i) + "]");
  }
  return out;
}

PortValues lights(std::size_t w, std::int64_t level) {
  PortValues v;
  for (const auto& p : blink_lights(w)) v[p] = Value::integer(level);
  return v;
}

// Nerve under constant light 1.0 against hand iteration of the update rule.
Outcome nerve_trace(const ModalDynamicalSystem& sys, const Value& s0, const std::string& which) {
  const double alpha = 0.5, beta = 2.0, x = 1.0;
  auto trace = run(sys, s0, InputTrace{{{"light", Value::real(x)}}}, RunOptions{false, 9});
  static const char* const cycle[] = {"polarized", "depolarized", "hyperpolarized"};
  std::string mode = "polarized";
  double a = 0.0;
  double worst = 0.0;
  for (std::size_t t = 0; t < trace.size(); ++t) {
    const Value& s = trace[t].state;
    if (field(s, 0).as_symbol() != cycle[t % 3] || mode != cycle[t % 3]) {
      return {false, which + ": step " + std::to_string(t) + " is " + field(s, 0).as_symbol()};
    }
    worst = std::max(worst, std::abs(field(s, 1).as_real() - a));
    if (mode == "polarized" && x - a >= alpha) {
      mode = "depolarized";
      a = a + x / beta;
    } else {
      mode = mode == "depolarized" ? "hyperpolarized" : "polarized";
      a = a / beta;
    }
  }
  std::ostringstream d;
  d << which << " max |a - hand| = " << worst;
  return {trace.size() == 9 && worst <= 1e-9, d.str()};
}

// Bright light: P shuts the step after a majority of nerves fire, and the
// lids then block the outer light. Dim light: P stays open.
Outcome blink_behaviour(const ModalDynamicalSystem& sys, const MdnMorphism& blink_morphism,
                        const std::vector<std::string>& labels, std::size_t w, double threshold, std::int64_t bright,
                        const std::string& which) {
  const std::size_t lid1 = 0, lid2 = w + 1, pons = 2 * w + 2;
  const Value shut = Value::symbol("shut");
  auto t = run(sys, *sys.default_state, InputTrace{lights(w, bright)}, RunOptions{false, 40});
  std::size_t shut_responses = 0, shut_steps = 0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    std::int64_t fired = 0;
    for (const auto& v : t[i].output.values()) fired += v.as_int();
    const bool high = static_cast<double>(fired) / static_cast<double>(2 * w) > threshold;
    const bool next_shut = field(t[i + 1].state, pons).as_tuple()[0] == shut;
    if (high != next_shut) return {false, which + ": pons at step " + std::to_string(i + 1) + " ignores the average"};
    if (high) ++shut_responses;
  }
  for (const auto& step : t) {
    if (!(field(step.state, lid1).as_tuple()[0] == shut && field(step.state, lid2).as_tuple()[0] == shut)) continue;
    ++shut_steps;
    // Same state, outer light turned off: the nerves must not notice.
    std::vector<Value> dark(step.input.values().size(), Value::integer(0));
    auto alt = sys.update(step.state, Assignment::make(step.input.over(), dark));
    for (std::size_t k = 1; k <= w; ++k) {
      if (!(field(alt, k) == field(step.next_state, k)) || !(field(alt, lid2 + k) == field(step.next_state, lid2 + k))) {
        return {false, which + ": light reaches a nerve behind a shut lid"};
      }
    }
  }
  if (shut_responses == 0 || shut_steps == 0) return {false, which + ": bright light never shut the lids"};

  // Rendering with both eyes shut draws no outer light edge.
  const auto dot = dsl::emit_dot(blink_morphism, Mode{"shut", "shut", "*"}, labels, "Blink");
  if (dot.find("outer_in:left") != std::string::npos || dot.find("outer_in:right") != std::string::npos) {
    return {false, which + ": shut DOT still routes outer light"};
  }
  const auto open = dsl::emit_dot(blink_morphism, Mode{"open", "open", "*"}, labels, "Blink");
  if (open.find("outer_in:left_0_") == std::string::npos) return {false, which + ": open DOT lacks light edges"};

  auto dim = run(sys, *sys.default_state, InputTrace{lights(w, 1)}, RunOptions{false, 500});
  for (const auto& step : dim) {
    if (field(step.state, pons).as_tuple()[0] == shut) return {false, which + ": dim light shut the lids"};
  }
  return {true, which + ": " + std::to_string(shut_responses) + " shut responses, " + std::to_string(shut_steps) +
                    " shut steps, 500 dim steps open"};
}

}  // namespace

int main() {
  laws::SuiteOptions base;
  base.seed = 20240;

  criterion(1, "functoriality on generated pairs", 60, [&] {
    auto o = base;
    o.count = 200;
    return from_laws({laws::functoriality(o), laws::fixture_functoriality(o)}, 5);
  });

  criterion(2, "nested vs flat evaluation", 30, [&] {
    auto r = laws::nested_vs_flat(base, 20, 50);
    return Outcome{r.ok() && r.cases >= 80, summary(r) + " (4 networks x 20 traces x 50 steps)"};
  });

  criterion(3, "category and operad laws", 0, [&] {
    auto o = base;
    o.count = 500;
    return from_laws({laws::wd_category(o), laws::mdn_category(o), laws::routing_coherence(o)}, 500);
  });

  criterion(4, "strength isomorphism", 0, [&] {
    auto o = base;
    o.count = 1000;
    auto r = laws::strength(o);
    // Cardinality law on every pair of port sets drawn from the finite fixtures.
    auto bl = fixtures::blink();
    auto ey = fixtures::eye(2);
    std::vector<TypedFinSet> sets;
    for (const auto* m : {&bl.retina.n, &bl.lid, &bl.e, &bl.p, &bl.b, &ey.e}) {
      for (std::uint64_t i = 0; i < m->mode_count(); ++i) {
        sets.push_back(m->interface_at(i).inputs);
        sets.push_back(m->interface_at(i).outputs);
      }
    }
    std::uint64_t pairs = 0, bad = 0;
    for (const auto& a : sets) {
      for (const auto& b : sets) {
        ++pairs;
        if (assignment_count(disjoint_union(a, b)) != assignment_count(a) * assignment_count(b)) ++bad;
      }
    }
    return Outcome{r.ok() && r.cases >= 1000 && bad == 0,
                   summary(r) + "; cardinality on " + std::to_string(pairs) + " fixture pairs, " + std::to_string(bad) +
                       " mismatches"};
  });

  criterion(5, "retinal nerve trace", 0, [&] {
    auto rt = fixtures::retina();
    auto a = nerve_trace(rt.dynamics, *rt.dynamics.default_state, "module");
    auto el = dsl::load_file(twins::fixture_path("retina.mdn"));
    const auto& leaf = el.dynamics.at("nerve").system;
    auto b = nerve_trace(leaf, Value::tuple({Value::symbol("polarized"), Value::real(0.0)}), "dsl");
    return Outcome{a.ok && b.ok, a.detail + "; " + b.detail};
  });

  criterion(6, "blink behaviour", 0, [&] {
    fixtures::BlinkParams p;
    auto bl = fixtures::blink(p);
    const std::vector<std::string> labels{"E1", "E2", "P"};
    auto a = blink_behaviour(build_flat(bl.network), bl.blink, labels, p.width, p.threshold, p.nerve.levels, "module");
    auto el = dsl::load_file(twins::fixture_path("blink.mdn"));
    const auto& m = el.morphisms.at("Blink");
    auto b = blink_behaviour(build_flat(*el.compositions.at("blink").network), m.morphism, m.instances, p.width,
                             p.threshold, p.nerve.levels, "dsl");
    return Outcome{a.ok && b.ok, a.detail + "; " + b.detail};
  });

  criterion(7, "inclusion functor", 0, [&] {
    auto o = base;
    o.count = 200;
    return from_laws({laws::inclusion(o)}, 200);
  });

  criterion(8, "negative controls", 0, [&] {
    Outcome o;
    std::size_t caught = 0;
    for (auto site : fault::all_sites()) {
      auto r = laws::negative_control(site, base);
      if (r.failures > 0) ++caught;
      o.detail += std::string(fault::name(site)) + "=" + std::to_string(r.failures) + " ";
    }
    o.ok = caught == fault::all_sites().size() && caught == 5;
    o.detail = std::to_string(caught) + "/" + std::to_string(fault::all_sites().size()) + " faults caught (" + o.detail +
               "witnessing cases)";
    return o;
  });

  criterion(9, "description language round trip", 0, [&] {
    std::size_t dots = 0;
    for (const auto& pair : twins::all()) {
      const auto text = dsl::read_file(twins::fixture_path(pair.file));
      const auto doc = dsl::parse_or_throw(text);
      const auto printed = dsl::print(doc);
      const auto again = dsl::parse_or_throw(printed);
      if (!(again == doc) || dsl::print(again) != printed) return Outcome{false, pair.file + ": print is not canonical"};

      const auto el = dsl::elaborate(doc);
      const auto& comp = el.compositions.at(pair.composition);
      if (!comp.network) return Outcome{false, pair.file + ": no network"};
      if (auto why = twins::same_network(*comp.network, pair.twin); !why.empty()) return Outcome{false, pair.file + ": " + why};

      // DOT from two independent elaborations, at the first and last source mode.
      const auto el2 = dsl::elaborate(dsl::parse_or_throw(text));
      for (const auto& [name, m] : el.morphisms) {
        const auto& f = m.morphism;
        for (auto i : {std::uint64_t{0}, f.source().mode_count() - 1}) {
          const auto mode = f.source().mode_at(i);
          const auto& f2 = el2.morphisms.at(name).morphism;
          if (dsl::emit_dot(f, mode, m.instances, name) != dsl::emit_dot(f2, mode, m.instances, name)) {
            return Outcome{false, pair.file + ": DOT of " + name + " differs between runs"};
          }
          ++dots;
        }
      }
    }
    return Outcome{true, "6 fixtures parse, reprint canonically and match their twins; " + std::to_string(dots) +
                             " DOT emissions byte-identical"};
  });

  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "modalnet/fault.hpp"
#include "modalnet/generators.hpp"
#include "modalnet/sim.hpp"

// Executable law suites over generated objects and the shipped fixtures.
// Each suite counts the cases it checked and the ones that failed, keeping
// a few failure descriptions.
namespace mnet::laws {

struct LawResult {
  std::string name;
  std::uint64_t cases = 0;
  std::uint64_t failures = 0;
  std::vector<std::string> examples;  // first few failures
  bool ok() const { return failures == 0; }
  void fail(std::string what);
};

struct SuiteOptions {
  std::uint64_t seed = 0;
  std::size_t count = 200;  // generated cases per suite
  gen::Limits limits{};
  // Sample fixture states instead of enumerating them. Used for negative
  // controls, where injected faults switch off event memoization.
  bool quick = false;
};

// split/merge round trips and |A+B| = |A| |B|.
LawResult strength(const SuiteOptions& o);
// Associativity and units of compose_wd, functoriality of tensor_wd.
LawResult wd_category(const SuiteOptions& o);
// route(psi . phi) against two-stage routing, every assignment.
LawResult routing_coherence(const SuiteOptions& o);
// Associativity and units of compose_mdn, tensor functoriality.
LawResult mdn_category(const SuiteOptions& o);
// I preserves identities, composition and tensor.
LawResult inclusion(const SuiteOptions& o);
// P(f1 . f0) = P(f1) P(f0) on generated pairs and systems, exhaustively.
LawResult functoriality(const SuiteOptions& o);
// The same law on the discretized fixture chains.
LawResult fixture_functoriality(const SuiteOptions& o);
// Hierarchical and flat runs of the fixture networks agree.
LawResult nested_vs_flat(const SuiteOptions& o, std::size_t traces = 4, std::size_t steps = 20);

std::vector<LawResult> run_all(const SuiteOptions& o);

// Functoriality suites (generated and fixture) with `site` injected; the
// fault is caught when the result has failures.
LawResult negative_control(fault::Site site, const SuiteOptions& o);

// Random input trace for a system's box; every port of every mode gets a
// value each step so the trace fits whatever mode the system is in.
InputTrace random_trace(gen::Rng& rng, const ModalBox& box, std::size_t steps);

}  // namespace mnet::laws

#pragma once

// Reference computations written directly from the definitions, without the
// library's index-based representations. Tests compare the library against
// these.

#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "modalnet/wiring.hpp"

namespace oracle {

using NameMap = std::map<std::string, std::string>;

// result(a) = asg(q(a)), over names.
inline std::map<std::string, mnet::Value> pullback(const NameMap& q, const std::map<std::string, mnet::Value>& asg) {
  std::map<std::string, mnet::Value> out;
  for (const auto& [a, b] : q) out[a] = asg.at(b);
  return out;
}

// Product of type cardinalities by repeated multiplication.
inline std::uint64_t count(const std::vector<std::uint64_t>& cards) {
  std::uint64_t n = 1;
  for (auto c : cards) n *= c;
  return n;
}

// A wiring diagram as name-level feeds: inner input -> ("in", outer port) or
// ("out", inner port); outer output -> inner port.
struct Wires {
  std::map<std::string, std::pair<std::string, std::string>> in;
  NameMap out;
};

inline Wires wires_of(const mnet::WiringDiagram& d) {
  Wires w;
  const auto& x = d.source();
  const auto& y = d.target();
  for (std::size_t i = 0; i < x.inputs.size(); ++i) {
    const auto& f = d.in_feeds()[i];
    if (f.from == mnet::Feed::From::TargetInput) {
      w.in[x.inputs.port(i).name] = {"in", y.inputs.port(f.index).name};
    } else {
      w.in[x.inputs.port(i).name] = {"out", x.outputs.port(f.index).name};
    }
  }
  for (std::size_t j = 0; j < y.outputs.size(); ++j) w.out[y.outputs.port(j).name] = x.outputs.port(d.out_feeds()[j]).name;
  return w;
}

// The chase for psi . phi, case by case.
inline Wires compose(const Wires& phi, const Wires& psi) {
  Wires r;
  for (const auto& [a, t] : phi.in) {
    if (t.first == "out") {
      r.in[a] = t;
      continue;
    }
    const auto& u = psi.in.at(t.second);
    if (u.first == "in") {
      r.in[a] = u;
    } else {
      r.in[a] = {"out", phi.out.at(u.second)};
    }
  }
  for (const auto& [o, w] : psi.out) r.out[o] = phi.out.at(w);
  return r;
}

inline bool operator==(const Wires& a, const Wires& b) { return a.in == b.in && a.out == b.out; }

// Retinal nerve update, straight from the piecewise formula.
struct NerveState {
  std::string mode;
  double adapt;
};

inline NerveState nerve_update(const NerveState& s, double x, double alpha, double beta) {
  if (s.mode == "polarized") {
    if (x - s.adapt >= alpha) return {"depolarized", s.adapt + x / beta};
    return {"polarized", s.adapt / beta};
  }
  if (s.mode == "depolarized") return {"hyperpolarized", s.adapt / beta};
  return {"polarized", s.adapt / beta};
}

}  // namespace oracle

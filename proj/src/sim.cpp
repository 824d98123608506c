#include "modalnet/sim.hpp"

#include <exception>

#include "modalnet/error.hpp"

namespace mnet {

namespace {

std::string port_list(const TypedFinSet& set) {
  std::string s = "[";
  for (std::size_t i = 0; i < set.size(); ++i) s += (i ? ", " : "") + set.port(i).name;
  return s + "]";
}

}  // namespace

StepResult step(const ModalDynamicalSystem& d, const Value& s, const Assignment& input) {
  auto mode = d.mode_of(s);
  auto mi = d.over.index_of(mode);
  if (!mi) throw Error(ErrorKind::ModeError, "state " + s.to_string() + " has no mode in the box");
  Box box = d.over.interface_at(*mi);
  if (!(input.over() == box.inputs)) {
    throw Error(ErrorKind::InputShapeError, "mode " + mode_to_string(mode) + " expects inputs " +
                                                port_list(box.inputs) + ", received " + port_list(input.over()));
  }
  auto output = d.readout(s);
  if (!(output.over() == box.outputs)) {
    throw Error(ErrorKind::ShapeError, "readout over " + port_list(output.over()) + " in mode " +
                                           mode_to_string(mode) + ", expected " + port_list(box.outputs));
  }
  auto next = d.update(s, input);
  if (!d.states.contains(next)) {
    throw Error(ErrorKind::ShapeError, "update left the state space: " + next.to_string());
  }
  return StepResult{std::move(output), std::move(next)};
}

Assignment select_inputs(const TypedFinSet& ports, const PortValues& values, bool strict) {
  if (strict) {
    for (const auto& [name, v] : values) {
      if (!ports.contains(name)) {
        throw Error(ErrorKind::InputShapeError, "port '" + name + "' does not exist in the current mode (inputs " +
                                                    port_list(ports) + ")");
      }
    }
  }
  std::vector<Value> vs;
  vs.reserve(ports.size());
  for (const auto& p : ports.ports()) {
    auto it = values.find(p.name);
    if (it == values.end()) {
      throw Error(ErrorKind::InputShapeError, "no value for input '" + p.name + "'; expected ports " +
                                                  port_list(ports));
    }
    auto c = p.type.coerce(it->second);
    if (!c) {
      throw Error(ErrorKind::InputShapeError, "value " + it->second.to_string() + " for input '" + p.name +
                                                  "' is not in " + p.type.to_string());
    }
    vs.push_back(std::move(*c));
  }
  return Assignment::unchecked(ports, std::move(vs));
}

std::vector<TraceStep> run(const ModalDynamicalSystem& d, const Value& s0, const InputTrace& inputs,
                           const RunOptions& opts) {
  auto start = d.states.coerce(s0);
  if (!start) {
    throw Error(ErrorKind::InitialStateError, "initial state " + s0.to_string() + " is not in " + d.states.to_string());
  }
  const std::size_t steps = opts.steps.value_or(inputs.size());
  static const PortValues none;
  std::vector<TraceStep> trace;
  trace.reserve(steps);
  Value s = *start;
  for (std::size_t i = 0; i < steps; ++i) {
    const PortValues& line = inputs.empty() ? none : inputs[std::min(i, inputs.size() - 1)];
    try {
      auto mode = d.mode_of(s);
      auto input = select_inputs(d.over.interface(mode).inputs, line, opts.strict_ports);
      auto r = step(d, s, input);
      trace.push_back(TraceStep{i, std::move(mode), s, std::move(input), std::move(r.output), r.next});
      s = std::move(r.next);
    } catch (const Error& e) {
      throw Error(e.kind(), "step " + std::to_string(i) + ": " + e.detail());
    }
  }
  return trace;
}

// ---------------------------------------------------------------------------

namespace {

std::string error_text(std::exception_ptr p) {
  try {
    std::rethrow_exception(p);
  } catch (const std::exception& e) {
    return e.what();
  } catch (...) {
    return "unknown exception";
  }
}

struct StateResult {
  std::vector<Witness> witnesses;
  std::uint64_t inputs = 0;
};

StateResult compare_at(const ModalDynamicalSystem& a, const ModalDynamicalSystem& b, const Value& s,
                       std::uint64_t ordinal, const CheckOptions& opts) {
  StateResult r;
  Mode ma;
  try {
    ma = a.mode_of(s);
    auto mb = b.mode_of(s);
    if (ma != mb) {
      r.witnesses.push_back({s, std::nullopt, "mode " + mode_to_string(ma) + " vs " + mode_to_string(mb)});
      return r;
    }
    auto ra = a.readout(s);
    auto rb = b.readout(s);
    if (!(ra == rb)) {
      r.witnesses.push_back({s, std::nullopt, "readout " + ra.to_string() + " vs " + rb.to_string()});
    }
  } catch (...) {
    r.witnesses.push_back({s, std::nullopt, error_text(std::current_exception())});
    return r;
  }

  TypedFinSet ins;
  try {
    ins = a.over.interface(ma).inputs;
  } catch (...) {
    r.witnesses.push_back({s, std::nullopt, error_text(std::current_exception())});
    return r;
  }
  std::vector<Assignment> inputs;
  if (is_finite(ins) && assignment_count(ins) <= opts.input_cap) {
    inputs = enumerate_assignments(ins);
  } else {
    std::mt19937_64 rng(opts.seed * 0x9E3779B97F4A7C15ULL + ordinal);
    for (std::size_t k = 0; k < opts.input_samples; ++k) inputs.push_back(sample_assignment(ins, rng));
  }
  for (const auto& y : inputs) {
    ++r.inputs;
    try {
      auto na = a.update(s, y);
      auto nb = b.update(s, y);
      if (!(na == nb)) r.witnesses.push_back({s, y, "update " + na.to_string() + " vs " + nb.to_string()});
    } catch (...) {
      r.witnesses.push_back({s, y, error_text(std::current_exception())});
    }
  }
  return r;
}

}  // namespace

CheckReport compare_systems(const ModalDynamicalSystem& a, const ModalDynamicalSystem& b, const CheckOptions& opts) {
  CheckReport report;
  std::vector<Value> states;
  auto n = a.states.cardinality();
  if (n && *n <= opts.state_cap) {
    states = a.states.enumerate();
  } else {
    report.exhaustive = false;
    std::mt19937_64 rng(opts.seed);
    for (std::size_t k = 0; k < opts.state_samples; ++k) states.push_back(a.states.sample(rng));
  }

  std::vector<StateResult> results(states.size());
  const auto count = static_cast<std::ptrdiff_t>(states.size());
  if (opts.exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      results[i] = compare_at(a, b, states[i], static_cast<std::uint64_t>(i), opts);
    }
  } else {
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      results[i] = compare_at(a, b, states[i], static_cast<std::uint64_t>(i), opts);
    }
  }
  for (auto& r : results) {
    report.inputs_checked += r.inputs;
    for (auto& w : r.witnesses) report.witnesses.push_back(std::move(w));
  }
  report.states_checked = states.size();
  return report;
}

CheckReport check_functoriality(const MdnMorphism& f0, const MdnMorphism& f1, const ModalDynamicalSystem& d,
                                const CheckOptions& opts) {
  auto whole = apply_morphism(compose_mdn(f0, f1), d);
  auto staged = apply_morphism(f1, apply_morphism(f0, d));
  return compare_systems(whole, staged, opts);
}

// ---------------------------------------------------------------------------

NetworkNode NetworkNode::leaf(ModalDynamicalSystem d) {
  NetworkNode n;
  n.kind = Kind::Leaf;
  n.system = std::move(d);
  return n;
}

NetworkNode NetworkNode::apply(MdnMorphism f, std::vector<NetworkNode> children) {
  std::vector<ModalBox> boxes;
  for (const auto& c : children) boxes.push_back(c.box());
  if (!(mnet::tensor(boxes) == f.source())) {
    throw Error(ErrorKind::BoxMismatch, "children do not tensor to the source of the morphism");
  }
  NetworkNode n;
  n.kind = Kind::Apply;
  n.morphism = std::move(f);
  n.children = std::move(children);
  return n;
}

NetworkNode NetworkNode::tensor(std::vector<NetworkNode> children) {
  NetworkNode n;
  n.kind = Kind::Tensor;
  n.children = std::move(children);
  return n;
}

ModalBox NetworkNode::box() const {
  switch (kind) {
    case Kind::Leaf:
      return system->over;
    case Kind::Apply:
      return morphism->target();
    case Kind::Tensor: {
      std::vector<ModalBox> boxes;
      for (const auto& c : children) boxes.push_back(c.box());
      return mnet::tensor(boxes);
    }
  }
  return ModalBox{};
}

Flattened flatten(const NetworkNode& node) {
  if (node.kind == NetworkNode::Kind::Leaf) return Flattened{identity_mdn(node.system->over), {*node.system}};
  std::vector<MdnMorphism> parts;
  std::vector<ModalDynamicalSystem> leaves;
  for (const auto& c : node.children) {
    auto f = flatten(c);
    parts.push_back(std::move(f.morphism));
    leaves.insert(leaves.end(), f.leaves.begin(), f.leaves.end());
  }
  auto inner = tensor_mdn(parts);
  if (node.kind == NetworkNode::Kind::Tensor) return Flattened{std::move(inner), std::move(leaves)};
  return Flattened{compose_mdn(inner, *node.morphism), std::move(leaves)};
}

ModalDynamicalSystem build_hierarchical(const NetworkNode& node, Exec exec) {
  if (node.kind == NetworkNode::Kind::Leaf) return *node.system;
  std::vector<ModalDynamicalSystem> built;
  for (const auto& c : node.children) built.push_back(build_hierarchical(c, exec));
  auto inner = tensor_mds(built, exec);
  if (node.kind == NetworkNode::Kind::Tensor) return inner;
  return apply_morphism(*node.morphism, inner);
}

ModalDynamicalSystem build_flat(const NetworkNode& node, Exec exec) {
  auto f = flatten(node);
  return apply_morphism(f.morphism, tensor_mds(f.leaves, exec));
}

ComparisonReport compare_traces(const std::vector<TraceStep>& a, const std::vector<TraceStep>& b) {
  ComparisonReport r;
  const auto n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    std::string what;
    if (a[i].mode != b[i].mode) {
      what = "mode " + mode_to_string(a[i].mode) + " vs " + mode_to_string(b[i].mode);
    } else if (!(a[i].state == b[i].state)) {
      what = "state " + a[i].state.to_string() + " vs " + b[i].state.to_string();
    } else if (!(a[i].input == b[i].input)) {
      what = "input " + a[i].input.to_string() + " vs " + b[i].input.to_string();
    } else if (!(a[i].output == b[i].output)) {
      what = "output " + a[i].output.to_string() + " vs " + b[i].output.to_string();
    } else if (!(a[i].next_state == b[i].next_state)) {
      what = "next state " + a[i].next_state.to_string() + " vs " + b[i].next_state.to_string();
    }
    if (!what.empty()) {
      r.equal = false;
      r.first_divergence = i;
      r.steps_compared = i + 1;
      r.detail = "step " + std::to_string(i) + ": " + what;
      return r;
    }
  }
  r.steps_compared = n;
  if (a.size() != b.size()) {
    r.equal = false;
    r.first_divergence = n;
    r.detail = "trace lengths " + std::to_string(a.size()) + " vs " + std::to_string(b.size());
  }
  return r;
}

ComparisonReport check_nested_vs_flat(const NetworkNode& node, const Value& s0, const InputTrace& inputs,
                                      const RunOptions& opts) {
  auto nested = build_hierarchical(node);
  auto flat = build_flat(node);
  std::vector<TraceStep> ta, tb;
  std::string failure;
  try {
    ta = run(nested, s0, inputs, opts);
  } catch (const std::exception& e) {
    failure = std::string("hierarchical run failed: ") + e.what();
  }
  try {
    tb = run(flat, s0, inputs, opts);
  } catch (const std::exception& e) {
    failure += (failure.empty() ? "" : "; ") + std::string("flat run failed: ") + e.what();
  }
  auto r = compare_traces(ta, tb);
  if (!failure.empty()) {
    r.equal = false;
    r.detail = failure + (r.detail.empty() ? "" : "; " + r.detail);
  }
  return r;
}

}  // namespace mnet

#include "modalnet/wiring.hpp"

#include <utility>

#include "modalnet/error.hpp"
#include "modalnet/fault.hpp"

namespace mnet {

std::string Box::to_string() const { return "(in " + inputs.to_string() + ", out " + outputs.to_string() + ")"; }

Box tensor(const Box& a, const Box& b) {
  return Box{disjoint_union(a.inputs, b.inputs), disjoint_union(a.outputs, b.outputs)};
}

Box tensor(std::span<const Box> boxes) {
  std::vector<TypedFinSet> ins, outs;
  ins.reserve(boxes.size());
  outs.reserve(boxes.size());
  for (const auto& b : boxes) {
    ins.push_back(b.inputs);
    outs.push_back(b.outputs);
  }
  return Box{disjoint_union(ins), disjoint_union(outs)};
}

const char* to_string(PortSide side) {
  switch (side) {
    case PortSide::SourceIn: return "source input";
    case PortSide::SourceOut: return "source output";
    case PortSide::TargetIn: return "target input";
    case PortSide::TargetOut: return "target output";
  }
  return "?";
}

namespace {

void check_feed_type(const Port& dest, const Port& src) {
  if (!(dest.type == src.type)) {
    throw Error(ErrorKind::TypeMismatch, "wire '" + src.name + "' : " + src.type.to_string() + " -> '" +
                                             dest.name + "' : " + dest.type.to_string());
  }
}

}  // namespace

WiringDiagram WiringDiagram::from_feeds(Box source, Box target, std::vector<Feed> in_feeds,
                                        std::vector<std::size_t> out_feeds) {
  if (in_feeds.size() != source.inputs.size()) {
    throw Error(ErrorKind::PartialMap, "diagram feeds " + std::to_string(in_feeds.size()) + " of " +
                                           std::to_string(source.inputs.size()) + " inner inputs");
  }
  if (out_feeds.size() != target.outputs.size()) {
    throw Error(ErrorKind::PartialMap, "diagram feeds " + std::to_string(out_feeds.size()) + " of " +
                                           std::to_string(target.outputs.size()) + " outer outputs");
  }
  for (std::size_t i = 0; i < in_feeds.size(); ++i) {
    const auto& f = in_feeds[i];
    const auto& pool = f.from == Feed::From::TargetInput ? target.inputs : source.outputs;
    if (f.index >= pool.size()) {
      throw Error(ErrorKind::UnknownTarget, "inner input '" + source.inputs.port(i).name + "' fed from a missing port");
    }
    check_feed_type(source.inputs.port(i), pool.port(f.index));
  }
  for (std::size_t j = 0; j < out_feeds.size(); ++j) {
    if (out_feeds[j] >= source.outputs.size()) {
      throw Error(ErrorKind::UnknownTarget, "outer output '" + target.outputs.port(j).name + "' fed from a missing port");
    }
    check_feed_type(target.outputs.port(j), source.outputs.port(out_feeds[j]));
  }
  WiringDiagram d;
  d.source_ = std::move(source);
  d.target_ = std::move(target);
  d.in_feeds_ = std::move(in_feeds);
  d.out_feeds_ = std::move(out_feeds);
  return d;
}

WiringDiagram WiringDiagram::make(Box source, Box target, const std::map<std::string, PortRef>& in_map,
                                  const std::map<std::string, PortRef>& out_map) {
  for (const auto& [name, ref] : in_map) {
    if (!source.inputs.contains(name)) {
      throw Error(ErrorKind::UnknownTarget, "'" + name + "' is not an input of the inner box");
    }
  }
  for (const auto& [name, ref] : out_map) {
    if (!target.outputs.contains(name)) {
      throw Error(ErrorKind::UnknownTarget, "'" + name + "' is not an output of the outer box");
    }
  }
  std::vector<Feed> in_feeds;
  for (const auto& p : source.inputs.ports()) {
    auto it = in_map.find(p.name);
    if (it == in_map.end()) throw Error(ErrorKind::PartialMap, "inner input '" + p.name + "' has no feed");
    const auto& ref = it->second;
    if (ref.side == PortSide::TargetIn) {
      auto j = target.inputs.index_of(ref.port);
      if (!j) throw Error(ErrorKind::UnknownTarget, "outer box has no input '" + ref.port + "'");
      in_feeds.push_back(Feed{Feed::From::TargetInput, *j});
    } else if (ref.side == PortSide::SourceOut) {
      auto j = source.outputs.index_of(ref.port);
      if (!j) throw Error(ErrorKind::UnknownTarget, "inner box has no output '" + ref.port + "'");
      in_feeds.push_back(Feed{Feed::From::SourceOutput, *j});
    } else {
      throw Error(ErrorKind::SideError, "inner input '" + p.name + "' cannot be fed from a " + mnet::to_string(ref.side));
    }
  }
  std::vector<std::size_t> out_feeds;
  for (const auto& p : target.outputs.ports()) {
    auto it = out_map.find(p.name);
    if (it == out_map.end()) throw Error(ErrorKind::PartialMap, "outer output '" + p.name + "' has no feed");
    const auto& ref = it->second;
    if (ref.side != PortSide::SourceOut) {
      throw Error(ErrorKind::SideError, "outer output '" + p.name + "' cannot be fed from a " + mnet::to_string(ref.side));
    }
    auto j = source.outputs.index_of(ref.port);
    if (!j) throw Error(ErrorKind::UnknownTarget, "inner box has no output '" + ref.port + "'");
    out_feeds.push_back(*j);
  }
  return from_feeds(std::move(source), std::move(target), std::move(in_feeds), std::move(out_feeds));
}

TypedFunction WiringDiagram::phi_in() const {
  auto codomain = disjoint_union(target_.inputs, source_.outputs);
  std::vector<std::size_t> t;
  t.reserve(in_feeds_.size());
  for (const auto& f : in_feeds_) {
    t.push_back(f.from == Feed::From::TargetInput ? f.index : target_.inputs.size() + f.index);
  }
  return TypedFunction::from_indices(source_.inputs, std::move(codomain), std::move(t));
}

TypedFunction WiringDiagram::phi_out() const {
  return TypedFunction::from_indices(target_.outputs, source_.outputs, out_feeds_);
}

std::string WiringDiagram::to_string() const {
  std::string s = "diagram " + source_.to_string() + " -> " + target_.to_string() + " [";
  for (std::size_t i = 0; i < in_feeds_.size(); ++i) {
    const auto& f = in_feeds_[i];
    s += " in." + source_.inputs.port(i).name + "<-" +
         (f.from == Feed::From::TargetInput ? "outer.in." + target_.inputs.port(f.index).name
                                            : "out." + source_.outputs.port(f.index).name);
  }
  for (std::size_t j = 0; j < out_feeds_.size(); ++j) {
    s += " outer.out." + target_.outputs.port(j).name + "<-out." + source_.outputs.port(out_feeds_[j]).name;
  }
  return s + " ]";
}

WiringDiagram identity_wd(const Box& box) {
  std::vector<Feed> in_feeds;
  for (std::size_t i = 0; i < box.inputs.size(); ++i) in_feeds.push_back(Feed{Feed::From::TargetInput, i});
  std::vector<std::size_t> out_feeds;
  for (std::size_t j = 0; j < box.outputs.size(); ++j) out_feeds.push_back(j);
  return WiringDiagram::from_feeds(box, box, std::move(in_feeds), std::move(out_feeds));
}

WiringDiagram compose_wd(const WiringDiagram& phi, const WiringDiagram& psi) {
  if (!(phi.target() == psi.source())) {
    throw Error(ErrorKind::BoxMismatch, "cannot compose diagrams: middle boxes " + phi.target().to_string() +
                                            " and " + psi.source().to_string() + " differ");
  }
  const auto& x_out = phi.source().outputs;
  const bool faulty = fault::active() == fault::Site::ComposeWd;

  std::vector<Feed> in_feeds;
  in_feeds.reserve(phi.in_feeds().size());
  for (const auto& t : phi.in_feeds()) {
    if (t.from == Feed::From::SourceOutput) {
      in_feeds.push_back(t);
      continue;
    }
    const auto& u = psi.in_feeds()[t.index];
    if (u.from == Feed::From::TargetInput) {
      in_feeds.push_back(u);
      continue;
    }
    // u names an output of the middle box: follow phi_out back inside.
    std::size_t w = phi.out_feeds()[u.index];
    if (faulty) {
      for (std::size_t k = 0; k < x_out.size(); ++k) {
        if (x_out.port(k).type == x_out.port(w).type) {
          w = k;
          break;
        }
      }
    }
    in_feeds.push_back(Feed{Feed::From::SourceOutput, w});
  }
  std::vector<std::size_t> out_feeds;
  out_feeds.reserve(psi.out_feeds().size());
  for (auto j : psi.out_feeds()) out_feeds.push_back(phi.out_feeds()[j]);
  return WiringDiagram::from_feeds(phi.source(), psi.target(), std::move(in_feeds), std::move(out_feeds));
}

WiringDiagram tensor_wd(std::span<const WiringDiagram> parts) {
  std::vector<Box> sources, targets;
  for (const auto& p : parts) {
    sources.push_back(p.source());
    targets.push_back(p.target());
  }
  std::vector<Feed> in_feeds;
  std::vector<std::size_t> out_feeds;
  std::size_t target_in_offset = 0, source_out_offset = 0;
  for (const auto& p : parts) {
    for (const auto& f : p.in_feeds()) {
      in_feeds.push_back(Feed{f.from, f.index + (f.from == Feed::From::TargetInput ? target_in_offset
                                                                                    : source_out_offset)});
    }
    for (auto j : p.out_feeds()) out_feeds.push_back(j + source_out_offset);
    target_in_offset += p.target().inputs.size();
    source_out_offset += p.source().outputs.size();
  }
  return WiringDiagram::from_feeds(tensor(sources), tensor(targets), std::move(in_feeds), std::move(out_feeds));
}

WiringDiagram tensor_wd(const WiringDiagram& a, const WiringDiagram& b) {
  const WiringDiagram parts[] = {a, b};
  return tensor_wd(std::span<const WiringDiagram>(parts));
}

WiringDiagram symmetry_wd(const Box& a, const Box& b) {
  Box source = tensor(a, b);
  Box target = tensor(b, a);
  std::vector<Feed> in_feeds;
  for (std::size_t i = 0; i < source.inputs.size(); ++i) {
    std::size_t j = i < a.inputs.size() ? b.inputs.size() + i : i - a.inputs.size();
    in_feeds.push_back(Feed{Feed::From::TargetInput, j});
  }
  std::vector<std::size_t> out_feeds;
  for (std::size_t j = 0; j < target.outputs.size(); ++j) {
    out_feeds.push_back(j < b.outputs.size() ? a.outputs.size() + j : j - b.outputs.size());
  }
  return WiringDiagram::from_feeds(std::move(source), std::move(target), std::move(in_feeds), std::move(out_feeds));
}

namespace {

// Swaps the values of the first same-typed pair (first port with a partner,
// last partner). Only used under fault injection.
void swap_first_same_typed(const TypedFinSet& set, std::vector<Value>& values) {
  for (std::size_t i = 0; i < set.size(); ++i) {
    for (std::size_t j = set.size(); j-- > i + 1;) {
      if (set.port(i).type == set.port(j).type) {
        std::swap(values[i], values[j]);
        return;
      }
    }
  }
}

}  // namespace

Assignment route_in(const WiringDiagram& phi, const Assignment& external, const Assignment& internal) {
  if (!(external.over() == phi.target().inputs)) {
    throw Error(ErrorKind::DomainMismatch, "external assignment over " + external.over().to_string() +
                                               ", expected " + phi.target().inputs.to_string());
  }
  if (!(internal.over() == phi.source().outputs)) {
    throw Error(ErrorKind::DomainMismatch, "internal assignment over " + internal.over().to_string() +
                                               ", expected " + phi.source().outputs.to_string());
  }
  std::vector<Value> values;
  values.reserve(phi.in_feeds().size());
  for (const auto& f : phi.in_feeds()) {
    values.push_back(f.from == Feed::From::TargetInput ? external[f.index] : internal[f.index]);
  }
  if (fault::active() == fault::Site::RouteIn) swap_first_same_typed(phi.source().inputs, values);
  return Assignment::unchecked(phi.source().inputs, std::move(values));
}

Assignment route_out(const WiringDiagram& phi, const Assignment& internal) {
  if (!(internal.over() == phi.source().outputs)) {
    throw Error(ErrorKind::DomainMismatch, "internal assignment over " + internal.over().to_string() +
                                               ", expected " + phi.source().outputs.to_string());
  }
  std::vector<Value> values;
  values.reserve(phi.out_feeds().size());
  for (auto j : phi.out_feeds()) values.push_back(internal[j]);
  if (fault::active() == fault::Site::RouteOut) swap_first_same_typed(phi.target().outputs, values);
  return Assignment::unchecked(phi.target().outputs, std::move(values));
}

Routed route(const WiringDiagram& phi, const Assignment& external, const Assignment& internal) {
  return Routed{route_in(phi, external, internal), route_out(phi, internal)};
}

OperadArrow operadic_arrow(std::vector<Box> sources, WiringDiagram diagram) {
  if (!(tensor(sources) == diagram.source())) {
    throw Error(ErrorKind::BoxMismatch, "diagram source is not the tensor of the listed sources");
  }
  Box target = diagram.target();
  return OperadArrow{std::move(sources), std::move(target), std::move(diagram)};
}

OperadArrow operadic_arrow(std::vector<Box> sources, Box target, const std::map<std::string, PortRef>& in_map,
                           const std::map<std::string, PortRef>& out_map) {
  auto diagram = WiringDiagram::make(tensor(sources), std::move(target), in_map, out_map);
  return operadic_arrow(std::move(sources), std::move(diagram));
}

OperadArrow identity_arrow(const Box& box) { return OperadArrow{{box}, box, identity_wd(box)}; }

OperadArrow operadic_compose(const OperadArrow& outer, std::span<const OperadArrow> inners) {
  if (inners.size() != outer.sources.size()) {
    throw Error(ErrorKind::ArityMismatch, "outer arrow takes " + std::to_string(outer.sources.size()) +
                                              " inputs, got " + std::to_string(inners.size()));
  }
  std::vector<Box> sources;
  std::vector<WiringDiagram> diagrams;
  for (std::size_t i = 0; i < inners.size(); ++i) {
    if (!(inners[i].target == outer.sources[i])) {
      throw Error(ErrorKind::BoxMismatch, "inner arrow " + std::to_string(i) + " lands in " +
                                              inners[i].target.to_string() + ", expected " +
                                              outer.sources[i].to_string());
    }
    sources.insert(sources.end(), inners[i].sources.begin(), inners[i].sources.end());
    diagrams.push_back(inners[i].diagram);
  }
  auto diagram = compose_wd(tensor_wd(diagrams), outer.diagram);
  return OperadArrow{std::move(sources), outer.target, std::move(diagram)};
}

}  // namespace mnet

namespace mnet {

WiringBuilder::WiringBuilder(std::vector<std::pair<std::string, Box>> inner, Box outer)
    : inner_(std::move(inner)), outer_(std::move(outer)) {
  std::vector<Box> boxes;
  std::size_t ins = 0, outs = 0;
  for (std::size_t i = 0; i < inner_.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (inner_[j].first == inner_[i].first) {
        throw Error(ErrorKind::DuplicatePortName, "inner box '" + inner_[i].first + "' named twice");
      }
    }
    in_offset_.push_back(ins);
    out_offset_.push_back(outs);
    ins += inner_[i].second.inputs.size();
    outs += inner_[i].second.outputs.size();
    boxes.push_back(inner_[i].second);
  }
  source_ = tensor(boxes);
  in_feeds_.resize(ins);
  out_feeds_.resize(outer_.outputs.size());
}

bool WiringBuilder::has_inner(std::string_view inst) const {
  for (const auto& [n, b] : inner_)
    if (n == inst) return true;
  return false;
}

std::size_t WiringBuilder::inner_index(std::string_view inst) const {
  for (std::size_t i = 0; i < inner_.size(); ++i)
    if (inner_[i].first == inst) return i;
  throw Error(ErrorKind::UnknownTarget, "no inner box named '" + std::string(inst) + "'");
}

bool WiringBuilder::has_inner_input(std::string_view inst, std::string_view port) const {
  return has_inner(inst) && inner_[inner_index(inst)].second.inputs.contains(port);
}

bool WiringBuilder::has_inner_output(std::string_view inst, std::string_view port) const {
  return has_inner(inst) && inner_[inner_index(inst)].second.outputs.contains(port);
}

std::size_t WiringBuilder::input_slot(std::string_view inst, std::string_view port) const {
  auto i = inner_index(inst);
  auto j = inner_[i].second.inputs.index_of(port);
  if (!j) throw Error(ErrorKind::UnknownTarget, std::string(inst) + " has no input '" + std::string(port) + "'");
  return in_offset_[i] + *j;
}

std::size_t WiringBuilder::output_slot(std::string_view inst, std::string_view port) const {
  auto i = inner_index(inst);
  auto j = inner_[i].second.outputs.index_of(port);
  if (!j) throw Error(ErrorKind::UnknownTarget, std::string(inst) + " has no output '" + std::string(port) + "'");
  return out_offset_[i] + *j;
}

std::string WiringBuilder::input_label(std::size_t slot) const {
  for (std::size_t i = inner_.size(); i-- > 0;) {
    if (slot >= in_offset_[i]) return inner_[i].first + ".in." + inner_[i].second.inputs.port(slot - in_offset_[i]).name;
  }
  return "?";
}

WiringBuilder& WiringBuilder::from_outer(std::string_view inst, std::string_view port, std::string_view outer_port) {
  auto slot = input_slot(inst, port);
  auto j = outer_.inputs.index_of(outer_port);
  if (!j) throw Error(ErrorKind::UnknownTarget, "outer box has no input '" + std::string(outer_port) + "'");
  if (in_feeds_[slot]) throw Error(ErrorKind::MergedWire, input_label(slot) + " already has a feed");
  in_feeds_[slot] = Feed{Feed::From::TargetInput, *j};
  return *this;
}

WiringBuilder& WiringBuilder::from_inner(std::string_view inst, std::string_view port, std::string_view src_inst,
                                         std::string_view src_port) {
  auto slot = input_slot(inst, port);
  auto src = output_slot(src_inst, src_port);
  if (in_feeds_[slot]) throw Error(ErrorKind::MergedWire, input_label(slot) + " already has a feed");
  in_feeds_[slot] = Feed{Feed::From::SourceOutput, src};
  return *this;
}

WiringBuilder& WiringBuilder::export_from(std::string_view outer_port, std::string_view src_inst,
                                          std::string_view src_port) {
  auto j = outer_.outputs.index_of(outer_port);
  if (!j) throw Error(ErrorKind::UnknownTarget, "outer box has no output '" + std::string(outer_port) + "'");
  auto src = output_slot(src_inst, src_port);
  if (out_feeds_[*j]) throw Error(ErrorKind::MergedWire, "outer output '" + std::string(outer_port) + "' already has a feed");
  out_feeds_[*j] = src;
  return *this;
}

WiringDiagram WiringBuilder::build() const {
  std::vector<Feed> in_feeds;
  for (std::size_t i = 0; i < in_feeds_.size(); ++i) {
    if (!in_feeds_[i]) throw Error(ErrorKind::PartialMap, input_label(i) + " has no feed");
    in_feeds.push_back(*in_feeds_[i]);
  }
  std::vector<std::size_t> out_feeds;
  for (std::size_t j = 0; j < out_feeds_.size(); ++j) {
    if (!out_feeds_[j]) throw Error(ErrorKind::PartialMap, "outer output '" + outer_.outputs.port(j).name + "' has no feed");
    out_feeds.push_back(*out_feeds_[j]);
  }
  return WiringDiagram::from_feeds(source_, outer_, std::move(in_feeds), std::move(out_feeds));
}

}  // namespace mnet

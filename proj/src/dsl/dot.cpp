#include "modalnet/dsl/dot.hpp"

#include <algorithm>
#include <cctype>

namespace mnet::dsl {

namespace {

std::string port_id(const std::string& name) {
  std::string s;
  for (char c : name) s += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
  return s;
}

std::string escape(const std::string& text) {
  std::string s;
  for (char c : text) {
    if (std::string_view("{}|<>\"\\").find(c) != std::string_view::npos) s += '\\';
    s += c;
  }
  return s;
}

std::string fields(const std::vector<std::string>& names) {
  std::string s;
  for (const auto& n : names) s += (s.empty() ? "" : "|") + ("<" + port_id(n) + "> " + escape(n));
  return s;
}

// Port names of a factor over all of its modes, so a node looks the same
// whichever mode is drawn.
std::vector<std::string> all_ports(std::span<const Box> boxes, bool inputs) {
  std::vector<std::string> names;
  for (const auto& b : boxes) {
    for (const auto& p : (inputs ? b.inputs : b.outputs).ports()) {
      if (std::find(names.begin(), names.end(), p.name) == names.end()) names.push_back(p.name);
    }
  }
  return names;
}

}  // namespace

std::string emit_dot(const MdnMorphism& f, const Mode& mode, const std::vector<std::string>& labels,
                     const std::string& name) {
  const Event ev = f.event(mode);
  const WiringDiagram& d = ev.diagram;
  const auto factors = f.source().factors();

  struct Inner {
    std::string id, label;
    Box box;
    std::vector<std::string> ins, outs;
  };
  std::vector<Inner> inner;
  std::vector<std::pair<std::size_t, std::size_t>> in_owner, out_owner;  // global slot -> (factor, local)
  for (std::size_t i = 0; i < factors.size(); ++i) {
    const auto& fac = factors[i];
    const auto at = std::find(fac.labels.begin(), fac.labels.end(), mode[i]) - fac.labels.begin();
    Box b = fac.boxes[static_cast<std::size_t>(at)];
    for (std::size_t k = 0; k < b.inputs.size(); ++k) in_owner.emplace_back(i, k);
    for (std::size_t k = 0; k < b.outputs.size(); ++k) out_owner.emplace_back(i, k);
    std::string label = i < labels.size() ? labels[i] : "X" + std::to_string(i);
    inner.push_back(Inner{"x" + std::to_string(i), std::move(label), std::move(b), all_ports(fac.boxes, true),
                          all_ports(fac.boxes, false)});
  }

  const Box& outer = d.target();
  std::vector<Box> outer_boxes{outer};
  if (f.target().factors().size() == 1) outer_boxes = f.target().factors()[0].boxes;
  const auto outer_ins = all_ports(outer_boxes, true), outer_outs = all_ports(outer_boxes, false);
  std::string s = "digraph \"" + escape(name) + "\" {\n";
  if (inner.empty() && outer_ins.empty() && outer_outs.empty()) return s + "}\n";

  s += "  rankdir=LR;\n";
  s += "  node [shape=record];\n";
  if (!outer_ins.empty()) s += "  outer_in [label=\"in|{" + fields(outer_ins) + "}\"];\n";
  if (!outer_outs.empty()) s += "  outer_out [label=\"{" + fields(outer_outs) + "}|out\"];\n";
  for (std::size_t i = 0; i < inner.size(); ++i) {
    const auto& x = inner[i];
    s += "  subgraph cluster_" + std::to_string(i) + " {\n";
    s += "    label=\"" + escape(x.label) + "\";\n";
    s += "    " + x.id + " [label=\"{" + fields(x.ins) + "}|" + escape(x.label) + "|{" + fields(x.outs) + "}\"];\n";
    s += "  }\n";
  }
  auto inner_out = [&](std::size_t slot) {
    const auto [i, k] = out_owner[slot];
    return inner[i].id + ":" + port_id(inner[i].box.outputs.port(k).name);
  };
  const auto feeds = d.in_feeds();
  for (std::size_t j = 0; j < feeds.size(); ++j) {
    const auto [i, k] = in_owner[j];
    const std::string dest = inner[i].id + ":" + port_id(inner[i].box.inputs.port(k).name);
    const Feed& fd = feeds[j];
    const std::string src = fd.from == Feed::From::TargetInput ? "outer_in:" + port_id(outer.inputs.port(fd.index).name)
                                                               : inner_out(fd.index);
    s += "  " + src + " -> " + dest + ";\n";
  }
  const auto outs = d.out_feeds();
  for (std::size_t o = 0; o < outs.size(); ++o) {
    s += "  " + inner_out(outs[o]) + " -> outer_out:" + port_id(outer.outputs.port(o).name) + ";\n";
  }
  return s + "}\n";
}

}  // namespace mnet::dsl

#include "modalnet/mdn.hpp"

#include <algorithm>
#include <limits>
#include <mutex>
#include <unordered_map>

#include "modalnet/error.hpp"
#include "modalnet/fault.hpp"

namespace mnet {

std::string mode_to_string(const Mode& mode) {
  if (mode.empty()) return "()";
  std::string s;
  for (std::size_t i = 0; i < mode.size(); ++i) {
    if (i) s += ',';
    s += mode[i];
  }
  return s;
}

Mode parse_mode(std::string_view text) {
  if (text == "()") return {};
  Mode m;
  std::size_t start = 0;
  while (true) {
    auto comma = text.find(',', start);
    auto piece = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    while (!piece.empty() && piece.front() == ' ') piece.remove_prefix(1);
    while (!piece.empty() && piece.back() == ' ') piece.remove_suffix(1);
    m.emplace_back(piece);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return m;
}

// ---------------------------------------------------------------------------

struct ModalBox::Data {
  std::vector<ModalFactor> factors;
  std::uint64_t count = 1;
  mutable std::mutex mu;
  mutable std::unordered_map<std::uint64_t, Box> interfaces;
};

ModalBox::ModalBox() {
  static const std::shared_ptr<const Data> unit = std::make_shared<Data>();
  data_ = unit;
}

ModalBox ModalBox::from_factors(std::vector<ModalFactor> factors) {
  auto d = std::make_shared<Data>();
  std::uint64_t count = 1;
  for (const auto& f : factors) {
    auto k = static_cast<std::uint64_t>(f.labels.size());
    if (count > std::numeric_limits<std::uint64_t>::max() / k) {
      throw Error(ErrorKind::ModeError, "mode set too large to enumerate");
    }
    count *= k;
  }
  d->factors = std::move(factors);
  d->count = count;
  ModalBox b;
  b.data_ = std::move(d);
  return b;
}

namespace {

void check_label(const std::string& label) {
  if (label.empty() || label.find_first_of(",() ") != std::string::npos) {
    throw Error(ErrorKind::ModeError, "invalid mode label '" + label + "'");
  }
}

}  // namespace

ModalBox ModalBox::make(const std::vector<std::string>& modes, const std::map<std::string, Box>& interface) {
  if (modes.empty()) throw Error(ErrorKind::EmptyModeSet, "a modal box needs at least one mode");
  std::vector<std::pair<std::string, Box>> pairs;
  for (const auto& m : modes) {
    auto it = interface.find(m);
    if (it == interface.end()) throw Error(ErrorKind::MissingInterface, "mode '" + m + "' has no interface");
    pairs.emplace_back(m, it->second);
  }
  for (const auto& [m, b] : interface) {
    if (std::find(modes.begin(), modes.end(), m) == modes.end()) {
      throw Error(ErrorKind::UnknownMode, "interface given for undeclared mode '" + m + "'");
    }
  }
  return make(pairs);
}

ModalBox ModalBox::make(const std::vector<std::pair<std::string, Box>>& interface) {
  if (interface.empty()) throw Error(ErrorKind::EmptyModeSet, "a modal box needs at least one mode");
  auto sorted = interface;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  ModalFactor f;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    check_label(sorted[i].first);
    if (i && sorted[i].first == sorted[i - 1].first) {
      throw Error(ErrorKind::ModeError, "mode '" + sorted[i].first + "' declared twice");
    }
    f.labels.push_back(sorted[i].first);
    f.boxes.push_back(sorted[i].second);
  }
  return from_factors({std::move(f)});
}

ModalBox ModalBox::of_box(const Box& box) { return make({{"*", box}}); }

std::span<const ModalFactor> ModalBox::factors() const { return data_->factors; }
std::uint64_t ModalBox::mode_count() const { return data_->count; }

Mode ModalBox::mode_at(std::uint64_t index) const {
  if (index >= data_->count) throw Error(ErrorKind::UnknownMode, "mode index out of range");
  const auto& fs = data_->factors;
  Mode m(fs.size());
  for (std::size_t i = fs.size(); i-- > 0;) {
    auto k = fs[i].labels.size();
    m[i] = fs[i].labels[index % k];
    index /= k;
  }
  return m;
}

std::optional<std::uint64_t> ModalBox::index_of(const Mode& mode) const {
  const auto& fs = data_->factors;
  if (mode.size() != fs.size()) return std::nullopt;
  std::uint64_t index = 0;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    const auto& ls = fs[i].labels;
    auto it = std::lower_bound(ls.begin(), ls.end(), mode[i]);
    if (it == ls.end() || *it != mode[i]) return std::nullopt;
    index = index * ls.size() + static_cast<std::uint64_t>(it - ls.begin());
  }
  return index;
}

std::vector<Mode> ModalBox::modes() const {
  std::vector<Mode> out;
  out.reserve(data_->count);
  for (std::uint64_t i = 0; i < data_->count; ++i) out.push_back(mode_at(i));
  return out;
}

Box ModalBox::interface_at(std::uint64_t index) const {
  if (index >= data_->count) throw Error(ErrorKind::UnknownMode, "mode index out of range");
  const auto& fs = data_->factors;
  if (fs.size() == 1) return fs[0].boxes[index];
  if (fs.empty()) return Box{};
  {
    std::lock_guard lock(data_->mu);
    auto it = data_->interfaces.find(index);
    if (it != data_->interfaces.end()) return it->second;
  }
  std::vector<Box> boxes(fs.size());
  std::uint64_t rest = index;
  for (std::size_t i = fs.size(); i-- > 0;) {
    auto k = fs[i].labels.size();
    boxes[i] = fs[i].boxes[rest % k];
    rest /= k;
  }
  Box b = tensor(boxes);
  std::lock_guard lock(data_->mu);
  data_->interfaces.emplace(index, b);
  return b;
}

Box ModalBox::interface(const Mode& mode) const {
  auto i = index_of(mode);
  if (!i) throw Error(ErrorKind::UnknownMode, "no mode '" + mode_to_string(mode) + "' in " + to_string());
  return interface_at(*i);
}

bool ModalBox::mode_independent() const {
  for (const auto& f : data_->factors) {
    for (const auto& b : f.boxes)
      if (!(b == f.boxes.front())) return false;
  }
  return true;
}

std::string ModalBox::to_string() const {
  const auto& fs = data_->factors;
  if (fs.empty()) return "unit";
  std::string s;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    if (i) s += " * ";
    s += "{";
    for (std::size_t j = 0; j < fs[i].labels.size(); ++j) {
      if (j) s += ", ";
      s += fs[i].labels[j] + ": " + fs[i].boxes[j].to_string();
    }
    s += "}";
  }
  return s;
}

bool operator==(const ModalBox& a, const ModalBox& b) {
  return a.data_ == b.data_ || a.data_->factors == b.data_->factors;
}

ModalBox tensor(std::span<const ModalBox> parts) {
  std::vector<ModalFactor> fs;
  const ModalBox* only = nullptr;
  std::size_t nonunit = 0;
  for (const auto& p : parts) {
    if (!p.factors().empty()) {
      ++nonunit;
      only = &p;
    }
    fs.insert(fs.end(), p.factors().begin(), p.factors().end());
  }
  if (nonunit == 0) return ModalBox{};
  if (nonunit == 1) return *only;
  return ModalBox::from_factors(std::move(fs));
}

ModalBox tensor(const ModalBox& a, const ModalBox& b) {
  const ModalBox parts[] = {a, b};
  return tensor(std::span<const ModalBox>(parts));
}

// ---------------------------------------------------------------------------

struct MdnMorphism::Impl {
  ModalBox source;
  ModalBox target;
  Impl(ModalBox s, ModalBox t) : source(std::move(s)), target(std::move(t)) {}
  virtual ~Impl() = default;
  virtual Event compute(std::uint64_t index) const = 0;
};

namespace {

using Impl = MdnMorphism::Impl;

struct TableImpl final : Impl {
  std::vector<Event> events;
  TableImpl(ModalBox s, ModalBox t, std::vector<Event> e) : Impl(std::move(s), std::move(t)), events(std::move(e)) {}
  Event compute(std::uint64_t index) const override { return events.at(index); }
};

struct IdentityImpl final : Impl {
  explicit IdentityImpl(const ModalBox& b) : Impl(b, b) {}
  Event compute(std::uint64_t index) const override {
    return Event{identity_wd(source.interface_at(index)), source.mode_at(index)};
  }
};

struct SymmetryImpl final : Impl {
  ModalBox a, b;
  SymmetryImpl(ModalBox a_, ModalBox b_) : Impl(tensor(a_, b_), tensor(b_, a_)), a(std::move(a_)), b(std::move(b_)) {}
  Event compute(std::uint64_t index) const override {
    auto ia = index / b.mode_count();
    auto ib = index % b.mode_count();
    Mode sigma = b.mode_at(ib);
    auto ma = a.mode_at(ia);
    sigma.insert(sigma.end(), ma.begin(), ma.end());
    return Event{symmetry_wd(a.interface_at(ia), b.interface_at(ib)), std::move(sigma)};
  }
};

void check_square(const Impl& impl, std::uint64_t index, const Event& e) {
  auto fail = [&](const std::string& why) {
    throw Error(ErrorKind::CommutingSquareViolation,
                "mode " + mode_to_string(impl.source.mode_at(index)) + ": " + why);
  };
  if (!(e.diagram.source() == impl.source.interface_at(index))) {
    fail("diagram source " + e.diagram.source().to_string() + " is not the interface of the mode");
  }
  auto j = impl.target.index_of(e.sigma);
  if (!j) fail("sigma leaves the target modes (" + mode_to_string(e.sigma) + ")");
  if (!(e.diagram.target() == impl.target.interface_at(*j))) {
    fail("diagram target " + e.diagram.target().to_string() + " is not the interface of target mode " +
         mode_to_string(e.sigma));
  }
}

// Memoizes computed events unless a fault is being injected, so that a
// faulty evaluation never leaks into later clean ones. The commuting square
// is checked on every fresh computation.
class Memo {
 public:
  template <class F>
  Event get(const Impl& impl, std::uint64_t index, F&& compute) const {
    if (fault::active() != fault::Site::None) {
      Event e = compute();
      check_square(impl, index, e);
      return e;
    }
    {
      std::lock_guard lock(mu_);
      auto it = cache_.find(index);
      if (it != cache_.end()) return it->second;
    }
    Event e = compute();
    check_square(impl, index, e);
    std::lock_guard lock(mu_);
    cache_.emplace(index, e);
    return e;
  }

 private:
  mutable std::mutex mu_;
  mutable std::unordered_map<std::uint64_t, Event> cache_;
};

struct TensorImpl final : Impl {
  std::vector<MdnMorphism> parts;
  Memo memo;
  TensorImpl(ModalBox s, ModalBox t, std::vector<MdnMorphism> p)
      : Impl(std::move(s), std::move(t)), parts(std::move(p)) {}

  Event compute(std::uint64_t index) const override {
    return memo.get(*this, index, [&] {
      std::vector<std::uint64_t> sub(parts.size());
      for (std::size_t k = parts.size(); k-- > 0;) {
        auto n = parts[k].source().mode_count();
        sub[k] = index % n;
        index /= n;
      }
      std::vector<WiringDiagram> diagrams;
      Mode sigma;
      for (std::size_t k = 0; k < parts.size(); ++k) {
        auto e = parts[k].event_at(sub[k]);
        diagrams.push_back(std::move(e.diagram));
        sigma.insert(sigma.end(), e.sigma.begin(), e.sigma.end());
      }
      return Event{tensor_wd(diagrams), std::move(sigma)};
    });
  }
};

// Moves the first inner-input feed that has a same-typed alternative to the
// next such candidate.
WiringDiagram rotate_one_feed(const WiringDiagram& d) {
  const auto& x = d.source();
  const auto& z = d.target();
  std::vector<Feed> candidates;
  auto in_feeds = std::vector<Feed>(d.in_feeds().begin(), d.in_feeds().end());
  for (std::size_t a = 0; a < in_feeds.size(); ++a) {
    const auto& type = x.inputs.port(a).type;
    candidates.clear();
    for (std::size_t j = 0; j < z.inputs.size(); ++j)
      if (z.inputs.port(j).type == type) candidates.push_back(Feed{Feed::From::TargetInput, j});
    for (std::size_t j = 0; j < x.outputs.size(); ++j)
      if (x.outputs.port(j).type == type) candidates.push_back(Feed{Feed::From::SourceOutput, j});
    if (candidates.size() < 2) continue;
    auto it = std::find(candidates.begin(), candidates.end(), in_feeds[a]);
    auto next = (static_cast<std::size_t>(it - candidates.begin()) + 1) % candidates.size();
    in_feeds[a] = candidates[next];
    return WiringDiagram::from_feeds(x, z, std::move(in_feeds),
                                     std::vector<std::size_t>(d.out_feeds().begin(), d.out_feeds().end()));
  }
  auto out_feeds = std::vector<std::size_t>(d.out_feeds().begin(), d.out_feeds().end());
  for (std::size_t j = 0; j < out_feeds.size(); ++j) {
    const auto& type = z.outputs.port(j).type;
    for (std::size_t step = 1; step < x.outputs.size(); ++step) {
      auto k = (out_feeds[j] + step) % x.outputs.size();
      if (x.outputs.port(k).type == type) {
        out_feeds[j] = k;
        return WiringDiagram::from_feeds(x, z, std::move(in_feeds), std::move(out_feeds));
      }
    }
  }
  return d;
}

struct CompositeImpl final : Impl {
  MdnMorphism f0, f1;
  Memo memo;
  CompositeImpl(MdnMorphism a, MdnMorphism b) : Impl(a.source(), b.target()), f0(std::move(a)), f1(std::move(b)) {}

  Event compute(std::uint64_t index) const override {
    return memo.get(*this, index, [&] {
      auto e0 = f0.event_at(index);
      auto j = f1.source().index_of(e0.sigma);
      if (!j) throw Error(ErrorKind::UnknownMode, "intermediate mode " + mode_to_string(e0.sigma) + " missing");
      auto e1 = f1.event_at(*j);
      Event e{compose_wd(e0.diagram, e1.diagram), std::move(e1.sigma)};
      switch (fault::active()) {
        case fault::Site::Compose:
          e.diagram = rotate_one_feed(e.diagram);
          break;
        case fault::Site::Sigma:
          e.sigma = f1.event_at(0).sigma;
          break;
        default:
          break;
      }
      return e;
    });
  }
};

}  // namespace

const ModalBox& MdnMorphism::source() const { return impl_->source; }
const ModalBox& MdnMorphism::target() const { return impl_->target; }

Event MdnMorphism::event_at(std::uint64_t index) const {
  if (index >= impl_->source.mode_count()) throw Error(ErrorKind::UnknownMode, "mode index out of range");
  return impl_->compute(index);
}

Event MdnMorphism::event(const Mode& mode) const {
  auto i = impl_->source.index_of(mode);
  if (!i) throw Error(ErrorKind::UnknownMode, "no source mode '" + mode_to_string(mode) + "'");
  return event_at(*i);
}

std::vector<std::pair<Mode, Event>> MdnMorphism::tabulate() const {
  std::vector<std::pair<Mode, Event>> out;
  for (std::uint64_t i = 0; i < source().mode_count(); ++i) out.emplace_back(source().mode_at(i), event_at(i));
  return out;
}

std::vector<WiringDiagram> MdnMorphism::image() const {
  std::vector<WiringDiagram> out;
  for (std::uint64_t i = 0; i < source().mode_count(); ++i) {
    auto e = event_at(i);
    if (std::find(out.begin(), out.end(), e.diagram) == out.end()) out.push_back(std::move(e.diagram));
  }
  return out;
}

bool operator==(const MdnMorphism& a, const MdnMorphism& b) {
  if (a.impl_ == b.impl_) return true;
  if (!(a.source() == b.source()) || !(a.target() == b.target())) return false;
  for (std::uint64_t i = 0; i < a.source().mode_count(); ++i) {
    auto ea = a.event_at(i);
    auto eb = b.event_at(i);
    if (ea.sigma != eb.sigma || !(ea.diagram == eb.diagram)) return false;
  }
  return true;
}

MdnMorphism make_mdn_morphism(ModalBox source, ModalBox target, const std::map<Mode, Event>& table) {
  for (const auto& [m, e] : table) {
    if (!source.contains(m)) throw Error(ErrorKind::UnknownMode, "event given for unknown mode '" + mode_to_string(m) + "'");
  }
  std::vector<Event> events;
  events.reserve(source.mode_count());
  for (std::uint64_t i = 0; i < source.mode_count(); ++i) {
    auto m = source.mode_at(i);
    auto it = table.find(m);
    if (it == table.end()) throw Error(ErrorKind::PartialMap, "no event for mode '" + mode_to_string(m) + "'");
    if (!target.contains(it->second.sigma)) {
      throw Error(ErrorKind::UnknownMode, "sigma sends mode '" + mode_to_string(m) + "' to unknown mode '" +
                                              mode_to_string(it->second.sigma) + "'");
    }
    events.push_back(it->second);
  }
  auto impl = std::make_shared<TableImpl>(std::move(source), std::move(target), std::move(events));
  for (std::uint64_t i = 0; i < impl->events.size(); ++i) check_square(*impl, i, impl->events[i]);
  return MdnMorphism(std::move(impl));
}

MdnMorphism identity_mdn(const ModalBox& box) { return MdnMorphism(std::make_shared<IdentityImpl>(box)); }

MdnMorphism compose_mdn(const MdnMorphism& f0, const MdnMorphism& f1) {
  if (!(f0.target() == f1.source())) {
    throw Error(ErrorKind::BoxMismatch, "cannot compose: " + f0.target().to_string() + " vs " + f1.source().to_string());
  }
  return MdnMorphism(std::make_shared<CompositeImpl>(f0, f1));
}

MdnMorphism tensor_mdn(std::span<const MdnMorphism> parts) {
  std::vector<MdnMorphism> flat;
  for (const auto& p : parts) {
    if (auto t = std::dynamic_pointer_cast<const TensorImpl>(p.impl())) {
      flat.insert(flat.end(), t->parts.begin(), t->parts.end());
    } else if (!p.source().factors().empty() || !p.target().factors().empty()) {
      flat.push_back(p);
    }
  }
  if (flat.empty()) return identity_mdn(ModalBox{});
  if (flat.size() == 1) return flat.front();
  std::vector<ModalBox> sources, targets;
  for (const auto& p : flat) {
    sources.push_back(p.source());
    targets.push_back(p.target());
  }
  return MdnMorphism(std::make_shared<TensorImpl>(tensor(sources), tensor(targets), std::move(flat)));
}

MdnMorphism tensor_mdn(const MdnMorphism& f, const MdnMorphism& g) {
  const MdnMorphism parts[] = {f, g};
  return tensor_mdn(std::span<const MdnMorphism>(parts));
}

MdnMorphism symmetry_mdn(const ModalBox& a, const ModalBox& b) {
  return MdnMorphism(std::make_shared<SymmetryImpl>(a, b));
}

MdnMorphism include_wd(const WiringDiagram& phi) {
  return make_mdn_morphism(ModalBox::of_box(phi.source()), ModalBox::of_box(phi.target()),
                           {{Mode{"*"}, Event{phi, Mode{"*"}}}});
}

bool equal_up_to_mode_names(const MdnMorphism& a, const MdnMorphism& b) {
  const auto n = a.source().mode_count();
  if (n != b.source().mode_count() || a.target().mode_count() != b.target().mode_count()) return false;
  for (std::uint64_t i = 0; i < a.target().mode_count(); ++i) {
    if (!(a.target().interface_at(i) == b.target().interface_at(i))) return false;
  }
  for (std::uint64_t i = 0; i < n; ++i) {
    auto ea = a.event_at(i);
    auto eb = b.event_at(i);
    if (!(ea.diagram == eb.diagram)) return false;
    if (a.target().index_of(ea.sigma) != b.target().index_of(eb.sigma)) return false;
  }
  return true;
}

MdnOperadArrow mdn_operadic_arrow(std::vector<ModalBox> sources, MdnMorphism morphism) {
  if (!(tensor(sources) == morphism.source())) {
    throw Error(ErrorKind::BoxMismatch, "morphism source is not the tensor of the listed sources");
  }
  ModalBox target = morphism.target();
  return MdnOperadArrow{std::move(sources), std::move(target), std::move(morphism)};
}

MdnOperadArrow mdn_identity_arrow(const ModalBox& box) { return MdnOperadArrow{{box}, box, identity_mdn(box)}; }

MdnOperadArrow mdn_operadic_compose(const MdnOperadArrow& outer, std::span<const MdnOperadArrow> inners) {
  if (inners.size() != outer.sources.size()) {
    throw Error(ErrorKind::ArityMismatch, "outer arrow takes " + std::to_string(outer.sources.size()) +
                                              " inputs, got " + std::to_string(inners.size()));
  }
  std::vector<ModalBox> sources;
  std::vector<MdnMorphism> parts;
  for (std::size_t i = 0; i < inners.size(); ++i) {
    if (!(inners[i].target == outer.sources[i])) {
      throw Error(ErrorKind::BoxMismatch, "inner arrow " + std::to_string(i) + " does not land in outer source " +
                                              std::to_string(i));
    }
    sources.insert(sources.end(), inners[i].sources.begin(), inners[i].sources.end());
    parts.push_back(inners[i].morphism);
  }
  auto morphism = compose_mdn(tensor_mdn(parts), outer.morphism);
  return MdnOperadArrow{std::move(sources), outer.target, std::move(morphism)};
}

}  // namespace mnet

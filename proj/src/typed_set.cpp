#include "modalnet/typed_set.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <limits>
#include <mutex>
#include <set>
#include <unordered_map>

#include "modalnet/error.hpp"

namespace mnet {

namespace {

struct NameKey {
  std::size_t tag;
  std::string_view rest;
};

NameKey key_of(std::string_view name) {
  auto slash = name.find('/');
  if (slash == std::string_view::npos) return {0, name};
  std::size_t tag = 0;
  std::from_chars(name.data(), name.data() + slash, tag);
  return {tag, name.substr(slash + 1)};
}

bool name_less(std::string_view a, std::string_view b) {
  auto ka = key_of(a);
  auto kb = key_of(b);
  if (ka.tag != kb.tag) return ka.tag < kb.tag;
  return ka.rest < kb.rest;
}

}  // namespace

struct TypedFinSet::Data {
  std::vector<Port> ports;
  std::size_t leaf_count = 0;  // 0 for empty, 1 for plain sets
  std::size_t hash = 0;
};

namespace {

std::size_t hash_ports(const std::vector<Port>& ports) {
  std::size_t h = ports.size();
  auto mix = [&h](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
  for (const auto& p : ports) {
    mix(std::hash<std::string>{}(p.name));
    mix(static_cast<std::size_t>(p.type.kind()));
    mix(static_cast<std::size_t>(p.type.lo()) * 31 + static_cast<std::size_t>(p.type.hi()));
    mix(p.type.labels().size() * 131 + p.type.components().size());
  }
  return h;
}

// Equal port sets share one Data, so equality of interned sets is a pointer
// comparison. Entries die with their last owner and are pruned lazily.
class Interner {
 public:
  template <class Make>
  std::shared_ptr<const TypedFinSet::Data> intern(std::size_t hash, const std::vector<Port>& ports, Make&& make);

 private:
  std::mutex mu_;
  std::unordered_map<std::size_t, std::vector<std::weak_ptr<const TypedFinSet::Data>>> table_;
};

}  // namespace

TypedFinSet::TypedFinSet() {
  static const auto empty = std::make_shared<const Data>();
  data_ = empty;
}

std::span<const Port> TypedFinSet::ports() const { return data_->ports; }
std::size_t TypedFinSet::size() const { return data_->ports.size(); }

std::optional<std::size_t> TypedFinSet::index_of(std::string_view name) const {
  const auto& ports = data_->ports;
  auto it = std::lower_bound(ports.begin(), ports.end(), name,
                             [](const Port& p, std::string_view n) { return name_less(p.name, n); });
  if (it != ports.end() && it->name == name) return static_cast<std::size_t>(it - ports.begin());
  return std::nullopt;
}

bool TypedFinSet::is_union() const { return data_->leaf_count > 1; }

std::vector<TypedFinSet> TypedFinSet::summands() const {
  if (empty()) return {};
  if (!is_union()) return {*this};
  std::vector<std::vector<Port>> groups(data_->leaf_count);
  for (const auto& p : data_->ports) {
    auto k = key_of(p.name);
    groups.at(k.tag).push_back(Port{std::string(k.rest), p.type});
  }
  std::vector<TypedFinSet> out;
  out.reserve(groups.size());
  for (auto& g : groups) out.push_back(from_ports_unchecked(std::move(g)));
  return out;
}

std::string TypedFinSet::to_string() const {
  std::string s = "{";
  for (std::size_t i = 0; i < size(); ++i) {
    if (i) s += ", ";
    s += port(i).name + ": " + port(i).type.to_string();
  }
  return s + "}";
}

bool operator==(const TypedFinSet& a, const TypedFinSet& b) {
  return a.data_ == b.data_ || (a.data_->hash == b.data_->hash && a.data_->ports == b.data_->ports);
}

namespace {

template <class Make>
std::shared_ptr<const TypedFinSet::Data> Interner::intern(std::size_t hash, const std::vector<Port>& ports,
                                                          Make&& make) {
  std::lock_guard lock(mu_);
  auto& bucket = table_[hash];
  std::erase_if(bucket, [](const auto& w) { return w.expired(); });
  for (const auto& w : bucket) {
    if (auto live = w.lock(); live && live->ports == ports) return live;
  }
  std::shared_ptr<const TypedFinSet::Data> fresh = make();
  bucket.push_back(fresh);
  return fresh;
}

Interner& interner() {
  static Interner* instance = new Interner;  // outlives every static TypedFinSet
  return *instance;
}

}  // namespace

TypedFinSet TypedFinSet::from_ports_unchecked(std::vector<Port> ports) {
  if (ports.empty()) return TypedFinSet{};
  std::sort(ports.begin(), ports.end(), [](const Port& a, const Port& b) { return name_less(a.name, b.name); });
  const auto hash = hash_ports(ports);
  TypedFinSet s;
  s.data_ = interner().intern(hash, ports, [&] {
    auto data = std::make_shared<Data>();
    std::size_t leaves = 1;
    for (const auto& p : ports) {
      if (p.name.find('/') != std::string::npos) leaves = std::max(leaves, key_of(p.name).tag + 1);
    }
    data->leaf_count = leaves;
    data->hash = hash;
    data->ports = std::move(ports);
    return data;
  });
  return s;
}

TypedFinSet make_typed_finset(std::vector<Port> ports) {
  std::set<std::string_view> seen;
  for (const auto& p : ports) {
    if (p.name.empty()) throw Error(ErrorKind::InvalidPortName, "port name must be nonempty");
    if (p.name.find('/') != std::string::npos) {
      throw Error(ErrorKind::InvalidPortName, "port name '" + p.name + "' uses the reserved character '/'");
    }
    if (!seen.insert(p.name).second) {
      throw Error(ErrorKind::DuplicatePortName, "port '" + p.name + "' declared twice");
    }
  }
  return TypedFinSet::from_ports_unchecked(std::move(ports));
}

TypedFinSet make_typed_finset(std::initializer_list<std::pair<std::string, ValueType>> ports) {
  std::vector<Port> v;
  for (const auto& [n, t] : ports) v.push_back(Port{n, t});
  return make_typed_finset(std::move(v));
}

std::string union_tag(std::size_t summand_index, std::string_view name) {
  std::string s = std::to_string(summand_index);
  s += '/';
  s += name;
  return s;
}

TypedFinSet disjoint_union(std::span<const TypedFinSet> parts) {
  std::size_t nonempty = 0;
  const TypedFinSet* only = nullptr;
  for (const auto& p : parts) {
    if (!p.empty()) {
      ++nonempty;
      only = &p;
    }
  }
  if (nonempty == 0) return TypedFinSet{};
  if (nonempty == 1) return *only;

  std::vector<Port> ports;
  std::size_t offset = 0;
  for (const auto& part : parts) {
    if (part.empty()) continue;
    std::size_t leaves = 1;
    if (part.is_union()) {
      leaves = 0;
      for (const auto& p : part.ports()) {
        auto k = key_of(p.name);
        leaves = std::max(leaves, k.tag + 1);
        ports.push_back(Port{union_tag(offset + k.tag, k.rest), p.type});
      }
    } else {
      for (const auto& p : part.ports()) ports.push_back(Port{union_tag(offset, p.name), p.type});
    }
    offset += leaves;
  }
  return TypedFinSet::from_ports_unchecked(std::move(ports));
}

TypedFinSet disjoint_union(const TypedFinSet& left, const TypedFinSet& right) {
  const TypedFinSet parts[] = {left, right};
  return disjoint_union(std::span<const TypedFinSet>(parts));
}

// ---------------------------------------------------------------------------

TypedFunction TypedFunction::from_indices(TypedFinSet domain, TypedFinSet codomain,
                                          std::vector<std::size_t> targets) {
  if (targets.size() != domain.size()) {
    throw Error(ErrorKind::PartialMap, "typed function covers " + std::to_string(targets.size()) + " of " +
                                           std::to_string(domain.size()) + " domain ports");
  }
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] >= codomain.size()) {
      throw Error(ErrorKind::UnknownTarget, "port '" + domain.port(i).name + "' maps outside the codomain");
    }
    if (!(domain.port(i).type == codomain.port(targets[i]).type)) {
      throw Error(ErrorKind::TypeMismatch, "port '" + domain.port(i).name + "' : " +
                                               domain.port(i).type.to_string() + " maps to '" +
                                               codomain.port(targets[i]).name + "' : " +
                                               codomain.port(targets[i]).type.to_string());
    }
  }
  return TypedFunction(std::move(domain), std::move(codomain), std::move(targets));
}

TypedFunction TypedFunction::make(TypedFinSet domain, TypedFinSet codomain,
                                  const std::map<std::string, std::string>& map) {
  std::vector<std::size_t> targets(domain.size());
  for (const auto& [from, to] : map) {
    if (!domain.contains(from)) {
      throw Error(ErrorKind::UnknownTarget, "'" + from + "' is not a port of the domain");
    }
  }
  for (std::size_t i = 0; i < domain.size(); ++i) {
    auto it = map.find(domain.port(i).name);
    if (it == map.end()) throw Error(ErrorKind::PartialMap, "port '" + domain.port(i).name + "' is unmapped");
    auto j = codomain.index_of(it->second);
    if (!j) {
      throw Error(ErrorKind::UnknownTarget,
                  "port '" + it->first + "' maps to '" + it->second + "' which is not in the codomain");
    }
    targets[i] = *j;
  }
  return from_indices(std::move(domain), std::move(codomain), std::move(targets));
}

TypedFunction TypedFunction::identity(const TypedFinSet& set) {
  std::vector<std::size_t> t(set.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = i;
  return TypedFunction(set, set, std::move(t));
}

const std::string& TypedFunction::apply(std::string_view domain_port) const {
  auto i = domain_.index_of(domain_port);
  if (!i) throw Error(ErrorKind::UnknownTarget, "'" + std::string(domain_port) + "' is not in the domain");
  return codomain_.port(targets_[*i]).name;
}

TypedFunction compose(const TypedFunction& outer, const TypedFunction& inner) {
  if (!(inner.codomain() == outer.domain())) {
    throw Error(ErrorKind::DomainMismatch, "cannot compose: codomain " + inner.codomain().to_string() +
                                               " differs from domain " + outer.domain().to_string());
  }
  std::vector<std::size_t> t(inner.domain().size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = outer.targets()[inner.targets()[i]];
  return TypedFunction::from_indices(inner.domain(), outer.codomain(), std::move(t));
}

// ---------------------------------------------------------------------------

Assignment Assignment::make(TypedFinSet over, std::vector<Value> values) {
  if (values.size() != over.size()) {
    throw Error(ErrorKind::PartialMap, "assignment has " + std::to_string(values.size()) + " values for " +
                                           std::to_string(over.size()) + " ports");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    auto c = over.port(i).type.coerce(values[i]);
    if (!c) {
      throw Error(ErrorKind::InvalidValue, "value " + values[i].to_string() + " is not a member of " +
                                               over.port(i).type.to_string() + " (port '" +
                                               over.port(i).name + "')");
    }
    values[i] = std::move(*c);
  }
  return unchecked(std::move(over), std::move(values));
}

Assignment Assignment::from_map(TypedFinSet over, const std::map<std::string, Value>& values) {
  for (const auto& [k, v] : values) {
    if (!over.contains(k)) throw Error(ErrorKind::DomainMismatch, "'" + k + "' is not a port of " + over.to_string());
  }
  std::vector<Value> vs;
  vs.reserve(over.size());
  for (const auto& p : over.ports()) {
    auto it = values.find(p.name);
    if (it == values.end()) throw Error(ErrorKind::PartialMap, "port '" + p.name + "' has no value");
    vs.push_back(it->second);
  }
  return make(std::move(over), std::move(vs));
}

Assignment Assignment::unchecked(TypedFinSet over, std::vector<Value> values) {
  Assignment a;
  a.over_ = std::move(over);
  a.values_ = std::move(values);
  return a;
}

const Value& Assignment::at(std::string_view port) const {
  auto i = over_.index_of(port);
  if (!i) throw Error(ErrorKind::DomainMismatch, "no port '" + std::string(port) + "' in " + over_.to_string());
  return values_[*i];
}

std::map<std::string, Value> Assignment::to_map() const {
  std::map<std::string, Value> m;
  for (std::size_t i = 0; i < values_.size(); ++i) m.emplace(over_.port(i).name, values_[i]);
  return m;
}

std::string Assignment::to_string() const {
  std::string s = "{";
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (i) s += ", ";
    s += over_.port(i).name + "=" + values_[i].to_string();
  }
  return s + "}";
}

Assignment pullback(const TypedFunction& q, const Assignment& asg) {
  if (!(asg.over() == q.codomain())) {
    throw Error(ErrorKind::DomainMismatch, "pullback expects an assignment over " + q.codomain().to_string() +
                                               ", got one over " + asg.over().to_string());
  }
  std::vector<Value> out;
  out.reserve(q.domain().size());
  for (auto t : q.targets()) out.push_back(asg[t]);
  return Assignment::unchecked(q.domain(), std::move(out));
}

Assignment merge_assignment(const Assignment& left, const Assignment& right) {
  std::vector<Value> values;
  values.reserve(left.values().size() + right.values().size());
  values.insert(values.end(), left.values().begin(), left.values().end());
  values.insert(values.end(), right.values().begin(), right.values().end());
  return Assignment::unchecked(disjoint_union(left.over(), right.over()), std::move(values));
}

std::vector<Assignment> split_assignment(const Assignment& asg, std::span<const TypedFinSet> parts) {
  if (!(disjoint_union(parts) == asg.over())) {
    throw Error(ErrorKind::NotAUnion, asg.over().to_string() + " is not the disjoint union of the given parts");
  }
  std::vector<Assignment> out;
  out.reserve(parts.size());
  std::size_t offset = 0;
  for (const auto& p : parts) {
    std::vector<Value> vs(asg.values().begin() + offset, asg.values().begin() + offset + p.size());
    offset += p.size();
    out.push_back(Assignment::unchecked(p, std::move(vs)));
  }
  return out;
}

std::pair<Assignment, Assignment> split_assignment(const Assignment& asg, const TypedFinSet& left,
                                                   const TypedFinSet& right) {
  const TypedFinSet parts[] = {left, right};
  auto v = split_assignment(asg, std::span<const TypedFinSet>(parts));
  return {std::move(v[0]), std::move(v[1])};
}

bool is_finite(const TypedFinSet& set) {
  for (const auto& p : set.ports())
    if (!p.type.is_finite()) return false;
  return true;
}

std::uint64_t assignment_count(const TypedFinSet& set) {
  std::uint64_t n = 1;
  for (const auto& p : set.ports()) {
    auto k = p.type.cardinality();
    if (!k) throw Error(ErrorKind::InfiniteType, "port '" + p.name + "' has infinite type " + p.type.to_string());
    if (*k != 0 && n > std::numeric_limits<std::uint64_t>::max() / *k) {
      n = std::numeric_limits<std::uint64_t>::max();
    } else {
      n *= *k;
    }
  }
  return n;
}

Assignment assignment_at(const TypedFinSet& set, std::uint64_t index) {
  std::vector<Value> vs(set.size());
  for (std::size_t i = set.size(); i-- > 0;) {
    const auto& t = set.port(i).type;
    auto k = t.cardinality();
    if (!k) throw Error(ErrorKind::InfiniteType, "port '" + set.port(i).name + "' has infinite type");
    vs[i] = t.value_at(index % *k);
    index /= *k;
  }
  return Assignment::unchecked(set, std::move(vs));
}

std::vector<Assignment> enumerate_assignments(const TypedFinSet& set) {
  auto n = assignment_count(set);
  std::vector<Assignment> out;
  out.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) out.push_back(assignment_at(set, i));
  return out;
}

Assignment sample_assignment(const TypedFinSet& set, std::mt19937_64& rng) {
  std::vector<Value> vs;
  vs.reserve(set.size());
  for (const auto& p : set.ports()) vs.push_back(p.type.sample(rng));
  return Assignment::unchecked(set, std::move(vs));
}

}  // namespace mnet

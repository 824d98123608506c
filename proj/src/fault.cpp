#include "modalnet/fault.hpp"

#include <array>
#include <atomic>

namespace mnet::fault {

namespace {
std::atomic<Site> g_site{Site::None};
constexpr std::array<Site, 5> kSites = {Site::Compose, Site::Sigma, Site::ComposeWd, Site::RouteIn,
                                        Site::RouteOut};
}  // namespace

Site active() { return g_site.load(std::memory_order_relaxed); }

const char* name(Site site) {
  switch (site) {
    case Site::None: return "none";
    case Site::Compose: return "compose";
    case Site::Sigma: return "sigma";
    case Site::ComposeWd: return "compose_wd";
    case Site::RouteIn: return "route_in";
    case Site::RouteOut: return "route_out";
  }
  return "none";
}

std::optional<Site> parse(std::string_view text) {
  if (text == "none") return Site::None;
  for (auto s : kSites)
    if (text == name(s)) return s;
  return std::nullopt;
}

std::span<const Site> all_sites() { return kSites; }

Scope::Scope(Site site) : previous_(g_site.exchange(site)) {}
Scope::~Scope() { g_site.store(previous_); }

}  // namespace mnet::fault

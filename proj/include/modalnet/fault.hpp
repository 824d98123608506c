#pragma once

#include <optional>
#include <span>
#include <string_view>

// Deliberate defects that can be switched on to confirm that the law checks
// notice broken composition or routing. Off unless a Scope is alive.
namespace mnet::fault {

enum class Site {
  None,
  Compose,    // composite event map with one feed rotated per mode
  Sigma,      // composite mode map collapsed onto a single intermediate mode
  ComposeWd,  // feedback chase in wiring composition lands on the wrong output
  RouteIn,    // inbound routing swaps two same-typed inner inputs
  RouteOut,   // export routing swaps two same-typed outer outputs
};

Site active();
const char* name(Site site);
std::optional<Site> parse(std::string_view text);
std::span<const Site> all_sites();

class Scope {
 public:
  explicit Scope(Site site);
  ~Scope();
  Scope(const Scope&) = delete;
  Scope& operator=(const Scope&) = delete;

 private:
  Site previous_;
};

}  // namespace mnet::fault

#include "modalnet/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>

#include "CLI11.hpp"
#include "modalnet/dsl/dot.hpp"
#include "modalnet/dsl/elaborate.hpp"
#include "modalnet/json_io.hpp"
#include "modalnet/laws.hpp"

namespace mnet::cli {

namespace {

using json::Json;

struct Config {
  std::string file;
  std::string name;
  std::vector<std::string> consts;
  bool json = false;
  bool strict_ports = false;
  std::size_t steps = 10;
  std::uint64_t seed = 0;
  std::size_t count = 200;
  bool compare = false;
  bool hierarchical = false;
  bool default_state = false;
  std::string init;
  std::string inputs;
  std::string mode;
  std::string format = "jsonl";
  std::string fault;
  std::string out;
  std::size_t max_events = 64;
};

// Usage problems found after argument parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string resolve(const std::string& path) {
  namespace fs = std::filesystem;
  if (path.empty() || fs::exists(path) || fs::path(path).is_absolute()) return path;
  const char* env = std::getenv("MODALNET_FIXTURES");
  for (const char* dir : std::initializer_list<const char*>{env, MODALNET_FIXTURES_DIR}) {
    if (dir && *dir && fs::exists(fs::path(dir) / path)) return (fs::path(dir) / path).string();
  }
  return path;
}

std::map<std::string, std::string> overrides(const Config& c) {
  std::map<std::string, std::string> m;
  for (const auto& kv : c.consts) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--const expects name=value, got '" + kv + "'");
    m[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  return m;
}

dsl::Elaboration load(const Config& c) { return dsl::load_file(resolve(c.file), overrides(c)); }

Json diagnostic_json(const dsl::Diagnostic& d, const std::string& file, const char* severity) {
  Json j;
  j["severity"] = severity;
  j["kind"] = to_string(d.kind);
  j["file"] = file;
  j["line"] = d.span.line;
  j["col"] = d.span.col;
  j["message"] = d.message;
  if (!d.expected.empty()) j["expected"] = d.expected;
  return j;
}

std::string diagnostic_text(const dsl::Diagnostic& d, const std::string& file, const char* severity) {
  std::string s = file + ":" + std::to_string(d.span.line) + ":" + std::to_string(d.span.col) + ": " + severity + ": " +
                  to_string(d.kind) + ": " + d.message;
  if (!d.expected.empty()) {
    s += " (expected";
    for (std::size_t i = 0; i < d.expected.size(); ++i) s += (i ? ", " : " ") + d.expected[i];
    s += ")";
  }
  return s;
}

void report_warnings(const Config& c, const dsl::Elaboration& el, std::ostream& err) {
  for (const auto& w : el.warnings) {
    if (c.json)
      err << diagnostic_json(w, c.file, "warning").dump() << "\n";
    else
      err << diagnostic_text(w, c.file, "warning") << "\n";
  }
}

// Where results go: --out PATH or the given stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw Error(ErrorKind::Io, "cannot write " + path);
      os_ = &file_;
    }
  }
  std::ostream& operator*() { return *os_; }

 private:
  std::ofstream file_;
  std::ostream* os_;
};

Mode parse_mode(const std::string& text) {
  Mode m;
  std::string part;
  std::istringstream in(text);
  while (std::getline(in, part, ',')) {
    part.erase(0, part.find_first_not_of(' '));
    part.erase(part.find_last_not_of(' ') + 1);
    m.push_back(part);
  }
  return m;
}

std::string mode_text(const Mode& m) {
  std::string s;
  for (std::size_t i = 0; i < m.size(); ++i) s += (i ? "," : "") + m[i];
  return s;
}

const dsl::Composition& find_composition(const dsl::Elaboration& el, const std::string& name) {
  auto it = el.compositions.find(name);
  if (it == el.compositions.end()) throw Error(ErrorKind::UnknownName, "no composition named '" + name + "'");
  return it->second;
}

int cmd_check(const Config& c, std::ostream& out) {
  std::vector<Json> diags;
  std::vector<std::string> lines;
  int code = kOk;
  try {
    auto el = load(c);
    for (const auto& w : el.warnings) {
      diags.push_back(diagnostic_json(w, c.file, "warning"));
      lines.push_back(diagnostic_text(w, c.file, "warning"));
    }
  } catch (const dsl::DslError& e) {
    diags.push_back(diagnostic_json(e.diagnostic(), c.file, "error"));
    lines.push_back(diagnostic_text(e.diagnostic(), c.file, "error"));
    code = e.kind() == ErrorKind::Io ? kUsage : kFailure;
  } catch (const Error& e) {
    dsl::Diagnostic d{e.kind(), {}, e.detail(), {}};
    diags.push_back(diagnostic_json(d, c.file, "error"));
    lines.push_back(c.file + ": error: " + e.what());
    code = e.kind() == ErrorKind::Io ? kUsage : kFailure;
  }
  if (c.json) {
    Json j;
    j["ok"] = code == kOk;
    j["diagnostics"] = diags;
    out << j.dump() << "\n";
  } else {
    for (const auto& l : lines) out << l << "\n";
    if (code == kOk) out << c.file << ": ok\n";
  }
  return code;
}

Json system_json(const ModalDynamicalSystem& d) {
  Json j;
  j["over"] = json::from_modal_box(d.over);
  j["states"] = json::from_state_space(d.states);
  j["default_state"] = d.default_state ? json::from_state(d.states, *d.default_state) : Json(nullptr);
  return j;
}

int cmd_flatten(const Config& c, std::ostream& out, std::ostream& err) {
  auto el = load(c);
  report_warnings(c, el, err);
  const auto& comp = find_composition(el, c.name);
  Json j;
  j["composition"] = c.name;
  j["leaves"] = comp.leaf_labels;
  j["morphism"] = json::from_morphism(comp.morphism, c.max_events);
  if (comp.network) {
    j["system"] = system_json(build_flat(*comp.network));
  } else {
    j["system"] = nullptr;
  }
  Sink sink(c.out, out);
  *sink << j.dump(2) << "\n";
  return kOk;
}

std::vector<std::string> output_columns(const ModalBox& box) {
  std::vector<std::string> cols;
  for (std::uint64_t i = 0; i < box.mode_count(); ++i) {
    for (const auto& p : box.interface(box.mode_at(i)).outputs.ports()) {
      if (std::find(cols.begin(), cols.end(), p.name) == cols.end()) cols.push_back(p.name);
    }
  }
  return cols;
}

std::string csv_cell(std::string s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return q + "\"";
}

int cmd_simulate(const Config& c, std::ostream& out, std::ostream& err) {
  if (!c.init.empty() && c.default_state) throw UsageError("--init and --default-state are exclusive");
  auto el = load(c);
  report_warnings(c, el, err);
  const auto& comp = find_composition(el, c.name);
  if (!comp.network) throw Error(ErrorKind::UnknownName, "composition '" + c.name + "' has boxes without dynamics");
  const auto& net = *comp.network;
  const auto system = c.hierarchical ? build_hierarchical(net) : build_flat(net);

  Value s0;
  if (!c.init.empty()) {
    Json j;
    try {
      j = Json::parse(dsl::read_file(resolve(c.init)));
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorKind::InitialStateError, std::string("initial state is not JSON: ") + e.what());
    }
    try {
      s0 = json::to_state(system.states, j);
    } catch (const Error& e) {
      throw Error(ErrorKind::InitialStateError, e.detail());
    }
  } else if (system.default_state) {
    s0 = *system.default_state;
  } else {
    throw Error(ErrorKind::InitialStateError, "no --init given and the system has no default state");
  }
  const InputTrace inputs = c.inputs.empty() ? InputTrace{} : json::parse_input_trace(dsl::read_file(resolve(c.inputs)));
  RunOptions opts;
  opts.strict_ports = c.strict_ports;
  opts.steps = c.steps;
  const auto trace = run(system, s0, inputs, opts);

  int code = kOk;
  if (c.compare) {
    const auto other = c.hierarchical ? build_flat(net) : build_hierarchical(net);
    const auto report = compare_traces(trace, run(other, s0, inputs, opts));
    if (!report.equal) {
      err << "traces diverge at step " << *report.first_divergence << ": " << report.detail << "\n";
      code = kFailure;
    }
  }

  Sink sink(c.out, out);
  if (c.format == "csv") {
    const auto cols = output_columns(system.over);
    *sink << "step,mode";
    for (const auto& col : cols) *sink << "," << csv_cell(col);
    *sink << "\n";
    for (const auto& t : trace) {
      *sink << t.index << "," << csv_cell(mode_text(t.mode));
      const auto values = t.output.to_map();
      for (const auto& col : cols) {
        auto it = values.find(col);
        *sink << "," << (it == values.end() ? "" : csv_cell(json::from_value(it->second).dump()));
      }
      *sink << "\n";
    }
  } else {
    for (const auto& t : trace) *sink << json::from_trace_step(system.states, t).dump() << "\n";
  }
  return code;
}

int cmd_render(const Config& c, std::ostream& out, std::ostream& err) {
  auto el = load(c);
  report_warnings(c, el, err);
  const MdnMorphism* f = nullptr;
  std::vector<std::string> labels;
  if (auto it = el.morphisms.find(c.name); it != el.morphisms.end()) {
    f = &it->second.morphism;
    labels = it->second.instances;
  } else {
    const auto& comp = find_composition(el, c.name);
    f = &comp.morphism;
    labels = comp.leaf_labels;
  }
  const Mode mode = c.mode.empty() ? f->source().mode_at(0) : parse_mode(c.mode);
  const std::string dot = dsl::emit_dot(*f, mode, labels, c.name);
  Sink sink(c.out, out);
  *sink << dot;
  return kOk;
}

int cmd_selftest(const Config& c, std::ostream& out) {
  laws::SuiteOptions o;
  o.seed = c.seed;
  o.count = c.count;
  std::vector<laws::LawResult> results;
  if (c.fault.empty()) {
    results = laws::run_all(o);
  } else {
    const auto site = fault::parse(c.fault);
    if (!site || *site == fault::Site::None) throw UsageError("unknown fault site '" + c.fault + "'");
    results.push_back(laws::negative_control(*site, o));
  }
  std::uint64_t witnesses = 0;
  Json suites = Json::array();
  for (const auto& r : results) {
    witnesses += r.failures;
    if (c.json) {
      Json j;
      j["suite"] = r.name;
      j["cases"] = r.cases;
      j["witnesses"] = r.failures;
      j["examples"] = r.examples;
      suites.push_back(j);
    } else {
      out << r.name << ": " << r.cases << " cases, " << r.failures << " witnesses\n";
      for (const auto& e : r.examples) out << "  " << e << "\n";
    }
  }
  if (c.json) {
    Json j;
    j["ok"] = witnesses == 0;
    j["witnesses"] = witnesses;
    j["suites"] = suites;
    out << j.dump() << "\n";
  } else {
    out << "total witnesses: " << witnesses << "\n";
  }
  return witnesses == 0 ? kOk : kFailure;
}

void report_error(const Config& c, const Error& e, std::ostream& err) {
  if (const auto* d = dynamic_cast<const dsl::DslError*>(&e)) {
    if (c.json)
      err << diagnostic_json(d->diagnostic(), c.file, "error").dump() << "\n";
    else
      err << diagnostic_text(d->diagnostic(), c.file, "error") << "\n";
    return;
  }
  if (c.json) {
    Json j;
    j["severity"] = "error";
    j["kind"] = to_string(e.kind());
    j["file"] = c.file;
    j["message"] = e.detail();
    err << j.dump() << "\n";
  } else {
    err << "error: " << e.what() << "\n";
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Config c;
  CLI::App app{"Modal dynamical networks: check, flatten, simulate and render .mdn files", "modalnet"};
  app.require_subcommand(1);
  app.add_flag("--json", c.json, "Machine-readable diagnostics");

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("file", c.file, ".mdn file (also looked up in $MODALNET_FIXTURES)")->required();
    sub->add_option("--const", c.consts, "Override a constant, name=value");
    sub->add_flag("--json", c.json, "Machine-readable diagnostics");
  };
  auto* check = app.add_subcommand("check", "Parse and elaborate a file");
  add_common(check);

  auto* flat = app.add_subcommand("flatten", "Compose a named composition into one morphism and system");
  add_common(flat);
  flat->add_option("name", c.name, "Composition name")->required();
  flat->add_option("--max-events", c.max_events, "Events written per morphism");
  flat->add_option("--out", c.out, "Output path");

  auto* sim = app.add_subcommand("simulate", "Run a composition and print its trace");
  add_common(sim);
  sim->add_option("name", c.name, "Composition name")->required();
  sim->add_option("--steps", c.steps, "Number of steps");
  sim->add_option("--inputs", c.inputs, "Input trace, JSON Lines of port values");
  sim->add_option("--init", c.init, "Initial state as JSON");
  sim->add_flag("--default-state", c.default_state, "Start from the declared default state");
  sim->add_flag("--strict-ports", c.strict_ports, "Reject inputs for ports the current mode lacks");
  sim->add_flag("--hierarchical", c.hierarchical, "Route level by level instead of through the flat composite");
  sim->add_flag("--compare", c.compare, "Run both evaluations and fail on divergence");
  sim->add_option("--format", c.format, "Trace format")->check(CLI::IsMember({"jsonl", "csv"}));
  sim->add_option("--out", c.out, "Output path");

  auto* render = app.add_subcommand("render", "Print the wiring of a morphism at one mode as DOT");
  add_common(render);
  render->add_option("name", c.name, "Morphism or composition name")->required();
  render->add_option("--mode", c.mode, "Source mode, comma-separated labels (default: the first mode)");
  render->add_option("--out", c.out, "Output path");

  auto* self = app.add_subcommand("selftest", "Run the law suites");
  self->add_option("--seed", c.seed, "Seed for generated cases");
  self->add_option("--count", c.count, "Generated cases per suite");
  self->add_option("--inject-fault", c.fault, "Run a negative control: compose, sigma, compose_wd, route_in, route_out");
  self->add_flag("--json", c.json, "Machine-readable output");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*check) return cmd_check(c, out);
    if (*flat) return cmd_flatten(c, out, err);
    if (*sim) return cmd_simulate(c, out, err);
    if (*render) return cmd_render(c, out, err);
    return cmd_selftest(c, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    report_error(c, e, err);
    return e.kind() == ErrorKind::Io ? kUsage : kFailure;
  }
}

}  // namespace mnet::cli

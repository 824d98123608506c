#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "modalnet/cli.hpp"
#include "modalnet/json_io.hpp"
#include "modalnet/mdn.hpp"
#include "support.hpp"

using mnet::json::Json;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = mnet::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string fixture(const char* name) { return std::string(MODALNET_FIXTURES_DIR) + "/" + name; }

fs::path scratch() {
  auto dir = fs::temp_directory_path() / "modalnet_cli_test";
  fs::create_directories(dir);
  return dir;
}

std::string write(const std::string& name, const std::string& text) {
  auto p = scratch() / name;
  std::ofstream(p) << text;
  return p.string();
}

std::vector<Json> lines(const std::string& text) {
  std::vector<Json> v;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) v.push_back(Json::parse(line));
  return v;
}

std::string blink_inputs(int left, int right) {
  std::string s = "{";
  for (int i = 0; i < 3; ++i) {
    s += "\"left[" + std::to_string(i) + "]\": " + std::to_string(left) + ", ";
    s += "\"right[" + std::to_string(i) + "]\": " + std::to_string(right) + (i < 2 ? ", " : "");
  }
  return s + "}\n";
}

}  // namespace

TEST_CASE("usage") {
  CHECK(cli({}).code == 2);
  CHECK(cli({"bogus"}).code == 2);
  CHECK(cli({"check"}).code == 2);
  auto help = cli({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("simulate") != std::string::npos);
  CHECK(cli({"simulate", fixture("retina.mdn"), "retina", "--format", "xml"}).code == 2);
}

TEST_CASE("check") {
  auto ok = cli({"check", fixture("retina.mdn")});
  CHECK(ok.code == 0);
  CHECK(ok.out.find(": ok") != std::string::npos);

  auto bad = cli({"check", std::string(MODALNET_TEST_DATA) + "/bad_sigma.mdn", "--json"});
  CHECK(bad.code == 1);
  auto j = Json::parse(bad.out);
  CHECK(j["ok"] == false);
  REQUIRE(j["diagnostics"].size() == 1);
  CHECK(j["diagnostics"][0]["kind"] == "CommutingSquareViolation");
  CHECK(j["diagnostics"][0]["line"] == 18);

  auto missing = cli({"check", "/nonexistent/x.mdn", "--json"});
  CHECK(missing.code == 2);
  CHECK(Json::parse(missing.out)["diagnostics"][0]["kind"] == "Io");

  auto syntax = cli({"check", write("unclosed.mdn", "box A {\n  in x : bit\n"), "--json"});
  CHECK(syntax.code == 1);
  auto d = Json::parse(syntax.out)["diagnostics"][0];
  CHECK(d["kind"] == "SyntaxError");
  CHECK(d["line"] == 3);
  CHECK_FALSE(d["expected"].empty());

  auto text = cli({"check", write("unclosed.mdn", "box A {\n  in x : bit\n")});
  CHECK(text.out.find("unclosed.mdn:3:1: error: SyntaxError") != std::string::npos);
}

TEST_CASE("constant overrides") {
  CHECK(cli({"check", fixture("eye.mdn"), "--const", "width=2"}).code == 0);
  CHECK(cli({"check", fixture("eye.mdn"), "--const", "width"}).code == 2);
  auto unknown = cli({"check", fixture("eye.mdn"), "--const", "nope=1", "--json"});
  CHECK(unknown.code == 1);
  CHECK(Json::parse(unknown.out)["diagnostics"][0]["kind"] == "UnknownName");
  auto typed = cli({"check", fixture("eye.mdn"), "--const", "width=0.5", "--json"});
  CHECK(Json::parse(typed.out)["diagnostics"][0]["kind"] == "DynamicsTypeError");
}

TEST_CASE("fixture directory lookup") {
  auto dir = scratch() / "fixtures";
  fs::create_directories(dir);
  fs::copy_file(fixture("retina.mdn"), dir / "only_here.mdn", fs::copy_options::overwrite_existing);
  CHECK(cli({"check", "only_here.mdn"}).code == 2);
  ::setenv("MODALNET_FIXTURES", dir.c_str(), 1);
  CHECK(cli({"check", "only_here.mdn"}).code == 0);
  ::unsetenv("MODALNET_FIXTURES");
  // Shipped fixtures are found by bare name.
  CHECK(cli({"check", "blink.mdn"}).code == 0);
}

TEST_CASE("flatten") {
  auto r = cli({"flatten", fixture("visual_system.mdn"), "visual_system", "--max-events", "1"});
  REQUIRE(r.code == 0);
  auto j = Json::parse(r.out);
  CHECK(j["leaves"].size() == 19);
  CHECK(j["morphism"]["source"]["tensor"].size() == 19);
  CHECK(j["morphism"]["truncated"] == true);
  CHECK(j["morphism"]["target"]["modes"].size() == 1);
  CHECK(j["system"]["states"]["kind"] == "product");
  CHECK(j["system"]["states"]["components"].size() == 19);

  SUBCASE("identity composition without dynamics") {
    auto file = write("ident.mdn", "box A {\n  in x : bit\n  out y : bit\n}\n\ncompose i = id(A)\n");
    auto id = cli({"flatten", file, "i"});
    CHECK(id.code == 0);
    auto jj = Json::parse(id.out);
    CHECK(jj["system"].is_null());
    CHECK(id.err.find("warning") != std::string::npos);
    auto f = mnet::json::to_morphism(jj["morphism"]);
    CHECK(f == mnet::identity_mdn(f.source()));
  }
  SUBCASE("unknown composition") {
    auto u = cli({"flatten", fixture("retina.mdn"), "nope", "--json"});
    CHECK(u.code == 1);
    CHECK(Json::parse(u.err)["kind"] == "UnknownName");
  }
  SUBCASE("to a file") {
    auto path = (scratch() / "flat.json").string();
    CHECK(cli({"flatten", fixture("retina.mdn"), "retina", "--out", path}).code == 0);
    std::ifstream in(path);
    CHECK(Json::parse(in)["composition"] == "retina");
  }
}

TEST_CASE("simulate the nerve under constant light") {
  auto inputs = write("light.jsonl", "{\"light\": 1.0}\n");
  auto r = cli({"simulate", fixture("retina.mdn"), "retina", "--steps", "6", "--inputs", inputs, "--default-state"});
  REQUIRE(r.code == 0);
  auto trace = lines(r.out);
  REQUIRE(trace.size() == 6);
  // Reference: iterate the nerve rule by hand.
  std::string mode = "polarized";
  double adapt = 0.0;
  for (std::size_t t = 0; t < 6; ++t) {
    CAPTURE(t);
    CHECK(trace[t]["step"] == t);
    CHECK(trace[t]["state"]["mode"] == mode);
    CHECK(trace[t]["state"]["adapt"].get<double>() == doctest::Approx(adapt).epsilon(1e-12));
    CHECK(trace[t]["output"]["a"] == (mode == "polarized" ? 1 : 0));
    if (mode == "polarized" && 1.0 - adapt >= 0.5) {
      mode = "depolarized";
      adapt = adapt + 1.0 / 2.0;
    } else {
      mode = mode == "polarized" ? "polarized" : mode == "depolarized" ? "hyperpolarized" : "polarized";
      adapt = adapt / 2.0;
    }
  }
  std::vector<std::string> modes;
  for (const auto& s : trace) modes.push_back(s["state"]["mode"]);
  CHECK(modes == std::vector<std::string>{"polarized", "depolarized", "hyperpolarized", "polarized", "depolarized",
                                          "hyperpolarized"});

  SUBCASE("zero steps") {
    auto z = cli({"simulate", fixture("retina.mdn"), "retina", "--steps", "0"});
    CHECK(z.code == 0);
    CHECK(z.out.empty());
  }
  SUBCASE("explicit initial state") {
    auto init = write("init.json", R"({"mode": "hyperpolarized", "adapt": 1})");
    auto s = cli({"simulate", fixture("retina.mdn"), "retina", "--steps", "1", "--inputs", inputs, "--init", init});
    CHECK(s.code == 0);
    CHECK(lines(s.out)[0]["next_state"]["adapt"] == 0.5);
    auto bad = write("bad_init.json", R"({"mode": "hyperpolarized"})");
    auto e = cli({"simulate", fixture("retina.mdn"), "retina", "--inputs", inputs, "--init", bad, "--json"});
    CHECK(e.code == 1);
    CHECK(Json::parse(e.err)["kind"] == "InitialStateError");
    CHECK(cli({"simulate", fixture("retina.mdn"), "retina", "--init", init, "--default-state"}).code == 2);
  }
  SUBCASE("csv") {
    auto c = cli({"simulate", fixture("retina.mdn"), "retina", "--steps", "2", "--inputs", inputs, "--format", "csv"});
    CHECK(c.out == "step,mode,a\n0,*,1\n1,*,0\n");
  }
  SUBCASE("strict ports") {
    auto extra = write("extra.jsonl", "{\"light\": 1.0, \"sound\": 3}\n");
    CHECK(cli({"simulate", fixture("retina.mdn"), "retina", "--inputs", extra}).code == 0);
    auto s = cli({"simulate", fixture("retina.mdn"), "retina", "--inputs", extra, "--strict-ports", "--json"});
    CHECK(s.code == 1);
    CHECK(Json::parse(s.err)["kind"] == "InputShapeError");
  }
}

TEST_CASE("simulate blink") {
  auto bright = write("bright.jsonl", blink_inputs(4, 4));
  auto a = cli({"simulate", fixture("blink.mdn"), "blink", "--steps", "30", "--inputs", bright, "--compare"});
  CHECK(a.code == 0);
  CHECK(a.err.empty());
  auto h = cli({"simulate", fixture("blink.mdn"), "blink", "--steps", "30", "--inputs", bright, "--hierarchical"});
  CHECK(h.out == a.out);

  auto missing = cli({"simulate", fixture("blink.mdn"), "blink", "--steps", "3", "--json"});
  CHECK(missing.code == 1);
  auto e = Json::parse(missing.err);
  CHECK(e["kind"] == "InputShapeError");
  CHECK(e["message"].get<std::string>().find("step 0") == 0);

  auto no_dyn = write("nodyn.mdn", "box A {\n  in x : bit\n}\n\ncompose i = id(A)\n");
  CHECK(cli({"simulate", no_dyn, "i"}).code == 1);
}

TEST_CASE("render") {
  auto a = cli({"render", fixture("blink.mdn"), "Blink"});
  REQUIRE(a.code == 0);
  for (const char* box : {"label=\"E1\"", "label=\"E2\"", "label=\"P\""}) CHECK(a.out.find(box) != std::string::npos);
  CHECK(a.out.rfind("digraph \"Blink\" {", 0) == 0);
  CHECK(cli({"render", fixture("blink.mdn"), "Blink"}).out == a.out);

  auto shut = cli({"render", fixture("blink.mdn"), "Blink", "--mode", "shut,shut,*"});
  CHECK(shut.code == 0);
  CHECK(shut.out.find("outer_in:left") == std::string::npos);

  auto comp = cli({"render", fixture("eye.mdn"), "eye"});
  CHECK(comp.code == 0);
  CHECK(comp.out.find("label=\"N[2]\"") != std::string::npos);

  auto bad_mode = cli({"render", fixture("blink.mdn"), "Blink", "--mode", "open", "--json"});
  CHECK(bad_mode.code == 1);
  CHECK(Json::parse(bad_mode.err)["kind"] == "UnknownMode");
  auto bad_name = cli({"render", fixture("blink.mdn"), "Nope", "--json"});
  CHECK(bad_name.code == 1);
  CHECK(Json::parse(bad_name.err)["kind"] == "UnknownName");
}

TEST_CASE("selftest") {
  auto ok = cli({"selftest", "--count", "20", "--json"});
  CHECK(ok.code == 0);
  auto j = Json::parse(ok.out);
  CHECK(j["witnesses"] == 0);
  CHECK(j["suites"].size() == 8);
  CHECK(cli({"selftest", "--count", "20", "--seed", "5"}).out == cli({"selftest", "--count", "20", "--seed", "5"}).out);

  auto fault = cli({"selftest", "--count", "20", "--inject-fault", "compose"});
  CHECK(fault.code == 1);
  CHECK(fault.out.find("total witnesses: 0") == std::string::npos);
  CHECK(cli({"selftest", "--inject-fault", "gremlins"}).code == 2);
}

#include <cmath>
#include <random>

#include "modalnet/dsl/dot.hpp"
#include "modalnet/dsl/elaborate.hpp"
#include "modalnet/dsl/expr.hpp"
#include "support.hpp"
#include "twins.hpp"

using namespace mnet;
using namespace mnet::dsl;

namespace {

Diagnostic diagnostic_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const DslError& e) {
    return e.diagnostic();
  }
  FAIL("expected a DslError");
  return {};
}

Elaboration elab(const std::string& text, const std::map<std::string, std::string>& overrides = {}) {
  return elaborate(parse_or_throw(text), overrides);
}

const char* const kBoxes = R"(
box A {
  in x : bit
  out y : bit
}
box T {
  in u : bit
  out v : bit
}
)";

// Hand-rolled expression generator for the printer round trip.
struct ExprGen {
  std::mt19937_64 rng;
  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

  Expr leaf() {
    Expr e;
    switch (pick(4)) {
      case 0:
        e.kind = Expr::Kind::Int;
        e.i = static_cast<std::int64_t>(pick(1000));
        break;
      case 1: {
        static const double reals[] = {0.5, 0.1, 2.0, 1e-7, 123456.789, 3.0, 1e21};
        e.kind = Expr::Kind::Real;
        e.r = reals[pick(7)];
        break;
      }
      case 2:
        e.kind = Expr::Kind::Name;
        e.name = std::string(1, static_cast<char>('a' + pick(5)));
        break;
      default:
        e.kind = Expr::Kind::Port;
        e.name = "p" + std::to_string(pick(3));
        if (pick(2)) e.args.push_back(leaf());
    }
    return e;
  }

  Expr node(Expr::Kind k, std::string name, std::vector<Expr> args) {
    Expr e;
    e.kind = k;
    e.name = std::move(name);
    e.args = std::move(args);
    return e;
  }

  Expr any(int depth) {
    if (depth == 0) return leaf();
    static const char* const ops[] = {"+", "-", "*", "/", "==", "!=", "<", ">", "<=", ">=", "and", "or"};
    switch (pick(9)) {
      case 0: return node(Expr::Kind::Unary, pick(2) ? "-" : "not", {any(depth - 1)});
      case 1:
      case 2: return node(Expr::Kind::Binary, ops[pick(12)], {any(depth - 1), any(depth - 1)});
      case 3: return node(Expr::Kind::If, {}, {any(depth - 1), any(depth - 1), any(depth - 1)});
      case 4: return node(Expr::Kind::Tuple, {}, {any(depth - 1), any(depth - 1)});
      case 5: return node(Expr::Kind::Index, {}, {any(depth - 1), leaf()});
      case 6: {
        static const char* const fns[] = {"min", "max", "floor", "abs", "repeat"};
        const char* f = fns[pick(5)];
        std::vector<Expr> args{any(depth - 1)};
        if (f[0] != 'f' && f[0] != 'a') args.push_back(any(depth - 1));
        return node(Expr::Kind::Call, f, std::move(args));
      }
      case 7: return node(Expr::Kind::Sum, "i", {leaf(), any(depth - 1)});
      default: return leaf();
    }
  }
};

// Integer-only reference evaluator for generated arithmetic.
std::int64_t oracle_eval(const Expr& e, const std::map<std::string, std::int64_t>& env) {
  switch (e.kind) {
    case Expr::Kind::Int: return e.i;
    case Expr::Kind::Name: return env.at(e.name);
    case Expr::Kind::Unary: return -oracle_eval(e.args[0], env);
    case Expr::Kind::Binary: {
      auto l = oracle_eval(e.args[0], env), r = oracle_eval(e.args[1], env);
      if (e.name == "+") return l + r;
      if (e.name == "-") return l - r;
      return l * r;
    }
    case Expr::Kind::Call: {
      auto l = oracle_eval(e.args[0], env), r = oracle_eval(e.args[1], env);
      return e.name == "min" ? std::min(l, r) : std::max(l, r);
    }
    case Expr::Kind::If: return oracle_eval(e.args[1], env) < oracle_eval(e.args[2], env) ? oracle_eval(e.args[1], env)
                                                                                          : oracle_eval(e.args[2], env);
    default: throw std::logic_error("oracle: unsupported");
  }
}

}  // namespace

TEST_CASE("parsing") {
  SUBCASE("empty file") {
    auto r = parse("");
    REQUIRE(r.doc);
    CHECK(r.doc->decls.empty());
    CHECK(parse("# only a comment\n\n").doc->decls.empty());
  }
  SUBCASE("unclosed block") {
    auto r = parse("box A {\n  in x : bit\n  out y : bit\n");
    REQUIRE(r.error);
    CHECK(r.error->kind == ErrorKind::SyntaxError);
    CHECK(r.error->span.line == 4);
    CHECK_FALSE(r.error->expected.empty());
  }
  SUBCASE("unexpected token reports what was expected") {
    auto r = parse("box A {\n  in x bit\n}\n");
    REQUIRE(r.error);
    CHECK(r.error->span.line == 2);
    CHECK(r.error->span.col == 8);
    CHECK(r.error->expected == std::vector<std::string>{"':'"});
    CHECK(r.error->to_string().find("2:8") == 0);
  }
  SUBCASE("bad character") {
    auto r = parse("const a = 1 $ 2");
    REQUIRE(r.error);
    CHECK(r.error->span.col == 13);
  }
  SUBCASE("statements may share a line") {
    auto r = parse("box A { in x : bit; out y : bit }");
    REQUIRE(r.doc);
    const auto& b = std::get<BoxDecl>(r.doc->decls[0]);
    CHECK(b.ports.size() == 2);
  }
  SUBCASE("newlines inside parentheses") {
    auto e = parse_expression("min(1,\n 2)");
    CHECK(e.kind == Expr::Kind::Call);
  }
  SUBCASE("precedence") {
    CHECK(print(parse_expression("1 + 2 * 3")) == "1 + 2 * 3");
    CHECK(print(parse_expression("(1 + 2) * 3")) == "(1 + 2) * 3");
    CHECK(print(parse_expression("1 - (2 - 3)")) == "1 - (2 - 3)");
    CHECK(print(parse_expression("(1 - 2) - 3")) == "1 - 2 - 3");
    CHECK(print(parse_expression("not a and b")) == "not a and b");
    CHECK(print(parse_expression("-(a + b)")) == "-(a + b)");
    CHECK(print(parse_expression("x - a >= alpha")) == "x - a >= alpha");
  }
}

TEST_CASE("canonical printing of the fixtures") {
  for (const char* f : {"retina.mdn", "retina_discrete.mdn", "eye.mdn", "blink.mdn", "layers.mdn", "visual_system.mdn"}) {
    CAPTURE(f);
    Document doc = parse_or_throw(read_file(twins::fixture_path(f)));
    const std::string text = print(doc);
    Document again = parse_or_throw(text);
    CHECK(again == doc);
    CHECK(print(again) == text);
  }
}

TEST_CASE("property: printed expressions parse back to themselves") {
  ExprGen g{std::mt19937_64(7)};
  for (int n = 0; n < 2000; ++n) {
    Expr e = g.any(1 + n % 4);
    const std::string text = print(e);
    CAPTURE(text);
    Expr back = parse_expression(text);
    CHECK(back == e);
    CHECK(print(back) == text);
  }
}

TEST_CASE("evaluating expressions") {
  SUBCASE("nerve update formula") {
    Bindings env;
    env.names = {{"x", Value::real(0.8)}, {"a", Value::real(0.2)}, {"alpha", Value::real(0.5)}, {"beta", Value::real(2.0)}};
    env.labels = {"polarized", "depolarized"};
    auto v = eval_expr(parse_expression("if x - a >= alpha then (depolarized, a + x / beta) else (polarized, a / beta)"), env);
    REQUIRE(v.is_tuple());
    CHECK(v.as_tuple()[0] == Value::symbol("depolarized"));
    CHECK(v.as_tuple()[1].as_real() == doctest::Approx(0.6).epsilon(1e-12));
  }
  SUBCASE("weighted sum") {
    Bindings env;
    env.names = {{"w", Value::tuple({Value::integer(1), Value::integer(1)})}};
    env.inputs = {{"x[0]", Value::integer(0)}, {"x[1]", Value::integer(1)}};
    CHECK(eval_expr(parse_expression("sum(i < 2 : w[i] * in.x[i])"), env) == Value::integer(1));
  }
  SUBCASE("equal branches ignore the condition") {
    for (bool c : {true, false}) {
      Bindings env;
      env.names = {{"c", Value::integer(c ? 1 : 0)}};
      CHECK(eval_expr(parse_expression("if c == 1 then 7 else 7"), env) == Value::integer(7));
    }
  }
  SUBCASE("division by zero carries its span") {
    Bindings env;
    env.names = {{"x", Value::integer(0)}};
    auto d = diagnostic_of([&] { eval_expr(parse_expression("1 + 1 / x"), env); });
    CHECK(d.kind == ErrorKind::DivisionByZero);
    CHECK(d.span.line == 1);
    CHECK(d.span.col == 7);
  }
  SUBCASE("unbound reference") {
    auto d = diagnostic_of([] { eval_expr(parse_expression("y + 1"), Bindings{}); });
    CHECK(d.kind == ErrorKind::UnboundReference);
  }
  SUBCASE("type errors") {
    Bindings env;
    env.names = {{"x", Value::integer(1)}};
    CHECK_ERROR_KIND(eval_expr(parse_expression("x and x"), env), ErrorKind::DynamicsTypeError);
    CHECK_ERROR_KIND(eval_expr(parse_expression("if x then 1 else 2"), env), ErrorKind::DynamicsTypeError);
    env.labels = {"on"};
    CHECK_ERROR_KIND(eval_expr(parse_expression("on + 1"), env), ErrorKind::DynamicsTypeError);
    CHECK_ERROR_KIND(eval_expr(parse_expression("(1, 2)[0.5]"), env), ErrorKind::DynamicsTypeError);
  }
  SUBCASE("builtins") {
    Bindings env;
    CHECK(eval_expr(parse_expression("floor(7 / 2)"), env) == Value::integer(3));
    CHECK(eval_expr(parse_expression("abs(-2.5)"), env) == Value::real(2.5));
    CHECK(eval_expr(parse_expression("max(1, 4, 2)"), env) == Value::integer(4));
    CHECK(eval_expr(parse_expression("min(1, 0.5)"), env) == Value::real(0.5));
    CHECK(eval_expr(parse_expression("repeat(1, 3)"), env) ==
          Value::tuple({Value::integer(1), Value::integer(1), Value::integer(1)}));
    CHECK(eval_expr(parse_expression("(1, 2.5)[1]"), env) == Value::real(2.5));
    CHECK(eval_expr(parse_expression("if 1 < 2 then 1 else 0.5"), env) == Value::real(1.0));
  }
}

TEST_CASE("property: integer arithmetic agrees with a reference evaluator") {
  std::mt19937_64 rng(3);
  auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
  std::function<Expr(int)> gen = [&](int depth) -> Expr {
    Expr e;
    if (depth == 0 || pick(4) == 0) {
      if (pick(2)) {
        e.kind = Expr::Kind::Int;
        e.i = pick(20);
      } else {
        e.kind = Expr::Kind::Name;
        e.name = pick(2) ? "a" : "b";
      }
      return e;
    }
    switch (pick(4)) {
      case 0:
        e.kind = Expr::Kind::Unary;
        e.name = "-";
        e.args = {gen(depth - 1)};
        break;
      case 1:
        e.kind = Expr::Kind::Call;
        e.name = pick(2) ? "min" : "max";
        e.args = {gen(depth - 1), gen(depth - 1)};
        break;
      default: {
        static const char* const ops[] = {"+", "-", "*"};
        e.kind = Expr::Kind::Binary;
        e.name = ops[pick(3)];
        e.args = {gen(depth - 1), gen(depth - 1)};
      }
    }
    return e;
  };
  for (int n = 0; n < 1000; ++n) {
    Expr e = gen(4);
    std::int64_t a = pick(11) - 5, b = pick(11) - 5;
    Bindings env;
    env.names = {{"a", Value::integer(a)}, {"b", Value::integer(b)}};
    CAPTURE(print(e));
    Value v = eval_expr(e, env);
    CHECK(v == Value::integer(oracle_eval(e, {{"a", a}, {"b", b}})));
    CHECK(eval_expr(e, env) == v);  // referential transparency
  }
}

TEST_CASE("fixtures elaborate to their module-built twins") {
  for (auto& p : twins::all()) {
    CAPTURE(p.file);
    auto el = load_file(twins::fixture_path(p.file));
    CHECK(el.warnings.empty());
    const auto& c = el.compositions.at(p.composition);
    REQUIRE(c.network);
    CHECK(twins::same_network(*c.network, p.twin) == "");
  }
  SUBCASE("named parts") {
    auto rt = fixtures::retina();
    auto el = load_file(twins::fixture_path("retina.mdn"));
    CHECK(el.boxes.at("N") == rt.n);
    CHECK(el.boxes.at("R") == rt.r);
    CHECK(el.morphisms.at("Nerve").morphism == rt.nerve);
    CHECK(el.dynamics.at("nerve").system.default_state == rt.dynamics.default_state);
    CHECK(el.constants.at("alpha") == Value::real(0.5));

    auto e = fixtures::eye(3);
    auto eel = load_file(twins::fixture_path("eye.mdn"));
    const auto& comp = eel.compositions.at("eye");
    CHECK(comp.morphism == flatten(e.network).morphism);
    CHECK(comp.leaf_labels == std::vector<std::string>{"N[0]", "N[1]", "N[2]"});
    CHECK(eel.morphisms.at("Eye").instances == std::vector<std::string>{"R[0]", "R[1]", "R[2]"});
  }
  SUBCASE("layered network composes to the flattened twin") {
    auto l = fixtures::layers();
    auto el = load_file(twins::fixture_path("layers.mdn"));
    CHECK(el.compositions.at("layers").morphism == flatten(l.network).morphism);
  }
}

TEST_CASE("bus expansion gives one feed per input") {
  auto el = load_file(twins::fixture_path("layers.mdn"));
  const auto& v = el.boxes.at("V");
  CHECK(v.interface(Mode{"*"}).inputs.size() == 4);
  for (const char* name : {"LayerWide", "LayerNarrow", "Visual"}) {
    const auto& f = el.morphisms.at(name).morphism;
    for (const auto& [m, ev] : f.tabulate()) {
      CHECK(ev.diagram.in_feeds().size() == ev.diagram.source().inputs.size());
      CHECK(ev.diagram.out_feeds().size() == ev.diagram.target().outputs.size());
    }
  }
  // x[0] of every neuron in the wide layer is fed by the same outer port.
  const auto d = el.morphisms.at("LayerWide").morphism.event_at(0).diagram;
  std::size_t from_x0 = 0;
  for (const auto& fd : d.in_feeds()) {
    if (fd.from == Feed::From::TargetInput && d.target().inputs.port(fd.index).name == "x[0]") ++from_x0;
  }
  CHECK(from_x0 == 2);
}

TEST_CASE("elaboration errors") {
  SUBCASE("a bit where a non-negative real is expected") {
    auto d = diagnostic_of([] {
      elab(std::string(kBoxes) + "dynamics d on A {\n  state s : nonneg_real\n  init = 0\n  update * = in.x\n  readout * {\n    y = 0\n  }\n}\n");
    });
    CHECK(d.kind == ErrorKind::DynamicsTypeError);
    CHECK(d.span.line == 13);
  }
  SUBCASE("readout of the wrong type") {
    CHECK_ERROR_KIND(elab(std::string(kBoxes) + "dynamics d on A {\n state s : bit\n init = 0\n update * = in.x\n readout * { y = 0.5 }\n}\n"),
                     ErrorKind::DynamicsTypeError);
  }
  SUBCASE("missing readout port") {
    CHECK_ERROR_KIND(elab(std::string(kBoxes) + "dynamics d on A {\n state s : bit\n update * = in.x\n readout * {}\n}\n"),
                     ErrorKind::PartialMap);
  }
  SUBCASE("unknown name in dynamics") {
    CHECK_ERROR_KIND(elab(std::string(kBoxes) + "dynamics d on A {\n state s : bit\n update * = q\n readout * { y = s }\n}\n"),
                     ErrorKind::UnboundReference);
  }
  SUBCASE("port absent in the mode") {
    CHECK_ERROR_KIND(elab(std::string(kBoxes) + "dynamics d on A {\n state s : bit\n update * = in.z\n readout * { y = s }\n}\n"),
                     ErrorKind::UnboundReference);
  }
  SUBCASE("unknown box") {
    CHECK_ERROR_KIND(elab("morphism F : (Q) -> Q {}\n"), ErrorKind::NameResolutionError);
  }
  SUBCASE("wire on the wrong side") {
    auto d = diagnostic_of([] {
      elab(std::string(kBoxes) + "morphism F : (A) -> T {\n  mode _ -> * {\n    A.out.y <- T.in.u\n  }\n}\n");
    });
    CHECK(d.kind == ErrorKind::SideError);
    CHECK(d.span.line == 12);
  }
  SUBCASE("unfed port") {
    CHECK_ERROR_KIND(elab(std::string(kBoxes) + "morphism F : (A) -> T {\n mode _ -> * {\n  A.in.x <- T.in.u\n }\n}\n"),
                     ErrorKind::PartialMap);
  }
  SUBCASE("two feeds into one port") {
    CHECK_ERROR_KIND(elab(std::string(kBoxes) +
                          "morphism F : (A) -> T {\n mode _ -> * {\n  A.in.x <- T.in.u\n  A.in.x <- A.out.y\n  T.out.v <- A.out.y\n }\n}\n"),
                     ErrorKind::MergedWire);
  }
  SUBCASE("sigma into a missing mode") {
    auto d = diagnostic_of([] { load_file(std::string(MODALNET_TEST_DATA) + "/bad_sigma.mdn"); });
    CHECK(d.kind == ErrorKind::CommutingSquareViolation);
    CHECK(d.span.line == 18);
  }
  SUBCASE("no block for a mode") {
    CHECK_ERROR_KIND(elab("modal A {\n mode on, off { out y : bit }\n}\nbox T { out y : bit }\n"
                          "morphism F : (A) -> T {\n mode on -> * { T.out.y <- A.out.y }\n}\n"),
                     ErrorKind::PartialMap);
  }
  SUBCASE("bus widths differ") {
    CHECK_ERROR_KIND(elab("box A { in x[3] : bit }\nbox T { in u[2] : bit }\n"
                          "morphism F : (A) -> T {\n mode _ -> * { A.in.x[*] <- T.in.u[*] }\n}\n"),
                     ErrorKind::BusWidthMismatch);
    CHECK_ERROR_KIND(elab("box A { in x : bit }\nbox T { in u[2] : bit }\n"
                          "morphism F : (A) -> T {\n mode _ -> * { A.in.x <- T.in.u[*] }\n}\n"),
                     ErrorKind::BusWidthMismatch);
    CHECK_ERROR_KIND(elab("box A { in x[0] : bit }\n"), ErrorKind::BusWidthMismatch);
  }
  SUBCASE("wire types must match exactly") {
    CHECK_ERROR_KIND(elab("box A { in x : unit_interval }\nbox T { in u : bit }\n"
                          "morphism F : (A) -> T {\n mode _ -> * { A.in.x <- T.in.u }\n}\n"),
                     ErrorKind::TypeMismatch);
  }
  SUBCASE("composition levels") {
    const std::string base = std::string(kBoxes) + "morphism F : (A) -> T {\n mode _ -> * {\n  A.in.x <- T.in.u\n  T.out.v <- A.out.y\n }\n}\n";
    CHECK_ERROR_KIND(elab(base + "compose c = F . (id(A), id(A))\n"), ErrorKind::ArityMismatch);
    CHECK_ERROR_KIND(elab(base + "compose c = F . (id(T))\n"), ErrorKind::BoxMismatch);
    CHECK_ERROR_KIND(elab(base + "compose c = G\n"), ErrorKind::NameResolutionError);
    CHECK_ERROR_KIND(elab(base + "type T = bit\ntype T = bit\n"), ErrorKind::NameResolutionError);
  }
}

TEST_CASE("compositions") {
  SUBCASE("identity composition folds to the identity") {
    auto el = elab(std::string(kBoxes) + "compose i = id(A)\n");
    const auto& c = el.compositions.at("i");
    CHECK(c.morphism == identity_mdn(el.boxes.at("A")));
    CHECK_FALSE(c.network);
    REQUIRE(el.warnings.size() == 1);
    CHECK(el.warnings[0].message.find("A") != std::string::npos);
  }
  SUBCASE("tensor items and repetition fill the same slots") {
    auto a = load_file(twins::fixture_path("eye.mdn"));
    auto doc = parse_or_throw(read_file(twins::fixture_path("eye.mdn")) + "compose eye2 = Eye . (Nerve * Nerve, Nerve)\n");
    auto b = elaborate(doc);
    CHECK(b.compositions.at("eye2").morphism == a.compositions.at("eye").morphism);
  }
  SUBCASE("a top level of several items is a tensor") {
    auto doc = parse_or_throw(read_file(twins::fixture_path("retina.mdn")) + "compose pair = (Nerve, retina)\n");
    auto el = elaborate(doc);
    const auto& c = el.compositions.at("pair");
    CHECK(c.tree.kind == CompositionNode::Kind::Tensor);
    const auto& f = el.morphisms.at("Nerve").morphism;
    CHECK(c.morphism == tensor_mdn(f, f));
    REQUIRE(c.network);
    CHECK(c.network->kind == NetworkNode::Kind::Tensor);
  }
}

TEST_CASE("constant overrides") {
  auto el = load_file(twins::fixture_path("eye.mdn"), {{"width", "2"}});
  CHECK(twins::same_network(*el.compositions.at("eye").network, fixtures::eye(2).network) == "");
  auto r = load_file(twins::fixture_path("retina.mdn"), {{"alpha", "1"}});
  CHECK(r.constants.at("alpha") == Value::real(1.0));
  CHECK_ERROR_KIND(load_file(twins::fixture_path("eye.mdn"), {{"nope", "1"}}), ErrorKind::UnknownName);
  CHECK_ERROR_KIND(load_file(twins::fixture_path("eye.mdn"), {{"width", "1.5"}}), ErrorKind::DynamicsTypeError);
  CHECK_ERROR_KIND(load_file(twins::fixture_path("eye.mdn"), {{"width", "("}}), ErrorKind::SyntaxError);
  CHECK_ERROR_KIND(load_file("/nonexistent/x.mdn"), ErrorKind::Io);
}

TEST_CASE("DOT rendering") {
  SUBCASE("unit morphism has an empty body") {
    CHECK(emit_dot(identity_mdn(ModalBox{}), Mode{}) == "digraph \"G\" {\n}\n");
  }
  SUBCASE("nerve modes differ exactly in the light edge") {
    auto el = load_file(twins::fixture_path("retina.mdn"));
    const auto& m = el.morphisms.at("Nerve");
    auto pol = emit_dot(m.morphism, Mode{"polarized"}, m.instances, "Nerve");
    auto dep = emit_dot(m.morphism, Mode{"depolarized"}, m.instances, "Nerve");
    const std::string edge = "  outer_in:light -> x0:light;\n";
    auto at = pol.find(edge);
    REQUIRE(at != std::string::npos);
    CHECK(pol.substr(0, at) + pol.substr(at + edge.size()) == dep);
    CHECK(emit_dot(m.morphism, Mode{"hyperpolarized"}, m.instances, "Nerve") == dep);
  }
  SUBCASE("blink has the two feedback edges") {
    auto el = load_file(twins::fixture_path("blink.mdn"));
    const auto& m = el.morphisms.at("Blink");
    auto dot = emit_dot(m.morphism, Mode{"open", "open", "*"}, m.instances, "Blink");
    CHECK(dot.find("x2:lid1 -> x0:lid;") != std::string::npos);
    CHECK(dot.find("x2:lid2 -> x1:lid;") != std::string::npos);
    for (const char* box : {"label=\"E1\"", "label=\"E2\"", "label=\"P\""}) CHECK(dot.find(box) != std::string::npos);
    auto shut = emit_dot(m.morphism, Mode{"shut", "shut", "*"}, m.instances, "Blink");
    CHECK(shut.find("outer_in:left") == std::string::npos);
    CHECK(shut.find("outer_in:right") == std::string::npos);
    CHECK(dot.find("outer_in:left_0_ -> x0:light_0_;") != std::string::npos);
  }
  SUBCASE("byte-identical across runs, unknown modes rejected") {
    auto el = load_file(twins::fixture_path("visual_system.mdn"));
    const auto& c = el.compositions.at("visual_system");
    auto mode = c.morphism.source().mode_at(12345);
    auto a = emit_dot(c.morphism, mode, c.leaf_labels, "visual_system");
    auto b = emit_dot(load_file(twins::fixture_path("visual_system.mdn")).compositions.at("visual_system").morphism, mode,
                      c.leaf_labels, "visual_system");
    CHECK(a == b);
    CHECK_ERROR_KIND(emit_dot(el.morphisms.at("Vision").morphism, Mode{"nope"}), ErrorKind::UnknownMode);
  }
}

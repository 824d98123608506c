#include "modalnet/dsl/parser.hpp"

#include <cctype>
#include <charconv>
#include <set>

namespace mnet::dsl {

std::string Diagnostic::to_string() const {
  std::string s = std::to_string(span.line) + ":" + std::to_string(span.col) + ": " + mnet::to_string(kind) + ": " + message;
  if (!expected.empty()) {
    s += " (expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) s += (i ? ", " : "") + expected[i];
    s += ")";
  }
  return s;
}

std::string DslError::located(const Diagnostic& d) {
  std::string s = std::to_string(d.span.line) + ":" + std::to_string(d.span.col) + ": " + d.message;
  if (!d.expected.empty()) {
    s += " (expected ";
    for (std::size_t i = 0; i < d.expected.size(); ++i) s += (i ? ", " : "") + d.expected[i];
    s += ")";
  }
  return s;
}

void fail_at(ErrorKind kind, Span span, std::string message) {
  throw DslError(Diagnostic{kind, span, std::move(message), {}});
}

namespace {

// ---------------------------------------------------------------------------
// Lexer

struct Token {
  enum class Kind { Ident, Int, Real, Punct, Newline, End };
  Kind kind = Kind::End;
  std::string text;
  std::int64_t i = 0;
  double r = 0.0;
  Span span;
};

std::string describe(const Token& t) {
  switch (t.kind) {
    case Token::Kind::Ident: return "'" + t.text + "'";
    case Token::Kind::Int:
    case Token::Kind::Real: return "number " + t.text;
    case Token::Kind::Punct: return "'" + t.text + "'";
    case Token::Kind::Newline: return "end of line";
    case Token::Kind::End: return "end of input";
  }
  return "?";
}

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  int depth = 0;  // inside () or [] newlines are whitespace
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  static const char* const two[] = {"<-", "->", "==", "!=", "<=", ">="};
  while (i < src.size()) {
    const char c = src[i];
    Span at{line, col};
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (c == '\n') {
      if (depth == 0 && (out.empty() || out.back().kind != Token::Kind::Newline))
        out.push_back(Token{Token::Kind::Newline, "\n", 0, 0.0, at});
      advance(1);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      out.push_back(Token{Token::Kind::Ident, std::string(src.substr(i, j - i)), 0, 0.0, at});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      bool real = false;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j + 1 < src.size() && src[j] == '.' && std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
        real = true;
        ++j;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      }
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
          real = true;
          j = k;
          while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
        }
      }
      Token t{real ? Token::Kind::Real : Token::Kind::Int, std::string(src.substr(i, j - i)), 0, 0.0, at};
      if (real) {
        auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.r);
        if (ec != std::errc{}) fail_at(ErrorKind::SyntaxError, at, "bad number " + t.text);
      } else {
        auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.i);
        if (ec != std::errc{}) fail_at(ErrorKind::SyntaxError, at, "integer out of range " + t.text);
      }
      out.push_back(t);
      advance(j - i);
      continue;
    }
    std::string p;
    for (const char* t : two) {
      if (src.substr(i, 2) == t) p = t;
    }
    if (p.empty()) {
      if (std::string_view("{}()[],:;.=?*+-/^<>").find(c) == std::string_view::npos) {
        fail_at(ErrorKind::SyntaxError, at, std::string("unexpected character '") + c + "'");
      }
      p = std::string(1, c);
    }
    if (p == "(" || p == "[") ++depth;
    if ((p == ")" || p == "]") && depth > 0) --depth;
    out.push_back(Token{Token::Kind::Punct, p, 0, 0.0, at});
    advance(p.size());
  }
  out.push_back(Token{Token::Kind::End, "", 0, 0.0, Span{line, col}});
  return out;
}

// ---------------------------------------------------------------------------
// Parser

const std::set<std::string> kExprKeywords{"if", "then", "else", "and", "or", "not", "in", "sum"};
const std::set<std::string> kCalls{"min", "max", "floor", "abs", "repeat"};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : t_(std::move(toks)) {}

  Document document() {
    Document doc;
    skip_newlines();
    while (!at_end()) {
      doc.decls.push_back(decl());
      end_stmt();
      skip_newlines();
    }
    return doc;
  }

 private:
  std::vector<Token> t_;
  std::size_t p_ = 0;

  const Token& peek(std::size_t k = 0) const { return t_[std::min(p_ + k, t_.size() - 1)]; }
  bool at_end() const { return peek().kind == Token::Kind::End; }
  Span span() const { return peek().span; }

  bool is_punct(std::string_view s, std::size_t k = 0) const {
    return peek(k).kind == Token::Kind::Punct && peek(k).text == s;
  }
  bool is_word(std::string_view s, std::size_t k = 0) const {
    return peek(k).kind == Token::Kind::Ident && peek(k).text == s;
  }

  [[noreturn]] void expected(std::vector<std::string> what) const {
    throw DslError(Diagnostic{ErrorKind::SyntaxError, span(), "unexpected " + describe(peek()), std::move(what)});
  }

  void punct(std::string_view s) {
    if (!is_punct(s)) expected({"'" + std::string(s) + "'"});
    ++p_;
  }
  bool accept(std::string_view s) {
    if (!is_punct(s)) return false;
    ++p_;
    return true;
  }
  void word(std::string_view s) {
    if (!is_word(s)) expected({"'" + std::string(s) + "'"});
    ++p_;
  }
  std::string ident(const char* what = "name") {
    if (peek().kind != Token::Kind::Ident) expected({what});
    return t_[p_++].text;
  }
  void skip_newlines() {
    while (peek().kind == Token::Kind::Newline || is_punct(";")) ++p_;
  }
  void end_stmt() {
    if (peek().kind == Token::Kind::Newline || is_punct(";")) {
      skip_newlines();
      return;
    }
    if (is_punct("}") || at_end()) return;
    expected({"end of line", "';'", "'}'"});
  }
  void open_block() {
    punct("{");
    skip_newlines();
  }

  // ----- declarations

  Decl decl() {
    Span s = span();
    if (is_word("const")) {
      ++p_;
      ConstDecl d;
      d.span = s;
      d.name = ident();
      punct("=");
      d.value = expr();
      return d;
    }
    if (is_word("type")) {
      ++p_;
      TypeDecl d;
      d.span = s;
      d.name = ident();
      punct("=");
      d.type = type();
      return d;
    }
    if (is_word("box")) return box_decl(false);
    if (is_word("modal")) return box_decl(true);
    if (is_word("morphism")) return morphism_decl();
    if (is_word("dynamics")) return dynamics_decl();
    if (is_word("compose")) return compose_decl();
    expected({"'const'", "'type'", "'box'", "'modal'", "'morphism'", "'dynamics'", "'compose'"});
  }

  TypeExpr type() {
    TypeExpr t;
    t.span = span();
    std::string n = ident("type");
    if (n == "int" && is_punct("(")) {
      t.kind = TypeExpr::Kind::Int;
      punct("(");
      t.bounds.push_back(expr());
      punct(",");
      t.bounds.push_back(expr());
      punct(")");
    } else if (n == "enum" && is_punct("(")) {
      t.kind = TypeExpr::Kind::Enum;
      punct("(");
      t.labels.push_back(ident("label"));
      while (accept(",")) t.labels.push_back(ident("label"));
      punct(")");
    } else if (n == "product" && is_punct("(")) {
      t.kind = TypeExpr::Kind::Product;
      punct("(");
      do {
        t.components.push_back(type());
        if (accept("^")) {
          t.repeat.push_back(primary());
        } else {
          t.repeat.push_back(std::nullopt);
        }
      } while (accept(","));
      punct(")");
    } else {
      t.kind = TypeExpr::Kind::Named;
      t.name = n;
    }
    return t;
  }

  PortDecl port_decl() {
    PortDecl d;
    d.span = span();
    if (is_word("in")) {
      d.input = true;
    } else if (is_word("out")) {
      d.input = false;
    } else {
      expected({"'in'", "'out'", "'}'"});
    }
    ++p_;
    d.name = ident("port name");
    if (accept("[")) {
      d.width = expr();
      punct("]");
    }
    punct(":");
    d.type = type();
    return d;
  }

  std::vector<PortDecl> port_block() {
    std::vector<PortDecl> ports;
    open_block();
    while (!is_punct("}")) {
      ports.push_back(port_decl());
      end_stmt();
    }
    punct("}");
    return ports;
  }

  std::string mode_label() {
    if (accept("*")) return "*";
    return ident("mode label");
  }

  BoxDecl box_decl(bool modal) {
    BoxDecl d;
    d.span = span();
    d.modal = modal;
    ++p_;
    d.name = ident("box name");
    if (!modal) {
      d.ports = port_block();
      return d;
    }
    open_block();
    while (!is_punct("}")) {
      ModeDecl m;
      m.span = span();
      word("mode");
      m.labels.push_back(mode_label());
      while (accept(",")) m.labels.push_back(mode_label());
      m.ports = port_block();
      d.modes.push_back(std::move(m));
      end_stmt();
    }
    punct("}");
    return d;
  }

  std::string inst_name() {
    std::string n = ident("instance");
    if (is_punct("[") && peek(1).kind == Token::Kind::Int && is_punct("]", 2)) {
      n += "[" + peek(1).text + "]";
      p_ += 3;
    }
    return n;
  }

  MorphismDecl morphism_decl() {
    MorphismDecl d;
    d.span = span();
    ++p_;
    d.name = ident("morphism name");
    punct(":");
    punct("(");
    if (!is_punct(")")) {
      do {
        SourceDecl s;
        s.span = span();
        s.box = ident("box name");
        if (accept("[")) {
          s.count = expr();
          punct("]");
        }
        if (is_word("as")) {
          ++p_;
          s.alias = ident("instance name");
        }
        d.sources.push_back(std::move(s));
      } while (accept(","));
    }
    punct(")");
    punct("->");
    d.target = ident("box name");
    open_block();
    while (!is_punct("}")) {
      EventBlock e;
      e.span = span();
      word("mode");
      e.pattern.span = span();
      if (is_word("_")) {
        ++p_;
        e.pattern.wildcard = true;
      } else if (peek().kind == Token::Kind::Ident && !is_punct("=", 1) && !is_punct("[", 1)) {
        e.pattern.constraints.emplace_back("", ident());
      } else if (is_punct("*")) {
        ++p_;
        e.pattern.constraints.emplace_back("", "*");
      } else {
        do {
          std::string inst = inst_name();
          punct("=");
          e.pattern.constraints.emplace_back(inst, mode_label());
        } while (accept(","));
      }
      punct("->");
      e.target_mode = mode_label();
      open_block();
      while (!is_punct("}")) {
        e.wires.push_back(wire());
        end_stmt();
      }
      punct("}");
      d.events.push_back(std::move(e));
      end_stmt();
    }
    punct("}");
    return d;
  }

  std::vector<Loop> loops() {
    std::vector<Loop> ls;
    while (is_word("for")) {
      ++p_;
      Loop l;
      l.var = ident("loop variable");
      punct("<");
      l.bound = additive();
      punct(":");
      ls.push_back(std::move(l));
    }
    return ls;
  }

  std::optional<Expr> path_index() {
    if (!accept("[")) return std::nullopt;
    Expr e;
    if (is_punct("*") && is_punct("]", 1)) {
      e.kind = Expr::Kind::Star;
      e.span = span();
      ++p_;
    } else {
      e = expr();
    }
    punct("]");
    return e;
  }

  PortPath path() {
    PortPath pp;
    pp.span = span();
    pp.inst = ident("box or instance");
    pp.inst_index = path_index();
    punct(".");
    if (is_word("in")) {
      pp.input = true;
    } else if (is_word("out")) {
      pp.input = false;
    } else {
      expected({"'in'", "'out'"});
    }
    ++p_;
    punct(".");
    pp.port = ident("port name");
    pp.port_index = path_index();
    return pp;
  }

  WireStmt wire() {
    WireStmt w;
    w.span = span();
    w.loops = loops();
    w.dest = path();
    if (accept("?")) w.optional = true;
    punct("<-");
    w.src = path();
    return w;
  }

  std::vector<std::string> rule_modes() {
    std::vector<std::string> ms;
    do {
      if (accept("*")) {
        ms.push_back("*");
      } else {
        ms.push_back(ident("mode label"));
      }
    } while (accept(","));
    return ms;
  }

  DynamicsDecl dynamics_decl() {
    DynamicsDecl d;
    d.span = span();
    ++p_;
    d.name = ident("dynamics name");
    word("on");
    d.box = ident("box name");
    open_block();
    while (!is_punct("}")) {
      Span s = span();
      if (is_word("state")) {
        ++p_;
        FieldDecl f;
        f.span = s;
        f.name = ident("field name");
        punct(":");
        f.type = type();
        d.fields.push_back(std::move(f));
      } else if (is_word("init")) {
        ++p_;
        punct("=");
        d.init = expr();
      } else if (is_word("mode_of")) {
        ++p_;
        punct("=");
        d.mode_of = expr();
      } else if (is_word("update")) {
        ++p_;
        UpdateRule u;
        u.span = s;
        u.modes = rule_modes();
        punct("=");
        u.body = expr();
        d.updates.push_back(std::move(u));
      } else if (is_word("readout")) {
        ++p_;
        ReadoutRule r;
        r.span = s;
        r.modes = rule_modes();
        open_block();
        while (!is_punct("}")) {
          ReadoutLine l;
          l.span = span();
          l.loops = loops();
          l.port = ident("output port");
          if (accept("[")) {
            l.index = expr();
            punct("]");
          }
          punct("=");
          l.value = expr();
          r.lines.push_back(std::move(l));
          end_stmt();
        }
        punct("}");
        d.readouts.push_back(std::move(r));
      } else {
        expected({"'state'", "'init'", "'mode_of'", "'update'", "'readout'", "'}'"});
      }
      end_stmt();
    }
    punct("}");
    return d;
  }

  CompTerm comp_factor() {
    CompTerm t;
    t.span = span();
    if (is_word("id") && is_punct("(", 1)) {
      p_ += 2;
      t.kind = CompTerm::Kind::Id;
      t.name = ident("box name");
      punct(")");
    } else {
      t.kind = CompTerm::Kind::Name;
      t.name = ident("morphism or composition");
    }
    if (accept("^")) t.repeat = primary();
    return t;
  }

  CompTerm comp_item() {
    Span s = span();
    CompTerm first = comp_factor();
    if (!is_punct("*")) return first;
    CompTerm t;
    t.kind = CompTerm::Kind::Tensor;
    t.span = s;
    t.parts.push_back(std::move(first));
    while (accept("*")) t.parts.push_back(comp_factor());
    return t;
  }

  ComposeDecl compose_decl() {
    ComposeDecl d;
    d.span = span();
    ++p_;
    d.name = ident("composition name");
    punct("=");
    do {
      std::vector<CompTerm> level;
      if (accept("(")) {
        level.push_back(comp_item());
        while (accept(",")) level.push_back(comp_item());
        punct(")");
      } else {
        level.push_back(comp_item());
      }
      d.levels.push_back(std::move(level));
    } while (accept("."));
    return d;
  }

  // ----- expressions

  Expr node(Expr::Kind k, Span s, std::string name = {}, std::vector<Expr> args = {}) {
    Expr e;
    e.kind = k;
    e.span = s;
    e.name = std::move(name);
    e.args = std::move(args);
    return e;
  }

 public:
  void expect_end() {
    if (!at_end()) expected({"end of input"});
  }

  Expr expr() {
    Span s = span();
    if (is_word("if")) {
      ++p_;
      Expr c = expr();
      word("then");
      Expr a = expr();
      word("else");
      Expr b = expr();
      return node(Expr::Kind::If, s, {}, {std::move(c), std::move(a), std::move(b)});
    }
    return disjunction();
  }

 private:
  Expr disjunction() {
    Expr e = conjunction();
    while (is_word("or")) {
      Span s = span();
      ++p_;
      e = node(Expr::Kind::Binary, s, "or", {std::move(e), conjunction()});
    }
    return e;
  }
  Expr conjunction() {
    Expr e = negation();
    while (is_word("and")) {
      Span s = span();
      ++p_;
      e = node(Expr::Kind::Binary, s, "and", {std::move(e), negation()});
    }
    return e;
  }
  Expr negation() {
    if (is_word("not")) {
      Span s = span();
      ++p_;
      return node(Expr::Kind::Unary, s, "not", {negation()});
    }
    return comparison();
  }
  Expr comparison() {
    Expr e = additive();
    static const char* const ops[] = {"==", "!=", "<=", ">=", "<", ">"};
    for (const char* op : ops) {
      if (is_punct(op)) {
        Span s = span();
        ++p_;
        return node(Expr::Kind::Binary, s, op, {std::move(e), additive()});
      }
    }
    return e;
  }
  Expr additive() {
    Expr e = multiplicative();
    while (is_punct("+") || is_punct("-")) {
      Span s = span();
      std::string op = t_[p_++].text;
      e = node(Expr::Kind::Binary, s, op, {std::move(e), multiplicative()});
    }
    return e;
  }
  Expr multiplicative() {
    Expr e = unary();
    while (is_punct("*") || is_punct("/")) {
      Span s = span();
      std::string op = t_[p_++].text;
      e = node(Expr::Kind::Binary, s, op, {std::move(e), unary()});
    }
    return e;
  }
  Expr unary() {
    if (is_punct("-")) {
      Span s = span();
      ++p_;
      return node(Expr::Kind::Unary, s, "-", {unary()});
    }
    return postfix();
  }
  Expr postfix() {
    Expr e = primary();
    while (is_punct("[")) {
      Span s = span();
      ++p_;
      Expr i = expr();
      punct("]");
      e = node(Expr::Kind::Index, s, {}, {std::move(e), std::move(i)});
    }
    return e;
  }
  Expr primary() {
    Span s = span();
    const Token& t = peek();
    if (t.kind == Token::Kind::Int) {
      Expr e = node(Expr::Kind::Int, s);
      e.i = t.i;
      ++p_;
      return e;
    }
    if (t.kind == Token::Kind::Real) {
      Expr e = node(Expr::Kind::Real, s);
      e.r = t.r;
      ++p_;
      return e;
    }
    if (accept("(")) {
      std::vector<Expr> items{expr()};
      while (accept(",")) items.push_back(expr());
      punct(")");
      if (items.size() == 1) return std::move(items.front());
      return node(Expr::Kind::Tuple, s, {}, std::move(items));
    }
    if (t.kind == Token::Kind::Ident) {
      if (t.text == "in") {
        ++p_;
        punct(".");
        Expr e = node(Expr::Kind::Port, s, ident("input port"));
        if (accept("[")) {
          e.args.push_back(expr());
          punct("]");
        }
        return e;
      }
      if (t.text == "sum" && is_punct("(", 1)) {
        p_ += 2;
        std::string var = ident("loop variable");
        punct("<");
        Expr bound = additive();
        punct(":");
        Expr body = expr();
        punct(")");
        return node(Expr::Kind::Sum, s, var, {std::move(bound), std::move(body)});
      }
      if (kCalls.count(t.text) && is_punct("(", 1)) {
        std::string f = t.text;
        p_ += 2;
        std::vector<Expr> args{expr()};
        while (accept(",")) args.push_back(expr());
        punct(")");
        return node(Expr::Kind::Call, s, f, std::move(args));
      }
      if (kExprKeywords.count(t.text)) expected({"expression"});
      ++p_;
      return node(Expr::Kind::Name, s, t.text);
    }
    expected({"expression"});
  }
};

// ---------------------------------------------------------------------------
// Printer

int prec(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::If: return 0;
    case Expr::Kind::Binary:
      if (e.name == "or") return 1;
      if (e.name == "and") return 2;
      if (e.name == "+" || e.name == "-") return 5;
      if (e.name == "*" || e.name == "/") return 6;
      return 4;
    case Expr::Kind::Unary: return e.name == "not" ? 3 : 7;
    case Expr::Kind::Index: return 8;
    default: return 9;
  }
}

std::string real_text(double r) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, r);
  std::string s(buf, end);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

std::string show(const Expr& e, int min_prec);

std::string list(const std::vector<Expr>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ", " : "") + show(xs[i], 0);
  return s;
}

std::string show(const Expr& e, int min_prec) {
  std::string s;
  const int p = prec(e);
  switch (e.kind) {
    case Expr::Kind::Int: s = std::to_string(e.i); break;
    case Expr::Kind::Real: s = real_text(e.r); break;
    case Expr::Kind::Name: s = e.name; break;
    case Expr::Kind::Star: s = "*"; break;
    case Expr::Kind::Port:
      s = "in." + e.name;
      if (!e.args.empty()) s += "[" + show(e.args[0], 0) + "]";
      break;
    case Expr::Kind::Unary:
      s = e.name == "not" ? "not " + show(e.args[0], 3) : "-" + show(e.args[0], 7);
      break;
    case Expr::Kind::Binary: {
      const bool cmp = p == 4;
      s = show(e.args[0], cmp ? p + 1 : p) + " " + e.name + " " + show(e.args[1], p + 1);
      break;
    }
    case Expr::Kind::If:
      s = "if " + show(e.args[0], 0) + " then " + show(e.args[1], 0) + " else " + show(e.args[2], 0);
      break;
    case Expr::Kind::Tuple: s = "(" + list(e.args) + ")"; break;
    case Expr::Kind::Index: {
      // A bare port followed by [i] would read back as a bus element.
      const bool bare_port = e.args[0].kind == Expr::Kind::Port && e.args[0].args.empty();
      s = (bare_port ? "(" + show(e.args[0], 0) + ")" : show(e.args[0], 8)) + "[" + show(e.args[1], 0) + "]";
      break;
    }
    case Expr::Kind::Call: s = e.name + "(" + list(e.args) + ")"; break;
    case Expr::Kind::Sum: s = "sum(" + e.name + " < " + show(e.args[0], 5) + " : " + show(e.args[1], 0) + ")"; break;
  }
  return p < min_prec ? "(" + s + ")" : s;
}

std::string show_type(const TypeExpr& t) {
  switch (t.kind) {
    case TypeExpr::Kind::Named: return t.name;
    case TypeExpr::Kind::Int: return "int(" + show(t.bounds[0], 0) + ", " + show(t.bounds[1], 0) + ")";
    case TypeExpr::Kind::Enum: {
      std::string s = "enum(";
      for (std::size_t i = 0; i < t.labels.size(); ++i) s += (i ? ", " : "") + t.labels[i];
      return s + ")";
    }
    case TypeExpr::Kind::Product: {
      std::string s = "product(";
      for (std::size_t i = 0; i < t.components.size(); ++i) {
        s += (i ? ", " : "") + show_type(t.components[i]);
        if (t.repeat[i]) s += " ^ " + show(*t.repeat[i], 9);
      }
      return s + ")";
    }
  }
  return "?";
}

std::string show_path(const PortPath& p) {
  std::string s = p.inst;
  if (p.inst_index) s += "[" + show(*p.inst_index, 0) + "]";
  s += p.input ? ".in." : ".out.";
  s += p.port;
  if (p.port_index) s += "[" + show(*p.port_index, 0) + "]";
  return s;
}

std::string show_loops(const std::vector<Loop>& ls) {
  std::string s;
  for (const auto& l : ls) s += "for " + l.var + " < " + show(l.bound, 5) + ": ";
  return s;
}

std::string show_ports(const std::vector<PortDecl>& ports, const std::string& indent) {
  if (ports.empty()) return "{}";
  std::string s = "{\n";
  for (const auto& p : ports) {
    s += indent + "  " + (p.input ? "in " : "out ") + p.name;
    if (p.width) s += "[" + show(*p.width, 0) + "]";
    s += " : " + show_type(p.type) + "\n";
  }
  return s + indent + "}";
}

std::string join(const std::vector<std::string>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ", " : "") + xs[i];
  return s;
}

std::string show_term(const CompTerm& t) {
  std::string s;
  switch (t.kind) {
    case CompTerm::Kind::Name: s = t.name; break;
    case CompTerm::Kind::Id: s = "id(" + t.name + ")"; break;
    case CompTerm::Kind::Tensor:
      for (std::size_t i = 0; i < t.parts.size(); ++i) s += (i ? " * " : "") + show_term(t.parts[i]);
      break;
  }
  if (t.repeat) s += " ^ " + show(*t.repeat, 9);
  return s;
}

struct DeclPrinter {
  std::string operator()(const ConstDecl& d) const { return "const " + d.name + " = " + show(d.value, 0) + "\n"; }
  std::string operator()(const TypeDecl& d) const { return "type " + d.name + " = " + show_type(d.type) + "\n"; }
  std::string operator()(const BoxDecl& d) const {
    if (!d.modal) return "box " + d.name + " " + show_ports(d.ports, "") + "\n";
    std::string s = "modal " + d.name + " {\n";
    for (const auto& m : d.modes) s += "  mode " + join(m.labels) + " " + show_ports(m.ports, "  ") + "\n";
    return s + "}\n";
  }
  std::string operator()(const MorphismDecl& d) const {
    std::string s = "morphism " + d.name + " : (";
    for (std::size_t i = 0; i < d.sources.size(); ++i) {
      const auto& src = d.sources[i];
      s += (i ? ", " : "") + src.box;
      if (src.count) s += "[" + show(*src.count, 0) + "]";
      if (!src.alias.empty()) s += " as " + src.alias;
    }
    s += ") -> " + d.target + " {\n";
    for (const auto& e : d.events) {
      s += "  mode ";
      if (e.pattern.wildcard) {
        s += "_";
      } else {
        for (std::size_t i = 0; i < e.pattern.constraints.size(); ++i) {
          const auto& [inst, label] = e.pattern.constraints[i];
          s += (i ? ", " : "") + (inst.empty() ? label : inst + "=" + label);
        }
      }
      s += " -> " + e.target_mode + " {\n";
      for (const auto& w : e.wires) {
        s += "    " + show_loops(w.loops) + show_path(w.dest) + (w.optional ? "? <- " : " <- ") + show_path(w.src) + "\n";
      }
      s += "  }\n";
    }
    return s + "}\n";
  }
  std::string operator()(const DynamicsDecl& d) const {
    std::string s = "dynamics " + d.name + " on " + d.box + " {\n";
    for (const auto& f : d.fields) s += "  state " + f.name + " : " + show_type(f.type) + "\n";
    if (d.init) s += "  init = " + show(*d.init, 0) + "\n";
    if (d.mode_of) s += "  mode_of = " + show(*d.mode_of, 0) + "\n";
    for (const auto& u : d.updates) s += "  update " + join(u.modes) + " = " + show(u.body, 0) + "\n";
    for (const auto& r : d.readouts) {
      s += "  readout " + join(r.modes) + " {\n";
      for (const auto& l : r.lines) {
        s += "    " + show_loops(l.loops) + l.port;
        if (l.index) s += "[" + show(*l.index, 0) + "]";
        s += " = " + show(l.value, 0) + "\n";
      }
      s += "  }\n";
    }
    return s + "}\n";
  }
  std::string operator()(const ComposeDecl& d) const {
    std::string s = "compose " + d.name + " =";
    for (std::size_t k = 0; k < d.levels.size(); ++k) {
      const auto& level = d.levels[k];
      s += k ? " . " : " ";
      if (k == 0 && level.size() == 1) {
        s += show_term(level[0]);
        continue;
      }
      s += "(";
      for (std::size_t i = 0; i < level.size(); ++i) s += (i ? ", " : "") + show_term(level[i]);
      s += ")";
    }
    return s + "\n";
  }
};

}  // namespace

ParseResult parse(std::string_view text) {
  try {
    Parser p(lex(text));
    return ParseResult{p.document(), std::nullopt};
  } catch (const DslError& e) {
    return ParseResult{std::nullopt, e.diagnostic()};
  }
}

Document parse_or_throw(std::string_view text) {
  auto r = parse(text);
  if (r.error) throw DslError(*r.error);
  return std::move(*r.doc);
}

std::string print(const Document& doc) {
  std::string s;
  for (std::size_t i = 0; i < doc.decls.size(); ++i) {
    if (i) s += "\n";
    s += std::visit(DeclPrinter{}, doc.decls[i]);
  }
  return s;
}

std::string print(const Expr& e) { return show(e, 0); }
std::string print(const TypeExpr& t) { return show_type(t); }

Expr parse_expression(std::string_view text) {
  auto toks = lex(text);
  std::erase_if(toks, [](const Token& t) { return t.kind == Token::Kind::Newline; });
  Parser p(toks);
  Expr e = p.expr();
  p.expect_end();
  return e;
}

}  // namespace mnet::dsl

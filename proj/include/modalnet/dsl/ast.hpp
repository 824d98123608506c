#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

// Syntax tree of a .mdn document. Spans are carried for diagnostics but
// compare equal, so defaulted equality is equality of the tree itself.
namespace mnet::dsl {

struct Span {
  int line = 0;
  int col = 0;
  friend bool operator==(const Span&, const Span&) { return true; }
};

struct Expr {
  enum class Kind {
    Int,     // i
    Real,    // r
    Name,    // name: field, constant, loop variable or enumeration label
    Port,    // in.name, args = [index] for bus elements
    Star,    // [*] in wire paths
    Unary,   // name = "-" | "not"
    Binary,  // name = operator
    If,      // args = cond, then, else
    Tuple,
    Index,  // args = tuple, index
    Call,   // name = min | max | floor | abs | repeat
    Sum,    // sum(name < args[0] : args[1])
  };
  Kind kind = Kind::Int;
  std::int64_t i = 0;
  double r = 0.0;
  std::string name;
  std::vector<Expr> args;
  Span span;

  bool operator==(const Expr&) const = default;
};

struct TypeExpr {
  enum class Kind { Named, Int, Enum, Product };
  Kind kind = Kind::Named;
  std::string name;                 // Named
  std::vector<Expr> bounds;         // Int: lo, hi
  std::vector<std::string> labels;  // Enum
  // Product components; a component with `repeat` stands for that many copies.
  std::vector<TypeExpr> components;
  std::vector<std::optional<Expr>> repeat;
  Span span;

  bool operator==(const TypeExpr&) const = default;
};

struct PortDecl {
  bool input = true;
  std::string name;
  std::optional<Expr> width;  // bus
  TypeExpr type;
  Span span;
  bool operator==(const PortDecl&) const = default;
};

struct ModeDecl {
  std::vector<std::string> labels;
  std::vector<PortDecl> ports;
  Span span;
  bool operator==(const ModeDecl&) const = default;
};

// `box` declares a mode-independent box, `modal` a box with several modes.
struct BoxDecl {
  std::string name;
  bool modal = false;
  std::vector<PortDecl> ports;
  std::vector<ModeDecl> modes;
  Span span;
  bool operator==(const BoxDecl&) const = default;
};

struct SourceDecl {
  std::string box;
  std::optional<Expr> count;  // R[n] declares n instances
  std::string alias;          // empty: the box name
  Span span;
  bool operator==(const SourceDecl&) const = default;
};

struct PortPath {
  std::string inst;
  std::optional<Expr> inst_index;
  bool input = true;
  std::string port;
  std::optional<Expr> port_index;
  Span span;
  bool operator==(const PortPath&) const = default;
};

struct Loop {
  std::string var;
  Expr bound;
  bool operator==(const Loop&) const = default;
};

struct WireStmt {
  std::vector<Loop> loops;
  PortPath dest;
  bool optional = false;  // skipped when the destination is absent in the mode
  PortPath src;
  Span span;
  bool operator==(const WireStmt&) const = default;
};

// `_`, a bare label (single source), or inst=label constraints.
struct ModePattern {
  bool wildcard = false;
  std::vector<std::pair<std::string, std::string>> constraints;
  Span span;
  bool operator==(const ModePattern&) const = default;
};

struct EventBlock {
  ModePattern pattern;
  std::string target_mode;
  std::vector<WireStmt> wires;
  Span span;
  bool operator==(const EventBlock&) const = default;
};

struct MorphismDecl {
  std::string name;
  std::vector<SourceDecl> sources;
  std::string target;
  std::vector<EventBlock> events;  // first match wins
  Span span;
  bool operator==(const MorphismDecl&) const = default;
};

struct FieldDecl {
  std::string name;
  TypeExpr type;
  Span span;
  bool operator==(const FieldDecl&) const = default;
};

struct UpdateRule {
  std::vector<std::string> modes;  // "_" matches any
  Expr body;
  Span span;
  bool operator==(const UpdateRule&) const = default;
};

struct ReadoutLine {
  std::vector<Loop> loops;
  std::string port;
  std::optional<Expr> index;
  Expr value;
  Span span;
  bool operator==(const ReadoutLine&) const = default;
};

struct ReadoutRule {
  std::vector<std::string> modes;
  std::vector<ReadoutLine> lines;
  Span span;
  bool operator==(const ReadoutRule&) const = default;
};

struct DynamicsDecl {
  std::string name;
  std::string box;
  std::vector<FieldDecl> fields;
  std::optional<Expr> init;
  std::optional<Expr> mode_of;
  std::vector<UpdateRule> updates;
  std::vector<ReadoutRule> readouts;
  Span span;
  bool operator==(const DynamicsDecl&) const = default;
};

struct CompTerm {
  enum class Kind { Name, Id, Tensor };
  Kind kind = Kind::Name;
  std::string name;
  std::vector<CompTerm> parts;  // Tensor
  std::optional<Expr> repeat;   // term ^ n
  Span span;
  bool operator==(const CompTerm&) const = default;
};

// levels[0] . levels[1] . ...; each level lists arrows filling the open
// sources of the level before, in order.
struct ComposeDecl {
  std::string name;
  std::vector<std::vector<CompTerm>> levels;
  Span span;
  bool operator==(const ComposeDecl&) const = default;
};

struct ConstDecl {
  std::string name;
  Expr value;
  Span span;
  bool operator==(const ConstDecl&) const = default;
};

struct TypeDecl {
  std::string name;
  TypeExpr type;
  Span span;
  bool operator==(const TypeDecl&) const = default;
};

using Decl = std::variant<ConstDecl, TypeDecl, BoxDecl, MorphismDecl, DynamicsDecl, ComposeDecl>;

struct Document {
  std::vector<Decl> decls;
  bool operator==(const Document&) const = default;
};

}  // namespace mnet::dsl

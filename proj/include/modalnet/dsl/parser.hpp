#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "modalnet/dsl/ast.hpp"
#include "modalnet/error.hpp"

namespace mnet::dsl {

struct Diagnostic {
  ErrorKind kind = ErrorKind::SyntaxError;
  Span span;
  std::string message;
  std::vector<std::string> expected;  // syntax errors only

  std::string to_string() const;  // "line:col: Kind: message"
};

// An Error that knows where in the document it happened.
class DslError : public Error {
 public:
  explicit DslError(Diagnostic d) : Error(d.kind, located(d)), diag_(std::move(d)) {}
  const Diagnostic& diagnostic() const { return diag_; }

 private:
  static std::string located(const Diagnostic& d);
  Diagnostic diag_;
};

[[noreturn]] void fail_at(ErrorKind kind, Span span, std::string message);

struct ParseResult {
  std::optional<Document> doc;
  std::optional<Diagnostic> error;
};

ParseResult parse(std::string_view text);
// parse() that throws the diagnostic as a DslError.
Document parse_or_throw(std::string_view text);
// A single expression, e.g. a constant override. Throws DslError.
Expr parse_expression(std::string_view text);

// Canonical text of a document: parse(print(d)) == d, and printing is
// byte-stable.
std::string print(const Document& doc);
std::string print(const Expr& e);
std::string print(const TypeExpr& t);

}  // namespace mnet::dsl

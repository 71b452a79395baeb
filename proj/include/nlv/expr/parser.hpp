#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "nlv/expr/expr.hpp"

namespace nlv::expr {

/// Syntax or well-formedness error in problem text; `position` is a byte offset.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t position);
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Parses `bound (';' bound)* '|-' expr ('<'|'>') expr` where a bound is
/// `c <= x <= c` (or the halves `c <= x`, `x <= c`, which must pair up).
/// The goal is normalized to `g < 0`. Variables are numbered in the order
/// their bounds first appear.
Problem parse_problem(std::string_view text);

/// Parses a standalone expression over the given variable names.
Expr parse_expression(std::string_view text, const std::vector<std::string>& names);

}  // namespace nlv::expr

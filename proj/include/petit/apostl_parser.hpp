#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "petit/apostl_ast.hpp"

namespace petit::apostl {

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(std::size_t position, std::string expected, std::string found);

  std::size_t position() const { return position_; }
  const std::string& expected() const { return expected_; }
  const std::string& found() const { return found_; }

 private:
  std::size_t position_;
  std::string expected_;
  std::string found_;
};

/// Parses one formula. Throws SyntaxError on input that does not conform to
/// the grammar; the position never exceeds the input length.
Formula parse_formula(std::string_view text);

/// Implementation restrictions checked after parsing. An accepted formula
/// has an empty violation list.
struct Violation {
  enum class Kind {
    NonPureOperation,        // only GET may appear inside formulas
    ThisOutsideComparison,   // `this` in a quantifier call or URL block
    DepthTwoBlockParameter,  // dotted access deeper than one level
    UnknownFunction,         // only `.length` is supported
  };
  Kind kind;
  std::string detail;
};

std::vector<Violation> check_restrictions(const Formula& f);

std::string to_string(Violation::Kind k);

}  // namespace petit::apostl

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dsahs {

enum class Errc {
  parse,
  duplicate_coordinate,
  bad_coordinate,
  invalid_argument,
  invalid_pattern,
  unvalidated_layout,
  unknown_via,
  too_large,
  infeasible,
  io,
};

std::string_view to_string(Errc code);

// Every failure surfaced by the library is an Error carrying a category code.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace dsahs

#include "dsahs/error.hpp"

namespace dsahs {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::parse: return "parse";
    case Errc::duplicate_coordinate: return "duplicate_coordinate";
    case Errc::bad_coordinate: return "bad_coordinate";
    case Errc::invalid_argument: return "invalid_argument";
    case Errc::invalid_pattern: return "invalid_pattern";
    case Errc::unvalidated_layout: return "unvalidated_layout";
    case Errc::unknown_via: return "unknown_via";
    case Errc::too_large: return "too_large";
    case Errc::infeasible: return "infeasible";
    case Errc::io: return "io";
  }
  return "unknown";
}

}  // namespace dsahs

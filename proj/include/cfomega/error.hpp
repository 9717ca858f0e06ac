#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cfomega {

enum class Errc {
  insufficient_quotients,
  invalid_quotient,
  no_quotients,
  insufficient_precision,
  domain_error,
  below_admissible_index,
  insufficient_depth,
  phi_below_one,
  invalid_gap_sequence,
  invalid_index_sequence,
  phi_evaluation_error,
  bit_cap_exceeded,
  parse_error,
  io_error,
};

/// Canonical message prefix for each error code. Every `Error` message starts
/// with this phrase, optionally followed by ": <detail>".
constexpr std::string_view errc_phrase(Errc code) {
  switch (code) {
    case Errc::insufficient_quotients: return "insufficient quotients";
    case Errc::invalid_quotient: return "invalid quotient";
    case Errc::no_quotients: return "no quotients";
    case Errc::insufficient_precision: return "insufficient precision";
    case Errc::domain_error: return "domain error";
    case Errc::below_admissible_index: return "below admissible index";
    case Errc::insufficient_depth: return "insufficient depth";
    case Errc::phi_below_one: return "phi below one";
    case Errc::invalid_gap_sequence: return "invalid gap sequence";
    case Errc::invalid_index_sequence: return "invalid index sequence";
    case Errc::phi_evaluation_error: return "phi evaluation error";
    case Errc::bit_cap_exceeded: return "bit cap exceeded";
    case Errc::parse_error: return "parse error";
    case Errc::io_error: return "io error";
  }
  return "error";
}

class Error : public std::runtime_error {
 public:
  explicit Error(Errc code, std::string_view detail = {})
      : std::runtime_error(compose(code, detail)), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  static std::string compose(Errc code, std::string_view detail) {
    std::string msg(errc_phrase(code));
    if (!detail.empty()) {
      msg += ": ";
      msg += detail;
    }
    return msg;
  }

  Errc code_;
};

}  // namespace cfomega

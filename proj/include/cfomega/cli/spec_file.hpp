#pragma once

// Text spec files: one `key = value` per line, `#` starts a comment. Lists
// are comma or whitespace separated. Integers are decimal or `2^n`; reals
// are decimal strings or exact fractions `a/b`, rounded to the nearest
// double once.
//
// theta files:
//   kind       = explicit | periodic | e_pattern | growth_rule
//   quotients  = a_0, a_1, ...        (explicit)
//   preperiod  = ...                  (periodic, optional)
//   period     = ...                  (periodic)
//   rule       = liouville | square | linear   (growth_rule)
//   seed       = a_0, ..., a_{s-1}    (growth_rule)
//   bit_cap    = N                    (growth_rule, optional)
//
// sequence files:
//   role        = psi | phi
//   kind        = closed_form | step
//   family      = inv_q | inv_q_log | inv_q_log2 | inv_q2 | constant  (psi)
//               | constant | log | log2                               (phi)
//   c           = real, default 1     (closed_form)
//   breakpoints = b_0, ..., b_J       (step)
//   values      = v_1, ..., v_J       (step)

#include <map>
#include <string>
#include <string_view>
#include <variant>

#include <gmpxx.h>

#include "cfomega/cf_core.hpp"
#include "cfomega/sequences.hpp"

namespace cfomega::cli {

/// Parsed key-value lines. Duplicate keys and lines without `=` are
/// `parse_error`s.
std::map<std::string, std::string> parse_key_values(std::string_view text);

mpz_class parse_integer(std::string_view field, std::string_view token);
double parse_real(std::string_view field, std::string_view token);

ThetaSpec parse_theta_spec(std::string_view text);
ThetaSpec load_theta_spec(const std::string& path);
std::string write_theta_spec(const ThetaSpec& spec);

using SequenceSpec = std::variant<PsiSpec, PhiSpec>;

SequenceSpec parse_sequence_spec(std::string_view text);
SequenceSpec load_sequence_spec(const std::string& path);
std::string write_sequence_spec(const SequenceSpec& spec);

/// The psi side of a sequence spec (dualizing a phi file) and vice versa.
PsiSpec as_psi(const SequenceSpec& spec);
PhiSpec as_phi(const SequenceSpec& spec);

std::string read_text_file(const std::string& path);

}  // namespace cfomega::cli

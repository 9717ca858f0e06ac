#include "cfomega/cli/spec_file.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "cfomega/error.hpp"
#include "cfomega/format.hpp"

namespace cfomega::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(std::string_view value) {
  std::vector<std::string> out;
  std::string token;
  for (char ch : value) {
    if (ch == ',' || ch == ' ' || ch == '\t') {
      if (!token.empty()) out.push_back(std::move(token));
      token.clear();
    } else {
      token += ch;
    }
  }
  if (!token.empty()) out.push_back(std::move(token));
  return out;
}

[[noreturn]] void bad_field(std::string_view field, std::string_view what) {
  throw Error(Errc::parse_error, "field '" + std::string(field) + "': " + std::string(what));
}

class Fields {
 public:
  explicit Fields(std::map<std::string, std::string> kv) : kv_(std::move(kv)) {}

  const std::string& required(const std::string& key) {
    auto it = kv_.find(key);
    if (it == kv_.end()) bad_field(key, "missing");
    used_.insert(key);
    return it->second;
  }

  std::optional<std::string> optional(const std::string& key) {
    auto it = kv_.find(key);
    if (it == kv_.end()) return std::nullopt;
    used_.insert(key);
    return it->second;
  }

  std::vector<mpz_class> integers(const std::string& key, bool required_key = true) {
    std::vector<mpz_class> out;
    const auto value = required_key ? std::optional<std::string>(required(key)) : optional(key);
    if (!value) return out;
    for (const auto& tok : split_list(*value)) out.push_back(parse_integer(key, tok));
    return out;
  }

  void finish() const {
    for (const auto& [key, value] : kv_) {
      if (!used_.contains(key)) bad_field(key, "unknown or not applicable to this kind");
    }
  }

 private:
  std::map<std::string, std::string> kv_;
  std::set<std::string> used_;
};

// Nearest double to an exact rational.
double nearest_double(const mpq_class& x) {
  const double d = x.get_d();  // truncated toward zero
  if (!std::isfinite(d)) return d;
  const double up = std::nextafter(d, sgn(x) >= 0 ? INFINITY : -INFINITY);
  if (!std::isfinite(up)) return d;
  const mpq_class e_d = abs(x - mpq_class(d));
  const mpq_class e_up = abs(mpq_class(up) - x);
  if (e_up < e_d) return up;
  if (e_up == e_d) {
    // tie: even mantissa
    return (std::bit_cast<std::uint64_t>(d) & 1U) ? up : d;
  }
  return d;
}

void check_quotients(const std::string& field, const std::vector<mpz_class>& a, bool first_is_a0) {
  for (std::size_t k = 0; k < a.size(); ++k) {
    const bool a0 = first_is_a0 && k == 0;
    if ((a0 && sgn(a[k]) < 0) || (!a0 && a[k] < 1)) {
      throw Error(Errc::invalid_quotient, "field '" + field + "' entry " + std::to_string(k) + " = " + a[k].get_str());
    }
  }
}

std::string join(const std::vector<mpz_class>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i > 0) out += ", ";
    out += xs[i].get_str();
  }
  return out;
}

std::string join(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i > 0) out += ", ";
    out += format_double(xs[i]);
  }
  return out;
}

StepFunction parse_step(Fields& f) {
  auto breakpoints = f.integers("breakpoints");
  std::vector<double> values;
  for (const auto& tok : split_list(f.required("values"))) values.push_back(parse_real("values", tok));
  try {
    return StepFunction(std::move(breakpoints), std::move(values));
  } catch (const Error& e) {
    bad_field("breakpoints", e.what());
  }
}

double parse_scale(Fields& f) {
  const auto c = f.optional("c");
  if (!c) return 1.0;
  const double v = parse_real("c", *c);
  if (!(v > 0.0) || !std::isfinite(v)) bad_field("c", "must be positive");
  return v;
}

void write_step(std::string& out, const StepFunction& s) {
  out += "kind = step\n";
  out += "breakpoints = " + join(s.breakpoints()) + "\n";
  out += "values = " + join(s.values()) + "\n";
}

}  // namespace

std::map<std::string, std::string> parse_key_values(std::string_view text) {
  std::map<std::string, std::string> kv;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(Errc::parse_error, "line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw Error(Errc::parse_error, "line " + std::to_string(line_no) + ": empty key");
    if (!kv.emplace(key, value).second) bad_field(key, "duplicate");
  }
  return kv;
}

mpz_class parse_integer(std::string_view field, std::string_view token) {
  const std::string tok(trim(token));
  mpz_class out;
  if (auto caret = tok.find('^'); caret != std::string::npos) {
    mpz_class base, exp;
    if (base.set_str(tok.substr(0, caret), 10) != 0 || exp.set_str(tok.substr(caret + 1), 10) != 0 ||
        sgn(exp) < 0 || !exp.fits_ulong_p() || exp > 10'000'000) {
      bad_field(field, "not an integer: '" + tok + "'");
    }
    mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), exp.get_ui());
    return out;
  }
  if (tok.empty() || out.set_str(tok, 10) != 0) bad_field(field, "not an integer: '" + tok + "'");
  return out;
}

double parse_real(std::string_view field, std::string_view token) {
  const std::string tok(trim(token));
  if (auto slash = tok.find('/'); slash != std::string::npos) {
    const mpz_class num = parse_integer(field, tok.substr(0, slash));
    const mpz_class den = parse_integer(field, tok.substr(slash + 1));
    if (sgn(den) == 0) bad_field(field, "zero denominator");
    mpq_class x(num, den);
    x.canonicalize();
    return nearest_double(x);
  }
  double v = 0.0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size() || !std::isfinite(v)) {
    bad_field(field, "not a real number: '" + tok + "'");
  }
  return v;
}

ThetaSpec parse_theta_spec(std::string_view text) {
  Fields f(parse_key_values(text));
  const std::string kind = f.required("kind");
  ThetaSpec spec;
  if (kind == "explicit") {
    auto a = f.integers("quotients");
    if (a.empty()) throw Error(Errc::no_quotients, "field 'quotients' is empty");
    check_quotients("quotients", a, true);
    spec = ThetaSpec::explicit_list(std::move(a));
  } else if (kind == "periodic") {
    auto pre = f.integers("preperiod", false);
    auto period = f.integers("period");
    if (period.empty()) bad_field("period", "empty");
    check_quotients("preperiod", pre, true);
    check_quotients("period", period, pre.empty());
    spec = ThetaSpec::periodic(std::move(pre), std::move(period));
  } else if (kind == "e_pattern") {
    spec = ThetaSpec::e_pattern();
  } else if (kind == "growth_rule") {
    const auto& name = f.required("rule");
    const auto rule = growth_rule_from_name(name);
    if (!rule) bad_field("rule", "unknown rule '" + name + "'");
    auto seed = f.integers("seed");
    if (seed.empty()) bad_field("seed", "empty");
    check_quotients("seed", seed, true);
    std::size_t cap = kDefaultBitCap;
    if (auto c = f.optional("bit_cap")) {
      const mpz_class v = parse_integer("bit_cap", *c);
      if (v < 1 || !v.fits_ulong_p()) bad_field("bit_cap", "must be a positive integer");
      cap = v.get_ui();
    }
    spec = ThetaSpec::growth(*rule, std::move(seed), cap);
  } else {
    bad_field("kind", "unknown theta kind '" + kind + "'");
  }
  f.finish();
  return spec;
}

ThetaSpec load_theta_spec(const std::string& path) { return parse_theta_spec(read_text_file(path)); }

std::string write_theta_spec(const ThetaSpec& spec) {
  std::string out = "kind = " + std::string(to_string(spec.kind)) + "\n";
  switch (spec.kind) {
    case ThetaSpec::Kind::explicit_list:
      out += "quotients = " + join(spec.seed) + "\n";
      break;
    case ThetaSpec::Kind::periodic:
      if (!spec.preperiod.empty()) out += "preperiod = " + join(spec.preperiod) + "\n";
      out += "period = " + join(spec.period) + "\n";
      break;
    case ThetaSpec::Kind::e_pattern:
      break;
    case ThetaSpec::Kind::growth_rule:
      out += "rule = " + std::string(to_string(spec.rule)) + "\n";
      out += "seed = " + join(spec.seed) + "\n";
      out += "bit_cap = " + std::to_string(spec.bit_cap) + "\n";
      break;
  }
  return out;
}

SequenceSpec parse_sequence_spec(std::string_view text) {
  Fields f(parse_key_values(text));
  const std::string role = f.required("role");
  const std::string kind = f.required("kind");
  if (role != "psi" && role != "phi") bad_field("role", "expected psi or phi, got '" + role + "'");
  if (kind != "closed_form" && kind != "step") bad_field("kind", "expected closed_form or step, got '" + kind + "'");
  std::optional<SequenceSpec> out;
  if (kind == "step") {
    StepFunction step = parse_step(f);
    if (role == "psi") {
      out.emplace(PsiSpec::step(std::move(step)));
    } else {
      out.emplace(PhiSpec::step(std::move(step)));
    }
  } else {
    const auto& name = f.required("family");
    const double c = parse_scale(f);
    if (role == "psi") {
      const auto family = psi_family_from_name(name);
      if (!family) bad_field("family", "unknown psi family '" + name + "'");
      out.emplace(PsiSpec::closed(*family, c));
    } else {
      const auto family = phi_family_from_name(name);
      if (!family) bad_field("family", "unknown phi family '" + name + "'");
      out.emplace(PhiSpec::closed(*family, c));
    }
  }
  f.finish();
  return std::move(*out);
}

SequenceSpec load_sequence_spec(const std::string& path) { return parse_sequence_spec(read_text_file(path)); }

std::string write_sequence_spec(const SequenceSpec& spec) {
  std::string out;
  if (const auto* psi = std::get_if<PsiSpec>(&spec)) {
    const auto& rep = psi->rep();
    if (const auto* inner = std::get_if<std::shared_ptr<const PhiSpec>>(&rep)) return write_sequence_spec(**inner);
    out = "role = psi\n";
    if (const auto* c = std::get_if<PsiSpec::Closed>(&rep)) {
      out += "kind = closed_form\nfamily = " + std::string(to_string(c->family)) + "\nc = " + format_double(c->c) + "\n";
    } else {
      write_step(out, std::get<StepFunction>(rep));
    }
    return out;
  }
  const auto& phi = std::get<PhiSpec>(spec);
  const auto& rep = phi.rep();
  if (const auto* inner = std::get_if<std::shared_ptr<const PsiSpec>>(&rep)) return write_sequence_spec(**inner);
  out = "role = phi\n";
  if (const auto* c = std::get_if<PhiSpec::Closed>(&rep)) {
    out += "kind = closed_form\nfamily = " + std::string(to_string(c->family)) + "\nc = " + format_double(c->c) + "\n";
  } else {
    write_step(out, std::get<StepFunction>(rep));
  }
  return out;
}

PsiSpec as_psi(const SequenceSpec& spec) {
  if (const auto* psi = std::get_if<PsiSpec>(&spec)) return *psi;
  return dual(std::get<PhiSpec>(spec));
}

PhiSpec as_phi(const SequenceSpec& spec) {
  if (const auto* phi = std::get_if<PhiSpec>(&spec)) return *phi;
  return dual(std::get<PsiSpec>(spec));
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace cfomega::cli

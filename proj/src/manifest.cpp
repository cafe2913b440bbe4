#include <cctype>
#include <cmath>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <system_error>

#include "thinspec/errors.hpp"
#include "thinspec/scenario.hpp"

namespace thinspec {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = s.find(',', start);
    out.push_back(trim(s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

[[noreturn]] void fail(const ManifestEntry& e, const std::string& what) {
  throw Error(Errc::Config, "line " + std::to_string(e.line) + ": key '" + e.key + "': " + what);
}

// Shortest text that parses back to the same double.
std::string shortest(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

double parse_double(const ManifestEntry& e, std::string_view text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  const auto r = std::from_chars(first, last, v);
  if (r.ec != std::errc{} || r.ptr != last || text.empty()) fail(e, "'" + std::string(text) + "' is not a number");
  if (!std::isfinite(v)) fail(e, "value must be finite");
  return v;
}

// Accepts "a", "bi", "a+bi", "a-bi" (also "i" / "-i").
Complex parse_complex(const ManifestEntry& e, const std::string& text) {
  if (text.empty()) fail(e, "empty complex value");
  if (text.back() != 'i') return {parse_double(e, text), 0.0};
  const std::string body = text.substr(0, text.size() - 1);
  std::size_t split = std::string::npos;
  for (std::size_t k = body.size(); k-- > 1;) {
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  auto imag_of = [&](const std::string& t) {
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    return parse_double(e, t);
  };
  if (split == std::string::npos) return {0.0, imag_of(body)};
  return {parse_double(e, body.substr(0, split)), imag_of(body.substr(split))};
}

std::string echo_complex(Complex z) {
  if (z.imag() == 0.0) return shortest(z.real());
  if (z.real() == 0.0) return shortest(z.imag()) + "i";
  return shortest(z.real()) + (z.imag() < 0.0 ? "" : "+") + shortest(z.imag()) + "i";
}

// Column-safe label: 0.5 -> 05, -0.5 -> m05, 0.5i -> 05i.
std::string label_of(const std::string& text) {
  std::string out;
  for (char c : text) {
    if (c == '.') continue;
    if (c == '-') {
      out += 'm';
    } else if (c == '+') {
      out += 'p';
    } else {
      out += c;
    }
  }
  return out;
}

int parse_int(const ManifestEntry& e) {
  int v = 0;
  const auto r = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
  if (r.ec != std::errc{} || r.ptr != e.value.data() + e.value.size()) fail(e, "'" + e.value + "' is not an integer");
  return v;
}

StateKind parse_state(const ManifestEntry& e, const std::string& v) {
  if (v == "coherent") return StateKind::Coherent;
  if (v == "squeezed") return StateKind::Squeezed;
  if (v == "thermal") return StateKind::Thermal;
  if (v == "thermal-coherent") return StateKind::ThermalCoherent;
  fail(e, "unknown state '" + v + "'");
}

ModelKind parse_model(const ManifestEntry& e) {
  const std::string& v = e.value;
  if (v == "order-parameter") return ModelKind::OrderParameter;
  if (v == "q-function") return ModelKind::QFunction;
  if (v == "thin-two-state") return ModelKind::ThinTwoState;
  if (v == "quasiparticle") return ModelKind::Quasiparticle;
  if (v == "multi-symmetry") return ModelKind::MultiSymmetry;
  fail(e, "unknown model '" + v + "'");
}

}  // namespace

Scenario parse_scenario(const std::vector<ManifestEntry>& entries) {
  Scenario s;
  std::set<std::string> seen;
  TrapSpec trap;
  int trap_fields = 0;
  const ManifestEntry* first_trap = nullptr;

  auto number = [&](const ManifestEntry& e) {
    const double v = parse_double(e, e.value);
    s.echo.emplace_back(e.key, shortest(v));
    return v;
  };
  auto numbers = [&](const ManifestEntry& e) {
    std::vector<double> out;
    std::string text;
    for (const auto& tok : split_list(e.value)) {
      out.push_back(parse_double(e, tok));
      text += (text.empty() ? "" : ", ") + shortest(out.back());
    }
    s.echo.emplace_back(e.key, text);
    return out;
  };
  auto trap_field = [&](const ManifestEntry& e, double& field) {
    field = number(e);
    ++trap_fields;
    if (!first_trap) first_trap = &e;
  };

  for (const auto& e : entries) {
    if (!seen.insert(e.key).second) fail(e, "duplicate key");
    if (e.key == "name") {
      s.name = e.value;
    } else if (e.key == "model") {
      s.model = parse_model(e);
    } else if (e.key == "state") {
      s.state = parse_state(e, e.value);
    } else if (e.key == "alpha") {
      s.alpha = parse_complex(e, e.value);
      s.echo.emplace_back(e.key, echo_complex(s.alpha));
    } else if (e.key == "zeta") {
      std::string text;
      for (const auto& tok : split_list(e.value)) {
        s.zeta.push_back(parse_complex(e, tok));
        const std::string canon = echo_complex(s.zeta.back());
        s.zeta_labels.push_back(s.zeta.back() == Complex{} ? "coherent" : "zeta" + label_of(canon));
        text += (text.empty() ? "" : ", ") + canon;
      }
      s.echo.emplace_back(e.key, text);
    } else if (e.key == "T_nK") {
      s.T_nK = numbers(e);
    } else if (e.key == "beta") {
      s.beta = number(e);
    } else if (e.key == "q_times") {
      s.q_times = numbers(e);
    } else if (e.key == "q_extent") {
      s.q_extent = number(e);
    } else if (e.key == "grid_points") {
      s.grid_points = parse_int(e);
      s.echo.emplace_back(e.key, std::to_string(s.grid_points));
    } else if (e.key == "delta") {
      s.delta = numbers(e);
    } else if (e.key == "inertia") {
      s.inertia = number(e);
    } else if (e.key == "occupation") {
      for (const auto& tok : split_list(e.value)) s.occupation.push_back(parse_state(e, tok));
    } else if (e.key == "oracle") {
      if (e.value != "true" && e.value != "false") fail(e, "expected true or false");
      s.oracle = e.value == "true";
    } else if (e.key == "m") {
      s.m = parse_int(e);
      s.echo.emplace_back(e.key, std::to_string(s.m));
    } else if (e.key == "N0") {
      s.N0 = number(e);
    } else if (e.key == "u0rho0") {
      s.u0rho0 = number(e);
    } else if (e.key == "omega_qp") {
      s.omega_qp = number(e);
    } else if (e.key == "a_s") {
      trap_field(e, trap.a_s);
    } else if (e.key == "a_ho") {
      trap_field(e, trap.a_ho);
    } else if (e.key == "rho") {
      trap_field(e, trap.rho);
    } else if (e.key == "N") {
      trap_field(e, trap.N);
    } else if (e.key == "omega_tr") {
      trap_field(e, trap.omega_tr);
    } else if (e.key == "tol") {
      s.tol = number(e);
    } else if (e.key == "t_max") {
      s.t_max = number(e);
    } else if (e.key == "n_points") {
      s.n_points = parse_int(e);
      s.echo.emplace_back(e.key, std::to_string(s.n_points));
    } else if (e.key == "output") {
      s.output = e.value;
    } else {
      throw Error(Errc::Config, "line " + std::to_string(e.line) + ": unknown key '" + e.key + "'");
    }
  }
  if (trap_fields == 5) {
    s.trap = trap;
  } else if (trap_fields > 0) {
    fail(*first_trap, "trap parameters need all of a_s, a_ho, rho, N, omega_tr");
  }
  s.validate();
  return s;
}

std::vector<Scenario> parse_manifest(std::string_view text, std::string_view source) {
  std::vector<Scenario> out;
  std::vector<std::vector<ManifestEntry>> sections;
  std::vector<int> section_lines;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const std::string where = std::string(source) + ":" + std::to_string(line) + ": ";
    if (body.front() == '[') {
      if (body != "[scenario]") throw Error(Errc::Config, where + "unknown section '" + body + "'");
      sections.emplace_back();
      section_lines.push_back(line);
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw Error(Errc::Config, where + "expected 'key = value'");
    if (sections.empty()) throw Error(Errc::Config, where + "entry outside a [scenario] section");
    sections.back().push_back({trim(body.substr(0, eq)), trim(body.substr(eq + 1)), line});
  }

  std::set<std::string> names;
  std::set<std::string> stems;
  for (std::size_t k = 0; k < sections.size(); ++k) {
    const std::string where = std::string(source) + ":" + std::to_string(section_lines[k]) + ": ";
    try {
      out.push_back(parse_scenario(sections[k]));
    } catch (const Error& e) {
      throw Error(e.code(), where + e.message());
    }
    if (!names.insert(out.back().name).second) {
      throw Error(Errc::Config, where + "duplicate scenario name '" + out.back().name + "'");
    }
    if (!stems.insert(out.back().output_stem()).second) {
      throw Error(Errc::Config, where + "duplicate output '" + out.back().output_stem() + "'");
    }
  }
  return out;
}

std::vector<Scenario> load_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open manifest '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_manifest(buf.str(), path);
}

const std::vector<Scenario>& builtin_scenarios() {
  static const std::vector<Scenario> all = parse_manifest(builtin_manifest_text(), "<built-in>");
  return all;
}

const Scenario* find_builtin(std::string_view name) {
  for (const auto& s : builtin_scenarios()) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

}  // namespace thinspec

#include "bwlab/config.hpp"

#include "bwlab/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace bwlab {

namespace {

using json = nlohmann::json;

[[noreturn]] void fail_at(int line, const std::string& msg) {
  throw ConfigError("line " + std::to_string(line) + ": " + msg);
}

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

// Drops a '#' comment; tracks JSON strings so "#" inside quotes survives.
// Returns the bracket depth change of the kept text.
int strip_comment(std::string& line) {
  bool in_str = false, esc = false;
  int depth = 0;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char c = line[k];
    if (in_str) {
      if (esc) esc = false;
      else if (c == '\\') esc = true;
      else if (c == '"') in_str = false;
      continue;
    }
    if (c == '"') in_str = true;
    else if (c == '[' || c == '{') ++depth;
    else if (c == ']' || c == '}') --depth;
    else if (c == '#') {
      line.resize(k);
      break;
    }
  }
  return depth;
}

bool is_bare_word(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return false;
  return true;
}

struct Entry {
  json value;
  int line;
};

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"spectrum", {"positive_energies", "negative_energies"}},
      {"interaction", {"seed"}},
      {"interaction.coulomb", {"scale", "preset", "matrix"}},
      {"interaction.delta", {"scale", "preset", "matrix"}},
      {"integration", {"eta_sequence", "quadrature_points", "cutoff_factor", "j_order"}},
      {"bw", {"order", "max_iter", "tol"}},
      {"solve", {"state_index"}},
  };
  return s;
}

std::map<std::string, Entry> tokenize(std::string_view text) {
  std::map<std::string, Entry> out;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    int depth = strip_comment(raw);
    std::string line = trim(raw);
    if (line.empty()) continue;

    if (line.front() == '[' && line.find('=') == std::string::npos) {
      if (line.back() != ']') fail_at(lineno, "malformed section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (!schema().count(section)) fail_at(lineno, "unknown section [" + section + "]");
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) fail_at(lineno, "expected key = value");
    if (section.empty()) fail_at(lineno, "key outside of any section");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    std::string value = trim(std::string_view(line).substr(eq + 1));
    const int start = lineno;
    while (depth > 0 && std::getline(in, raw)) {
      ++lineno;
      depth += strip_comment(raw);
      value += ' ' + trim(raw);
    }
    if (depth != 0) fail_at(start, "unbalanced brackets in value of '" + key + "'");

    if (!schema().at(section).count(key)) {
      fail_at(start, "unknown key '" + section + "." + key + "'");
    }
    const std::string full = section + "." + key;
    if (out.count(full)) fail_at(start, "duplicate key '" + full + "'");
    if (value.empty()) fail_at(start, "missing value for '" + full + "'");

    json v = json::parse(value, nullptr, false);
    if (v.is_discarded()) {
      if (!is_bare_word(value)) fail_at(start, "cannot parse value of '" + full + "'");
      v = value;
    }
    out.emplace(full, Entry{std::move(v), start});
  }
  return out;
}

[[noreturn]] void bad_type(const std::string& key, const Entry& e, const char* want) {
  fail_at(e.line, "'" + key + "' must be " + want);
}

double as_real(const std::string& key, const Entry& e) {
  if (!e.value.is_number()) bad_type(key, e, "a number");
  const double v = e.value.get<double>();
  if (!std::isfinite(v)) bad_type(key, e, "finite");
  return v;
}

long long as_int(const std::string& key, const Entry& e) {
  if (!e.value.is_number_integer()) bad_type(key, e, "an integer");
  if (e.value.is_number_unsigned() && e.value.get<std::uint64_t>() > 0x7fffffffffffffffull)
    bad_type(key, e, "an integer in range");
  return e.value.get<long long>();
}

std::vector<double> as_reals(const std::string& key, const Entry& e) {
  if (!e.value.is_array()) bad_type(key, e, "a list of numbers");
  std::vector<double> out;
  for (const json& x : e.value) {
    if (!x.is_number()) bad_type(key, e, "a list of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

Matrix as_matrix(const std::string& key, const Entry& e) {
  if (!e.value.is_array() || e.value.empty()) bad_type(key, e, "a nonempty list of rows");
  const auto rows = static_cast<Eigen::Index>(e.value.size());
  Eigen::Index cols = -1;
  Matrix m;
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = e.value[static_cast<std::size_t>(r)];
    if (!row.is_array()) bad_type(key, e, "a list of rows");
    if (cols < 0) {
      cols = static_cast<Eigen::Index>(row.size());
      m.resize(rows, cols);
    }
    if (static_cast<Eigen::Index>(row.size()) != cols) bad_type(key, e, "rectangular");
    for (Eigen::Index c = 0; c < cols; ++c) {
      const json& x = row[static_cast<std::size_t>(c)];
      if (!x.is_number()) bad_type(key, e, "numeric");
      m(r, c) = x.get<double>();
    }
  }
  return m;
}

void read_interaction(const std::map<std::string, Entry>& kv, const std::string& sec,
                      InteractionSpec& spec) {
  if (auto it = kv.find(sec + ".scale"); it != kv.end()) spec.scale = as_real(it->first, it->second);
  const auto p = kv.find(sec + ".preset");
  const auto m = kv.find(sec + ".matrix");
  if (p != kv.end() && m != kv.end()) {
    fail_at(m->second.line, "'" + sec + "' sets both preset and matrix");
  }
  if (p != kv.end()) {
    if (!p->second.value.is_string()) bad_type(p->first, p->second, "a preset name");
    const std::string name = p->second.value.get<std::string>();
    if (name == "ones") spec.matrix.source = MatrixSpec::Preset::ones;
    else if (name == "random-symmetric" || name == "random_symmetric") spec.matrix.source = MatrixSpec::Preset::random_symmetric;
    else fail_at(p->second.line, "unknown preset '" + name + "' for '" + p->first + "'");
  }
  if (m != kv.end()) spec.matrix.source = as_matrix(m->first, m->second);
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt_list(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) s += ", ";
    s += fmt(v[k]);
  }
  return s + "]";
}

void emit_interaction(std::ostringstream& os, const char* name, const InteractionSpec& spec) {
  os << "\n[interaction." << name << "]\n";
  os << "scale = " << fmt(spec.scale) << '\n';
  if (const auto* p = std::get_if<MatrixSpec::Preset>(&spec.matrix.source)) {
    os << "preset = \"" << to_string(*p) << "\"\n";
    return;
  }
  const Matrix& m = std::get<Matrix>(spec.matrix.source);
  os << "matrix = [\n";
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    std::vector<double> row;
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    os << "  " << fmt_list(row) << (r + 1 < m.rows() ? ",\n" : "\n");
  }
  os << "]\n";
}

}  // namespace

void validate(const RunConfig& c) {
  const SingleParticleSpectrum spectrum = build_spectrum(c.model);
  const TwoParticleBasis basis = build_basis(spectrum);
  if (!(c.model.coulomb.scale >= 0.0)) throw ConfigError("coulomb_scale must be ≥ 0");
  if (!(c.model.delta.scale >= 0.0)) throw ConfigError("delta_scale must be ≥ 0");
  if (std::holds_alternative<Matrix>(c.model.coulomb.matrix.source)) {
    (void)base_matrix(c.model.coulomb.matrix, basis.dim(), c.model.seed, InteractionKind::coulomb);
  }
  if (std::holds_alternative<Matrix>(c.model.delta.matrix.source)) {
    (void)base_matrix(c.model.delta.matrix, basis.dim(), c.model.seed, InteractionKind::delta);
  }
  validate(c.integration);
  if (c.bw.order < 1 || c.bw.order > 3) throw ConfigError("bw.order must be 1, 2 or 3");
  if (c.bw.max_iter < 1) throw ConfigError("bw.max_iter must be >= 1");
  if (!(c.bw.tol >= 0.0) || !std::isfinite(c.bw.tol)) throw ConfigError("bw.tol must be >= 0");
  const std::size_t npp = basis.count(PairPattern::pp);
  if (c.state_index >= npp) {
    throw ConfigError("solve.state_index must be below the ++ block size " + std::to_string(npp));
  }
}

RunConfig parse_config_text(std::string_view text) {
  const auto kv = tokenize(text);
  RunConfig c;
  auto get = [&](const char* key) -> const std::pair<const std::string, Entry>* {
    const auto it = kv.find(key);
    return it == kv.end() ? nullptr : &*it;
  };

  if (auto* e = get("spectrum.positive_energies")) c.model.positive_energies = as_reals(e->first, e->second);
  if (auto* e = get("spectrum.negative_energies")) c.model.negative_energies = as_reals(e->first, e->second);
  if (auto* e = get("interaction.seed")) {
    const json& v = e->second.value;
    if (!v.is_number_unsigned()) bad_type(e->first, e->second, "a non-negative integer");
    c.model.seed = v.get<std::uint64_t>();
  }
  read_interaction(kv, "interaction.coulomb", c.model.coulomb);
  read_interaction(kv, "interaction.delta", c.model.delta);

  if (auto* e = get("integration.eta_sequence")) c.integration.eta_sequence = as_reals(e->first, e->second);
  if (auto* e = get("integration.quadrature_points")) c.integration.quadrature_points = static_cast<int>(as_int(e->first, e->second));
  if (auto* e = get("integration.cutoff_factor")) c.integration.cutoff_factor = as_real(e->first, e->second);
  if (auto* e = get("integration.j_order")) c.integration.j_order = static_cast<int>(as_int(e->first, e->second));
  if (auto* e = get("bw.order")) c.bw.order = static_cast<int>(as_int(e->first, e->second));
  if (auto* e = get("bw.max_iter")) c.bw.max_iter = static_cast<int>(as_int(e->first, e->second));
  if (auto* e = get("bw.tol")) c.bw.tol = as_real(e->first, e->second);
  if (auto* e = get("solve.state_index")) {
    const long long s = as_int(e->first, e->second);
    if (s < 0) bad_type(e->first, e->second, "non-negative");
    c.state_index = static_cast<std::size_t>(s);
  }

  validate(c);
  return c;
}

RunConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string emit_config(const RunConfig& c) {
  std::ostringstream os;
  os << "[spectrum]\n";
  os << "positive_energies = " << fmt_list(c.model.positive_energies) << '\n';
  os << "negative_energies = " << fmt_list(c.model.negative_energies) << '\n';
  os << "\n[interaction]\nseed = " << c.model.seed << '\n';
  emit_interaction(os, "coulomb", c.model.coulomb);
  emit_interaction(os, "delta", c.model.delta);
  os << "\n[integration]\n";
  os << "eta_sequence = " << fmt_list(c.integration.eta_sequence) << '\n';
  os << "quadrature_points = " << c.integration.quadrature_points << '\n';
  os << "cutoff_factor = " << fmt(c.integration.cutoff_factor) << '\n';
  os << "j_order = " << c.integration.j_order << '\n';
  os << "\n[bw]\n";
  os << "order = " << c.bw.order << '\n';
  os << "max_iter = " << c.bw.max_iter << '\n';
  os << "tol = " << fmt(c.bw.tol) << '\n';
  os << "\n[solve]\nstate_index = " << c.state_index << '\n';
  return os.str();
}

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace bwlab

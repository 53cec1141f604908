#include "bwlab/report.hpp"

#include "bwlab/config.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <sstream>

namespace bwlab {

namespace {

using ojson = nlohmann::ordered_json;

ojson real(double x) { return std::isfinite(x) ? ojson(x) : ojson(nullptr); }

bool is_scalar_array(const ojson& j) {
  if (!j.is_array()) return false;
  for (const auto& x : j)
    if (x.is_structured()) return false;
  return true;
}

void write(std::ostringstream& os, const ojson& j, int indent, bool flat);

void write_scalar(std::ostringstream& os, const ojson& j) {
  if (j.is_number_float()) os << format_real(j.get<double>());
  else os << j.dump();
}

void write(std::ostringstream& os, const ojson& j, int indent, bool flat) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  const std::string close(static_cast<std::size_t>(indent), ' ');
  if (j.is_object()) {
    if (j.empty()) {
      os << "{}";
      return;
    }
    os << '{';
    bool first = true;
    for (auto it = j.begin(); it != j.end(); ++it) {
      os << (first ? "" : ",");
      if (flat) os << (first ? "" : " ");
      else os << '\n' << pad;
      first = false;
      os << ojson(it.key()).dump() << ": ";
      write(os, it.value(), indent + 2, flat);
    }
    if (!flat) os << '\n' << close;
    os << '}';
  } else if (j.is_array()) {
    if (j.empty()) {
      os << "[]";
      return;
    }
    const bool inline_arr = flat || is_scalar_array(j);
    os << '[';
    bool first = true;
    for (const auto& x : j) {
      os << (first ? "" : ",");
      if (inline_arr) os << (first ? "" : " ");
      else os << '\n' << pad;
      first = false;
      write(os, x, indent + 2, flat);
    }
    if (!inline_arr) os << '\n' << close;
    os << ']';
  } else {
    write_scalar(os, j);
  }
}

ojson ledger_json(const RunReport& r) {
  if (!r.ledger) return nullptr;
  const EnergyLedger& l = *r.ledger;
  ojson j;
  j["E_c"] = real(l.E_c);
  ojson terms = ojson::array();
  for (double x : l.dE) terms.push_back(real(x));
  j["dE"] = terms;
  j["E"] = real(l.E);
  j["deltaE"] = real(l.deltaE);
  j["iterations"] = l.iterations;
  j["residual"] = real(l.residual);
  j["damping"] = real(l.damping);
  if (r.oracle) {
    j["oracle"] = {{"energy", real(r.oracle->energy)}, {"overlap", real(r.oracle->overlap)}};
  } else {
    j["oracle"] = nullptr;
  }
  return j;
}

ojson controversy_json(const RunReport& r) {
  if (!r.controversy) return nullptr;
  const ControversyReport& c = *r.controversy;
  ojson j;
  j["E"] = real(c.E);
  j["deltaE"] = real(c.deltaE);
  j["dE1_direct"] = real(c.dE1_direct);
  j["dE2b_direct"] = real(c.dE2b_direct);
  j["dE2b_gamma_form"] = real(c.dE2b_gamma_form);
  j["sandwich_expectation"] = real(c.sandwich_expectation);
  j["combined_lindgren"] = real(c.combined_lindgren);
  j["combined_dkz"] = real(c.combined_dkz);
  j["combined_dkz_dc_approx"] = real(c.combined_dkz_dc_approx);
  j["difference"] = real(c.difference);
  j["predicted_difference"] = real(c.predicted_difference);
  return j;
}

ojson identities_json(const RunReport& r) {
  if (r.identities.empty()) return nullptr;
  ojson j = ojson::object();
  for (const IdentityRow& row : r.identities) {
    j[row.name] = {{"residual", real(row.residual)},
                   {"tolerance", real(row.tolerance)},
                   {"status", row.status}};
  }
  return j;
}

ojson scan_json(const RunReport& r) {
  if (!r.scan) return nullptr;
  const ScanResult& s = *r.scan;
  ojson rows = ojson::array();
  for (const ScanRow& row : s.rows) {
    ojson o;
    o["lambda"] = real(row.lambda);
    o["difference"] = real(row.difference);
    o["predicted"] = real(row.predicted);
    o["ratio"] = real(row.ratio);
    o["ok"] = row.ok;
    o["error"] = row.ok ? ojson(nullptr) : ojson(row.error);
    rows.push_back(o);
  }
  ojson j;
  j["rows"] = rows;
  if (s.fit) {
    j["fit"] = {{"exponent", real(s.fit->exponent)},
                {"log_prefactor", real(s.fit->log_prefactor)},
                {"r_squared", real(s.fit->r_squared)},
                {"points", s.fit->points}};
  } else {
    j["fit"] = nullptr;
  }
  j["complete"] = s.complete;
  return j;
}

}  // namespace

std::string format_real(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

const std::vector<std::string>& report_keys() {
  static const std::vector<std::string> k{
      "version", "command", "status",      "failure_stage",      "config_hash", "config",
      "ledger",  "controversy", "identity_residuals", "scan", "timings_ms"};
  return k;
}

std::string to_json(const RunReport& r) {
  ojson j;
  j["version"] = kVersion;
  j["command"] = r.command;
  j["status"] = r.status;
  j["failure_stage"] =
      r.failure ? ojson{{"stage", r.failure->stage}, {"message", r.failure->message}} : ojson();
  j["config_hash"] = fnv1a_hex(r.config_text);
  j["config"] = r.config_text;
  j["ledger"] = ledger_json(r);
  j["controversy"] = controversy_json(r);
  j["identity_residuals"] = identities_json(r);
  j["scan"] = scan_json(r);

  std::ostringstream os;
  write(os, j, 0, false);
  // Reopen the object to append timings on one line.
  std::string body = os.str();
  body.erase(body.size() - 2);  // "\n}"
  ojson t = ojson::object();
  for (const auto& [stage, ms] : r.timings_ms) t[stage] = real(ms);
  std::ostringstream tail;
  write(tail, t, 2, true);
  body += ",\n  \"timings_ms\": " + tail.str() + "\n}\n";
  return body;
}

std::string to_table(const RunReport& r) {
  std::vector<std::pair<std::string, std::string>> rows;
  auto add = [&](std::string k, std::string v) { rows.emplace_back(std::move(k), std::move(v)); };
  add("command", r.command);
  add("status", r.status);
  if (r.failure) add("failure", r.failure->stage + ": " + r.failure->message);
  add("config_hash", fnv1a_hex(r.config_text));
  if (r.ledger) {
    const EnergyLedger& l = *r.ledger;
    add("E_c", format_real(l.E_c));
    for (std::size_t n = 0; n < l.dE.size(); ++n) {
      add("dE(" + std::to_string(n + 1) + ")", format_real(l.dE[n]));
    }
    add("E", format_real(l.E));
    add("deltaE", format_real(l.deltaE));
    add("iterations", std::to_string(l.iterations));
    add("bw_residual", format_real(l.residual));
  }
  if (r.oracle) {
    add("E_oracle", format_real(r.oracle->energy));
    add("oracle_overlap", format_real(r.oracle->overlap));
  }
  if (r.controversy) {
    const ControversyReport& c = *r.controversy;
    add("dE1_direct", format_real(c.dE1_direct));
    add("dE2b_direct", format_real(c.dE2b_direct));
    add("combined_lindgren", format_real(c.combined_lindgren));
    add("combined_dkz", format_real(c.combined_dkz));
    add("combined_dkz_dc_approx", format_real(c.combined_dkz_dc_approx));
    add("difference", format_real(c.difference));
    add("predicted_difference", format_real(c.predicted_difference));
  }
  std::size_t w = 0;
  for (const auto& [k, v] : rows) w = std::max(w, k.size());

  std::ostringstream os;
  for (const auto& [k, v] : rows) os << std::left << std::setw(static_cast<int>(w)) << k << "  " << v << '\n';

  if (!r.identities.empty()) {
    std::size_t wn = 8;
    for (const IdentityRow& row : r.identities) wn = std::max(wn, row.name.size());
    os << '\n'
       << std::left << std::setw(static_cast<int>(wn)) << "identity" << "  " << std::setw(24)
       << "residual" << "  " << std::setw(24) << "tolerance" << "  status\n";
    for (const IdentityRow& row : r.identities) {
      os << std::left << std::setw(static_cast<int>(wn)) << row.name << "  " << std::setw(24)
         << format_real(row.residual) << "  " << std::setw(24) << format_real(row.tolerance)
         << "  " << row.status << '\n';
    }
  }
  if (r.scan) {
    os << '\n'
       << std::left << std::setw(24) << "lambda" << "  " << std::setw(24) << "difference" << "  "
       << std::setw(24) << "predicted" << "  ratio\n";
    for (const ScanRow& row : r.scan->rows) {
      os << std::left << std::setw(24) << format_real(row.lambda) << "  ";
      if (!row.ok) {
        os << "failed: " << row.error << '\n';
        continue;
      }
      os << std::setw(24) << format_real(row.difference) << "  " << std::setw(24)
         << format_real(row.predicted) << "  " << format_real(row.ratio) << '\n';
    }
    if (r.scan->fit) {
      os << "slope " << format_real(r.scan->fit->exponent) << "  R^2 "
         << format_real(r.scan->fit->r_squared) << '\n';
    }
  }
  return os.str();
}

std::string scan_csv(const ScanResult& scan) {
  std::ostringstream os;
  os << "lambda,difference,predicted,ratio\n";
  for (const ScanRow& row : scan.rows) {
    if (!row.ok) continue;
    const std::string ratio = std::isfinite(row.ratio) ? format_real(row.ratio) : "nan";
    os << format_real(row.lambda) << ',' << format_real(row.difference) << ','
       << format_real(row.predicted) << ',' << ratio << '\n';
  }
  return os.str();
}

}  // namespace bwlab

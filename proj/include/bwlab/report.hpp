#pragma once

// Run reports: one JSON object per run, an aligned text table, and the scan
// CSV. Floating-point values are written with 17 significant digits;
// non-finite values become null.

#include "bwlab/bw_solver.hpp"
#include "bwlab/controversy.hpp"

#include <optional>
#include <string>
#include <vector>

namespace bwlab {

inline constexpr const char* kVersion = "0.1.0";

struct IdentityRow {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  /// "ok", "fail" or "degenerate" (residual undefined at this configuration)
  std::string status;
  bool passed() const { return status == "ok"; }
};

struct FailureInfo {
  std::string stage;
  std::string message;
};

struct RunReport {
  std::string command;
  /// ok | identity_failure | config_error | degenerate | nonconvergence | partial
  std::string status = "ok";
  std::optional<FailureInfo> failure;
  std::string config_text;  // emit_config output, hashed into config_hash
  std::optional<EnergyLedger> ledger;
  std::optional<OracleResult> oracle;
  std::optional<ControversyReport> controversy;
  std::vector<IdentityRow> identities;
  std::optional<ScanResult> scan;
  std::vector<std::pair<std::string, double>> timings_ms;
};

/// Top-level keys, always present and in this order.
const std::vector<std::string>& report_keys();

/// Pretty-printed JSON. The timings_ms object is always the last member and
/// sits on a single line.
std::string to_json(const RunReport& report);
std::string to_table(const RunReport& report);

/// Header `lambda,difference,predicted,ratio`, one row per scan point.
std::string scan_csv(const ScanResult& scan);

/// %.17g, or "null" when x is not finite.
std::string format_real(double x);

}  // namespace bwlab

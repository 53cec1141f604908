#pragma once

// verify / compare / scan. Each returns a complete report plus the process
// exit code: 0 success, 1 identity failure (verify), 2 config error,
// 3 numerical degeneracy, 4 nonconvergence.

#include "bwlab/config.hpp"
#include "bwlab/report.hpp"

namespace bwlab {

enum ExitCode : int {
  kExitOk = 0,
  kExitIdentity = 1,
  kExitConfig = 2,
  kExitDegenerate = 3,
  kExitNonConvergence = 4,
};

struct CommandResult {
  RunReport report;
  int exit_code = kExitOk;
};

struct ScanOptions {
  double from = 0.02;
  double to = 0.16;
  int points = 4;
};

/// Identity suite. Propagator and resolvent identities are checked at
/// E = E_c; the energy-shift identities at the probe energy
/// E_c + verify_probe_shift(E_c), where dE = E - E_c is nonzero.
CommandResult cmd_verify(const RunConfig& config);
CommandResult cmd_compare(const RunConfig& config);
CommandResult cmd_scan(const RunConfig& config, const ScanOptions& options);

double verify_probe_shift(double E_c);

}  // namespace bwlab

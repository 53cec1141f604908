#pragma once

// Run configuration: a small sectioned key = value format.
//
//   [spectrum]
//   positive_energies = [1.0]
//   negative_energies = [-1.2]
//   [interaction]
//   seed = 7
//   [interaction.coulomb]
//   scale = 0.1
//   preset = "ones"            # or: matrix = [[...], ...]
//   [interaction.delta]
//   scale = 0.05
//   preset = "random-symmetric"
//   [integration]
//   eta_sequence = [4e-3, 2e-3, 1e-3, 5e-4]
//   quadrature_points = 16
//   cutoff_factor = 1e4
//   j_order = 2
//   [bw]
//   order = 3
//   max_iter = 200
//   tol = 0                    # 0 selects the default tolerance
//   [solve]
//   state_index = 0
//
// Values use JSON literal syntax; a bare word is read as a string. Arrays may
// span several lines. '#' starts a comment outside strings.

#include "bwlab/bw_solver.hpp"
#include "bwlab/model_space.hpp"
#include "bwlab/propagators.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace bwlab {

struct RunConfig {
  ModelConfig model;
  IntegrationSettings integration;
  BwControls bw;
  std::size_t state_index = 0;

  bool operator==(const RunConfig&) const = default;
};

/// Parses and validates. Throws ConfigError; syntax errors carry
/// "line N:", invariant violations name the key.
RunConfig parse_config_text(std::string_view text);
RunConfig parse_config_file(const std::filesystem::path& path);

/// Canonical text form; parse_config_text(emit_config(c)) == c.
std::string emit_config(const RunConfig& config);

/// Checks every invariant that does not need a built model.
void validate(const RunConfig& config);

/// FNV-1a 64 of `text`, as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view text);

}  // namespace bwlab

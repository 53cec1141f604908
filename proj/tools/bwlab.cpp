// bwlab: verify | compare | scan

#include "bwlab/commands.hpp"
#include "bwlab/errors.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

namespace {

struct Common {
  std::string config_path;
  std::string format = "table";
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config_path, "Configuration file");
  sub->add_option("--format", c.format, "Output format")
      ->check(CLI::IsMember({"json", "table"}));
  sub->add_option("--seed", c.seed, "Override interaction.seed");
}

int emit(const bwlab::CommandResult& res, const std::string& format) {
  if (format == "json") std::cout << bwlab::to_json(res.report);
  else std::cout << bwlab::to_table(res.report);
  if (res.report.failure) {
    std::cerr << "bwlab: " << res.report.failure->stage << ": " << res.report.failure->message
              << '\n';
  }
  return res.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Brillouin-Wigner sign-convention lab"};
  app.require_subcommand(1);

  Common common;
  bwlab::ScanOptions scan_opts;
  std::string csv_path;

  CLI::App* verify = app.add_subcommand("verify", "Run the identity suite");
  CLI::App* compare = app.add_subcommand("compare", "Run the full pipeline for both conventions");
  CLI::App* scan = app.add_subcommand("scan", "Coupling scan of the convention difference");
  for (CLI::App* sub : {verify, compare, scan}) add_common(sub, common);
  scan->add_option("--scan-from", scan_opts.from, "First coupling multiplier");
  scan->add_option("--scan-to", scan_opts.to, "Last coupling multiplier");
  scan->add_option("--scan-points", scan_opts.points, "Number of geometric points");
  scan->add_option("--csv", csv_path, "Write scan rows as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : bwlab::kExitConfig;
  }

  bwlab::RunConfig config;
  try {
    if (!common.config_path.empty()) config = bwlab::parse_config_file(common.config_path);
    if (common.seed) {
      config.model.seed = *common.seed;
      bwlab::validate(config);
    }
  } catch (const bwlab::ConfigError& e) {
    std::cerr << "bwlab: config error: " << e.what() << '\n';
    return bwlab::kExitConfig;
  }

  if (verify->parsed()) return emit(bwlab::cmd_verify(config), common.format);
  if (compare->parsed()) return emit(bwlab::cmd_compare(config), common.format);

  const bwlab::CommandResult res = bwlab::cmd_scan(config, scan_opts);
  if (!csv_path.empty() && res.report.scan) {
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) {
      std::cerr << "bwlab: cannot write " << csv_path << '\n';
      return bwlab::kExitConfig;
    }
    out << bwlab::scan_csv(*res.report.scan);
  }
  return emit(res, common.format);
}

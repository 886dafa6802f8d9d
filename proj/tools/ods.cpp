// ods: command-line front end for the oscillating-dark-state laboratory.
//
//   ods simulate|plan|fig2|fig3 [--config FILE] [--set key=value]... [--out DIR] [--verify]

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ods/config.hpp"
#include "ods/errors.hpp"
#include "ods/experiments.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ods::IoError("cannot read config '" + path + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

ods::ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& sets) {
  ods::ExperimentConfig cfg;
  if (!path.empty()) cfg = ods::apply_config_text(read_file(path), cfg);
  // --set overrides are applied one per document so they may repeat file keys.
  for (const std::string& s : sets) cfg = ods::apply_config_text(s, cfg);
  cfg.validate();
  return cfg;
}

std::filesystem::path output_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("ODS_OUT_DIR"); env && *env) return env;
  return ".";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Oscillating dark state laboratory for a three-level Lambda atom"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> sets;
  std::string out;
  bool verify = false;
  std::string variant;
  int n_max = 1000;

  const auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key=value configuration file");
    sub->add_option("--set", sets, "override a configuration key (key=value)")->take_all();
    sub->add_option("--out", out, "output directory (default: $ODS_OUT_DIR or .)");
  };

  CLI::App* simulate = app.add_subcommand("simulate", "evolve the master equation and write trajectory.csv");
  common(simulate);
  CLI::App* plan = app.add_subcommand("plan", "plan dphi and retrieval times for a target superposition");
  common(plan);
  plan->add_flag("--verify", verify, "simulate the plan and report the retrieved fidelity");
  CLI::App* fig2 = app.add_subcommand("fig2", "reproduce a fig2 panel (a: Omega=2, b: 0.2, c: 0.08)");
  common(fig2);
  fig2->add_option("variant", variant, "panel a, b or c")->required()->check(CLI::IsMember({"a", "b", "c"}));
  CLI::App* fig3 = app.add_subcommand("fig3", "fidelity to |1> at integer periods");
  common(fig3);
  fig3->add_option("--n-max", n_max, "number of periods to scan")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ods::ExitCode::kUsage);
  }

  try {
    const ods::ExperimentConfig cfg = load_config(config_path, sets);
    const std::filesystem::path dir = output_dir(out);
    if (*simulate) {
      ods::cmd_simulate(cfg, dir, std::cout);
    } else if (*plan) {
      ods::cmd_plan(cfg, verify, std::cout);
    } else if (*fig2) {
      ods::cmd_fig2(variant.front(), cfg, dir, std::cout);
    } else if (*fig3) {
      ods::cmd_fig3(cfg, n_max, dir, std::cout);
    }
  } catch (const ods::Error& e) {
    std::cerr << "ods: " << e.what() << '\n';
    return static_cast<int>(e.exit_code());
  } catch (const std::exception& e) {
    std::cerr << "ods: " << e.what() << '\n';
    return static_cast<int>(ods::ExitCode::kIntegrator);
  }
  return 0;
}

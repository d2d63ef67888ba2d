// mbamp: scattering data, asymptotic formulas and the characteristic oracle
// for the sharp-line Maxwell-Bloch amplifier, driven by a JSON run config.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "json.hpp"
#include "mbamp/errors.hpp"

namespace {

struct Flags {
  std::string config;
  std::string out;
  std::string grid;
  double tol_scale = 1.0;
  bool print_config = false;
  mbamp::cli::CommandOptions opt;
  std::optional<double> slice_x, slice_t;
  std::string grid_file;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "run configuration (JSON)");
  sub->add_option("--out", f.out, "output directory");
  sub->add_option("--grid", f.grid, "(t, x) lattice t0:t1:nt,x0:x1:nx");
  sub->add_option("--tol-scale", f.tol_scale, "multiply every tolerance by this factor")->check(CLI::PositiveNumber);
  sub->add_flag("--print-config", f.print_config, "print the effective configuration and exit");
}

void report(const mbamp::Error& e) {
  nlohmann::json j = {{"error", std::string(mbamp::to_string(e.kind()))}, {"message", e.what()}};
  std::cerr << j.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Maxwell-Bloch amplifier: scattering, asymptotics and oracle"};
  app.require_subcommand(1);
  Flags f;
  const char* names[][2] = {{"scatter", "a(k), b(k), r(k) on the configured k-lattice"},
                            {"zeros", "zeros of b in the upper half-plane"},
                            {"asym", "asymptotic formulas on the (t, x) lattice"},
                            {"simulate", "characteristic oracle; writes grid.bin"},
                            {"compare", "asymptotics against the oracle on the (t, x) lattice"},
                            {"regions", "region classification of the (t, x) lattice"}};
  for (auto& n : names) {
    CLI::App* sub = app.add_subcommand(n[0], n[1]);
    add_common(sub, f);
    if (std::string(n[0]) == "simulate") {
      sub->add_option("--slice-x", f.slice_x, "write slice.csv along fixed x");
      sub->add_option("--slice-t", f.slice_t, "write slice.csv along fixed t");
      sub->add_option("--grid-file", f.grid_file, "slice an existing grid file instead of running")
          ->check(CLI::ExistingFile);
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : mbamp::cli::kExitUsage;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    mbamp::RunConfig cfg = f.config.empty() ? mbamp::RunConfig{} : mbamp::RunConfig::load(f.config);
    if (!f.out.empty()) cfg.out_dir = f.out;
    if (!f.grid.empty()) cfg.grid = mbamp::GridSpec::parse(f.grid);
    if (f.tol_scale != 1.0) cfg.tol = cfg.tol.scaled(f.tol_scale);
    cfg.validate();
    if (f.print_config) {
      std::cout << cfg.to_json();
      return 0;
    }
    f.opt.slice_x = f.slice_x;
    f.opt.slice_t = f.slice_t;
    if (!f.grid_file.empty()) f.opt.grid_file = f.grid_file;
    f.opt.threads = mbamp::cli::threads_from_env();
    mbamp::cli::run(command, cfg, f.opt, std::cerr);
  } catch (const mbamp::Error& e) {
    report(e);
    return mbamp::cli::exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"error", "Internal"}, {"message", e.what()}}.dump() << '\n';
    return mbamp::cli::kExitNumeric;
  }
  return 0;
}

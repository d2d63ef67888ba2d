#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "mbamp/config.hpp"
#include "mbamp/errors.hpp"

namespace mbamp::cli {

struct CommandOptions {
  std::optional<double> slice_x;      // simulate: CSV slice at fixed x
  std::optional<double> slice_t;      // simulate: CSV slice at fixed t
  std::optional<std::string> grid_file;  // simulate: slice an existing grid instead of running
  unsigned threads = 1;
};

/// Exit codes: 0 success, 2 usage or configuration error, 3 numerical failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumeric = 3;

/// Runs one subcommand; artifacts go to cfg.out_dir. Errors propagate as mbamp::Error.
void run(const std::string& command, const RunConfig& cfg, const CommandOptions& opt, std::ostream& log);

/// Worker count from MBAMP_THREADS, else the hardware concurrency.
unsigned threads_from_env();

/// Exit code for an error kind.
int exit_code(ErrorKind kind);

}  // namespace mbamp::cli

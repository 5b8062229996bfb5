#pragma once

#include <string>
#include <vector>

#include "config.hpp"

namespace ruelle::cli {

struct Table {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct Bundle {
  Json report;
  std::vector<Table> tables;
  int exit_code = 0;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitNonConverged = 2;
inline constexpr int kExitPrecondition = 3;

const std::vector<std::string>& command_names();

/// Runs one analysis. Library errors propagate; callers map them to exit codes.
Bundle run_command(const std::string& command, const SystemConfig& cfg);

/// Writes report.json and the tables; `timestamp` is merged in last.
void write_bundle(const Bundle& b, const std::string& dir, const Json& timestamp);

/// Error document for failures before or during a run.
Bundle error_bundle(const std::string& command, const std::string& kind, const std::string& what,
                    int exit_code);

std::string format_number(double x);

}  // namespace ruelle::cli

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "eik/io.hpp"

namespace eik::cli {

inline constexpr const char* kToolVersion = "1.0.0";

enum ExitCode : int { ok = 0, usage = 1, solver_failure = 2, stalled = 3 };

/// Everything needed to rerun a command: the resolved argument list (every
/// default made explicit) plus timings, which replay ignores.
struct RunManifest {
  std::string command;
  std::string tool_version = kToolVersion;
  std::vector<std::string> args;  // without the output directory
  io::KeyValues params;           // flag -> resolved value, for reading
  io::KeyValues timings;

  io::KeyValues to_key_values() const;
  static RunManifest from_key_values(const io::KeyValues& kv);
};

/// Runs one command line (without the program name). Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Re-executes a manifest, writing into `out_dir`.
int replay(const RunManifest& m, const std::filesystem::path& out_dir, std::ostream& out,
           std::ostream& err);

}  // namespace eik::cli

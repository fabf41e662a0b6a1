#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "mmdnav/sim.hpp"

namespace mmdnav::cli {

enum ExitCode : int {
  kOk = 0,
  kUsageError = 1,    // bad flags, missing files, schema violations
  kRuntimeError = 2,  // planning failures and other runtime errors
};

struct RunSpec {
  std::string subcommand;  // run | montecarlo | sweep | histogram
  std::filesystem::path scenario;
  std::optional<std::filesystem::path> config;  // defaults when absent
  std::filesystem::path out_dir = ".";
  std::size_t runs = 100;
  std::optional<std::uint64_t> seed;  // overrides the scenario seed
  PlannerMode mode = PlannerMode::exact;
  long step = -1;  // histogram only; negative counts from the end
  unsigned threads = 1;
};

// Each command writes its outputs under spec.out_dir and reports errors on `err`.
int cmd_run(const RunSpec& spec, std::ostream& err);
int cmd_montecarlo(const RunSpec& spec, std::ostream& err);
int cmd_sweep(const RunSpec& spec, std::ostream& err);
int cmd_histogram(const RunSpec& spec, std::ostream& err);

int dispatch(const RunSpec& spec, std::ostream& err);

/// Full command line entry point: parses flags, then dispatches.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mmdnav::cli

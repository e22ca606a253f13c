#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace enq::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kInternal = 1,  // unexpected failure
  kUsage = 2,     // unknown subcommand, missing or invalid flag
  kIo = 3,        // input missing or output not writable
  kData = 4,      // malformed input, bad snapshot, degenerate training data
};

/// Entry point of the `enq` binary: dispatches to the subcommands ingest,
/// label, extract, train, predict, evaluate, ablate, baseline and synth.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Convenience overload for tests: args exclude the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace enq::cli

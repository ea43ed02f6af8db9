#pragma once

// Benchmark front end: runs the linear, Burgers and spectral experiments and
// writes `<name>.history.csv` / `<name>.summary.json` into the output directory.
//
// Exit codes: 0 converged or stopped at max_iter, 2 divergence (or a final
// relative residual above 1), 1 usage, I/O or parse error.

#include <filesystem>
#include <ostream>
#include <span>
#include <string>

#include "boostconv/solver.hpp"

namespace boostconv::bench {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitDiverged = 2;

/// Environment variable naming a directory searched for relative data paths.
inline constexpr const char* kDataDirEnv = "BOOSTCONV_DATA_DIR";

int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// CSV columns: k, active, accepted, window_m, res2, resinf, relres2, kappa_f
/// and, when `with_energy`, energy_l2. Reals use 17 significant digits.
void write_history_csv(std::ostream& os, const ConvergenceHistory& history, bool with_energy);

/// Resolves `path` as given, then relative to $BOOSTCONV_DATA_DIR.
std::filesystem::path resolve_data_path(const std::filesystem::path& path);

/// Maps a finished run to the CLI exit code.
int exit_code_for(const ConvergenceHistory& history);

}  // namespace boostconv::bench

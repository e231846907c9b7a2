#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace stacktherm::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;   // bad flags, unreadable or malformed input
inline constexpr int kExitSolver = 3;

/// Environment variable naming the directory searched for relative input
/// paths and for a default `stack3.lcf`.
inline constexpr const char* kConfigDirEnv = "STACKTHERM_CONFIG_DIR";

/// Runs the command line `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct CheckOutcome {
    std::string name;
    double value = 0.0;
    double limit = 0.0;
    bool pass = false;
};

/// Oracle, linearity, symmetry and conservation checks on built-in fixtures.
/// `corrupt` perturbs the oracle fixture so the suite must fail.
std::vector<CheckOutcome> run_validation(int rows, int cols, bool corrupt);

}  // namespace stacktherm::cli

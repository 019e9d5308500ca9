#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

namespace neuralrank::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Resolved flags shared by the scoring subcommands.
struct RunConfig {
    std::string manifest_path;
    std::string layer = "last-dense";
    std::int64_t pca_d = 10;
    std::string metric = "cosine";
    std::string denominator = "mean";
    std::string zero_norm = "error";
    std::string format = "json";
    std::uint64_t seed = 0;

    /// Hash over every field above.
    std::string digest() const;
};

/// Runs the command line. Machine-readable output goes to `out` (or the
/// --out file); diagnostics go to `err`. Returns 0, 1 (failure) or 2 (usage).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace neuralrank::cli

#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "migratekit/config.hpp"

// Workspace helpers shared by the orchestrator tests and the acceptance
// binary.

namespace migratekit::testing {

/// A fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag);
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

/// migratekit.toml of the named fixture corpus under `fixtures`.
Config fixture_config(const std::filesystem::path& fixtures, const std::string& name);

/// SHA-256 of every workspace file by relative path, leaving out scratch
/// crates and state.json.
std::map<std::string, std::string> snapshot(const std::filesystem::path& workdir);

/// Paths whose hashes differ or that exist on one side only, joined by
/// newlines; empty when the snapshots match.
std::string snapshot_diff(const std::map<std::string, std::string>& a, const std::map<std::string, std::string>& b);

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

/// Runs the CLI with `args`; `env` entries are set for the child only.
CliResult run_cli(const std::filesystem::path& cli, const std::vector<std::string>& args,
                  const std::map<std::string, std::string>& env = {});

/// Starts the CLI, waits until state.json records at least `records`
/// completed function stages, then sends SIGKILL. Returns false when the
/// run finished before the threshold was reached.
bool run_cli_and_kill(const std::filesystem::path& cli, const std::vector<std::string>& args, int records,
                      const std::filesystem::path& workdir);

}  // namespace migratekit::testing

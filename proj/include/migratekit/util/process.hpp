#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace migratekit {

struct ProcessResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

/// Resolves `program` against PATH (or checks it directly when it contains a
/// slash). Returns nullopt when no executable is found.
std::optional<std::filesystem::path> find_executable(const std::string& program);

/// Runs argv[0] with the given arguments in `cwd`, capturing both streams.
/// Throws IoError when the process cannot be spawned.
ProcessResult run_process(const std::vector<std::string>& argv, const std::filesystem::path& cwd,
                          const std::string& stdin_data = {});

}  // namespace migratekit

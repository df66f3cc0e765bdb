#pragma once

#include <filesystem>
#include <string>

#include "migratekit/rust_prober.hpp"

namespace migratekit::testing {

/// Scaffold whose scratch crates live under the system temp dir, one tree
/// per test binary so parallel ctest entries never share crates.
inline ScaffoldConfig scaffold(const std::string& tag = "unit") {
    ScaffoldConfig s;
    s.scratch_root = std::filesystem::temp_directory_path() / ("migratekit-test-" + tag);
    return s;
}

inline ProbeOptions probe_options(int max_iters = 20, const std::string& tag = "unit") {
    ProbeOptions o;
    o.max_iters = max_iters;
    o.scaffold = scaffold(tag);
    return o;
}

}  // namespace migratekit::testing

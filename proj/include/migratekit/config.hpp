#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "migratekit/backend.hpp"
#include "migratekit/context_prober.hpp"
#include "migratekit/translator.hpp"

namespace migratekit {

/// Parses the TOML subset used by config files: [section] headers, bare
/// keys, basic and literal strings, integers, floats, booleans and
/// (possibly multi-line) arrays of those. Returns {section: {key: value}};
/// keys before any header land under "". Throws ConfigError with a line.
nlohmann::json parse_toml_subset(std::string_view text);

struct Config {
    std::filesystem::path config_dir;  // relative paths below resolve against it

    // [codebase]
    std::filesystem::path root;
    std::vector<std::string> files;  // relative to root; empty means all of root
    std::vector<std::string> defines;
    std::string module_name = "module";

    // [backend]
    std::string backend = "replay";  // replay, live-http, fallback-rule
    std::filesystem::path fixture;
    HttpBackendConfig http;

    int retry_cap = 3;     // [translate]
    std::vector<std::string> rules;
    int jobs = 1;
    LazinessConfig laziness;  // [laziness]
    ContextOptions context;   // [context]
    int max_iters = 20;       // [probe]
    std::string rustc = "rustc";
    std::string edition = "2021";
    bool no_std = false;
    int repair_cap = 3;  // [repair]
    int max_diagnostics = 20;

    std::optional<std::filesystem::path> catalog;         // [catalog] path
    std::optional<std::filesystem::path> fallback_store;  // [fallback] store
    std::optional<std::filesystem::path> reference;       // [report] reference module for CodeBLEU

    /// Every setting, paths as given; the basis of the config hash.
    nlohmann::json to_json() const;
    std::string hash() const;
};

/// Throws ConfigError for unknown keys, wrong types and out-of-range values.
Config config_from_toml(std::string_view text, const std::filesystem::path& config_dir);
/// Throws IoError when the file is unreadable.
Config load_config(const std::filesystem::path& path);

/// Backend for `config.backend`. The live backend reads its credential from
/// MIGRATEKIT_API_KEY.
std::unique_ptr<Backend> make_backend(const Config& config);

}  // namespace migratekit

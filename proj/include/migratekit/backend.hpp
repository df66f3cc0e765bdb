#pragma once

#include <filesystem>
#include <condition_variable>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

namespace migratekit {

enum class Task { translate, repair };

struct CompletionRequest {
    Task task = Task::translate;
    std::string unit_id;   // FunctionUnit id
    std::string prompt;
    std::string c_source;  // core C function text; used by the rule backend
    std::string function_name;
    int round = 1;  // attempt number for translate, repair round for repair
};

/// A source of completions. Implementations are safe for concurrent use.
class Backend {
public:
    virtual ~Backend() = default;
    virtual std::string complete(const CompletionRequest& request) = 0;
    virtual std::string kind() const = 0;
};

/// Completions recorded in a JSON fixture. Lookup is by SHA-256 of the
/// prompt; when a prompt is not recorded, per-unit scripted lists keyed
/// "translate/<id>" or "repair/<id>" are used. Each list is consumed in order.
class ReplayBackend : public Backend {
public:
    explicit ReplayBackend(const std::filesystem::path& fixture);
    explicit ReplayBackend(nlohmann::json fixture);

    std::string complete(const CompletionRequest& request) override;
    std::string kind() const override { return "replay"; }

    static std::string scripted_key(Task task, const std::string& unit_id);

private:
    std::map<std::string, std::vector<std::string>> by_hash_;
    std::map<std::string, std::vector<std::string>> scripted_;
    std::map<std::string, std::size_t> cursor_;
    std::mutex mu_;
};

struct HttpBackendConfig {
    std::string endpoint;  // e.g. https://api.openai.com/v1/chat/completions
    std::string model;
    std::string api_key_env = "MIGRATEKIT_API_KEY";
    double temperature = 0.0;
    int timeout_seconds = 120;
    int max_parallel = 4;
};

/// Chat-completion style HTTP endpoint.
class HttpBackend : public Backend {
public:
    explicit HttpBackend(HttpBackendConfig config);
    std::string complete(const CompletionRequest& request) override;
    std::string kind() const override { return "live-http"; }

private:
    HttpBackendConfig config_;
    std::string api_key_;
    std::mutex mu_;
    std::condition_variable slot_free_;
    int in_flight_ = 0;
};

/// Answers translation requests with the naive unsafe transpilation of the
/// core; repair requests get the same text back, so a failing unit goes
/// straight to fallback.
class RuleBackend : public Backend {
public:
    std::string complete(const CompletionRequest& request) override;
    std::string kind() const override { return "fallback-rule"; }
};

/// Records every request/response pair so a live session can be frozen into
/// a replay fixture.
class RecordingBackend : public Backend {
public:
    explicit RecordingBackend(Backend& inner) : inner_(inner) {}
    std::string complete(const CompletionRequest& request) override;
    std::string kind() const override { return inner_.kind(); }
    nlohmann::json fixture() const;

private:
    Backend& inner_;
    mutable std::mutex mu_;
    std::map<std::string, std::vector<std::string>> recorded_;
};

}  // namespace migratekit

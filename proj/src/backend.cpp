#include "migratekit/backend.hpp"

#include <cstdlib>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "migratekit/errors.hpp"
#include "migratekit/naive_transpiler.hpp"
#include "migratekit/util/fs.hpp"
#include "migratekit/util/hash.hpp"

namespace migratekit {

namespace {

std::map<std::string, std::vector<std::string>> string_lists(const nlohmann::json& j, const char* key) {
    std::map<std::string, std::vector<std::string>> out;
    if (!j.contains(key)) return out;
    for (const auto& [k, v] : j.at(key).items()) out[k] = v.get<std::vector<std::string>>();
    return out;
}

}  // namespace

ReplayBackend::ReplayBackend(const std::filesystem::path& fixture)
    : ReplayBackend([&] {
          try {
              return nlohmann::json::parse(fs::read_file(fixture));
          } catch (const nlohmann::json::exception& e) {
              throw FixtureMiss("replay fixture " + fixture.string() + " is not valid JSON: " + e.what());
          }
      }()) {}

ReplayBackend::ReplayBackend(nlohmann::json fixture)
    : by_hash_(string_lists(fixture, "completions")), scripted_(string_lists(fixture, "scripted")) {}

std::string ReplayBackend::scripted_key(Task task, const std::string& unit_id) {
    return std::string(task == Task::translate ? "translate/" : "repair/") + unit_id;
}

std::string ReplayBackend::complete(const CompletionRequest& request) {
    std::lock_guard lock(mu_);
    std::string hash = sha256_hex(request.prompt);
    auto take = [&](const std::string& key, const std::vector<std::string>& list) -> std::optional<std::string> {
        auto& cur = cursor_[key];
        if (cur >= list.size()) return std::nullopt;
        return list[cur++];
    };
    if (auto it = by_hash_.find(hash); it != by_hash_.end())
        if (auto c = take("sha256:" + hash, it->second)) return *c;
    std::string key = scripted_key(request.task, request.unit_id);
    if (auto it = scripted_.find(key); it != scripted_.end())
        if (auto c = take(key, it->second)) return *c;
    throw FixtureMiss("no recorded completion for " + key + " (prompt sha256 " + hash + ")");
}

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
    if (const char* key = std::getenv(config_.api_key_env.c_str())) api_key_ = key;
    if (config_.max_parallel < 1) config_.max_parallel = 1;
}

std::string HttpBackend::complete(const CompletionRequest& request) {
    if (api_key_.empty()) throw BackendUnavailable("environment variable " + config_.api_key_env + " is not set");
    auto scheme_end = config_.endpoint.find("://");
    if (scheme_end == std::string::npos) throw BackendUnavailable("malformed endpoint " + config_.endpoint);
    auto path_start = config_.endpoint.find('/', scheme_end + 3);
    std::string base = config_.endpoint.substr(0, path_start);
    std::string path = path_start == std::string::npos ? "/" : config_.endpoint.substr(path_start);

    {
        std::unique_lock lock(mu_);
        slot_free_.wait(lock, [&] { return in_flight_ < config_.max_parallel; });
        ++in_flight_;
    }
    struct Release {
        HttpBackend* self;
        ~Release() {
            std::lock_guard lock(self->mu_);
            --self->in_flight_;
            self->slot_free_.notify_one();
        }
    } release{this};

    nlohmann::json body = {{"model", config_.model},
                           {"temperature", config_.temperature},
                           {"messages", {{{"role", "user"}, {"content", request.prompt}}}}};
    httplib::Client client(base);
    client.set_read_timeout(config_.timeout_seconds, 0);
    client.set_connection_timeout(30, 0);
    client.set_bearer_token_auth(api_key_);
    auto res = client.Post(path, body.dump(), "application/json");
    if (!res) throw BackendUnavailable("request to " + base + " failed: " + httplib::to_string(res.error()));
    if (res->status != 200)
        throw BackendUnavailable("endpoint answered HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 300));
    try {
        auto j = nlohmann::json::parse(res->body);
        return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw BackendUnavailable(std::string("unexpected response shape: ") + e.what());
    }
}

std::string RuleBackend::complete(const CompletionRequest& request) {
    try {
        return "```rust\n" + naive_transpile(request.c_source) + "\n```\n";
    } catch (const UnsupportedConstruct& e) {
        return std::string("// cannot translate: ") + e.what() + "\n";
    }
}

std::string RecordingBackend::complete(const CompletionRequest& request) {
    std::string out = inner_.complete(request);
    std::lock_guard lock(mu_);
    recorded_[sha256_hex(request.prompt)].push_back(out);
    return out;
}

nlohmann::json RecordingBackend::fixture() const {
    std::lock_guard lock(mu_);
    return {{"completions", recorded_}};
}

}  // namespace migratekit

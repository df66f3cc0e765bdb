#include "support/workspace.hpp"

#include <chrono>
#include <csignal>
#include <random>
#include <thread>

#include <fcntl.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

#include "migratekit/util/fs.hpp"
#include "migratekit/util/hash.hpp"
#include "migratekit/util/process.hpp"

extern char** environ;

namespace migratekit::testing {

TempDir::TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("migratekit-" + tag + "-" + std::to_string(rd()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
}

Config fixture_config(const std::filesystem::path& fixtures, const std::string& name) {
    return load_config(fixtures / name / "migratekit.toml");
}

std::map<std::string, std::string> snapshot(const std::filesystem::path& workdir) {
    std::map<std::string, std::string> out;
    for (const auto& e : std::filesystem::recursive_directory_iterator(workdir)) {
        if (!e.is_regular_file()) continue;
        auto rel = std::filesystem::relative(e.path(), workdir).generic_string();
        if (rel.rfind("scratch/", 0) == 0 || rel == "state.json") continue;
        out[rel] = sha256_hex(fs::read_file(e.path()));
    }
    return out;
}

std::string snapshot_diff(const std::map<std::string, std::string>& a, const std::map<std::string, std::string>& b) {
    std::string out;
    for (const auto& [path, hash] : a) {
        auto it = b.find(path);
        if (it == b.end()) out += "only before: " + path + "\n";
        else if (it->second != hash) out += "differs: " + path + "\n";
    }
    for (const auto& [path, hash] : b)
        if (!a.count(path)) out += "only after: " + path + "\n";
    return out;
}

namespace {

class ScopedEnv {
public:
    explicit ScopedEnv(const std::map<std::string, std::string>& env) : env_(env) {
        for (const auto& [k, v] : env_) ::setenv(k.c_str(), v.c_str(), 1);
    }
    ~ScopedEnv() {
        for (const auto& [k, v] : env_) ::unsetenv(k.c_str());
    }

private:
    std::map<std::string, std::string> env_;
};

int recorded_stages(const std::filesystem::path& state) {
    try {
        auto j = nlohmann::json::parse(fs::read_file(state));
        int n = 0;
        for (const auto& [id, f] : j.at("functions").items()) n += static_cast<int>(f.at("hashes").size());
        return n;
    } catch (const std::exception&) {
        return 0;
    }
}

}  // namespace

CliResult run_cli(const std::filesystem::path& cli, const std::vector<std::string>& args,
                  const std::map<std::string, std::string>& env) {
    ScopedEnv scoped(env);
    std::vector<std::string> argv{cli.string()};
    argv.insert(argv.end(), args.begin(), args.end());
    auto r = run_process(argv, std::filesystem::current_path());
    return {r.exit_code, r.out, r.err};
}

bool run_cli_and_kill(const std::filesystem::path& cli, const std::vector<std::string>& args, int records,
                      const std::filesystem::path& workdir) {
    std::vector<std::string> argv{cli.string()};
    argv.insert(argv.end(), args.begin(), args.end());
    argv.push_back("--workdir");
    argv.push_back(workdir.string());
    std::vector<char*> cargs;
    for (auto& a : argv) cargs.push_back(a.data());
    cargs.push_back(nullptr);

    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_addopen(&actions, 1, "/dev/null", O_WRONLY, 0);
    posix_spawn_file_actions_addopen(&actions, 2, "/dev/null", O_WRONLY, 0);
    pid_t pid = 0;
    int rc = posix_spawn(&pid, cargs[0], &actions, nullptr, cargs.data(), environ);
    posix_spawn_file_actions_destroy(&actions);
    if (rc != 0) return false;

    bool killed = false;
    while (true) {
        int status = 0;
        if (::waitpid(pid, &status, WNOHANG) == pid) break;
        if (recorded_stages(workdir / "state.json") >= records) {
            ::kill(pid, SIGKILL);
            ::waitpid(pid, &status, 0);
            killed = WIFSIGNALED(status);
            break;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(2));
    }
    return killed;
}

}  // namespace migratekit::testing

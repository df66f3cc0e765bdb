#include "migratekit/util/process.hpp"

#include <cerrno>
#include <cstdlib>
#include <csignal>
#include <cstring>

#include <fcntl.h>
#include <poll.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include "migratekit/errors.hpp"
#include "migratekit/util/text.hpp"

extern char** environ;

namespace migratekit {

std::optional<std::filesystem::path> find_executable(const std::string& program) {
    if (program.empty()) return std::nullopt;
    if (program.find('/') != std::string::npos) {
        if (::access(program.c_str(), X_OK) == 0) return std::filesystem::path(program);
        return std::nullopt;
    }
    const char* path_env = std::getenv("PATH");
    if (!path_env) return std::nullopt;
    std::string path(path_env);
    std::size_t start = 0;
    while (start <= path.size()) {
        auto colon = path.find(':', start);
        auto dir = path.substr(start, colon == std::string::npos ? std::string::npos : colon - start);
        if (!dir.empty()) {
            auto candidate = std::filesystem::path(dir) / program;
            if (::access(candidate.c_str(), X_OK) == 0) return candidate;
        }
        if (colon == std::string::npos) break;
        start = colon + 1;
    }
    return std::nullopt;
}

namespace {

struct Pipe {
    int fd[2] = {-1, -1};
    Pipe() {
        if (::pipe2(fd, O_CLOEXEC) != 0) throw IoError(std::string("pipe: ") + std::strerror(errno));
    }
    ~Pipe() {
        close_read();
        close_write();
    }
    void close_read() {
        if (fd[0] >= 0) ::close(fd[0]);
        fd[0] = -1;
    }
    void close_write() {
        if (fd[1] >= 0) ::close(fd[1]);
        fd[1] = -1;
    }
    Pipe(const Pipe&) = delete;
    Pipe& operator=(const Pipe&) = delete;
};

class FileActions {
public:
    FileActions() { posix_spawn_file_actions_init(&actions_); }
    ~FileActions() { posix_spawn_file_actions_destroy(&actions_); }
    posix_spawn_file_actions_t* get() { return &actions_; }
    FileActions(const FileActions&) = delete;
    FileActions& operator=(const FileActions&) = delete;

private:
    posix_spawn_file_actions_t actions_;
};

}  // namespace

ProcessResult run_process(const std::vector<std::string>& argv, const std::filesystem::path& cwd,
                          const std::string& stdin_data) {
    if (argv.empty()) throw IoError("run_process: empty argv");
    auto exe = find_executable(argv[0]);
    if (!exe) throw IoError("executable not found: " + argv[0]);

    Pipe in, out, err;
    FileActions actions;
    posix_spawn_file_actions_adddup2(actions.get(), in.fd[0], STDIN_FILENO);
    posix_spawn_file_actions_adddup2(actions.get(), out.fd[1], STDOUT_FILENO);
    posix_spawn_file_actions_adddup2(actions.get(), err.fd[1], STDERR_FILENO);
    if (!cwd.empty()) posix_spawn_file_actions_addchdir_np(actions.get(), cwd.c_str());

    std::vector<char*> args;
    args.reserve(argv.size() + 1);
    for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);

    pid_t pid = 0;
    int rc = posix_spawn(&pid, exe->c_str(), actions.get(), nullptr, args.data(), environ);
    if (rc != 0) throw IoError("cannot spawn " + argv[0] + ": " + std::strerror(rc));
    in.close_read();
    out.close_write();
    err.close_write();

    std::size_t written = 0;
    if (!stdin_data.empty()) {
        static const bool sigpipe_ignored = (std::signal(SIGPIPE, SIG_IGN), true);
        (void)sigpipe_ignored;
    }
    if (stdin_data.empty()) in.close_write();

    ProcessResult result;
    char buf[8192];
    while (out.fd[0] >= 0 || err.fd[0] >= 0) {
        pollfd fds[3];
        int n = 0;
        int out_idx = -1, err_idx = -1, in_idx = -1;
        if (out.fd[0] >= 0) { fds[n] = {out.fd[0], POLLIN, 0}; out_idx = n++; }
        if (err.fd[0] >= 0) { fds[n] = {err.fd[0], POLLIN, 0}; err_idx = n++; }
        if (in.fd[1] >= 0) { fds[n] = {in.fd[1], POLLOUT, 0}; in_idx = n++; }
        if (::poll(fds, static_cast<nfds_t>(n), -1) < 0) {
            if (errno == EINTR) continue;
            break;
        }
        auto drain = [&](int idx, Pipe& p, std::string& sink) {
            if (idx < 0 || !(fds[idx].revents & (POLLIN | POLLHUP | POLLERR))) return;
            auto got = ::read(p.fd[0], buf, sizeof buf);
            if (got <= 0) p.close_read();
            else sink.append(buf, static_cast<std::size_t>(got));
        };
        drain(out_idx, out, result.out);
        drain(err_idx, err, result.err);
        if (in_idx >= 0 && (fds[in_idx].revents & (POLLOUT | POLLERR | POLLHUP))) {
            auto put = ::write(in.fd[1], stdin_data.data() + written, stdin_data.size() - written);
            if (put <= 0) in.close_write();
            else written += static_cast<std::size_t>(put);
            if (written >= stdin_data.size()) in.close_write();
        }
    }
    in.close_write();

    int status = 0;
    while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
    return result;
}

}  // namespace migratekit

#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "migratekit/backend.hpp"
#include "migratekit/c_frontend.hpp"
#include "migratekit/catalog.hpp"
#include "migratekit/config.hpp"
#include "migratekit/fusor.hpp"
#include "migratekit/metrics.hpp"
#include "migratekit/repairer.hpp"

namespace migratekit {

enum class Stage { split, cprobe, translate, rustprobe, repair, fuse, review, report };
std::string to_string(Stage s);
/// Throws ConfigError for unknown names.
Stage stage_from_string(const std::string& s);

/// A function lane that stopped; later stages skip it.
struct LaneFailure {
    std::string id;
    Stage stage = Stage::cprobe;
    std::string kind;  // the error class, e.g. "FixtureMiss"
    std::string message;
};

struct RunSummary {
    int exit_code = 0;  // 0 success, 2 partial
    std::vector<LaneFailure> halted;
    bool module_compiles = false;
    std::vector<std::string> residue;  // "<unit>: <reason>"
    std::size_t conflicts = 0;
    MetricsReport report;
};

struct ReviewSummary {
    int accepted = 0;
    int rejected = 0;
    bool nothing_to_review = false;
    bool module_compiles = false;
    std::size_t residue_left = 0;
    std::size_t conflicts_left = 0;
};

/// Workspace paths. Per-function artifacts live under functions/ with the
/// id turned into a file stem.
struct Workspace {
    std::filesystem::path dir;

    std::filesystem::path state() const { return dir / "state.json"; }
    std::filesystem::path callgraph() const { return dir / "callgraph.json"; }
    std::filesystem::path split() const { return dir / "split.json"; }
    std::filesystem::path catalog() const { return dir / "catalog.json"; }
    std::filesystem::path scratch() const { return dir / "scratch"; }
    std::filesystem::path functions() const { return dir / "functions"; }
    std::filesystem::path function(const std::string& id, const std::string& suffix) const;
    std::filesystem::path fused_rs() const { return dir / "fused.rs"; }
    std::filesystem::path module_rs() const { return dir / "module.rs"; }
    std::filesystem::path module_json() const { return dir / "module.json"; }
    std::filesystem::path fusion_log() const { return dir / "fusion_log.json"; }
    std::filesystem::path conflicts() const { return dir / "conflicts.json"; }
    std::filesystem::path review() const { return dir / "review.json"; }
    std::filesystem::path report_json() const { return dir / "report.json"; }
    std::filesystem::path report_md() const { return dir / "report.md"; }
};

/// Drives the stages over one workspace. Every per-function artifact is
/// written atomically before state.json records it, and a stage whose input
/// hash matches the recorded one is skipped, so an interrupted run resumes
/// where it stopped and re-runs are no-ops.
class Pipeline {
public:
    /// `backend` overrides the one the config names.
    Pipeline(Config config, std::filesystem::path workdir, std::unique_ptr<Backend> backend = nullptr);
    ~Pipeline();

    /// split through fuse, then report. Lane failures never stop the run.
    RunSummary run();

    void split();
    void cprobe();
    void translate();
    void rustprobe();
    void repair();
    void fuse();
    /// Line-oriented session: `list`, `show <name>`, `edit <name>` followed
    /// by the replacement item and a line holding only `.end`, and `quit`.
    ReviewSummary review(std::istream& in, std::ostream& out);
    MetricsReport report();

    /// Moves a function back so `from` and later stages run again.
    void retry(const std::string& id, Stage from);

    std::vector<LaneFailure> halted() const;
    /// 0 when nothing halted and the module compiles with no open conflicts.
    int exit_code() const;

    const Workspace& workspace() const { return ws_; }
    const Config& config() const { return config_; }

private:
    struct Impl;
    Config config_;
    Workspace ws_;
    std::unique_ptr<Backend> backend_;
    std::unique_ptr<Impl> impl_;
};

nlohmann::json to_json(const LaneFailure& f);

}  // namespace migratekit

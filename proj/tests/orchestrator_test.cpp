#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "migratekit/errors.hpp"
#include "migratekit/orchestrator.hpp"
#include "migratekit/util/fs.hpp"
#include "support/workspace.hpp"

using namespace migratekit;
using testing::TempDir;

namespace {

const std::filesystem::path kFixtures = MIGRATEKIT_FIXTURES;
const std::filesystem::path kCli = MIGRATEKIT_CLI;

Config minic() { return testing::fixture_config(kFixtures, "minic"); }

/// Compares against a committed file, rewriting it when
/// MIGRATEKIT_UPDATE_GOLDEN is set.
void check_golden(const std::string& actual, const std::filesystem::path& golden) {
    if (std::getenv("MIGRATEKIT_UPDATE_GOLDEN")) fs::write_file_atomic(golden, actual);
    REQUIRE(std::filesystem::exists(golden));
    CHECK(actual == fs::read_file(golden));
}

/// minic replay fixture without the scripted translation of `id`.
std::filesystem::path fixture_without(const std::filesystem::path& dir, const std::string& id) {
    auto j = nlohmann::json::parse(fs::read_file(kFixtures / "minic" / "replay.json"));
    j["scripted"].erase("translate/" + id);
    auto out = dir / "replay.json";
    fs::write_file_atomic(out, j.dump(2));
    return out;
}

}  // namespace

TEST_CASE("the mini-C corpus runs end to end and matches the committed golden output") {
    TempDir dir("golden");
    Pipeline p(minic(), dir.path());
    auto s = p.run();
    CHECK(s.exit_code == 0);
    CHECK(s.halted.empty());
    CHECK(s.module_compiles);
    CHECK(s.residue.empty());
    CHECK(s.report.per_function.size() == 11);
    CHECK(s.report.module.csr == Ratio{11, 11});
    check_golden(fs::read_file(p.workspace().module_rs()), kFixtures / "minic" / "expected" / "module.rs");
    check_golden(fs::read_file(p.workspace().report_md()), kFixtures / "minic" / "expected" / "report.md");

    SUBCASE("a second run changes nothing") {
        auto before = testing::snapshot(dir.path());
        auto state = fs::read_file(p.workspace().state());
        Pipeline again(minic(), dir.path());
        CHECK(again.run().exit_code == 0);
        CHECK(testing::snapshot(dir.path()) == before);
        CHECK(fs::read_file(p.workspace().state()) == state);
    }
    SUBCASE("rustprobe with unchanged inputs is a no-op") {
        auto before = testing::snapshot(dir.path());
        auto state = fs::read_file(p.workspace().state());
        p.rustprobe();
        CHECK(testing::snapshot(dir.path()) == before);
        CHECK(fs::read_file(p.workspace().state()) == state);
    }
    SUBCASE("report alone reproduces the run's report bytes") {
        auto json = fs::read_file(p.workspace().report_json());
        auto md = fs::read_file(p.workspace().report_md());
        Pipeline fresh(minic(), dir.path());
        fresh.report();
        CHECK(fs::read_file(p.workspace().report_json()) == json);
        CHECK(fs::read_file(p.workspace().report_md()) == md);
    }
    SUBCASE("edits made outside review are flagged at report time") {
        fs::write_file_atomic(p.workspace().module_rs(), fs::read_file(p.workspace().module_rs()) + "// note\n");
        auto r = p.report();
        REQUIRE_FALSE(r.flags.empty());
        CHECK(r.flags.front().find("outside review") != std::string::npos);
    }
    SUBCASE("nothing to review when the module is clean") {
        std::istringstream in("list\n");
        std::ostringstream out;
        auto r = p.review(in, out);
        CHECK(r.nothing_to_review);
        CHECK(out.str() == "nothing to review\n");
    }
}

TEST_CASE("parallel translation writes the same artifacts as a serial run") {
    TempDir serial("serial"), parallel("parallel");
    auto c = minic();
    Pipeline(c, serial.path()).run();
    c.jobs = 4;
    Pipeline(c, parallel.path()).run();
    CHECK(testing::snapshot_diff(testing::snapshot(serial.path()), testing::snapshot(parallel.path())) == "");
}

TEST_CASE("stage commands name the artifact they are missing") {
    TempDir dir("prereq");
    Pipeline p(minic(), dir.path());
    auto message = [](auto&& fn) {
        try {
            fn();
        } catch (const MissingPrerequisite& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    CHECK(message([&] { p.cprobe(); }).find("split.json") != std::string::npos);
    p.split();
    CHECK(message([&] { p.translate(); }).find(".ctx.json") != std::string::npos);
    CHECK(message([&] { p.rustprobe(); }).find(".translate.json") != std::string::npos);
    CHECK(message([&] { p.fuse(); }).find(".repair.json") != std::string::npos);
    CHECK(message([&] { p.report(); }).find("module.json") != std::string::npos);
    std::istringstream in;
    std::ostringstream out;
    CHECK(message([&] { p.review(in, out); }).find("module.json") != std::string::npos);
}

TEST_CASE("a missing fixture entry halts one lane and leaves unrelated lanes untouched") {
    TempDir full("full"), partial("partial");
    Pipeline(minic(), full.path()).run();

    auto c = minic();
    c.fixture = fixture_without(partial.path(), "acc.c::acc_mean");
    auto work = partial.path() / "work";
    Pipeline p(c, work);
    auto s = p.run();
    CHECK(s.exit_code == 2);
    REQUIRE(s.halted.size() == 1);
    CHECK(s.halted[0].id == "acc.c::acc_mean");
    CHECK(s.halted[0].stage == Stage::translate);
    CHECK(s.halted[0].kind == "FixtureMiss");

    // Only run_all calls acc_mean; every other lane matches the clean run.
    auto a = testing::snapshot(full.path()), b = testing::snapshot(work);
    for (const auto& [path, hash] : a) {
        if (path.rfind("functions/", 0) != 0) continue;
        if (path.find("acc_mean") != std::string::npos || path.find("run_all") != std::string::npos) continue;
        CAPTURE(path);
        CHECK(b[path] == hash);
    }

    SUBCASE("the halted lane is retried once the fixture is complete") {
        Pipeline fixed(minic(), work);
        CHECK(fixed.run().exit_code == 0);
        CHECK(fs::read_file(fixed.workspace().module_rs()) == fs::read_file(full.path() / "module.rs"));
    }
    SUBCASE("retry moves a function back to the requested stage") {
        Pipeline fixed(minic(), work);
        fixed.retry("acc.c::acc_mean", Stage::translate);
        CHECK(fixed.halted().empty());
        CHECK_THROWS_AS(fixed.retry("acc.c::nope", Stage::translate), ConfigError);
        CHECK_THROWS_AS(fixed.retry("acc.c::acc_mean", Stage::split), ConfigError);
    }
}

TEST_CASE("a configured catalog that does not exist falls back to a generated one") {
    TempDir dir("nocatalog");
    auto c = minic();
    c.catalog = dir.path() / "absent" / "catalog.json";
    Pipeline p(c, dir.path() / "work");
    CHECK(p.run().exit_code == 0);
    auto split = nlohmann::json::parse(fs::read_file(p.workspace().split()));
    REQUIRE_FALSE(split["warnings"].empty());
    CHECK(split["warnings"][0].get<std::string>().find("not found") != std::string::npos);
}

TEST_CASE("the conflict fixture is settled through review") {
    TempDir dir("conflict");
    Pipeline p(testing::fixture_config(kFixtures, "conflict"), dir.path());
    auto s = p.run();
    CHECK(s.exit_code == 2);
    CHECK(s.conflicts == 1);
    auto conflicts = nlohmann::json::parse(fs::read_file(p.workspace().conflicts()));
    REQUIRE(conflicts.size() == 1);
    CHECK(conflicts[0]["name"] == "helper");

    SUBCASE("an edit that does not compile is rejected and nothing changes") {
        auto before = testing::snapshot(dir.path());
        std::istringstream in("edit helper\nfn helper(x: i32) -> i32 {\n    x + \"1\"\n}\n.end\nquit\n");
        std::ostringstream out;
        auto r = p.review(in, out);
        CHECK(r.rejected == 1);
        CHECK(r.accepted == 0);
        CHECK(out.str().find("E0277") != std::string::npos);
        CHECK(testing::snapshot(dir.path()) == before);
    }
    SUBCASE("the scripted session empties the conflict report") {
        std::ifstream in(kFixtures / "conflict" / "review.script");
        std::ostringstream out;
        auto r = p.review(in, out);
        CHECK(r.rejected == 2);
        CHECK(r.accepted == 1);
        CHECK(r.conflicts_left == 0);
        CHECK(r.residue_left == 0);
        CHECK(nlohmann::json::parse(fs::read_file(p.workspace().conflicts())).empty());
        CHECK(p.exit_code() == 0);
        auto report = p.report();
        CHECK(report.per_function["a.c::helper"].provenance == "manual");
        CHECK(report.flags.empty());

        std::istringstream again("list\n");
        std::ostringstream out2;
        CHECK(p.review(again, out2).nothing_to_review);
    }
    SUBCASE("a changed replacement is counted as manually modified lines") {
        std::istringstream in("edit helper\nfn helper(x: i32) -> i32 {\n    x + 3\n}\n.end\n");
        std::ostringstream out;
        CHECK(p.review(in, out).accepted == 1);
        auto report = p.report();
        CHECK(report.module.mml_count == 1);
        CHECK(report.per_function["a.c::helper"].mml == 1);
        auto review = nlohmann::json::parse(fs::read_file(p.workspace().review()));
        REQUIRE(review["edits"].size() == 1);
        CHECK(review["edits"][0]["after"] == "fn helper(x: i32) -> i32 {\n    x + 3\n}");
    }
}

TEST_CASE("the 18-function corpus follows the scripted repair trajectory") {
    TempDir dir("mathlib");
    Pipeline p(testing::fixture_config(kFixtures, "mathlib"), dir.path());
    auto s = p.run();
    const auto& by_round = s.report.module.csr_by_round;
    REQUIRE(by_round.size() == 4);
    CHECK(by_round[0] == Ratio{7, 18});
    CHECK(by_round[1] == Ratio{12, 18});
    CHECK(by_round[2] == Ratio{14, 18});
    CHECK(by_round[3] == Ratio{15, 18});
    CHECK(s.report.module.csr == Ratio{15, 18});
    CHECK(s.exit_code == 2);  // three functions are left for review
}

TEST_CASE("the command line reports exit codes and resumes after a kill") {
    TempDir dir("cli");
    auto config = (kFixtures / "minic" / "migratekit.toml").string();
    auto ref = dir.path() / "ref";
    auto r = testing::run_cli(kCli, {"run", "--config", config, "--workdir", ref.string()});
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("| minic |") != std::string::npos);
    auto expected = testing::snapshot(ref);

    SUBCASE("fatal errors exit 1") {
        auto bad = dir.path() / "bad.toml";
        fs::write_file_atomic(bad, "[repair]\ncap = 0\n");
        auto e = testing::run_cli(kCli, {"run", "--config", bad.string(), "--workdir", (dir.path() / "x").string()});
        CHECK(e.exit_code == 1);
        CHECK(e.err.find("ConfigError") != std::string::npos);
        auto m = testing::run_cli(kCli, {"translate", "--config", config, "--workdir", (dir.path() / "y").string()});
        CHECK(m.exit_code == 1);
        CHECK(m.err.find("MissingPrerequisite") != std::string::npos);
    }
    SUBCASE("conflicts left for review exit 2") {
        auto c = testing::run_cli(kCli, {"run", "--config", (kFixtures / "conflict" / "migratekit.toml").string(),
                                         "--workdir", (dir.path() / "c").string()});
        CHECK(c.exit_code == 2);
    }
    SUBCASE("stage commands in sequence give the same module as run") {
        auto w = (dir.path() / "staged").string();
        for (const char* stage : {"split", "cprobe", "translate", "rustprobe", "repair", "fuse", "report"}) {
            CAPTURE(stage);
            CHECK(testing::run_cli(kCli, {stage, "--config", config, "--workdir", w}).exit_code == 0);
        }
        CHECK(testing::snapshot_diff(expected, testing::snapshot(w)) == "");
    }
    SUBCASE("an injected crash after any committed write resumes to identical artifacts") {
        for (int n : {1, 6, 17, 29, 40, 46}) {
            CAPTURE(n);
            auto w = (dir.path() / ("crash" + std::to_string(n))).string();
            auto c = testing::run_cli(kCli, {"run", "--config", config, "--workdir", w},
                                      {{"MIGRATEKIT_CRASH_AFTER_WRITES", std::to_string(n)}});
            CHECK(c.exit_code == 75);
            CHECK(testing::run_cli(kCli, {"run", "--config", config, "--workdir", w}).exit_code == 0);
            CHECK(testing::snapshot_diff(expected, testing::snapshot(w)) == "");
        }
    }
    SUBCASE("SIGKILL mid-run resumes to identical artifacts") {
        auto w = dir.path() / "killed";
        bool killed = testing::run_cli_and_kill(kCli, {"run", "--config", config}, 20, w);
        CHECK(killed);
        CHECK(testing::run_cli(kCli, {"run", "--config", config, "--workdir", w.string()}).exit_code == 0);
        CHECK(testing::snapshot_diff(expected, testing::snapshot(w)) == "");
    }
}

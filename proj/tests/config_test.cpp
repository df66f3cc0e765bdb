#include <doctest.h>

#include "migratekit/config.hpp"
#include "migratekit/errors.hpp"

using namespace migratekit;

namespace {

const char* kMinimal = R"([codebase]
root = "src"

[backend]
kind = "replay"
fixture = "replay.json"
)";

std::string with(const std::string& extra) { return std::string(kMinimal) + extra; }

}  // namespace

TEST_CASE("the TOML subset reader handles the value kinds configs use") {
    auto j = parse_toml_subset(R"(# leading comment
[a]
s = "tab\tquote\" done"  # trailing comment
lit = 'C:\raw\path'
n = -42
f = 0.25
yes = true
no = false
list = [
  "x",   # one
  "y",
]
empty = []
[b]
nums = [1, 2, 3]
)");
    CHECK(j["a"]["s"] == "tab\tquote\" done");
    CHECK(j["a"]["lit"] == "C:\\raw\\path");
    CHECK(j["a"]["n"] == -42);
    CHECK(j["a"]["f"] == doctest::Approx(0.25));
    CHECK(j["a"]["yes"] == true);
    CHECK(j["a"]["no"] == false);
    CHECK(j["a"]["list"] == nlohmann::json::array({"x", "y"}));
    CHECK(j["a"]["empty"].empty());
    CHECK(j["b"]["nums"] == nlohmann::json::array({1, 2, 3}));
}

TEST_CASE("malformed TOML is reported with its line") {
    auto message = [](const char* text) {
        try {
            parse_toml_subset(text);
        } catch (const ConfigError& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    CHECK(message("[a]\nx = \"open\n") .find("line 2") != std::string::npos);
    CHECK(message("[a]\nx = 1\nx = 2\n").find("appears twice") != std::string::npos);
    CHECK(message("[a]\n[a]\n").find("appears twice") != std::string::npos);
    CHECK(message("[a]\nx 1\n").find("line 2") != std::string::npos);
    CHECK(message("[a]\nx = [1, 2\n").find("line") != std::string::npos);
    CHECK(message("[a]\nx = 1 y\n").find("line 2") != std::string::npos);
}

TEST_CASE("configs resolve paths against their directory and apply defaults") {
    auto c = config_from_toml(with("[catalog]\npath = \"cat.json\"\n"), "/work/cfg");
    CHECK(c.root == std::filesystem::path("/work/cfg/src"));
    CHECK(c.fixture == std::filesystem::path("/work/cfg/replay.json"));
    REQUIRE(c.catalog);
    CHECK(*c.catalog == std::filesystem::path("/work/cfg/cat.json"));
    CHECK(c.retry_cap == 3);
    CHECK(c.repair_cap == 3);
    CHECK(c.max_iters == 20);
    CHECK(c.laziness.ratio_threshold == doctest::Approx(0.4));
    CHECK_FALSE(c.fallback_store);
}

TEST_CASE("invalid settings are rejected") {
    auto rejects = [](const std::string& text) {
        CAPTURE(text);
        CHECK_THROWS_AS(config_from_toml(text, "/cfg"), ConfigError);
    };
    rejects(with("[translate]\nretry_cap = 0\n"));
    rejects(with("[repair]\ncap = 0\n"));
    rejects(with("[probe]\nmax_iters = 0\n"));
    rejects(with("[context]\nline_budget = 0\n"));
    rejects(with("[laziness]\nratio_threshold = 0.0\n"));
    rejects(with("[laziness]\nratio_threshold = 1.5\n"));
    rejects(with("[context]\non_overflow = \"ignore\"\n"));
    rejects(with("[translate]\nretry = 3\n"));
    rejects(with("[unknown]\nx = 1\n"));
    rejects(with("[translate]\nretry_cap = \"three\"\n"));
    rejects("[codebase]\nroot = \"src\"\n[backend]\nkind = \"replay\"\n");
    rejects("[codebase]\nroot = \"src\"\n[backend]\nkind = \"live-http\"\n");
    rejects("[codebase]\nroot = \"src\"\n[backend]\nkind = \"oracle\"\n");
    rejects("root = \"src\"\n");

    CHECK_NOTHROW(config_from_toml(with("[laziness]\nratio_threshold = 1.0\n"), "/cfg"));
    CHECK_NOTHROW(config_from_toml("[backend]\nkind = \"fallback-rule\"\n", "/cfg"));
}

TEST_CASE("the config hash follows every setting") {
    auto a = config_from_toml(kMinimal, "/cfg");
    auto b = config_from_toml(kMinimal, "/cfg");
    auto c = config_from_toml(with("[repair]\ncap = 2\n"), "/cfg");
    CHECK(a.hash() == b.hash());
    CHECK(a.hash() != c.hash());
}

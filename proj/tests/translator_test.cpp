#include <doctest.h>

#include <cstdlib>
#include <filesystem>

#include "migratekit/backend.hpp"
#include "migratekit/errors.hpp"
#include "migratekit/translator.hpp"
#include "migratekit/util/fs.hpp"
#include "migratekit/util/hash.hpp"

using namespace migratekit;

namespace {

const char* kSource = R"(#define SCALE 4
struct pair { int lo; int hi; };
int total;
int clamp(int v, int lo, int hi);

int span(struct pair *p)
{
    int d = p->hi - p->lo;
    total += d;
    return clamp(d * SCALE, 0, 100);
}

int clamp(int v, int lo, int hi)
{
    if (v < lo) return lo;
    if (v > hi) return hi;
    return v;
}
)";

TranslationUnit unit_for(const std::string& name, const std::string& source = kSource) {
    auto module = parse_sources({{"m.c", source, FileKind::source, {}}});
    CodebaseIndex index(module);
    for (const auto& f : module.functions)
        if (f.name == name) return probe_context(f, index);
    FAIL("no function " << name);
    return {};
}

ReplayBackend scripted(const std::string& id, const std::vector<std::string>& completions) {
    return ReplayBackend(nlohmann::json{{"completions", nlohmann::json::object()},
                                        {"scripted", {{ReplayBackend::scripted_key(Task::translate, id), completions}}}});
}

std::string fenced(const std::string& code) { return "```rust\n" + code + "\n```\n"; }

const std::string kSpanRust =
    "pub fn span(p: *mut pair) -> i32 {\n    let d = unsafe { (*p).hi - (*p).lo };\n"
    "    unsafe { total += d; }\n    clamp(d * SCALE, 0, 100)\n}";

}  // namespace

TEST_CASE("translation prompt has context, guidelines and rules in order") {
    auto unit = unit_for("span");
    auto prompt = render_translation_prompt(unit, {"Do not use the std crate."});
    auto ctx = prompt.find("## Code context");
    auto guide = prompt.find("## Translation guidelines");
    auto rules = prompt.find("## Project requirements");
    REQUIRE(ctx != std::string::npos);
    CHECK(ctx < guide);
    CHECK(guide < rules);
    CHECK(prompt.find("int total;") < prompt.find("int clamp(int v, int lo, int hi);"));
    CHECK(prompt.find("Translate only the function `span`") != std::string::npos);
    CHECK(prompt.find("- Do not use the std crate.") > rules);
    CHECK(sha256_hex(prompt) == sha256_hex(render_translation_prompt(unit_for("span"), {"Do not use the std crate."})));

    auto golden = std::filesystem::path(MIGRATEKIT_FIXTURES) / "translate" / "prompt.golden";
    if (std::getenv("MIGRATEKIT_UPDATE_GOLDEN")) fs::write_file_atomic(golden, prompt);
    CHECK(prompt == fs::read_file(golden));
}

TEST_CASE("empty context blocks are marked, not dropped") {
    auto unit = unit_for("clamp");
    auto prompt = render_translation_prompt(unit, {});
    CHECK(prompt.find("### External variables\n```c\n/* none */\n```") != std::string::npos);
    CHECK(prompt.find("### Called functions\n```c\n/* none */\n```") != std::string::npos);
    CHECK(prompt.find("- (none)") != std::string::npos);
}

TEST_CASE("translate: retry loop over replayed completions") {
    auto unit = unit_for("span");
    const std::string broken = fenced("pub fn span(p: *mut pair) -> i32 { let d = ; }");

    SUBCASE("first completion valid") {
        auto b = scripted("m.c::span", {fenced(kSpanRust)});
        auto t = translate(unit, b);
        CHECK(t.attempts == 1);
        CHECK(t.status == TranslationStatus::syntax_ok);
        CHECK(rust::check_syntax(t.rust_text).empty());
    }
    SUBCASE("two broken, then valid") {
        auto b = scripted("m.c::span", {broken, broken, fenced(kSpanRust)});
        auto t = translate(unit, b);
        CHECK(t.attempts == 3);
        CHECK(t.status == TranslationStatus::syntax_ok);
        CHECK(t.completions.size() == 3);
    }
    SUBCASE("three broken exhaust the cap") {
        auto b = scripted("m.c::span", {broken, broken, broken, fenced(kSpanRust)});
        auto t = translate(unit, b);
        CHECK(t.attempts == 3);
        CHECK(t.status == TranslationStatus::syntax_failed);
        CHECK(t.completions.back() == broken);
        CHECK_FALSE(t.issues.empty());
    }
    SUBCASE("cap below one") {
        auto b = scripted("m.c::span", {});
        TranslateOptions o;
        o.retry_cap = 0;
        CHECK_THROWS_AS(translate(unit, b, o), ConfigError);
    }
    SUBCASE("no recorded completion") {
        auto b = scripted("m.c::other", {});
        CHECK_THROWS_AS(translate(unit, b), FixtureMiss);
    }
}

TEST_CASE("translate keeps only the core and restores its name") {
    auto unit = unit_for("span");
    std::string extra = "pub struct pair { pub lo: i32, pub hi: i32 }\n"
                        "pub fn clamp(v: i32, lo: i32, hi: i32) -> i32 { v }\n" +
                        kSpanRust;
    auto b = scripted("m.c::span", {"Sure:\n" + fenced(extra)});
    auto t = translate(unit, b);
    CHECK(t.status == TranslationStatus::syntax_ok);
    CHECK(t.rust_text == kSpanRust);
    CHECK_FALSE(t.renamed);

    std::string renamed = kSpanRust;
    renamed.replace(renamed.find("span"), 4, "pair_span");
    auto b2 = scripted("m.c::span", {fenced(renamed)});
    auto t2 = translate(unit, b2);
    CHECK(t2.renamed);
    CHECK(t2.rust_text == kSpanRust);

    // A completion without a fence is taken whole.
    auto b3 = scripted("m.c::span", {kSpanRust});
    CHECK(translate(unit, b3).rust_text == kSpanRust);
}

TEST_CASE("check_syntax examples") {
    CHECK(rust::check_syntax("fn f() -> i32 { 0 }").empty());
    auto issues = rust::check_syntax("fn f( { }");
    REQUIRE_FALSE(issues.empty());
    CHECK(issues[0].line == 1);
}

TEST_CASE("laziness: placeholder and ratio rules") {
    std::string c12 = "int f(int *v)\n{\n";
    std::string r12 = "pub fn f(v: &mut [i32]) -> i32 {\n";
    for (int i = 0; i < 12; ++i) {
        c12 += "    v[" + std::to_string(i) + "] += " + std::to_string(i) + ";\n";
        r12 += "    v[" + std::to_string(i) + "] += " + std::to_string(i) + ";\n";
    }
    c12 += "    return v[0];\n}\n";
    r12 += "    v[0]\n}\n";
    auto faithful = detect_laziness(c12, r12);
    CHECK_FALSE(faithful.lazy);
    CHECK(faithful.evidence.empty());

    auto fig1 = detect_laziness(c12, "pub fn f(v: &mut [i32]) -> i32 {\n    // ... rest of the implementation\n    0\n}");
    CHECK(fig1.lazy);
    REQUIRE_FALSE(fig1.evidence.empty());
    CHECK(fig1.evidence[0].rule == "placeholder-comment");
    CHECK(fig1.evidence[0].detail == "// ... rest of the implementation");

    // 40 C statements against 6 Rust statements, no comment.
    std::string c40 = "void g(int *v)\n{\n", r6 = "pub fn g(v: &mut [i32]) {\n";
    for (int i = 0; i < 40; ++i) c40 += "    v[" + std::to_string(i) + "] = " + std::to_string(i) + ";\n";
    for (int i = 0; i < 6; ++i) r6 += "    v[" + std::to_string(i) + "] = " + std::to_string(i) + ";\n";
    c40 += "}\n";
    r6 += "}\n";
    auto ratio = detect_laziness(c40, r6);
    CHECK(ratio.lazy);
    CHECK(ratio.c_statements == 40);
    CHECK(ratio.rust_statements == 6);
    CHECK(ratio.ratio == doctest::Approx(0.15));
    CHECK(ratio.evidence.at(0).rule == "statement-ratio");

    CHECK_THROWS_AS(detect_laziness("", r6), EmptyInput);
}

TEST_CASE("laziness detector agrees with every hand-labeled pair") {
    auto path = std::filesystem::path(MIGRATEKIT_FIXTURES) / "laziness" / "labeled.json";
    auto pairs = nlohmann::json::parse(fs::read_file(path)).at("pairs");
    REQUIRE(pairs.size() >= 40);
    for (const auto& p : pairs) {
        CAPTURE(p.at("id").get<std::string>());
        auto v = detect_laziness(p.at("c").get<std::string>(), p.at("rust").get<std::string>());
        CHECK(v.lazy == p.at("lazy").get<bool>());
        CHECK(v.lazy == !v.evidence.empty());
    }
}

TEST_CASE("translated functions round-trip through JSON") {
    auto unit = unit_for("span");
    auto b = scripted("m.c::span", {fenced(kSpanRust)});
    auto t = translate(unit, b);
    auto back = translated_function_from_json(to_json(t));
    CHECK(to_json(back) == to_json(t));
}

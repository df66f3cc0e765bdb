#include <doctest.h>

#include <cstdlib>
#include <filesystem>

#include "migratekit/backend.hpp"
#include "migratekit/errors.hpp"
#include "migratekit/naive_transpiler.hpp"
#include "migratekit/repairer.hpp"
#include "migratekit/rust_items.hpp"
#include "migratekit/util/fs.hpp"
#include "test_support.hpp"

using namespace migratekit;

namespace {

RepairOptions options(int cap = 3) {
    RepairOptions o;
    o.cap = cap;
    o.probe = testing::probe_options(20, "repair");
    return o;
}

ContextCatalog catalog() {
    ContextCatalog c;
    c.add({"LIMIT", CatalogKind::macro_const, "pub const LIMIT: u32 = 8;", Provenance::generated});
    return c;
}

CalleeMap callees() { return {{"helper", {"pub fn helper() -> u32 {\n    LIMIT\n}"}}}; }

std::string fenced(const std::string& code) { return "Here is the fix.\n```rust\n" + code + "\n```\n"; }

ResolvedUnit failing_unit(const std::string& core) {
    return probe_item("m.c::f", "f", core, Provenance::translated, catalog(), callees(), options().probe);
}

ReplayBackend scripted(const std::vector<std::string>& completions) {
    nlohmann::json fx = {{"completions", nlohmann::json::object()}, {"scripted", {{"repair/m.c::f", completions}}}};
    return ReplayBackend(fx);
}

}  // namespace

TEST_CASE("repair prompt embeds code, verbatim diagnostics and rules") {
    auto unit = failing_unit("pub fn f() -> u32 {\n    helpr() + LIMIT\n}");
    REQUIRE(unit.status == ProbeStatus::unresolved_remaining);
    REQUIRE(unit.diagnostics.size() == 1);
    auto prompt = render_repair_prompt(unit, unit.diagnostics, {"Do not use the std crate."});
    CHECK(prompt.find(unit.diagnostics[0].rendered) != std::string::npos);
    CHECK(prompt.find(unit.render()) != std::string::npos);
    CHECK(prompt.find("Do not use the std crate.") != std::string::npos);
    CHECK(prompt == render_repair_prompt(unit, unit.diagnostics, {"Do not use the std crate."}));

    auto golden = std::filesystem::path(MIGRATEKIT_FIXTURES) / "repair" / "prompt.golden";
    if (std::getenv("MIGRATEKIT_UPDATE_GOLDEN")) fs::write_file_atomic(golden, prompt);
    CHECK(prompt == fs::read_file(golden));
}

TEST_CASE("repair prompt truncates to the configured number of diagnostics") {
    auto unit = failing_unit("pub fn f() -> u32 {\n    helpr() + LIMIT\n}");
    std::vector<Diagnostic> many(25, unit.diagnostics[0]);
    auto prompt = render_repair_prompt(unit, many, {});
    CHECK(prompt.find("(5 further errors not shown)") != std::string::npos);
    CHECK(prompt.find("- (none)") != std::string::npos);
}

TEST_CASE("a round-1 completion that fixes the name repairs the unit") {
    auto unit = failing_unit("pub fn f() -> u32 {\n    helpr() + LIMIT\n}");
    REQUIRE(unit.diagnostics[0].code == "E0425");
    auto backend = scripted({fenced("pub fn f() -> u32 {\n    helper() + LIMIT\n}")});
    auto out = repair(unit, backend, catalog(), callees(), {}, options());
    CHECK(out.final_status == RepairStatus::repaired);
    REQUIRE(out.attempts.size() == 1);
    CHECK(out.attempts[0].outcome == AttemptOutcome::compiles);
    CHECK(out.final_unit.status == ProbeStatus::compiles);
    CHECK(out.compiled_round() == 1);
    // The existing context is kept in place and the new callee appended.
    CHECK(out.final_unit.items.front().name == "LIMIT");
    CHECK(out.final_unit.core().text.find("helper()") != std::string::npos);
}

TEST_CASE("three failing rounds then the fallback store") {
    std::string c_source = "unsigned int f(void) { return helper() + LIMIT; }";
    auto unit = failing_unit("pub fn f() -> u32 {\n    let x: u32 = \"no\";\n    LIMIT\n}");
    REQUIRE(unit.status == ProbeStatus::compile_error);
    auto bad = fenced("pub fn f() -> u32 {\n    let y: u32 = \"still\";\n    LIMIT\n}");
    auto backend = scripted({bad, bad, bad, bad});
    FallbackStore store{{"m.c::f", naive_transpile(c_source, type_env(catalog()))}};
    CalleeMap unsafe_callees{{"helper", {"pub unsafe extern \"C\" fn helper() -> u32 {\n    LIMIT\n}"}}};
    auto out = repair(unit, backend, catalog(), unsafe_callees, store, options(), c_source);
    CHECK(out.attempts.size() == 3);
    for (const auto& a : out.attempts) CHECK(a.outcome == AttemptOutcome::still_failing);
    CHECK(out.final_status == RepairStatus::fallback_applied);
    CHECK(out.final_unit.status == ProbeStatus::compiles);
    CHECK(out.final_unit.core().provenance == Provenance::fallback);
    CHECK(rust::parse_items(out.final_unit.core().text)[0].unsafe_fn);
    CHECK_FALSE(out.compiled_round().has_value());
}

TEST_CASE("completions that edit context items are rejected and consume a round") {
    auto unit = failing_unit("pub fn f() -> u32 {\n    let x: u32 = \"no\";\n    LIMIT\n}");
    auto edit = fenced("pub const LIMIT: u32 = 9;\npub fn f() -> u32 {\n    LIMIT\n}");
    auto backend = scripted({edit, edit});
    auto out = repair(unit, backend, catalog(), callees(), {}, options(2));
    REQUIRE(out.attempts.size() == 2);
    CHECK(out.attempts[0].outcome == AttemptOutcome::rejected_noncore_edit);
    CHECK(out.attempts[0].rejected_items == std::vector<std::string>{"LIMIT"});
    CHECK(out.final_status == RepairStatus::manual_required);
    // The rejected edit never reached the unit.
    CHECK(out.final_unit.items.front().text == "pub const LIMIT: u32 = 8;");
}

TEST_CASE("identical context echoes and new items are tolerated") {
    auto unit = failing_unit("pub fn f() -> u32 {\n    let x: u32 = \"no\";\n    LIMIT\n}");
    auto echo = fenced("pub const LIMIT: u32 = 8;\nfn extra() {}\npub fn f() -> u32 {\n    LIMIT\n}");
    auto backend = scripted({echo});
    auto out = repair(unit, backend, catalog(), callees(), {}, options());
    CHECK(out.final_status == RepairStatus::repaired);
    CHECK(out.attempts[0].rejected_items == std::vector<std::string>{"extra"});
}

TEST_CASE("a renamed completion is mapped back to the core name") {
    auto unit = failing_unit("pub fn f() -> u32 {\n    helpr()\n}");
    auto backend = scripted({fenced("pub fn f_fixed() -> u32 {\n    helper()\n}")});
    auto out = repair(unit, backend, catalog(), callees(), {}, options());
    CHECK(out.final_status == RepairStatus::repaired);
    CHECK(rust::parse_items(out.final_unit.core().text)[0].name == "f");
}

TEST_CASE("apply_fallback") {
    FallbackStore store{{"m.c::a", naive_transpile("int a(void){return b();}")}};
    auto item = apply_fallback("m.c::a", "a", store);
    CHECK(item.provenance == Provenance::fallback);
    CHECK(item.origin == ItemOrigin::core);
    CHECK(rust::parse_items(item.text)[0].unsafe_fn);
    CHECK(item.text.find("b()") != std::string::npos);
    CHECK_THROWS_AS(apply_fallback("m.c::zz", "zz", store), FallbackMissing);

    CalleeMap b{{"b", {"pub unsafe extern \"C\" fn b() -> i32 {\n    0\n}"}}};
    auto unit = probe_item("m.c::a", "a", item.text, Provenance::fallback, {}, b, options().probe);
    CHECK(unit.status == ProbeStatus::compiles);

    // Safe stored items are renamed and made unsafe.
    FallbackStore safe{{"m.c::g", "fn other(x: i32) -> i32 { other(x) }"}};
    auto g = apply_fallback("m.c::g", "g", safe);
    CHECK(g.text == "unsafe fn g(x: i32) -> i32 { g(x) }");
}

TEST_CASE("the cap bounds backend calls even with a long script") {
    auto unit = failing_unit("pub fn f() -> u32 {\n    helpr()\n}");
    std::vector<std::string> junk(10, "no code here at all {");
    auto backend = scripted(junk);
    for (int cap = 1; cap <= 3; ++cap) {
        auto out = repair(unit, backend, catalog(), callees(), {}, options(cap));
        CHECK(static_cast<int>(out.attempts.size()) == cap);
        CHECK(out.final_status == RepairStatus::manual_required);
    }
    CHECK_THROWS_AS(repair(unit, backend, catalog(), callees(), {}, options(0)), ConfigError);
}

TEST_CASE("repair outcomes round-trip through JSON") {
    auto unit = failing_unit("pub fn f() -> u32 {\n    helpr() + LIMIT\n}");
    auto backend = scripted({fenced("pub fn f() -> u32 {\n    helper() + LIMIT\n}")});
    auto out = repair(unit, backend, catalog(), callees(), {}, options());
    CHECK(to_json(repair_outcome_from_json(to_json(out))) == to_json(out));
}

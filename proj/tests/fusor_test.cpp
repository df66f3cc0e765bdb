#include <doctest.h>

#include <algorithm>
#include <set>

#include "migratekit/c_frontend.hpp"
#include "migratekit/errors.hpp"
#include "migratekit/fusor.hpp"
#include "test_support.hpp"

using namespace migratekit;

namespace {

FuseOptions options() {
    FuseOptions o;
    o.scaffold = testing::scaffold("fusor");
    return o;
}

ContextCatalog shared_catalog() {
    ContextCatalog c;
    c.add({"pair", CatalogKind::type, "#[repr(C)]\n#[derive(Clone, Copy)]\npub struct pair {\n    pub a: i32,\n    pub b: i32,\n}",
           Provenance::generated});
    c.add({"BASE", CatalogKind::macro_const, "pub const BASE: i32 = 3;", Provenance::generated});
    return c;
}

const std::map<std::string, std::string> kChain = {
    {"c", "pub fn c() -> i32 {\n    BASE\n}"},
    {"b", "pub fn b() -> i32 {\n    c() + 1\n}"},
    {"a", "pub fn a(p: pair) -> i32 {\n    b() + p.a\n}"},
};

std::map<std::string, ResolvedUnit> chain_units(const std::map<std::string, std::string>& cores = kChain) {
    CalleeMap callees;
    for (const auto& [name, text] : cores) callees[name] = {text};
    std::map<std::string, ResolvedUnit> out;
    for (const auto& [name, text] : cores) {
        auto id = "chain.c::" + name;
        out[id] = probe_item(id, name, text, Provenance::translated, shared_catalog(), callees,
                             testing::probe_options(20, "fusor"));
    }
    return out;
}

std::set<std::string> union_of_names(const std::map<std::string, ResolvedUnit>& units) {
    std::set<std::string> out;
    for (const auto& [id, u] : units)
        for (const auto& i : u.items) out.insert(i.name);
    return out;
}

const std::vector<std::vector<std::string>> kSchedule = {{"chain.c::c"}, {"chain.c::b"}, {"chain.c::a"}};

}  // namespace

TEST_CASE("the chain fixture schedule comes out leaves first") {
    auto module = parse_sources({SourceFile{"chain.c", "int a(void){return b();} int b(void){return c();} int c(void){return 0;}"}});
    CHECK(leaves_first_schedule(build_call_graph(module)) == kSchedule);
}

TEST_CASE("a shared struct appears once after a merge") {
    auto units = chain_units();
    for (const auto& [id, u] : units) CHECK(u.status == ProbeStatus::compiles);
    auto merged = fuse_step(units.at("chain.c::a"), units.at("chain.c::b"));
    auto count = std::count_if(merged.items.begin(), merged.items.end(), [](auto& i) { return i.name == "BASE"; });
    CHECK(count == 1);
    CHECK(merged.core().name == "a");
}

TEST_CASE("fusing the chain: context first, then c, b, a; all steps green") {
    auto units = chain_units();
    auto m = fuse_module(kSchedule, units, options());
    CHECK(m.names() == std::vector<std::string>{"BASE", "pair", "c", "b", "a"});
    REQUIRE(m.fusion_log.size() == 3);
    CHECK(m.fusion_log[0].kind == "seed");
    for (const auto& s : m.fusion_log) CHECK(s.compiled);
    CHECK(m.compiles);
    // Oracle: the hand-assembled module compiles in one check.
    std::vector<std::string> manual = {shared_catalog().lookup("pair")[0]->rust_text, "pub const BASE: i32 = 3;",
                                       kChain.at("c"), kChain.at("b"), kChain.at("a")};
    CHECK(compile_check(manual, testing::scaffold("fusor"), "chain-manual").empty());
    auto listed = m.names();
    std::set<std::string> names(listed.begin(), listed.end());
    CHECK(names == union_of_names(units));
    CHECK(m.provenance().at("pair") == Provenance::catalog);
    CHECK(m.provenance().at("a") == Provenance::translated);
}

TEST_CASE("a single unit fuses to its own items with one log entry") {
    auto units = chain_units({{"c", kChain.at("c")}});
    auto m = fuse_module({{"chain.c::c"}}, units, options());
    CHECK(m.names() == std::vector<std::string>{"BASE", "c"});
    CHECK(m.fusion_log.size() == 1);
    CHECK(m.compiles);
}

TEST_CASE("a manual-required unit is carried verbatim and logged red") {
    auto cores = kChain;
    cores["b"] = "pub fn b() -> i32 {\n    let s: i32 = \"x\";\n    c() + 1\n}";
    auto units = chain_units(cores);
    REQUIRE(units.at("chain.c::b").status == ProbeStatus::compile_error);
    auto m = fuse_module(kSchedule, units, options());
    auto b = std::find_if(m.items.begin(), m.items.end(), [](auto& i) { return i.name == "b"; });
    REQUIRE(b != m.items.end());
    CHECK(b->text == cores["b"]);
    CHECK(m.fusion_log[0].compiled);
    CHECK_FALSE(m.fusion_log[1].compiled);
    CHECK(m.fusion_log[1].note.find("chain.c::b") != std::string::npos);
    CHECK_FALSE(m.compiles);
    // a pulled in b's failing copy during probing, so it is residue as well.
    REQUIRE(m.residue.size() == 2);
    CHECK(m.residue[0].unit_id == "chain.c::b");
    CHECK(m.residue[1].unit_id == "chain.c::a");
}

TEST_CASE("differing same-named cores raise a conflict") {
    ResolvedUnit x1{"x1.c::f", "f", {{"f", "pub fn f() -> i32 { 1 }", ItemOrigin::core, Provenance::translated}}};
    ResolvedUnit x2{"x2.c::f", "f", {{"f", "pub fn f() -> i32 { 2 }", ItemOrigin::core, Provenance::translated}}};
    x1.status = x2.status = ProbeStatus::compiles;
    CHECK_THROWS_AS(fuse_step(x1, x2), ConflictingDefinition);
    std::map<std::string, ResolvedUnit> units{{"x1.c::f", x1}, {"x2.c::f", x2}};
    CHECK_THROWS_AS(fuse_module({{"x1.c::f"}, {"x2.c::f"}}, units, options()), ConflictingDefinition);

    auto o = options();
    o.raise_conflicts = false;
    auto m = fuse_module({{"x1.c::f"}, {"x2.c::f"}}, units, o);
    REQUIRE(m.conflicts.size() == 1);
    CHECK(m.conflicts[0].kept_unit == "x1.c::f");
    CHECK(m.conflicts[0].other_text == "pub fn f() -> i32 { 2 }");
    CHECK(m.residue.size() == 1);
    // Identical cores are not a conflict.
    CHECK_NOTHROW(fuse_step(x1, x1));
}

TEST_CASE("an owner's core supersedes earlier callee copies") {
    // 2-cycle: each unit holds a copy of the other's core.
    ResolvedUnit p{"m.c::p", "p",
                   {{"q", "pub fn q(n: i32) -> i32 { if n > 0 { p(n - 1) } else { 0 } }", ItemOrigin::callee,
                     Provenance::translated},
                    {"p", "pub fn p(n: i32) -> i32 { q(n) }", ItemOrigin::core, Provenance::translated}}};
    ResolvedUnit q{"m.c::q", "q",
                   {{"p", "pub fn p(n: i32) -> i32 { q(n) }", ItemOrigin::callee, Provenance::translated},
                    {"q", "pub fn q(n: i32) -> i32 { if n > 0 { p(n - 1) } else { 1 } }", ItemOrigin::core,
                     Provenance::translated}}};
    p.status = q.status = ProbeStatus::compiles;
    std::map<std::string, ResolvedUnit> units{{"m.c::p", p}, {"m.c::q", q}};
    auto m = fuse_module({{"m.c::p", "m.c::q"}}, units, options());
    CHECK(m.names() == std::vector<std::string>{"q", "p"});
    CHECK(m.items[0].text.find("else { 1 }") != std::string::npos);
    CHECK(m.items[0].owner == "m.c::q");
    CHECK(m.compiles);

    auto swapped = fuse_module({{"m.c::q", "m.c::p"}}, units, options());
    auto na = m.names(), nb = swapped.names();
    std::set<std::string> a(na.begin(), na.end()), b(nb.begin(), nb.end());
    CHECK(a == b);
    CHECK(swapped.compiles == m.compiles);
}

TEST_CASE("extern declarations yield to translated functions of the same name") {
    ResolvedUnit caller{"m.c::f", "f",
                        {{"g", "extern \"C\" {\n    pub fn g() -> i32;\n}", ItemOrigin::catalog, Provenance::catalog},
                         {"f", "pub unsafe fn f() -> i32 { g() }", ItemOrigin::core, Provenance::translated}}};
    ResolvedUnit callee{"m.c::g", "g", {{"g", "pub extern \"C\" fn g() -> i32 { 0 }", ItemOrigin::core, Provenance::translated}}};
    caller.status = callee.status = ProbeStatus::compiles;
    std::map<std::string, ResolvedUnit> units{{"m.c::f", caller}, {"m.c::g", callee}};
    auto leaves = fuse_module({{"m.c::g"}, {"m.c::f"}}, units, options());
    CHECK(leaves.names() == std::vector<std::string>{"g", "f"});
    CHECK(leaves.compiles);
    auto reversed = fuse_module({{"m.c::f"}, {"m.c::g"}}, units, options());
    CHECK(reversed.names() == std::vector<std::string>{"f", "g"});
    CHECK(reversed.compiles);
}

TEST_CASE("modules round-trip through JSON") {
    auto m = fuse_module(kSchedule, chain_units(), options());
    CHECK(to_json(rust_module_from_json(to_json(m))) == to_json(m));
    CHECK(m.render().back() == '\n');
}

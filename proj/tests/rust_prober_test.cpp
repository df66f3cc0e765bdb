#include <doctest.h>

#include <set>

#include "migratekit/catalog.hpp"
#include "migratekit/errors.hpp"
#include "migratekit/rust_prober.hpp"
#include "test_support.hpp"

using namespace migratekit;

namespace {

std::vector<std::string> item_names(const ResolvedUnit& u) {
    std::vector<std::string> out;
    for (const auto& i : u.items) out.push_back(i.name);
    return out;
}

ContextCatalog page_catalog() {
    ContextCatalog c;
    c.add({"page", CatalogKind::type, "#[repr(C)]\n#[derive(Clone, Copy)]\npub struct page {\n    pub order: i32,\n}",
           Provenance::generated});
    c.add({"page_t", CatalogKind::type, "pub type page_t = page;", Provenance::generated});
    c.add({"PAGE_SIZE", CatalogKind::macro_const, "pub const PAGE_SIZE: u32 = 4096;", Provenance::generated});
    c.add({"c", CatalogKind::extern_fn, "extern \"C\" {\n    pub fn c() -> i32;\n}", Provenance::generated});
    return c;
}

}  // namespace

TEST_CASE("a self-contained item compiles without diagnostics") {
    CHECK(compile_check({"fn f() -> i32 { 0 }"}, testing::scaffold(), "self-contained").empty());
}

TEST_CASE("an undeclared callee yields one resolution diagnostic naming it") {
    auto diags = compile_check({"pub fn core() -> i32 { helper() }"}, testing::scaffold(), "undeclared");
    REQUIRE(diags.size() == 1);
    // Recorded from rustc 1.97: missing functions are E0425.
    CHECK(diags[0].code == "E0425");
    CHECK(is_resolution_code(diags[0].code));
    CHECK(diags[0].primary_symbol == "helper");
    CHECK(diags[0].namespace_hint == "function");
    CHECK(diags[0].rendered.find("cannot find function `helper`") != std::string::npos);
}

TEST_CASE("type mismatches are repair-class diagnostics") {
    auto diags = compile_check({"pub fn f() { let x: u32 = \"one\"; }"}, testing::scaffold(), "mismatch");
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].code == "E0308");
    CHECK_FALSE(is_resolution_code(diags[0].code));
    CHECK(diags[0].primary_symbol.empty());
    // Negating an unsigned literal is its own code in current rustc.
    auto neg = compile_check({"pub fn f() { let x: u32 = -1; }"}, testing::scaffold(), "negate");
    REQUIRE(neg.size() == 1);
    CHECK(neg[0].code == "E0600");
}

TEST_CASE("scaffold errors and missing toolchain") {
    CHECK_THROWS_AS(compile_check({"fn broken( {"}, testing::scaffold(), "broken"), ScaffoldError);
    auto s = testing::scaffold();
    s.rustc = "/nonexistent/rustc";
    CHECK_THROWS_AS(compile_check({"fn f() {}"}, s, "missing"), ToolchainMissing);
}

TEST_CASE("no_std scaffolds reject std paths") {
    auto s = testing::scaffold();
    s.no_std = true;
    auto diags = compile_check({"pub fn f() -> usize { std::mem::size_of::<u8>() }"}, s, "nostd");
    REQUIRE_FALSE(diags.empty());
    CHECK(diags[0].code == "E0433");
    CHECK(diags[0].primary_symbol == "std");
    CHECK(compile_check({"pub fn f() -> usize { core::mem::size_of::<u8>() }"}, s, "nostd-ok").empty());
}

TEST_CASE("lookup precedence: callees, then catalog kinds") {
    ContextCatalog catalog;
    catalog.add({"x", CatalogKind::extern_fn, "extern \"C\" {\n    pub fn x();\n}", Provenance::generated});
    catalog.add({"x", CatalogKind::variable, "pub static mut x: i32 = 0;", Provenance::generated});
    catalog.add({"x", CatalogKind::type, "pub struct x;", Provenance::generated});
    CalleeMap callees{{"y", {"pub fn y() {}"}}};
    catalog.add({"y", CatalogKind::extern_fn, "extern \"C\" {\n    pub fn y();\n}", Provenance::generated});

    CHECK(lookup_definition("x", catalog, {})->text == "pub struct x;");
    CHECK(lookup_definition("x", catalog, {}, "value")->text == "pub static mut x: i32 = 0;");
    CHECK(lookup_definition("x", catalog, {}, "function")->text.find("pub fn x") != std::string::npos);
    auto y = lookup_definition("y", catalog, callees);
    CHECK(y->text == "pub fn y() {}");
    CHECK(y->origin == ItemOrigin::callee);
    CHECK_FALSE(lookup_definition("z", catalog, callees).has_value());
}

TEST_CASE("probe: free core compiles in one iteration") {
    auto u = probe_item("m.c::f", "f", "pub fn f() -> i32 { 0 }", Provenance::translated, {}, {},
                        testing::probe_options());
    CHECK(u.status == ProbeStatus::compiles);
    CHECK(u.iterations_used == 1);
    CHECK(item_names(u) == std::vector<std::string>{"f"});
}

TEST_CASE("probe: translated callee wins and lands before the core") {
    CalleeMap callees{{"c", {"pub fn c() -> i32 {\n    0\n}"}}};
    std::string core = "pub fn b() -> i32 {\n    c() + 1\n}";
    auto u = probe_item("chain.c::b", "b", core, Provenance::translated, page_catalog(), callees,
                        testing::probe_options());
    CHECK(u.status == ProbeStatus::compiles);
    CHECK(u.iterations_used == 2);
    CHECK(item_names(u) == std::vector<std::string>{"c", "b"});
    CHECK(u.items[0].origin == ItemOrigin::callee);
    CHECK(u.core().text == core);
    // Oracle: the hand-assembled pair compiles in a single check.
    CHECK(compile_check({callees["c"].text, core}, testing::scaffold(), "chain-oracle").empty());
}

TEST_CASE("probe: catalog closure over dependent items, deduplicated") {
    std::string core = "pub fn grab(p: *mut page_t) -> u32 {\n    let q: *mut page_t = p;\n    PAGE_SIZE + PAGE_SIZE\n}";
    auto u = probe_item("mm.c::grab", "grab", core, Provenance::translated, page_catalog(), {},
                        testing::probe_options());
    CHECK(u.status == ProbeStatus::compiles);
    CHECK(u.iterations_used == 3);
    CHECK(item_names(u) == std::vector<std::string>{"page_t", "PAGE_SIZE", "page", "grab"});
    auto names = item_names(u);
    std::set<std::string> unique(names.begin(), names.end());
    CHECK(unique.size() == u.items.size());
}

TEST_CASE("probe: unknown names end with unresolved-remaining") {
    auto u = probe_item("m.c::f", "f", "pub fn f() -> i32 { mystery_value }", Provenance::translated, page_catalog(),
                        {}, testing::probe_options());
    CHECK(u.status == ProbeStatus::unresolved_remaining);
    CHECK(u.unresolved == std::vector<std::string>{"mystery_value"});
    CHECK(u.iterations_used == 1);
}

TEST_CASE("probe: non-resolution errors end with compile-error and the core untouched") {
    std::string core = "pub fn f() -> u32 { let x: u32 = \"s\"; PAGE_SIZE }";
    auto u = probe_item("m.c::f", "f", core, Provenance::translated, page_catalog(), {}, testing::probe_options());
    CHECK(u.status == ProbeStatus::compile_error);
    CHECK(u.core().text == core);
    CHECK(item_names(u) == std::vector<std::string>{"PAGE_SIZE", "f"});
}

TEST_CASE("probe: iteration cap is honored") {
    std::string core = "pub fn grab(p: *mut page_t) -> i32 { 0 }";
    auto u = probe_item("mm.c::grab", "grab", core, Provenance::translated, page_catalog(), {},
                        testing::probe_options(1));
    CHECK(u.iterations_used == 1);
    CHECK(u.status != ProbeStatus::compiles);
    CHECK_THROWS_AS(probe_item("x", "x", core, Provenance::translated, {}, {}, testing::probe_options(0)), ConfigError);
}

TEST_CASE("probe: lazy callees are reported") {
    CalleeMap callees{{"c", {"pub fn c() -> i32 {\n    0\n}", Provenance::translated, true}}};
    auto u = probe_item("m.c::b", "b", "pub fn b() -> i32 { c() }", Provenance::translated, {}, callees,
                        testing::probe_options());
    CHECK(u.status == ProbeStatus::compiles);
    CHECK(u.lazy_callees == std::vector<std::string>{"c"});
}

TEST_CASE("resolved units round-trip through JSON") {
    auto u = probe_item("m.c::f", "f", "pub fn f() -> i32 { mystery }", Provenance::translated, {}, {},
                        testing::probe_options());
    auto back = resolved_unit_from_json(to_json(u));
    CHECK(to_json(back) == to_json(u));
}

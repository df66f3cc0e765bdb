#include <doctest.h>

#include "migratekit/errors.hpp"
#include "migratekit/rust_items.hpp"

using namespace migratekit;

TEST_CASE("check_syntax accepts items and locates errors") {
    CHECK(rust::check_syntax("fn f() -> i32 { 0 }").empty());
    auto issues = rust::check_syntax("fn f( { }");
    REQUIRE(issues.size() >= 1);
    CHECK(issues[0].line == 1);
    CHECK_FALSE(rust::check_syntax("let x = 1;").empty());
}

TEST_CASE("items carry attributes and names") {
    auto items = rust::parse_items(
        "#[repr(C)]\n#[derive(Clone, Copy)]\npub struct page { pub order: i32 }\n\n"
        "extern \"C\" {\n    fn kmalloc(size: u64, flags: i32) -> *mut u8;\n}\n"
        "/// doc\npub unsafe fn grab() -> *mut u8 { kmalloc(4096, 0) }\n"
        "pub const PAGE_SIZE: u32 = 4096;\n");
    REQUIRE(items.size() == 4);
    CHECK(items[0].kind == rust::ItemKind::struct_);
    CHECK(items[0].name == "page");
    CHECK(items[0].text.rfind("#[repr(C)]", 0) == 0);
    CHECK(items[1].kind == rust::ItemKind::extern_block);
    CHECK(items[1].name == "kmalloc");
    CHECK(items[2].name == "grab");
    CHECK(items[2].unsafe_fn);
    CHECK(items[2].text.rfind("/// doc", 0) == 0);
    CHECK(items[3].kind == rust::ItemKind::constant);
    CHECK_THROWS_AS(rust::parse_items("fn ("), ParseFailed);
}

TEST_CASE("renaming rewrites the item and its recursive calls") {
    auto out = rust::rename_function("fn Fact(n: u32) -> u32 { if n == 0 { 1 } else { n * Fact(n - 1) } }", "fact");
    CHECK(out == "fn fact(n: u32) -> u32 { if n == 0 { 1 } else { n * fact(n - 1) } }");
}

TEST_CASE("statement counting") {
    CHECK(rust::count_statements("fn f() { let a = 1; let b = a + 1; g(b); b }") == 4);
    CHECK(rust::count_statements("fn f() { if x { y(); } }") == 2);
    CHECK(rust::count_statements("fn f() {}") == 0);
}

TEST_CASE("safe line counting") {
    auto safe = rust::count_safe_lines("fn f() -> i32 {\n    let a = 1;\n\n    a\n}\n");
    CHECK(safe.total == 4);
    CHECK(safe.safe == 4);

    std::string text = "fn g() {\n    let p = 0;\n    unsafe {\n        one();\n        two();\n        three();\n    }\n}\n";
    auto c = rust::count_safe_lines(text);
    CHECK(c.total == 8);
    CHECK(c.unsafe() == 5);
    CHECK(c.safe == 3);

    auto u = rust::count_safe_lines("pub unsafe fn h() {\n    x();\n}\nfn k() {}\n");
    CHECK(u.unsafe() == 3);
    CHECK(u.safe == 1);
    CHECK_THROWS_AS(rust::count_safe_lines("fn ("), ParseFailed);
}

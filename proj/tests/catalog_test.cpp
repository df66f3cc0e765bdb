#include <doctest.h>

#include <algorithm>

#include "migratekit/catalog.hpp"
#include "migratekit/errors.hpp"
#include "migratekit/rust_prober.hpp"
#include "test_support.hpp"

using namespace migratekit;

namespace {

const char* kDecls =
    "#define PAGE_SIZE 4096\n"
    "#define PAGE_MASK (~(PAGE_SIZE - 1))\n"
    "#define BIG 0x100000000ULL\n"
    "#define RATIO 0.5\n"
    "#define NAME \"ramfs\"\n"
    "#define MAX(a, b) ((a) > (b) ? (a) : (b))\n"
    "struct page {\n"
    "    unsigned long flags;\n"
    "    struct page *next;\n"
    "    int refs[4];\n"
    "};\n"
    "typedef struct page page_t;\n"
    "typedef struct { int x; int y; } point;\n"
    "struct inode;\n"
    "enum mode { MODE_R = 1, MODE_W = 2, MODE_X };\n"
    "typedef int (*filler_t)(void *, const char *, int);\n"
    "extern int nr_pages;\n"
    "int nr_free = 3;\n"
    "static const char *fs_name = \"ramfs\";\n"
    "unsigned int table[] = {1, 2, 3};\n"
    "int kmalloc_pages(int n, struct inode *ino);\n"
    "int printk(const char *fmt, ...);\n"
    "int use(page_t *p) { return p->refs[0] + PAGE_SIZE; }\n";

const CatalogEntry& entry(const ContextCatalog& c, const std::string& name) {
    auto found = c.lookup(name);
    REQUIRE_MESSAGE(!found.empty(), "missing catalog entry " << name);
    return *found.front();
}

}  // namespace

TEST_CASE("generated catalog mirrors the C declarations") {
    std::vector<SkippedDecl> skipped;
    auto catalog = generate_catalog(parse_sources({SourceFile{"fs.c", kDecls}}), &skipped);

    CHECK(entry(catalog, "PAGE_SIZE").rust_text == "pub const PAGE_SIZE: u32 = 4096;");
    CHECK(entry(catalog, "PAGE_MASK").rust_text == "pub const PAGE_MASK: i32 = -4096;");
    CHECK(entry(catalog, "BIG").rust_text == "pub const BIG: u64 = 4294967296;");
    CHECK(entry(catalog, "RATIO").rust_text == "pub const RATIO: f64 = 0.5;");
    CHECK(entry(catalog, "NAME").rust_text == "pub const NAME: &[u8; 6] = b\"ramfs\\0\";");
    CHECK(catalog.lookup("MAX").empty());
    CHECK(std::any_of(skipped.begin(), skipped.end(), [](auto& s) { return s.name == "MAX"; }));

    CHECK(entry(catalog, "page").rust_text ==
          "#[repr(C)]\n#[derive(Clone, Copy)]\npub struct page {\n    pub flags: u64,\n    pub next: *mut page,\n"
          "    pub refs: [i32; 4],\n}");
    CHECK(entry(catalog, "page_t").rust_text == "pub type page_t = page;");
    CHECK(entry(catalog, "point").rust_text.find("pub struct point {") != std::string::npos);
    CHECK(entry(catalog, "inode").rust_text.find("_opaque: [u8; 0]") != std::string::npos);
    CHECK(entry(catalog, "mode").rust_text == "pub type mode = u32;");
    CHECK(entry(catalog, "MODE_X").rust_text == "pub const MODE_X: mode = 3;");
    CHECK(entry(catalog, "filler_t").rust_text ==
          "pub type filler_t = Option<unsafe extern \"C\" fn(*mut core::ffi::c_void, *const i8, i32) -> i32>;");
    CHECK(entry(catalog, "nr_pages").rust_text == "extern \"C\" {\n    pub static mut nr_pages: i32;\n}");
    CHECK(entry(catalog, "nr_free").rust_text == "pub static mut nr_free: i32 = 3;");
    CHECK(entry(catalog, "fs_name").rust_text == "pub static mut fs_name: *const i8 = b\"ramfs\\0\".as_ptr() as *const i8;");
    CHECK(entry(catalog, "table").rust_text == "pub static mut table: [u32; 3] = [1, 2, 3];");
    CHECK(entry(catalog, "printk").rust_text == "extern \"C\" {\n    pub fn printk(fmt: *const i8, ...) -> i32;\n}");
    CHECK(entry(catalog, "use").rust_text == "extern \"C\" {\n    pub fn r#use(p: *mut page_t) -> i32;\n}");
    CHECK(entry(catalog, "kmalloc_pages").kind == CatalogKind::extern_fn);
}

TEST_CASE("the whole generated catalog compiles as one crate") {
    auto catalog = generate_catalog(parse_sources({SourceFile{"fs.c", kDecls}}));
    std::vector<std::string> items;
    for (const auto& e : catalog.entries()) items.push_back(e.rust_text);
    auto diags = compile_check(items, testing::scaffold("catalog"), "catalog-all");
    for (const auto& d : diags) INFO(d.rendered);
    CHECK(diags.empty());
}

TEST_CASE("catalog invariants: unique names per kind, items parse, JSON round trip") {
    ContextCatalog c;
    c.add({"x", CatalogKind::variable, "pub static mut x: i32 = 0;", Provenance::generated});
    c.add({"x", CatalogKind::type, "pub type x = i32;", Provenance::manual});
    CHECK_THROWS_AS(c.add({"x", CatalogKind::variable, "pub static mut x: i64 = 0;", Provenance::generated}),
                    ConfigError);
    CHECK_THROWS_AS(c.add({"y", CatalogKind::type, "pub type y = ;", Provenance::generated}), ConfigError);
    auto found = c.lookup("x");
    REQUIRE(found.size() == 2);
    CHECK(found[0]->kind == CatalogKind::type);
    auto back = ContextCatalog::from_json(c.to_json());
    CHECK(back.to_json() == c.to_json());
    CHECK(back.entries()[1].provenance == Provenance::manual);
}

TEST_CASE("same-named statics in two files keep the first and report the second") {
    std::vector<SkippedDecl> skipped;
    auto catalog = generate_catalog(parse_sources({SourceFile{"a.c", "static int count = 1;\n"},
                                                   SourceFile{"b.c", "static long count = 2;\n"}}),
                                    &skipped);
    CHECK(catalog.lookup("count").front()->rust_text == "pub static mut count: i32 = 1;");
    REQUIRE(skipped.size() == 1);
    CHECK(skipped[0].file == "b.c");
}

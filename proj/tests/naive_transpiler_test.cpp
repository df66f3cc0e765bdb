#include <doctest.h>

#include "migratekit/catalog.hpp"
#include "migratekit/errors.hpp"
#include "migratekit/naive_transpiler.hpp"
#include "migratekit/rust_items.hpp"
#include "migratekit/rust_prober.hpp"
#include "test_support.hpp"

using namespace migratekit;

namespace {

const char* kSource =
    "#define LIMIT 8\n"
    "struct node { int value; struct node *next; };\n"
    "int counter;\n"
    "int b(void) { return 1; }\n"
    "int a(void) { return b(); }\n"
    "int sum(struct node *n) {\n"
    "    int total = 0;\n"
    "    while (n != NULL) {\n"
    "        if (n->value < 0) { n = n->next; continue; }\n"
    "        total += n->value;\n"
    "        n = n->next;\n"
    "    }\n"
    "    return total;\n"
    "}\n"
    "unsigned int mix(unsigned int x, int k) {\n"
    "    unsigned int acc = 0;\n"
    "    int i;\n"
    "    for (i = 0; i < k; i++) {\n"
    "        if (i % 2 == 0) continue;\n"
    "        acc ^= x << i;\n"
    "        if (acc > 1000u) break;\n"
    "    }\n"
    "    return acc;\n"
    "}\n"
    "int classify(int c) {\n"
    "    switch (c) {\n"
    "    case 0: return 10;\n"
    "    case 1:\n"
    "    case 2: counter++; break;\n"
    "    default: counter--; break;\n"
    "    }\n"
    "    return counter > LIMIT ? 1 : 0;\n"
    "}\n"
    "void fill(int *dst, int n) {\n"
    "    int tmp[4] = {1, 2};\n"
    "    int *p = dst;\n"
    "    do {\n"
    "        *p = tmp[n % 4];\n"
    "        p++;\n"
    "        n--;\n"
    "    } while (n > 0);\n"
    "}\n"
    "double avg(const int *v, int n) {\n"
    "    double s = 0;\n"
    "    for (int i = 0; i < n; i++) s += v[i];\n"
    "    return n ? s / n : 0.0;\n"
    "}\n"
    "int is_empty(struct node *n) { return !n || n->value == 0; }\n";

const FunctionUnit& fn(const ModuleIR& m, const std::string& name) {
    for (const auto& f : m.functions)
        if (f.name == name) return f;
    throw std::runtime_error("no function " + name);
}

}  // namespace

TEST_CASE("naive transpilation of a call-only function") {
    std::string out = naive_transpile("int a(void){return b();}");
    CHECK(out == "pub unsafe extern \"C\" fn a() -> i32 {\n    return b();\n}");
    CHECK(rust::check_syntax(out).empty());
}

TEST_CASE("naive transpilations compile next to the generated catalog") {
    auto module = parse_sources({SourceFile{"n.c", kSource}});
    auto catalog = generate_catalog(module);
    auto env = type_env(catalog);
    CHECK(env.globals.at("counter") == "i32");
    CHECK(env.fields.at("node").at("next") == "*mut node");
    CHECK(env.returns.at("b") == "i32");
    for (const auto& f : module.functions) {
        CAPTURE(f.name);
        std::string rust = naive_transpile(f.body_text, env);
        CAPTURE(rust);
        REQUIRE(rust::check_syntax(rust).empty());
        auto items = rust::parse_items(rust);
        REQUIRE(items.size() == 1);
        CHECK(items[0].name == f.name);
        CHECK(items[0].unsafe_fn);
        auto unit = probe_item(f.id, f.name, rust, Provenance::fallback, catalog, {}, testing::probe_options(20, "naive"));
        for (const auto& d : unit.diagnostics) INFO(d.rendered);
        CHECK(unit.status == ProbeStatus::compiles);
    }
}

TEST_CASE("every non-blank line of a naive transpilation is unsafe") {
    auto module = parse_sources({SourceFile{"n.c", kSource}});
    auto counts = rust::count_safe_lines(naive_transpile(fn(module, "sum").body_text));
    CHECK(counts.safe == 0);
    CHECK(counts.total > 5);
}

TEST_CASE("constructs outside the naive subset are refused") {
    CHECK_THROWS_AS(naive_transpile("int f(int x){ goto out; out: return x; }"), UnsupportedConstruct);
    CHECK_THROWS_AS(naive_transpile("int f(int x){ switch (x) { case 1: x++; case 2: return x; } return 0; }"),
                    UnsupportedConstruct);
    CHECK_THROWS_AS(naive_transpile("int f(int x){ int y; while ((y = x) != 0) x--; return y; }"), UnsupportedConstruct);
    CHECK(naive_transpile("int f(int (*cb)(int)){ return cb(1); }").find("cb.unwrap()(1)") != std::string::npos);
    CHECK_THROWS_AS(naive_transpile("int x;"), UnsupportedConstruct);
}

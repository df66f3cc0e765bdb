#include <doctest.h>

#include <algorithm>

#include "migratekit/context_prober.hpp"
#include "migratekit/errors.hpp"
#include "migratekit/util/text.hpp"

using namespace migratekit;

namespace {

const FunctionUnit& fn(const ModuleIR& m, const std::string& name) {
    for (const auto& f : m.functions)
        if (f.name == name) return f;
    throw std::runtime_error("no function " + name);
}

std::string repeat_lines(const std::string& line, int n) {
    std::string out;
    for (int i = 0; i < n; ++i) out += line + "\n";
    return out;
}

const char* kHeader =
    "#define PAGE_SIZE 4096\n"
    "struct page {\n"
    "    int order;\n"
    "    struct page *next;\n"
    "};\n"
    "typedef struct page page_t;\n"
    "void *kmalloc(unsigned long size, int flags);\n"
    "extern int nr_pages;\n";

ModuleIR kernelish() {
    return parse_sources({SourceFile{"mm.h", kHeader},
                          SourceFile{"mm.c",
                                     "#include \"mm.h\"\n"
                                     "int nr_pages = 0;\n"
                                     "static int sort(int *v, int n)\n{\n    return n ? v[0] : 0;\n}\n"
                                     "void *grab(void)\n{\n    return kmalloc(PAGE_SIZE, 0);\n}\n"
                                     "int count(page_t *p)\n{\n    int n = 0;\n    while (p) { n++; p = p->next; }\n"
                                     "    nr_pages = n;\n    return sort(&n, 1);\n}\n"
                                     "int pure(int a, int b) { return a + b; }\n"}});
}

}  // namespace

TEST_CASE("a function using only its parameters has nothing to resolve") {
    auto m = kernelish();
    CodebaseIndex index(m);
    CHECK(collect_unresolved(fn(m, "pure"), index).empty());
    auto unit = probe_context(fn(m, "pure"), index);
    CHECK(unit.all_declarations().empty());
    CHECK(unit.context_line_count == 0);
}

TEST_CASE("macro and callee are classified by usage") {
    auto m = kernelish();
    CodebaseIndex index(m);
    auto refs = collect_unresolved(fn(m, "grab"), index);
    REQUIRE(refs.size() == 2);
    CHECK(refs[0].name == "PAGE_SIZE");
    CHECK(refs[0].kind == SymbolKind::macro);
    CHECK(refs[1].name == "kmalloc");
    CHECK(refs[1].kind == SymbolKind::function);
    CHECK(refs[1].origin == "mm.c::grab");

    // All-caps names with no definition anywhere still read as macros.
    auto lone = parse_sources({SourceFile{"x.c", "int f(void){ return BUF_LEN + g(); }\n"}});
    CodebaseIndex lone_index(lone);
    auto lone_refs = collect_unresolved(lone.functions[0], lone_index);
    REQUIRE(lone_refs.size() == 2);
    CHECK(lone_refs[0].kind == SymbolKind::macro);
    CHECK(lone_refs[1].kind == SymbolKind::function);
}

TEST_CASE("global search strips bodies and copies type definitions verbatim") {
    auto m = kernelish();
    CodebaseIndex index(m);
    auto proto = global_search({"sort", SymbolKind::function, "mm.c::count"}, "mm.c", index).declaration;
    CHECK(proto.decl_text == "static int sort(int *v, int n);");
    CHECK(proto.decl_text.find('{') == std::string::npos);

    auto st = global_search({"struct page", SymbolKind::type, "mm.c::count"}, "mm.c", index).declaration;
    CHECK(st.decl_text == "struct page {\n    int order;\n    struct page *next;\n};");
    CHECK(st.file == "mm.h");
    CHECK(st.line == 2);

    auto var = global_search({"nr_pages", SymbolKind::variable, "mm.c::count"}, "mm.c", index).declaration;
    CHECK(var.decl_text == "int nr_pages = 0;");  // the definition wins over the extern
    CHECK_THROWS_AS(global_search({"nowhere", SymbolKind::variable, "mm.c::count"}, "mm.c", index), SymbolNotFound);
}

TEST_CASE("ambiguous names resolve to the nearest include and log every candidate") {
    auto m = parse_sources({SourceFile{"a.h", "#define LIMIT 10\n"}, SourceFile{"b.h", "#define LIMIT 20\n"},
                            SourceFile{"inner.h", "#include \"b.h\"\n"},
                            SourceFile{"main.c", "#include \"inner.h\"\nint f(void){ return LIMIT; }\n"},
                            SourceFile{"other.c", "#include \"a.h\"\nint g(void){ return LIMIT; }\n"}});
    CodebaseIndex index(m);
    auto r = global_search({"LIMIT", SymbolKind::macro, "main.c::f"}, "main.c", index);
    CHECK(r.declaration.file == "b.h");
    REQUIRE(r.ambiguity.has_value());
    CHECK(r.ambiguity->candidates == std::vector<std::string>{"b.h:1", "a.h:1"});
    auto r2 = global_search({"LIMIT", SymbolKind::macro, "other.c::g"}, "other.c", index);
    CHECK(r2.declaration.file == "a.h");

    auto unit = probe_context(fn(m, "f"), index);
    REQUIRE(unit.ambiguities.size() == 1);
    CHECK(unit.ambiguities[0].chosen == "b.h:1");
}

TEST_CASE("context line count sums declaration lines") {
    auto m = parse_sources({SourceFile{"m.c",
                                       "#define SCALE(x) \\\n    ((x) * 2)\n"
                                       "int helper(int a,\n           int b);\n"
                                       "int core(int v) { return helper(SCALE(v), 1); }\n"}});
    CodebaseIndex index(m);
    auto unit = probe_context(fn(m, "core"), index);
    CHECK(unit.types_and_macros.size() == 1);
    CHECK(unit.called_functions.size() == 1);
    CHECK(unit.context_line_count == 2 + 2);
}

TEST_CASE("declarations are ordered and closed over type names") {
    auto m = kernelish();
    CodebaseIndex index(m);
    auto unit = probe_context(fn(m, "count"), index);
    std::vector<std::string> tm;
    for (const auto& d : unit.types_and_macros) tm.push_back(d.symbol.name);
    // page_t pulls in struct page, which comes first.
    CHECK(tm == std::vector<std::string>{"struct page", "page_t"});
    REQUIRE(unit.external_variables.size() == 1);
    CHECK(unit.external_variables[0].symbol.name == "nr_pages");
    REQUIRE(unit.called_functions.size() == 1);
    CHECK(unit.called_functions[0].symbol.name == "sort");

    std::string rendered = render_context_c(unit);
    auto p_types = rendered.find("types and macros");
    auto p_vars = rendered.find("external variables");
    auto p_calls = rendered.find("called functions");
    auto p_core = rendered.find("int count(page_t *p)");
    CHECK(p_types < p_vars);
    CHECK(p_vars < p_calls);
    CHECK(p_calls < p_core);
}

TEST_CASE("assembled units satisfy the context invariants") {
    auto m = kernelish();
    CodebaseIndex index(m);
    for (const auto& f : m.functions) {
        auto unit = probe_context(f, index);
        // Body exclusion.
        for (const auto& d : unit.called_functions) CHECK(d.decl_text.find('{') == std::string::npos);
        // No duplicates by (name, kind).
        std::set<std::pair<std::string, SymbolKind>> seen;
        for (const auto& d : unit.all_declarations()) CHECK(seen.insert({d.symbol.name, d.symbol.kind}).second);
        // Unresolved completeness.
        std::set<std::string> covered;
        for (const auto& d : unit.all_declarations())
            if (f.referenced.count(d.symbol.name)) covered.insert(d.symbol.name);
        for (const auto& s : unit.unresolved) CHECK(covered.insert(s.name).second);
        std::set<std::string> expected;
        for (const auto& r : f.referenced)
            if (!index.is_builtin(r)) expected.insert(r);
        CHECK(covered == expected);
        // Closure: every type name mentioned by an included declaration is included.
        std::set<std::string> included;
        for (const auto& d : unit.all_declarations())
            for (const auto& n : index.entry(d.entry).names) included.insert(n);
        for (const auto& d : unit.all_declarations())
            for (const auto& dep : index.entry(d.entry).deps) {
                bool is_type = false;
                for (auto i : index.lookup(dep)) is_type |= index.entry(i).kind == DeclKind::type;
                if (is_type) CHECK_MESSAGE(included.count(dep), dep);
            }
        // Idempotence.
        CHECK(assemble_context(f, unit.all_declarations(), index) == unit);
        // Serialization round trip.
        CHECK(translation_unit_from_json(to_json(unit)) == unit);
    }
}

TEST_CASE("the line budget is enforced") {
    std::string big_core = "int core(void)\n{\n" + repeat_lines("    filler();", 146) + "    return TABLE;\n}\n";
    std::string table = "#define TABLE \\\n" + repeat_lines("    1 + \\", 78) + "    1\n";
    auto m = parse_sources({SourceFile{"m.c", table + big_core}});
    const auto& core = fn(m, "core");
    CHECK(core.line_count() == 150);
    CodebaseIndex index(m, {"filler"});
    auto decls = std::vector<Declaration>{
        global_search({"TABLE", SymbolKind::macro, core.id}, "m.c", index).declaration};
    CHECK(text::count_lines(decls[0].decl_text) == 80);
    CHECK_THROWS_AS(assemble_context(core, decls, index), ContextBudgetExceeded);
    ContextOptions wide;
    wide.line_budget = 230;
    CHECK(assemble_context(core, decls, index, wide).context_line_count == 80);
}

TEST_CASE("truncation drops variables last-first") {
    std::string src = "int g1;\nint g2;\nint core(void)\n{\n    return g1 + g2;\n}\n";
    auto m = parse_sources({SourceFile{"m.c", src}});
    CodebaseIndex index(m);
    ContextOptions opts;
    opts.line_budget = 5;  // 4-line core + one 1-line variable
    opts.on_overflow = BudgetPolicy::truncate;
    auto unit = probe_context(fn(m, "core"), index, opts);
    REQUIRE(unit.external_variables.size() == 1);
    CHECK(unit.external_variables[0].symbol.name == "g1");
    REQUIRE(unit.unresolved.size() == 1);
    CHECK(unit.unresolved[0].name == "g2");
    CHECK_FALSE(unit.warnings.empty());
}

TEST_CASE("enum constants resolve to their enum") {
    auto m = parse_sources({SourceFile{"m.c", "enum mode { MODE_A, MODE_B };\nint f(void){ return MODE_B; }\n"}});
    CodebaseIndex index(m);
    auto unit = probe_context(m.functions[0], index);
    REQUIRE(unit.types_and_macros.size() == 1);
    CHECK(unit.types_and_macros[0].decl_text == "enum mode { MODE_A, MODE_B };");
    CHECK(unit.unresolved.empty());
}

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>

#include "migratekit/c_frontend.hpp"
#include "migratekit/errors.hpp"

using namespace migratekit;

namespace {

ModuleIR one_file(const std::string& text, const std::string& path = "m.c") {
    return parse_sources({SourceFile{path, text}});
}

std::vector<std::string> names(const ModuleIR& m) {
    std::vector<std::string> out;
    for (const auto& f : m.functions) out.push_back(f.name);
    return out;
}

std::vector<std::vector<std::string>> short_order(const CallGraph& g) {
    std::vector<std::vector<std::string>> out;
    for (const auto& group : g.scc_order) {
        out.emplace_back();
        for (const auto& id : group) out.back().push_back(id.substr(id.rfind(':') + 1));
    }
    return out;
}

}  // namespace

TEST_CASE("a file holding only a macro yields no functions and one declaration") {
    auto m = one_file("#define X 1\n");
    CHECK(m.functions.empty());
    REQUIRE(m.declarations.size() == 1);
    CHECK(m.declarations[0].kind == DeclKind::macro);
    CHECK(m.declarations[0].names == std::vector<std::string>{"X"});
}

TEST_CASE("chain fixture splits into three units and a linear graph") {
    auto m = parse_module({std::filesystem::path(MIGRATEKIT_FIXTURES) / "chain"},
                          {std::filesystem::path(MIGRATEKIT_FIXTURES) / "chain", {}});
    CHECK(names(m) == std::vector<std::string>{"a", "b", "c"});
    CHECK(m.functions[0].id == "chain.c::a");
    auto g = build_call_graph(m);
    std::set<std::pair<std::string, std::string>> expected{{"chain.c::a", "chain.c::b"}, {"chain.c::b", "chain.c::c"}};
    CHECK(g.edges == expected);
    CHECK(short_order(g) == std::vector<std::vector<std::string>>{{"c"}, {"b"}, {"a"}});
    CHECK(leaves_first_schedule(g) == g.scc_order);
}

TEST_CASE("function units slice the source exactly") {
    std::string src = "/* lead */\nstatic int k;\nint f(int x)\n{\n    int y = x + k;\n    return y;\n}\n\nvoid g(void) { f(1); }\n";
    auto m = one_file(src);
    REQUIRE(m.functions.size() == 2);
    const auto& f = m.functions[0];
    CHECK(f.body_text == src.substr(f.begin, f.end - f.begin));
    CHECK(f.start_line == 3);
    CHECK(f.end_line == 7);
    CHECK(f.line_count() == 5);
    CHECK(f.locals == std::set<std::string>{"x", "y"});
    CHECK(f.referenced == std::set<std::string>{"k"});
    for (const auto& fn : m.functions)
        for (const auto& l : fn.locals) CHECK(fn.referenced.count(l) == 0);
    CHECK(f.signature == "int f(int x);");
}

TEST_CASE("residual text plus bodies rebuilds the file") {
    std::string src = "#include \"h.h\"\nint a(void){return b();}\n/* mid */\nint b(void){return 0;}\ntrailing_decl_t z;\n";
    auto m = parse_sources({SourceFile{"m.c", src}, SourceFile{"h.h", "typedef int trailing_decl_t;\n"}});
    std::string rebuilt;
    std::uint32_t pos = 0;
    for (const auto& f : m.functions) {
        if (f.file != "m.c") continue;
        rebuilt += src.substr(pos, f.begin - pos);
        rebuilt += f.body_text;
        pos = f.end;
    }
    rebuilt += src.substr(pos);
    CHECK(rebuilt == src);
    std::string residual = residual_text(m, "m.c");
    CHECK(residual.find("return") == std::string::npos);
    CHECK(residual.find("/* mid */") != std::string::npos);
}

TEST_CASE("isolated functions and tie-breaks") {
    auto g = build_call_graph(one_file("int x(void){return 1;}\nint y(void){return 2;}\n"));
    CHECK(g.edges.empty());
    CHECK(short_order(g) == std::vector<std::vector<std::string>>{{"x"}, {"y"}});

    auto single = build_call_graph(one_file("int only(int a){return a;}\n"));
    CHECK(single.nodes.size() == 1);
    CHECK(short_order(single) == std::vector<std::vector<std::string>>{{"only"}});
}

TEST_CASE("mutual recursion forms one group") {
    auto g = build_call_graph(
        one_file("int g(int n);\nint f(int n){return n ? g(n-1) : 0;}\nint g(int n){return n ? f(n-1) : 1;}\n"));
    CHECK(short_order(g) == std::vector<std::vector<std::string>>{{"f", "g"}});
}

TEST_CASE("diamond schedule is one of the valid topological orders") {
    auto m = one_file("int d(void){return 0;}\nint b(void){return d();}\nint c(void){return d();}\n"
                      "int a(void){return b()+c();}\n");
    auto order = short_order(build_call_graph(m));
    // Oracle: enumerate every permutation and keep those where each callee
    // precedes its caller.
    std::vector<std::string> nodes{"a", "b", "c", "d"};
    std::vector<std::pair<std::string, std::string>> calls{{"a", "b"}, {"a", "c"}, {"b", "d"}, {"c", "d"}};
    std::vector<std::vector<std::string>> valid;
    std::sort(nodes.begin(), nodes.end());
    do {
        auto at = [&](const std::string& n) { return std::find(nodes.begin(), nodes.end(), n) - nodes.begin(); };
        bool ok = std::all_of(calls.begin(), calls.end(), [&](auto& e) { return at(e.second) < at(e.first); });
        if (ok) valid.push_back(nodes);
    } while (std::next_permutation(nodes.begin(), nodes.end()));
    std::vector<std::string> flat;
    for (auto& g : order) {
        REQUIRE(g.size() == 1);
        flat.push_back(g[0]);
    }
    CHECK(std::find(valid.begin(), valid.end(), flat) != valid.end());
    CHECK(flat.front() == "d");
    CHECK(flat.back() == "a");
}

TEST_CASE("external, pointer and macro-hidden calls") {
    auto m = one_file(
        "#define HELP(x) helper(x)\n"
        "struct ops { int (*run)(int); };\n"
        "int helper(int v){return v;}\n"
        "int user(struct ops *o, int (*cb)(int)){ printk(1); cb(2); o->run(3); return HELP(4); }\n");
    auto g = build_call_graph(m);
    CHECK(g.external_calls.at("m.c::user") == std::set<std::string>{"cb", "printk", "run"});
    CHECK(g.edges.empty());
    REQUIRE(g.via_macro.size() == 1);
    CHECK(g.via_macro[0].macro == "HELP");
    CHECK(g.via_macro[0].callee == "m.c::helper");
    auto round = call_graph_from_json(call_graph_to_json(g));
    CHECK(round.edges == g.edges);
    CHECK(round.scc_order == g.scc_order);
    CHECK(round.external_calls == g.external_calls);
}

TEST_CASE("static functions are keyed per file") {
    auto m = parse_sources({SourceFile{"one.c", "static int h(void){return 1;}\nint p(void){return h();}\n"},
                            SourceFile{"two.c", "static int h(void){return 2;}\nint q(void){return h();}\n"}});
    auto g = build_call_graph(m);
    CHECK(g.edges.count({"one.c::p", "one.c::h"}) == 1);
    CHECK(g.edges.count({"two.c::q", "two.c::h"}) == 1);
    CHECK(g.edges.size() == 2);
}

TEST_CASE("declarations without bodies are module declarations") {
    auto m = one_file("extern int counter;\nint proto(int);\nstruct s { int a; };\ntypedef struct s s_t;\n"
                      "enum color { RED, GREEN };\nint def(void){return counter;}\n");
    CHECK(m.functions.size() == 1);
    int prototypes = 0, variables = 0, types = 0;
    for (const auto& d : m.declarations) {
        prototypes += d.kind == DeclKind::function;
        variables += d.kind == DeclKind::variable;
        types += d.kind == DeclKind::type;
    }
    CHECK(prototypes == 1);
    CHECK(variables == 1);
    CHECK(types == 3);
}

TEST_CASE("conditional compilation takes the configured branch") {
    std::string src = "#ifdef FAST\nint f(void){return 1;}\n#else\nint g(void){return 2;}\n#endif\n"
                      "#if 0\nint never(void){return 3;}\n#endif\n";
    CHECK(names(parse_sources({SourceFile{"m.c", src}})) == std::vector<std::string>{"g"});
    CHECK(names(parse_sources({SourceFile{"m.c", src}}, ParseOptions{{}, {"FAST"}})) == std::vector<std::string>{"f"});
}

TEST_CASE("input outside the subset raises ParseError with a location") {
    try {
        one_file("int ok(void){return 0;}\n#define CAT(a,b) a##b\n", "bad.c");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.file() == "bad.c");
        CHECK(e.line() == 2);
    }
    try {
        one_file("int x(void){return 0;}\n\nint broken( { ]\n", "junk.c");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.file() == "junk.c");
        CHECK(e.line() >= 3);
    }
}

TEST_CASE("missing paths and header-only inputs") {
    CHECK_THROWS_AS(parse_module({"/nonexistent/dir/file.c"}), IoError);
    auto dir = std::filesystem::temp_directory_path() / "mk_header_only";
    std::filesystem::create_directories(dir);
    {
        std::ofstream(dir / "only.h") << "#define A 1\n";
    }
    CHECK_THROWS_AS(parse_module({dir}), IoError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("parsing is deterministic") {
    std::string src = "int c(int);\nint b(int x){return c(x);}\nint c(int x){return x ? b(x-1) : 0;}\nint a(void){return c(3);}\n";
    auto g1 = call_graph_to_json(build_call_graph(one_file(src)));
    auto g2 = call_graph_to_json(build_call_graph(one_file(src)));
    CHECK(g1.dump() == g2.dump());
}

#include "corpus.hpp"

#include <algorithm>
#include <random>

#include "migratekit/syntax/tree.hpp"

namespace migratekit::corpus {

namespace {

int uniform(std::mt19937& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
bool chance(std::mt19937& rng, double p) { return std::bernoulli_distribution(p)(rng); }

const std::vector<std::string> kExternals = {"ext_read", "ext_write", "ext_log"};

}  // namespace

GeneratedCModule random_c_module(std::uint32_t seed, int max_functions) {
    std::mt19937 rng(seed);
    GeneratedCModule m;
    int n = uniform(rng, 1, max_functions);
    bool two_files = n >= 3 && chance(rng, 0.5);
    int split = two_files ? uniform(rng, 1, n - 1) : n;

    std::vector<std::string> names, files;
    for (int i = 0; i < n; ++i) {
        names.push_back("f" + std::to_string(i));
        files.push_back(i < split ? "a.c" : "b.c");
        m.ids.push_back(files.back() + "::" + names.back());
    }

    std::string prototypes;
    for (const auto& e : kExternals) prototypes += "int " + e + "(int v);\n";
    for (const auto& name : names) prototypes += "int " + name + "(int x);\n";

    std::map<std::string, std::string> text = {{"a.c", prototypes}};
    if (two_files) text["b.c"] = prototypes;

    double density = std::uniform_real_distribution<double>(0.05, 0.35)(rng);
    for (int i = 0; i < n; ++i) {
        std::vector<int> callees;
        for (int j = 0; j < n; ++j)
            if (chance(rng, density)) callees.push_back(j);
        std::shuffle(callees.begin(), callees.end(), rng);

        std::string body = "\nint " + names[i] + "(int x)\n{\n";
        if (chance(rng, 0.3)) body += "    int steps = 0;\n";
        for (std::size_t k = 0; k < callees.size(); ++k) {
            const auto& g = names[callees[k]];
            m.edges.insert({m.ids[i], m.ids[callees[k]]});
            switch (uniform(rng, 0, 4)) {
                case 0: body += "    x += " + g + "(x);\n"; break;
                case 1: body += "    if (" + g + "(x) > 3)\n        x -= 1;\n"; break;
                case 2: body += "    while (x > 1000)\n        x = " + g + "(x - 1);\n"; break;
                case 3:
                    if (k + 1 < callees.size()) {
                        const auto& h = names[callees[++k]];
                        m.edges.insert({m.ids[i], m.ids[callees[k]]});
                        body += "    x = " + g + "(" + h + "(x) + 1);\n";
                    } else {
                        body += "    x = " + g + "(" + g + "(x));\n";
                    }
                    break;
                default: body += "    x ^= (x & 1) ? " + g + "(x) : 0;\n"; break;
            }
            if (chance(rng, 0.3)) body += "    x = x * 3 + 1;\n";
        }
        for (const auto& e : kExternals) {
            if (!chance(rng, 0.25)) continue;
            body += "    x += " + e + "(x);\n";
            m.external_calls[m.ids[i]].insert(e);
        }
        if (n > 1 && chance(rng, 0.15)) {
            // Taking an address is not a call; invoking the pointer is external.
            int j = uniform(rng, 0, n - 1);
            body += "    int (*fp)(int) = " + names[j] + ";\n    x += fp(x);\n";
            m.external_calls[m.ids[i]].insert("fp");
        }
        body += "    return x;\n}\n";
        text[files[i]] += body;
    }
    for (auto& [path, t] : text) m.files.push_back({path, t, FileKind::source, {}});
    return m;
}

std::set<std::pair<std::string, std::string>> tree_walk_edges(const std::vector<SourceFile>& files) {
    struct Def {
        std::string file;
        std::string name;
        syntax::Node body;
    };
    std::vector<syntax::Tree> trees;
    trees.reserve(files.size());
    std::vector<Def> defs;
    std::map<std::string, std::string> id_of;
    for (const auto& f : files) {
        trees.push_back(syntax::Tree::parse(syntax::Language::c, f.text));
        for (auto top : trees.back().root().named_children()) {
            if (top.type() != "function_definition") continue;
            auto decl = top.field("declarator");
            while (decl && decl.type() != "function_declarator") decl = decl.field("declarator");
            std::string name(decl.field("declarator").text());
            defs.push_back({f.path, name, top.field("body")});
            id_of[name] = f.path + "::" + name;
        }
    }
    std::set<std::pair<std::string, std::string>> edges;
    for (const auto& d : defs) {
        std::vector<syntax::Node> stack{d.body};
        while (!stack.empty()) {
            auto node = stack.back();
            stack.pop_back();
            if (node.type() == "call_expression") {
                auto fn = node.field("function");
                if (fn.type() == "identifier" && id_of.count(std::string(fn.text())))
                    edges.insert({id_of[d.name], id_of[std::string(fn.text())]});
            }
            for (auto c : node.named_children()) stack.push_back(c);
        }
    }
    return edges;
}

std::vector<std::vector<std::string>> brute_force_schedule(
    const std::vector<std::string>& ids, const std::set<std::pair<std::string, std::string>>& edges) {
    std::size_t n = ids.size();
    std::map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < n; ++i) pos[ids[i]] = i;
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (const auto& [a, b] : edges) reach[pos[a]][pos[b]] = true;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (reach[i][k] && reach[k][j]) reach[i][j] = true;

    std::vector<int> group(n, -1);
    std::vector<std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < n; ++i) {
        if (group[i] >= 0) continue;
        groups.emplace_back();
        for (std::size_t j = i; j < n; ++j)
            if (j == i || (reach[i][j] && reach[j][i])) {
                group[j] = static_cast<int>(groups.size() - 1);
                groups.back().push_back(j);
            }
    }
    std::vector<bool> done(groups.size(), false);
    std::vector<std::vector<std::string>> out;
    while (out.size() < groups.size()) {
        for (std::size_t g = 0; g < groups.size(); ++g) {  // groups are in first-member order
            if (done[g]) continue;
            bool ready = true;
            for (const auto& [a, b] : edges)
                if (group[pos[a]] == static_cast<int>(g) && group[pos[b]] != static_cast<int>(g) &&
                    !done[static_cast<std::size_t>(group[pos[b]])])
                    ready = false;
            if (!ready) continue;
            done[g] = true;
            std::vector<std::string> names;
            for (auto i : groups[g]) names.push_back(ids[i]);
            out.push_back(names);
            break;
        }
    }
    return out;
}

bool schedule_is_sound(const std::vector<std::vector<std::string>>& schedule, const std::vector<std::string>& ids,
                       const std::set<std::pair<std::string, std::string>>& edges) {
    std::map<std::string, std::size_t> at;
    for (std::size_t g = 0; g < schedule.size(); ++g)
        for (const auto& id : schedule[g])
            if (!at.emplace(id, g).second) return false;
    if (at.size() != ids.size()) return false;
    for (const auto& id : ids)
        if (!at.count(id)) return false;
    for (const auto& [a, b] : edges)
        if (at[a] != at[b] && at[b] > at[a]) return false;
    return true;
}

GeneratedSnippet random_rust_snippet(std::uint32_t seed) {
    std::mt19937 rng(seed);
    std::vector<std::pair<std::string, bool>> lines;  // text, unsafe
    int counter = 0;
    auto fresh = [&] { return std::to_string(counter++); };

    int items = uniform(rng, 1, 4);
    for (int it = 0; it < items; ++it) {
        if (it > 0) lines.push_back({"", false});
        int kind = uniform(rng, 0, 5);
        if (kind == 0) {
            std::string s = "S" + fresh();
            lines.push_back({"struct " + s + " {", false});
            lines.push_back({"    a: i32,", false});
            lines.push_back({"}", false});
            continue;
        }
        bool unsafe_fn = kind == 1 || kind == 2;
        std::string name = "g" + fresh();
        if (kind == 2) {
            // The parameter lines sit before the body and stay safe.
            lines.push_back({"pub unsafe fn " + name + "(", false});
            lines.push_back({"    p: *mut i32,", false});
            lines.push_back({") -> i32 {", true});
        } else {
            lines.push_back({std::string(unsafe_fn ? "unsafe fn " : "fn ") + name + "(p: *mut i32) -> i32 {", unsafe_fn});
        }
        int stmts = uniform(rng, 0, 6);
        for (int s = 0; s < stmts; ++s) {
            switch (uniform(rng, 0, 5)) {
                case 0: lines.push_back({"    let a" + fresh() + " = 1;", unsafe_fn}); break;
                case 1: lines.push_back({"", false}); break;
                case 2: lines.push_back({"    // step " + fresh(), unsafe_fn}); break;
                case 3: lines.push_back({"    let b" + fresh() + " = unsafe { *p + 1 };", true}); break;
                case 4: {
                    lines.push_back({"    unsafe {", true});
                    int inner = uniform(rng, 0, 4);
                    for (int k = 0; k < inner; ++k) lines.push_back({"        *p += " + fresh() + ";", true});
                    if (chance(rng, 0.3)) lines.push_back({"", false});
                    lines.push_back({"    }", true});
                    break;
                }
                default:
                    lines.push_back({"    {", unsafe_fn});
                    lines.push_back({"        let c" + fresh() + " = 2;", unsafe_fn});
                    lines.push_back({"    }", unsafe_fn});
                    break;
            }
        }
        lines.push_back({"    0", unsafe_fn});
        lines.push_back({"}", unsafe_fn});
    }

    GeneratedSnippet g;
    for (const auto& [t, u] : lines) {
        g.text += t + "\n";
        if (t.empty()) continue;
        ++g.total;
        if (u) ++g.unsafe;
    }
    return g;
}

std::vector<LazinessSample> binned_laziness_corpus(std::uint32_t seed, int per_bin) {
    std::mt19937 rng(seed);
    struct BinSpec {
        int lo, hi;
        double lazy_share;
    };
    const std::vector<BinSpec> bins = {{50, 190, 1.0 / 12}, {210, 390, 3.0 / 12}, {410, 590, 5.0 / 12},
                                       {610, 900, 7.0 / 12}};
    std::vector<LazinessSample> out;
    for (const auto& b : bins) {
        int lazy_n = static_cast<int>(b.lazy_share * per_bin + 0.5);
        std::vector<bool> lazy(static_cast<std::size_t>(per_bin), false);
        std::fill(lazy.begin(), lazy.begin() + lazy_n, true);
        std::shuffle(lazy.begin(), lazy.end(), rng);
        for (int s = 0; s < per_bin; ++s) {
            int lines = uniform(rng, b.lo, b.hi);
            int stmts = lines - 5;  // signature, braces, declaration, return
            LazinessSample smp;
            smp.lazy = lazy[static_cast<std::size_t>(s)];
            smp.c = "int f(int *v)\n{\n    int acc = 0;\n";
            smp.rust = "pub fn f(v: &mut [i32]) -> i32 {\n    let mut acc: i32 = 0;\n";
            int kept = smp.lazy ? stmts / 3 : stmts;
            for (int i = 0; i < stmts; ++i) {
                std::string stmt = "    acc += v[" + std::to_string(i % 16) + "] * " + std::to_string(i + 1) + ";\n";
                smp.c += stmt;
                if (i < kept) smp.rust += stmt;
            }
            if (smp.lazy && chance(rng, 0.5)) smp.rust += "    // ... the remaining terms follow the same pattern\n";
            smp.c += "    return acc;\n}\n";
            smp.rust += "    acc\n}\n";
            smp.c_lines = lines;
            out.push_back(std::move(smp));
        }
    }
    return out;
}

}  // namespace migratekit::corpus

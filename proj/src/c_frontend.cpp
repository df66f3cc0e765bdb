#include "migratekit/c_frontend.hpp"

#include <algorithm>
#include <cctype>
#include <queue>
#include <unordered_map>
#include <unordered_set>

#include "migratekit/errors.hpp"
#include "migratekit/syntax/c_syntax.hpp"
#include "migratekit/syntax/tree.hpp"
#include "migratekit/util/fs.hpp"
#include "migratekit/util/text.hpp"

namespace migratekit {

using syntax::Node;

const SourceFile* ModuleIR::file(const std::string& path) const {
    for (const auto& f : files)
        if (f.path == path) return &f;
    return nullptr;
}

const FunctionUnit* ModuleIR::function(const std::string& id) const {
    for (const auto& f : functions)
        if (f.id == id) return &f;
    return nullptr;
}

const FunctionUnit* ModuleIR::resolve_callee(const std::string& name, const std::string& from_file) const {
    const FunctionUnit* visible = nullptr;
    for (const auto& f : functions) {
        if (f.name != name) continue;
        if (f.file == from_file) return &f;
        if (!f.is_static && !visible) visible = &f;
    }
    return visible;
}

bool ModuleIR::is_macro(const std::string& name) const {
    for (const auto& d : declarations)
        if (d.kind == DeclKind::macro && !d.names.empty() && d.names.front() == name) return true;
    return false;
}

namespace {

bool has_suffix(const std::string& s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string tag_key(std::string_view specifier_type, std::string_view tag) {
    std::string kw = specifier_type == "struct_specifier" ? "struct"
                     : specifier_type == "union_specifier" ? "union"
                                                           : "enum";
    return kw + " " + std::string(tag);
}

bool is_tag_specifier(std::string_view t) {
    return t == "struct_specifier" || t == "union_specifier" || t == "enum_specifier";
}

/// Identifiers in raw macro text; identifiers directly followed by '(' are
/// also reported as calls.
void scan_macro_body(std::string_view body, std::vector<std::string>& idents, std::vector<std::string>& calls) {
    std::size_t i = 0;
    while (i < body.size()) {
        char c = body[i];
        if (c == '"' || c == '\'') {
            char q = c;
            ++i;
            while (i < body.size() && body[i] != q) {
                if (body[i] == '\\') ++i;
                ++i;
            }
            ++i;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            while (i < body.size() && (std::isalnum(static_cast<unsigned char>(body[i])) || body[i] == '.')) ++i;
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t s = i;
            while (i < body.size() && (std::isalnum(static_cast<unsigned char>(body[i])) || body[i] == '_')) ++i;
            std::string id(body.substr(s, i - s));
            std::size_t j = i;
            while (j < body.size() && (body[j] == ' ' || body[j] == '\t')) ++j;
            if (j < body.size() && body[j] == '(') {
                if (std::find(calls.begin(), calls.end(), id) == calls.end()) calls.push_back(id);
            }
            if (std::find(idents.begin(), idents.end(), id) == idents.end()) idents.push_back(id);
            continue;
        }
        ++i;
    }
}

void push_unique(std::vector<std::string>& v, const std::string& s) {
    if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(s);
}

/// Identifiers, typedef names and tags a declaration mentions besides the
/// names it declares.
std::vector<std::string> declaration_deps(const Node& node, const std::vector<std::string>& declared) {
    std::vector<std::string> deps;
    std::unordered_set<std::uint32_t> declarator_names;
    syntax::walk(node, [&](const Node& n) {
        auto t = n.type();
        if (t == "type_definition" || t == "declaration" || t == "field_declaration" || t == "parameter_declaration") {
            for (std::uint32_t i = 0; i < n.child_count(); ++i) {
                if (n.field_name_of_child(i) != "declarator") continue;
                if (auto id = csyntax::declarator_name(n.child(i))) declarator_names.insert(id.start_byte());
            }
        }
        if (t == "enumerator") {
            if (auto nm = n.field("name")) declarator_names.insert(nm.start_byte());
        }
        return true;
    });
    syntax::walk(node, [&](const Node& n) {
        auto t = n.type();
        if (t == "identifier" || t == "type_identifier") {
            if (declarator_names.count(n.start_byte())) return false;
            auto parent = n.parent();
            std::string name;
            if (t == "type_identifier" && is_tag_specifier(parent.type()) && parent.field("name") == n)
                name = tag_key(parent.type(), n.text());
            else
                name = std::string(n.text());
            if (std::find(declared.begin(), declared.end(), name) == declared.end()) push_unique(deps, name);
            return false;
        }
        return true;
    });
    return deps;
}

class FileParser {
public:
    FileParser(SourceFile& file, const ParseOptions& options, ModuleIR& module)
        : file_(file), module_(module), defined_(options.defines.begin(), options.defines.end()) {}

    void run() {
        auto tree = syntax::Tree::parse(syntax::Language::c, file_.text);
        auto root = tree.root();
        if (root.has_error()) {
            auto errs = syntax::error_nodes(root);
            int line = errs.empty() ? 1 : errs.front().start_line();
            throw ParseError(file_.path, line, errs.empty() || errs.front().is_error()
                                                   ? "syntax error or construct outside the supported C subset"
                                                   : "missing `" + std::string(errs.front().type()) + "`");
        }
        items(root);
    }

private:
    void items(const Node& parent) {
        for (std::uint32_t i = 0; i < parent.child_count(); ++i) {
            auto fname = parent.field_name_of_child(i);
            if (fname == "name" || fname == "condition" || fname == "alternative") continue;
            auto child = parent.child(i);
            if (!child.named()) continue;
            item(child);
        }
    }

    void item(const Node& n) {
        auto t = n.type();
        if (t == "comment") return;
        if (t == "function_definition") return function(n);
        if (t == "declaration") return declaration(n);
        if (t == "type_definition") return type_definition(n);
        if (is_tag_specifier(t)) return tag_definition(n);
        if (t == "preproc_def" || t == "preproc_function_def") return macro(n);
        if (t == "preproc_include") {
            auto path = n.field("path");
            std::string p(path.text());
            if (p.size() >= 2 && (p.front() == '"' || p.front() == '<')) p = p.substr(1, p.size() - 2);
            file_.includes.push_back(p);
            return;
        }
        if (t == "preproc_ifdef" || t == "preproc_if") return conditional(n);
        if (t == "preproc_call") return;
        throw ParseError(file_.path, n.start_line(), "unsupported top-level construct `" + std::string(t) + "`");
    }

    bool condition_holds(const Node& n) {
        auto t = n.type();
        if (t == "preproc_ifdef" || t == "preproc_elifdef") {
            bool negate = n.child(0).text().find("ifndef") != std::string_view::npos ||
                          n.child(0).text().find("elifndef") != std::string_view::npos;
            bool defined = defined_.count(std::string(n.field("name").text())) > 0;
            return negate ? !defined : defined;
        }
        return eval_condition(n.field("condition"));
    }

    bool eval_condition(const Node& c) {
        auto t = c.type();
        if (t == "number_literal") return c.text() != "0";
        if (t == "preproc_defined") {
            for (auto ch : c.named_children())
                if (ch.type() == "identifier") return defined_.count(std::string(ch.text())) > 0;
        }
        if (t == "unary_expression" && c.field("operator").text() == "!") return !eval_condition(c.field("argument"));
        if (t == "parenthesized_expression" && c.named_child_count() == 1) return eval_condition(c.named_child(0));
        // Anything richer is taken as written: the first branch.
        return true;
    }

    void conditional(const Node& n) {
        Node branch = n;
        while (branch) {
            auto t = branch.type();
            if (t == "preproc_else") {
                items(branch);
                return;
            }
            if (condition_holds(branch)) {
                items(branch);
                return;
            }
            branch = branch.field("alternative");
        }
    }

    ModuleDecl make_decl(const Node& n, DeclKind kind, std::uint32_t end_byte) {
        ModuleDecl d;
        d.kind = kind;
        d.file = file_.path;
        d.begin = n.start_byte();
        d.end = end_byte;
        d.line = n.start_line();
        d.text = std::string(text::rtrim(std::string_view(file_.text).substr(d.begin, d.end - d.begin)));
        d.end_line = d.line + text::count_lines(d.text) - 1;
        return d;
    }

    void macro(const Node& n) {
        auto body = n.field("value").text();
        if (body.find("##") != std::string_view::npos)
            throw ParseError(file_.path, n.start_line(), "token pasting in macro is outside the supported subset");
        auto d = make_decl(n, DeclKind::macro, n.end_byte());
        std::string name(n.field("name").text());
        d.names = {name};
        d.function_like_macro = n.type() == "preproc_function_def";
        std::vector<std::string> params;
        if (auto ps = n.field("parameters"))
            for (auto p : ps.named_children()) params.emplace_back(p.text());
        std::vector<std::string> idents, calls;
        scan_macro_body(body, idents, calls);
        for (auto& id : idents)
            if (id != name && std::find(params.begin(), params.end(), id) == params.end()) d.deps.push_back(id);
        for (auto& c : calls)
            if (std::find(params.begin(), params.end(), c) == params.end()) d.macro_calls.push_back(c);
        defined_.insert(name);
        module_.declarations.push_back(std::move(d));
    }

    std::uint32_t end_with_semicolon(const Node& n) {
        auto next = n.next_sibling();
        if (next && next.type() == ";") return next.end_byte();
        return n.end_byte();
    }

    void tag_definition(const Node& n) {
        auto name = n.field("name");
        if (!name) throw ParseError(file_.path, n.start_line(), "anonymous top-level tag definition");
        auto d = make_decl(n, DeclKind::type, end_with_semicolon(n));
        d.names = {tag_key(n.type(), name.text())};
        d.is_definition = static_cast<bool>(n.field("body"));
        if (n.type() == "enum_specifier" && d.is_definition) {
            d.enumerators = true;
            for (auto e : n.field("body").named_children())
                if (e.type() == "enumerator") d.names.emplace_back(e.field("name").text());
        }
        d.deps = declaration_deps(n, d.names);
        module_.declarations.push_back(std::move(d));
    }

    void add_inline_tag(const Node& n, const Node& type_node) {
        if (!is_tag_specifier(type_node.type()) || !type_node.field("body") || !type_node.field("name")) return;
        auto d = make_decl(n, DeclKind::type, n.end_byte());
        d.names = {tag_key(type_node.type(), type_node.field("name").text())};
        d.deps = declaration_deps(n, d.names);
        module_.declarations.push_back(std::move(d));
    }

    void type_definition(const Node& n) {
        auto d = make_decl(n, DeclKind::type, n.end_byte());
        auto type_node = n.field("type");
        if (is_tag_specifier(type_node.type()) && type_node.field("name") && type_node.field("body"))
            d.names.push_back(tag_key(type_node.type(), type_node.field("name").text()));
        for (std::uint32_t i = 0; i < n.child_count(); ++i) {
            if (n.field_name_of_child(i) != "declarator") continue;
            if (auto id = csyntax::declarator_name(n.child(i))) d.names.emplace_back(id.text());
        }
        if (type_node.type() == "enum_specifier" && type_node.field("body")) {
            d.enumerators = true;
            for (auto e : type_node.field("body").named_children())
                if (e.type() == "enumerator") d.names.emplace_back(e.field("name").text());
        }
        d.deps = declaration_deps(n, d.names);
        module_.declarations.push_back(std::move(d));
    }

    void declaration(const Node& n) {
        bool is_extern = false;
        for (auto c : n.named_children())
            if (c.type() == "storage_class_specifier" && c.text() == "extern") is_extern = true;
        std::vector<std::string> fn_names, var_names;
        for (std::uint32_t i = 0; i < n.child_count(); ++i) {
            if (n.field_name_of_child(i) != "declarator") continue;
            auto decl = n.child(i);
            auto id = csyntax::declarator_name(decl);
            if (!id) continue;
            (csyntax::declares_function(decl) ? fn_names : var_names).emplace_back(id.text());
        }
        add_inline_tag(n, n.field("type"));
        if (!fn_names.empty()) {
            auto d = make_decl(n, DeclKind::function, n.end_byte());
            d.names = fn_names;
            d.is_definition = false;
            d.deps = declaration_deps(n, d.names);
            module_.declarations.push_back(std::move(d));
        }
        if (!var_names.empty()) {
            auto d = make_decl(n, DeclKind::variable, n.end_byte());
            d.names = var_names;
            d.is_definition = !is_extern;
            d.deps = declaration_deps(n, d.names);
            module_.declarations.push_back(std::move(d));
        }
    }

    void function(const Node& n) {
        auto declarator = n.field("declarator");
        auto name_node = csyntax::declarator_name(declarator);
        if (!name_node) throw ParseError(file_.path, n.start_line(), "function definition without a name");
        auto body = n.field("body");

        FunctionUnit fu;
        fu.file = file_.path;
        fu.name = std::string(name_node.text());
        fu.id = file_.path + "::" + fu.name;
        fu.begin = n.start_byte();
        fu.end = n.end_byte();
        fu.start_line = n.start_line();
        fu.end_line = n.end_line();
        fu.body_text = file_.text.substr(fu.begin, fu.end - fu.begin);
        fu.signature =
            std::string(text::rtrim(std::string_view(file_.text).substr(fu.begin, body.start_byte() - fu.begin))) + ";";
        for (auto c : n.named_children())
            if (c.type() == "storage_class_specifier" && c.text() == "static") fu.is_static = true;

        for (auto& bad : csyntax::unsupported_constructs(n))
            throw ParseError(file_.path, bad.start_line(),
                             "construct `" + std::string(bad.type()) + "` is outside the supported C subset");

        csyntax::FunctionScan scan = csyntax::scan_function(n);
        fu.locals = std::move(scan.locals);
        for (auto& [name, use] : scan.uses) {
            if (fu.locals.count(name)) continue;
            fu.referenced.insert(name);
            fu.usage[name] = IdentifierUse{use.call, use.type, use.value};
        }
        for (auto& c : scan.calls)
            if (!fu.locals.count(c)) fu.calls.push_back(c);
        for (auto& c : scan.calls)
            if (fu.locals.count(c)) push_unique(fu.pointer_calls, c);
        for (auto& c : scan.pointer_calls) push_unique(fu.pointer_calls, c);
        fu.statement_count = csyntax::count_statements(body);
        for (auto& dep : declaration_deps(n.field("type"), {})) push_unique(fu.signature_deps, dep);
        for (auto& dep : declaration_deps(declarator, {fu.name})) push_unique(fu.signature_deps, dep);
        module_.functions.push_back(std::move(fu));
    }

    SourceFile& file_;
    ModuleIR& module_;
    std::unordered_set<std::string> defined_;
};

std::string relative_path(const std::filesystem::path& p, const std::filesystem::path& root) {
    auto abs = std::filesystem::weakly_canonical(p);
    if (!root.empty()) {
        auto rel = abs.lexically_relative(std::filesystem::weakly_canonical(root));
        if (!rel.empty() && *rel.begin() != "..") return rel.generic_string();
    }
    return p.lexically_normal().generic_string();
}

}  // namespace

ModuleIR parse_sources(std::vector<SourceFile> files, const ParseOptions& options) {
    ModuleIR module;
    module.root = options.root;
    std::sort(files.begin(), files.end(), [](const auto& a, const auto& b) { return a.path < b.path; });
    for (std::size_t i = 1; i < files.size(); ++i)
        if (files[i].path == files[i - 1].path) throw IoError("duplicate path " + files[i].path);
    files.erase(std::remove_if(files.begin(), files.end(), [](const SourceFile& f) { return f.text.empty(); }),
                files.end());
    for (auto& f : files) {
        if (has_suffix(f.path, ".h")) f.kind = FileKind::header;
        FileParser(f, options, module).run();
    }
    module.files = std::move(files);
    auto by_pos = [](const auto& a, const auto& b) {
        return std::tie(a.file, a.begin) < std::tie(b.file, b.begin);
    };
    std::stable_sort(module.functions.begin(), module.functions.end(), by_pos);
    std::stable_sort(module.declarations.begin(), module.declarations.end(), by_pos);
    return module;
}

ModuleIR parse_module(const std::vector<std::filesystem::path>& paths, const ParseOptions& options) {
    std::vector<std::filesystem::path> inputs;
    for (const auto& p : paths) {
        std::error_code ec;
        if (std::filesystem::is_directory(p, ec)) {
            for (auto it = std::filesystem::recursive_directory_iterator(p, ec);
                 it != std::filesystem::recursive_directory_iterator(); it.increment(ec)) {
                if (ec) break;
                auto ext = it->path().extension();
                if (it->is_regular_file() && (ext == ".c" || ext == ".h")) inputs.push_back(it->path());
            }
            if (ec) throw IoError("cannot scan " + p.string() + ": " + ec.message());
        } else {
            if (!std::filesystem::exists(p, ec)) throw IoError("no such file: " + p.string());
            inputs.push_back(p);
        }
    }
    std::vector<SourceFile> files;
    for (const auto& p : inputs) {
        SourceFile f;
        f.path = relative_path(p, options.root);
        f.text = fs::read_file(p);
        bool dup = std::any_of(files.begin(), files.end(), [&](const SourceFile& g) { return g.path == f.path; });
        if (!dup) files.push_back(std::move(f));
    }
    bool any_source = std::any_of(files.begin(), files.end(), [](const SourceFile& f) { return has_suffix(f.path, ".c"); });
    if (!any_source) throw IoError("no C source file among the inputs");
    return parse_sources(std::move(files), options);
}

std::string residual_text(const ModuleIR& module, const std::string& path) {
    const SourceFile* f = module.file(path);
    if (!f) return {};
    std::string out;
    std::uint32_t pos = 0;
    for (const auto& fn : module.functions) {
        if (fn.file != path) continue;
        out.append(f->text, pos, fn.begin - pos);
        pos = fn.end;
    }
    out.append(f->text, pos, std::string::npos);
    return out;
}

// ---------------------------------------------------------------------------
// Call graph

namespace {

struct Position {
    std::string file;
    std::uint32_t begin;
    bool operator<(const Position& o) const { return std::tie(file, begin) < std::tie(o.file, o.begin); }
};

}  // namespace

CallGraph build_call_graph(const ModuleIR& module) {
    CallGraph g;
    std::map<std::string, Position> pos;
    for (const auto& f : module.functions) {
        g.nodes.push_back(f.id);
        pos[f.id] = {f.file, f.begin};
    }

    std::unordered_map<std::string, const ModuleDecl*> macros;
    for (const auto& d : module.declarations)
        if (d.kind == DeclKind::macro) macros[d.names.front()] = &d;

    for (const auto& f : module.functions) {
        auto& ext = g.external_calls[f.id];
        for (const auto& callee : f.calls) {
            if (const auto* target = module.resolve_callee(callee, f.file)) {
                g.edges.insert({f.id, target->id});
            } else if (!macros.count(callee)) {
                ext.insert(callee);
            }
        }
        for (const auto& p : f.pointer_calls) ext.insert(p);

        // Calls hidden in macro bodies, followed transitively through macros.
        std::set<std::string> seen;
        std::vector<std::pair<std::string, std::string>> work;  // (root macro, macro)
        for (const auto& name : f.referenced)
            if (macros.count(name)) work.emplace_back(name, name);
        std::set<std::tuple<std::string, std::string>> recorded;
        while (!work.empty()) {
            auto [root, m] = work.back();
            work.pop_back();
            if (!seen.insert(m).second) continue;
            const auto* d = macros.at(m);
            for (const auto& dep : d->deps)
                if (macros.count(dep)) work.emplace_back(root, dep);
            for (const auto& c : d->macro_calls) {
                if (macros.count(c)) continue;
                const auto* target = module.resolve_callee(c, f.file);
                std::string callee = target ? target->id : c;
                if (recorded.insert({root, callee}).second) g.via_macro.push_back({f.id, root, callee});
            }
        }
    }
    for (auto it = g.external_calls.begin(); it != g.external_calls.end();) {
        if (it->second.empty()) it = g.external_calls.erase(it);
        else ++it;
    }

    // Tarjan SCC, iterative.
    std::map<std::string, std::vector<std::string>> succ;
    for (const auto& [a, b] : g.edges) succ[a].push_back(b);
    std::map<std::string, int> index, low;
    std::map<std::string, bool> on_stack;
    std::vector<std::string> stack;
    std::vector<std::vector<std::string>> sccs;
    int counter = 0;
    for (const auto& start : g.nodes) {
        if (index.count(start)) continue;
        std::vector<std::pair<std::string, std::size_t>> call_stack{{start, 0}};
        index[start] = low[start] = counter++;
        stack.push_back(start);
        on_stack[start] = true;
        while (!call_stack.empty()) {
            auto& [v, i] = call_stack.back();
            auto& out = succ[v];
            if (i < out.size()) {
                const auto w = out[i++];
                if (!index.count(w)) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    call_stack.emplace_back(w, 0);
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            if (low[v] == index[v]) {
                std::vector<std::string> comp;
                while (true) {
                    auto w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp.push_back(w);
                    if (w == v) break;
                }
                sccs.push_back(std::move(comp));
            }
            auto finished = v;
            call_stack.pop_back();
            if (!call_stack.empty()) {
                auto& parent = call_stack.back().first;
                low[parent] = std::min(low[parent], low[finished]);
            }
        }
    }

    // Condensation, then Kahn over reversed edges: an SCC is ready once every
    // SCC it calls has been emitted. Ties go to the earliest source position.
    std::map<std::string, std::size_t> comp_of;
    for (std::size_t c = 0; c < sccs.size(); ++c) {
        auto& comp = sccs[c];
        std::sort(comp.begin(), comp.end(), [&](const auto& a, const auto& b) { return pos[a] < pos[b]; });
        for (const auto& v : comp) comp_of[v] = c;
    }
    std::vector<std::set<std::size_t>> callees(sccs.size()), callers(sccs.size());
    for (const auto& [a, b] : g.edges) {
        auto ca = comp_of[a], cb = comp_of[b];
        if (ca == cb) continue;
        callees[ca].insert(cb);
        callers[cb].insert(ca);
    }
    std::vector<std::size_t> pending(sccs.size());
    auto cmp = [&](std::size_t a, std::size_t b) { return pos[sccs[b].front()] < pos[sccs[a].front()]; };
    std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(cmp)> ready(cmp);
    for (std::size_t c = 0; c < sccs.size(); ++c) {
        pending[c] = callees[c].size();
        if (pending[c] == 0) ready.push(c);
    }
    while (!ready.empty()) {
        auto c = ready.top();
        ready.pop();
        g.scc_order.push_back(sccs[c]);
        for (auto p : callers[c])
            if (--pending[p] == 0) ready.push(p);
    }
    return g;
}

std::vector<std::vector<std::string>> leaves_first_schedule(const CallGraph& graph) { return graph.scc_order; }

nlohmann::json call_graph_to_json(const CallGraph& graph) {
    nlohmann::json j;
    j["nodes"] = graph.nodes;
    auto edges = nlohmann::json::array();
    for (const auto& [a, b] : graph.edges) edges.push_back({a, b});
    j["edges"] = edges;
    auto ext = nlohmann::json::object();
    for (const auto& [id, names] : graph.external_calls) ext[id] = std::vector<std::string>(names.begin(), names.end());
    j["external_calls"] = ext;
    auto via = nlohmann::json::array();
    for (const auto& e : graph.via_macro) via.push_back({{"caller", e.caller}, {"macro", e.macro}, {"callee", e.callee}});
    j["via_macro"] = via;
    j["scc_order"] = graph.scc_order;
    return j;
}

CallGraph call_graph_from_json(const nlohmann::json& j) {
    CallGraph g;
    g.nodes = j.at("nodes").get<std::vector<std::string>>();
    for (const auto& e : j.at("edges")) g.edges.insert({e.at(0).get<std::string>(), e.at(1).get<std::string>()});
    for (const auto& [id, names] : j.at("external_calls").items()) {
        auto v = names.get<std::vector<std::string>>();
        g.external_calls[id] = std::set<std::string>(v.begin(), v.end());
    }
    if (j.contains("via_macro"))
        for (const auto& e : j["via_macro"])
            g.via_macro.push_back({e.at("caller"), e.at("macro"), e.at("callee")});
    g.scc_order = j.at("scc_order").get<std::vector<std::vector<std::string>>>();
    return g;
}

}  // namespace migratekit

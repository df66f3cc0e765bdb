#include "migratekit/context_prober.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <functional>
#include <limits>
#include <tuple>

#include "migratekit/errors.hpp"
#include "migratekit/util/text.hpp"

namespace migratekit {

std::string to_string(SymbolKind kind) {
    switch (kind) {
        case SymbolKind::variable: return "variable";
        case SymbolKind::function: return "function";
        case SymbolKind::type: return "type";
        case SymbolKind::macro: return "macro";
        case SymbolKind::field_unknown: return "field_unknown";
    }
    return "variable";
}

SymbolKind symbol_kind_from_string(const std::string& s) {
    if (s == "function") return SymbolKind::function;
    if (s == "type") return SymbolKind::type;
    if (s == "macro") return SymbolKind::macro;
    if (s == "field_unknown") return SymbolKind::field_unknown;
    if (s == "variable") return SymbolKind::variable;
    throw ConfigError("unknown symbol kind `" + s + "`");
}

namespace {

SymbolKind symbol_kind_of(DeclKind k) {
    switch (k) {
        case DeclKind::macro: return SymbolKind::macro;
        case DeclKind::type: return SymbolKind::type;
        case DeclKind::variable: return SymbolKind::variable;
        case DeclKind::function: return SymbolKind::function;
    }
    return SymbolKind::variable;
}

std::string dirname_of(const std::string& path) {
    auto slash = path.rfind('/');
    return slash == std::string::npos ? std::string() : path.substr(0, slash);
}

std::string normalize_path(const std::string& p) {
    std::vector<std::string> parts;
    std::size_t i = 0;
    while (i <= p.size()) {
        auto j = p.find('/', i);
        if (j == std::string::npos) j = p.size();
        std::string part = p.substr(i, j - i);
        if (part == "..") {
            if (!parts.empty() && parts.back() != "..") parts.pop_back();
            else parts.push_back(part);
        } else if (!part.empty() && part != ".") {
            parts.push_back(part);
        }
        i = j + 1;
    }
    return text::join(parts, "/");
}

bool is_all_caps(const std::string& name) {
    bool letter = false;
    for (char c : name) {
        if (std::islower(static_cast<unsigned char>(c))) return false;
        if (std::isupper(static_cast<unsigned char>(c))) letter = true;
    }
    return letter;
}

std::string location(const CodebaseIndex::Entry& e) { return e.file + ":" + std::to_string(e.line); }

}  // namespace

const std::set<std::string>& c_keywords() {
    static const std::set<std::string> kw = {
        "auto",     "break",    "case",     "char",       "const",     "continue",       "default",
        "do",       "double",   "else",     "enum",       "extern",    "float",          "for",
        "goto",     "if",       "inline",   "int",        "long",      "register",       "restrict",
        "return",   "short",    "signed",   "sizeof",     "static",    "struct",         "switch",
        "typedef",  "union",    "unsigned", "void",       "volatile",  "while",          "_Bool",
        "_Complex", "_Alignas", "_Alignof", "_Atomic",    "_Generic",  "_Noreturn",      "_Static_assert",
        "_Thread_local"};
    return kw;
}

const std::set<std::string>& default_builtins() {
    static const std::set<std::string> b = {
        "NULL",     "true",      "false",    "bool",      "size_t",    "ssize_t",  "ptrdiff_t", "int8_t",
        "int16_t",  "int32_t",   "int64_t",  "uint8_t",   "uint16_t",  "uint32_t", "uint64_t",  "intptr_t",
        "uintptr_t", "offsetof", "__func__", "__FILE__",  "__LINE__",  "va_list",  "va_start",  "va_end",
        "va_arg"};
    return b;
}

CodebaseIndex::CodebaseIndex(const ModuleIR& module, std::set<std::string> builtins) : builtins_(std::move(builtins)) {
    for (const auto& d : module.declarations) {
        Entry e;
        e.kind = d.kind;
        e.file = d.file;
        e.line = d.line;
        e.text = d.text;
        e.names = d.names;
        e.deps = d.deps;
        e.is_definition = d.is_definition;
        entries_.push_back(std::move(e));
    }
    for (const auto& f : module.functions) {
        Entry e;
        e.kind = DeclKind::function;
        e.file = f.file;
        e.line = f.start_line;
        e.text = f.signature;
        e.names = {f.name};
        e.deps = f.signature_deps;
        e.is_definition = false;
        e.synthesized = true;
        e.static_function = f.is_static;
        entries_.push_back(std::move(e));
    }
    std::stable_sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
        return std::tie(a.file, a.line) < std::tie(b.file, b.line);
    });
    for (std::size_t i = 0; i < entries_.size(); ++i)
        for (const auto& n : entries_[i].names) by_name_[n].push_back(i);

    for (const auto& f : module.files) {
        for (const auto& inc : f.includes) {
            std::string relative = normalize_path(dirname_of(f.path).empty() ? inc : dirname_of(f.path) + "/" + inc);
            std::string target;
            for (const auto& g : module.files) {
                if (g.path == relative) {
                    target = g.path;
                    break;
                }
            }
            if (target.empty()) {
                for (const auto& g : module.files) {
                    if (g.path == inc || (g.path.size() > inc.size() &&
                                          g.path.compare(g.path.size() - inc.size(), inc.size(), inc) == 0 &&
                                          g.path[g.path.size() - inc.size() - 1] == '/')) {
                        target = g.path;
                        break;
                    }
                }
            }
            if (!target.empty()) include_edges_[f.path].insert(target);
        }
    }
}

std::vector<std::size_t> CodebaseIndex::lookup(const std::string& name) const {
    auto it = by_name_.find(name);
    return it == by_name_.end() ? std::vector<std::size_t>{} : it->second;
}

bool CodebaseIndex::is_macro(const std::string& name) const {
    for (auto i : lookup(name))
        if (entries_[i].kind == DeclKind::macro) return true;
    return false;
}

bool CodebaseIndex::is_builtin(const std::string& name) const {
    return c_keywords().count(name) || default_builtins().count(name) || builtins_.count(name) ||
           name.rfind("__builtin_", 0) == 0;
}

std::optional<int> CodebaseIndex::include_distance(const std::string& from, const std::string& to) const {
    if (from == to) return 0;
    std::map<std::string, int> dist{{from, 0}};
    std::deque<std::string> queue{from};
    while (!queue.empty()) {
        auto cur = queue.front();
        queue.pop_front();
        auto it = include_edges_.find(cur);
        if (it == include_edges_.end()) continue;
        for (const auto& next : it->second) {
            if (dist.count(next)) continue;
            dist[next] = dist[cur] + 1;
            if (next == to) return dist[next];
            queue.push_back(next);
        }
    }
    return std::nullopt;
}

std::vector<SymbolRef> collect_unresolved(const FunctionUnit& core, const CodebaseIndex& index) {
    std::vector<SymbolRef> out;
    for (const auto& name : core.referenced) {
        if (index.is_builtin(name)) continue;
        auto it = core.usage.find(name);
        IdentifierUse use = it == core.usage.end() ? IdentifierUse{} : it->second;
        SymbolRef ref{name, SymbolKind::variable, core.id};
        bool has_non_macro = false;
        for (auto i : index.lookup(name))
            if (index.entry(i).kind != DeclKind::macro) has_non_macro = true;
        if (name.find(' ') != std::string::npos || use.type) {
            ref.kind = SymbolKind::type;
        } else if (use.call) {
            ref.kind = index.is_macro(name) ? SymbolKind::macro : SymbolKind::function;
        } else if (index.is_macro(name) || (is_all_caps(name) && !has_non_macro)) {
            ref.kind = SymbolKind::macro;
        } else {
            ref.kind = SymbolKind::variable;
        }
        out.push_back(std::move(ref));
    }
    return out;
}

namespace {

DeclKind decl_kind_for(SymbolKind k) {
    switch (k) {
        case SymbolKind::function: return DeclKind::function;
        case SymbolKind::type: return DeclKind::type;
        case SymbolKind::macro: return DeclKind::macro;
        default: return DeclKind::variable;
    }
}

/// Lower is better: which of several same-kind entries plays the role the
/// symbol needs.
int role_rank(const CodebaseIndex::Entry& e) {
    switch (e.kind) {
        case DeclKind::function: return e.synthesized ? 1 : 0;  // written prototypes first
        case DeclKind::variable: return e.is_definition ? 0 : 1;
        case DeclKind::type: return e.is_definition ? 0 : 1;
        case DeclKind::macro: return 0;
    }
    return 0;
}

}  // namespace

SearchResult global_search(const SymbolRef& sym, const std::string& core_file, const CodebaseIndex& index) {
    auto all = index.lookup(sym.name);
    std::vector<std::size_t> cands;
    auto wanted = decl_kind_for(sym.kind);
    for (auto i : all)
        if (index.entry(i).kind == wanted) cands.push_back(i);
    if (cands.empty()) cands = all;  // enum constants used as values, functions used as values, ...
    // A static function is only visible from its own file.
    cands.erase(std::remove_if(cands.begin(), cands.end(),
                               [&](std::size_t i) {
                                   const auto& e = index.entry(i);
                                   return e.static_function && e.file != core_file;
                               }),
                cands.end());
    if (cands.empty()) throw SymbolNotFound("no declaration of `" + sym.name + "` in the codebase");

    int best_role = std::numeric_limits<int>::max();
    for (auto i : cands) best_role = std::min(best_role, role_rank(index.entry(i)));
    cands.erase(std::remove_if(cands.begin(), cands.end(),
                               [&](std::size_t i) { return role_rank(index.entry(i)) != best_role; }),
                cands.end());

    auto distance = [&](std::size_t i) {
        auto d = index.include_distance(core_file, index.entry(i).file);
        return d ? *d : std::numeric_limits<int>::max();
    };
    std::stable_sort(cands.begin(), cands.end(), [&](std::size_t a, std::size_t b) {
        const auto& ea = index.entry(a);
        const auto& eb = index.entry(b);
        return std::make_tuple(distance(a), ea.file, ea.line) < std::make_tuple(distance(b), eb.file, eb.line);
    });

    const auto& chosen = index.entry(cands.front());
    SearchResult r;
    r.declaration.symbol = SymbolRef{sym.name, symbol_kind_of(chosen.kind), sym.origin};
    r.declaration.decl_text = chosen.text;
    r.declaration.file = chosen.file;
    r.declaration.line = chosen.line;
    r.declaration.entry = cands.front();
    if (cands.size() > 1) {
        AmbiguityNote note;
        note.name = sym.name;
        note.chosen = location(chosen);
        for (auto i : cands) note.candidates.push_back(location(index.entry(i)));
        r.ambiguity = std::move(note);
    }
    return r;
}

std::vector<Declaration> TranslationUnit::all_declarations() const {
    std::vector<Declaration> out = types_and_macros;
    out.insert(out.end(), external_variables.begin(), external_variables.end());
    out.insert(out.end(), called_functions.begin(), called_functions.end());
    return out;
}

bool TranslationUnit::operator==(const TranslationUnit& o) const {
    return core.id == o.core.id && core.body_text == o.core.body_text && types_and_macros == o.types_and_macros &&
           external_variables == o.external_variables && called_functions == o.called_functions &&
           context_line_count == o.context_line_count;
}

namespace {

/// Orders `decls` by source position, then moves each declaration after
/// the declarations it depends on.
std::vector<Declaration> dependency_order(std::vector<Declaration> decls, const CodebaseIndex& index) {
    std::stable_sort(decls.begin(), decls.end(), [](const Declaration& a, const Declaration& b) {
        return std::tie(a.file, a.line, a.symbol.name) < std::tie(b.file, b.line, b.symbol.name);
    });
    std::map<std::string, std::vector<std::size_t>> by_name;
    for (std::size_t i = 0; i < decls.size(); ++i)
        for (const auto& n : index.entry(decls[i].entry).names) by_name[n].push_back(i);

    std::vector<int> state(decls.size(), 0);  // 0 new, 1 visiting, 2 done
    std::vector<Declaration> out;
    std::function<void(std::size_t)> visit = [&](std::size_t i) {
        if (state[i]) return;
        state[i] = 1;
        for (const auto& dep : index.entry(decls[i].entry).deps) {
            auto it = by_name.find(dep);
            if (it == by_name.end()) continue;
            for (auto j : it->second)
                if (j != i && decls[j].entry != decls[i].entry) visit(j);
        }
        state[i] = 2;
        out.push_back(decls[i]);
    };
    for (std::size_t i = 0; i < decls.size(); ++i) visit(i);
    return out;
}

int count_context_lines(const TranslationUnit& unit, const CodebaseIndex& index) {
    std::set<std::size_t> seen;
    int lines = 0;
    for (const auto& d : unit.all_declarations()) {
        if (!seen.insert(d.entry).second) continue;
        lines += text::count_lines(index.entry(d.entry).text);
    }
    return lines;
}

}  // namespace

TranslationUnit assemble_context(const FunctionUnit& core, const std::vector<Declaration>& decls,
                                 const CodebaseIndex& index, const ContextOptions& options) {
    std::vector<Declaration> pool;
    std::set<std::pair<std::string, SymbolKind>> seen;
    std::set<std::string> names;
    auto add = [&](const Declaration& d) {
        if (!seen.insert({d.symbol.name, d.symbol.kind}).second) return false;
        names.insert(d.symbol.name);
        pool.push_back(d);
        return true;
    };
    for (const auto& d : decls) add(d);

    // Types and macros the chosen declarations mention, transitively.
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const auto& entry = index.entry(pool[i].entry);
        for (const auto& dep : entry.deps) {
            if (names.count(dep) || index.is_builtin(dep)) continue;
            if (std::find(entry.names.begin(), entry.names.end(), dep) != entry.names.end()) continue;
            SymbolKind kind;
            if (index.is_macro(dep)) {
                kind = SymbolKind::macro;
            } else {
                bool has_type = false;
                for (auto j : index.lookup(dep))
                    if (index.entry(j).kind == DeclKind::type) has_type = true;
                if (!has_type) continue;
                kind = SymbolKind::type;
            }
            try {
                auto found = global_search(SymbolRef{dep, kind, core.id}, core.file, index);
                if (found.declaration.symbol.kind == SymbolKind::type || found.declaration.symbol.kind == SymbolKind::macro)
                    add(found.declaration);
            } catch (const SymbolNotFound&) {
            }
        }
    }

    TranslationUnit unit;
    unit.core = core;
    std::vector<Declaration> macros, types;
    for (auto& d : pool) {
        switch (d.symbol.kind) {
            case SymbolKind::macro: macros.push_back(d); break;
            case SymbolKind::type: types.push_back(d); break;
            case SymbolKind::function: unit.called_functions.push_back(d); break;
            default: unit.external_variables.push_back(d); break;
        }
    }
    macros = dependency_order(std::move(macros), index);
    types = dependency_order(std::move(types), index);
    unit.types_and_macros = std::move(macros);
    unit.types_and_macros.insert(unit.types_and_macros.end(), types.begin(), types.end());
    unit.external_variables = dependency_order(std::move(unit.external_variables), index);
    unit.called_functions = dependency_order(std::move(unit.called_functions), index);
    unit.context_line_count = count_context_lines(unit, index);

    auto total = [&] { return unit.context_line_count + core.line_count(); };
    if (total() > options.line_budget) {
        if (options.on_overflow == BudgetPolicy::error)
            throw ContextBudgetExceeded(core.id + ": context of " + std::to_string(unit.context_line_count) +
                                        " lines plus a " + std::to_string(core.line_count()) +
                                        "-line function exceeds the budget of " +
                                        std::to_string(options.line_budget) + " lines");
        while (total() > options.line_budget && !unit.external_variables.empty()) {
            auto dropped = unit.external_variables.back();
            unit.external_variables.pop_back();
            unit.unresolved.push_back(dropped.symbol);
            unit.warnings.push_back("dropped declaration of `" + dropped.symbol.name + "` to fit the line budget");
            unit.context_line_count = count_context_lines(unit, index);
        }
        if (total() > options.line_budget)
            unit.warnings.push_back("context still exceeds the line budget of " +
                                    std::to_string(options.line_budget) + " lines");
    }
    return unit;
}

TranslationUnit probe_context(const FunctionUnit& core, const CodebaseIndex& index, const ContextOptions& options) {
    std::vector<Declaration> found;
    std::vector<SymbolRef> missing;
    std::vector<AmbiguityNote> notes;
    for (const auto& sym : collect_unresolved(core, index)) {
        try {
            auto r = global_search(sym, core.file, index);
            found.push_back(r.declaration);
            if (r.ambiguity) notes.push_back(*r.ambiguity);
        } catch (const SymbolNotFound&) {
            missing.push_back(sym);
        }
    }
    auto unit = assemble_context(core, found, index, options);
    unit.unresolved.insert(unit.unresolved.begin(), missing.begin(), missing.end());
    unit.ambiguities = std::move(notes);
    for (const auto& n : unit.ambiguities)
        unit.warnings.push_back("ambiguous `" + n.name + "`: chose " + n.chosen + " among " +
                                text::join(n.candidates, ", "));
    return unit;
}

namespace {

void render_block(std::string& out, const std::string& title, const std::vector<Declaration>& decls) {
    out += "/* ---- " + title + " ---- */\n";
    std::set<std::size_t> seen;
    bool any = false;
    for (const auto& d : decls) {
        if (!seen.insert(d.entry).second) continue;
        out += d.decl_text;
        out += '\n';
        any = true;
    }
    if (!any) out += "/* (none) */\n";
    out += '\n';
}

}  // namespace

std::string render_context_c(const TranslationUnit& unit) {
    std::string out;
    render_block(out, "types and macros", unit.types_and_macros);
    render_block(out, "external variables", unit.external_variables);
    render_block(out, "called functions", unit.called_functions);
    out += "/* ---- the code to be converted ---- */\n";
    out += unit.core.body_text;
    if (out.back() != '\n') out += '\n';
    return out;
}

namespace {

nlohmann::json to_json(const SymbolRef& s) {
    return {{"name", s.name}, {"kind", to_string(s.kind)}, {"origin", s.origin}};
}

SymbolRef symbol_from_json(const nlohmann::json& j) {
    return {j.at("name").get<std::string>(), symbol_kind_from_string(j.at("kind").get<std::string>()),
            j.value("origin", std::string())};
}

nlohmann::json to_json(const Declaration& d) {
    return {{"symbol", to_json(d.symbol)}, {"decl_text", d.decl_text}, {"file", d.file},
            {"line", d.line},             {"entry", d.entry}};
}

Declaration declaration_from_json(const nlohmann::json& j) {
    return {symbol_from_json(j.at("symbol")), j.at("decl_text").get<std::string>(), j.at("file").get<std::string>(),
            j.at("line").get<int>(), j.at("entry").get<std::size_t>()};
}

nlohmann::json decls_json(const std::vector<Declaration>& v) {
    auto a = nlohmann::json::array();
    for (const auto& d : v) a.push_back(to_json(d));
    return a;
}

std::vector<Declaration> decls_from_json(const nlohmann::json& j) {
    std::vector<Declaration> v;
    for (const auto& d : j) v.push_back(declaration_from_json(d));
    return v;
}

}  // namespace

nlohmann::json unresolved_report(const TranslationUnit& unit) {
    auto resolved = nlohmann::json::array();
    for (const auto& d : unit.all_declarations())
        resolved.push_back({{"name", d.symbol.name}, {"kind", to_string(d.symbol.kind)},
                            {"at", d.file + ":" + std::to_string(d.line)}});
    auto unresolved = nlohmann::json::array();
    for (const auto& s : unit.unresolved) unresolved.push_back(to_json(s));
    auto amb = nlohmann::json::array();
    for (const auto& a : unit.ambiguities)
        amb.push_back({{"name", a.name}, {"chosen", a.chosen}, {"candidates", a.candidates}});
    return {{"function", unit.core.id},
            {"resolved", resolved},
            {"unresolved", unresolved},
            {"ambiguities", amb},
            {"warnings", unit.warnings},
            {"context_lines", unit.context_line_count}};
}

nlohmann::json to_json(const FunctionUnit& fu) {
    nlohmann::json usage = nlohmann::json::object();
    for (const auto& [name, u] : fu.usage) usage[name] = {{"call", u.call}, {"type", u.type}, {"value", u.value}};
    return {{"id", fu.id},
            {"file", fu.file},
            {"name", fu.name},
            {"start_line", fu.start_line},
            {"end_line", fu.end_line},
            {"begin", fu.begin},
            {"end", fu.end},
            {"body_text", fu.body_text},
            {"signature", fu.signature},
            {"is_static", fu.is_static},
            {"locals", fu.locals},
            {"referenced", fu.referenced},
            {"usage", usage},
            {"calls", fu.calls},
            {"pointer_calls", fu.pointer_calls},
            {"signature_deps", fu.signature_deps},
            {"statement_count", fu.statement_count}};
}

FunctionUnit function_unit_from_json(const nlohmann::json& j) {
    FunctionUnit fu;
    fu.id = j.at("id").get<std::string>();
    fu.file = j.at("file").get<std::string>();
    fu.name = j.at("name").get<std::string>();
    fu.start_line = j.at("start_line").get<int>();
    fu.end_line = j.at("end_line").get<int>();
    fu.begin = j.at("begin").get<std::uint32_t>();
    fu.end = j.at("end").get<std::uint32_t>();
    fu.body_text = j.at("body_text").get<std::string>();
    fu.signature = j.at("signature").get<std::string>();
    fu.is_static = j.at("is_static").get<bool>();
    fu.locals = j.at("locals").get<std::set<std::string>>();
    fu.referenced = j.at("referenced").get<std::set<std::string>>();
    for (const auto& [name, u] : j.at("usage").items())
        fu.usage[name] = IdentifierUse{u.at("call").get<bool>(), u.at("type").get<bool>(), u.at("value").get<bool>()};
    fu.calls = j.at("calls").get<std::vector<std::string>>();
    fu.pointer_calls = j.at("pointer_calls").get<std::vector<std::string>>();
    fu.signature_deps = j.value("signature_deps", std::vector<std::string>{});
    fu.statement_count = j.at("statement_count").get<int>();
    return fu;
}

nlohmann::json to_json(const TranslationUnit& unit) {
    auto unresolved = nlohmann::json::array();
    for (const auto& s : unit.unresolved) unresolved.push_back(to_json(s));
    auto amb = nlohmann::json::array();
    for (const auto& a : unit.ambiguities)
        amb.push_back({{"name", a.name}, {"chosen", a.chosen}, {"candidates", a.candidates}});
    return {{"core", to_json(unit.core)},
            {"types_and_macros", decls_json(unit.types_and_macros)},
            {"external_variables", decls_json(unit.external_variables)},
            {"called_functions", decls_json(unit.called_functions)},
            {"unresolved", unresolved},
            {"ambiguities", amb},
            {"warnings", unit.warnings},
            {"context_line_count", unit.context_line_count}};
}

TranslationUnit translation_unit_from_json(const nlohmann::json& j) {
    TranslationUnit unit;
    unit.core = function_unit_from_json(j.at("core"));
    unit.types_and_macros = decls_from_json(j.at("types_and_macros"));
    unit.external_variables = decls_from_json(j.at("external_variables"));
    unit.called_functions = decls_from_json(j.at("called_functions"));
    for (const auto& s : j.at("unresolved")) unit.unresolved.push_back(symbol_from_json(s));
    for (const auto& a : j.at("ambiguities"))
        unit.ambiguities.push_back({a.at("name").get<std::string>(), a.at("chosen").get<std::string>(),
                                    a.at("candidates").get<std::vector<std::string>>()});
    unit.warnings = j.at("warnings").get<std::vector<std::string>>();
    unit.context_line_count = j.at("context_line_count").get<int>();
    return unit;
}

}  // namespace migratekit

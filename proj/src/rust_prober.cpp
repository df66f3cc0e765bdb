#include "migratekit/rust_prober.hpp"

#include <algorithm>
#include <filesystem>
#include <regex>

#include "migratekit/errors.hpp"
#include "migratekit/rust_items.hpp"
#include "migratekit/util/fs.hpp"
#include "migratekit/util/process.hpp"
#include "migratekit/util/text.hpp"

namespace migratekit {

const std::set<std::string>& resolution_codes() {
    static const std::set<std::string> codes = {"E0425", "E0412", "E0433", "E0609", "E0573", "E0574", "E0689"};
    return codes;
}

bool is_resolution_code(const std::string& code) { return resolution_codes().count(code) > 0; }

namespace {

// Codes that mean "this name is not defined anywhere in scope"; only these
// trigger a catalog or callee lookup. The rest of the resolution class names
// a misused symbol that appending items cannot fix.
bool is_missing_symbol_code(const std::string& code) {
    return code == "E0425" || code == "E0412" || code == "E0433";
}

std::string namespace_hint(const std::string& message) {
    if (message.rfind("cannot find type", 0) == 0 || message.find("undeclared type") != std::string::npos)
        return "type";
    if (message.rfind("cannot find function", 0) == 0) return "function";
    if (message.rfind("cannot find value", 0) == 0) return "value";
    return {};
}

}  // namespace

std::optional<Diagnostic> parse_rustc_diagnostic(const std::string& line) {
    if (text::trim(line).empty() || line.front() != '{') return std::nullopt;
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception&) {
        return std::nullopt;
    }
    if (!j.contains("level") || j["level"] != "error") return std::nullopt;
    Diagnostic d;
    d.level = "error";
    d.message = j.value("message", "");
    if (d.message.rfind("aborting due to", 0) == 0) return std::nullopt;
    if (j.contains("code") && j["code"].is_object()) d.code = j["code"].value("code", "");
    d.rendered = j.contains("rendered") && j["rendered"].is_string() ? j["rendered"].get<std::string>() : "";
    for (const auto& s : j.value("spans", nlohmann::json::array())) {
        if (!s.value("is_primary", false)) continue;
        d.span.line_start = s.value("line_start", 0);
        d.span.column_start = s.value("column_start", 0);
        d.span.line_end = s.value("line_end", 0);
        d.span.column_end = s.value("column_end", 0);
        for (const auto& t : s.value("text", nlohmann::json::array())) {
            auto src = t.value("text", "");
            int a = t.value("highlight_start", 1) - 1, b = t.value("highlight_end", 1) - 1;
            if (a >= 0 && b >= a && static_cast<std::size_t>(b) <= src.size()) d.span.text += src.substr(a, b - a);
        }
        break;
    }
    if (is_resolution_code(d.code)) {
        static const std::regex backticked("`([^`]+)`");
        std::smatch m;
        if (std::regex_search(d.message, m, backticked)) d.primary_symbol = m[1];
        else d.primary_symbol = d.span.text;
        // Paths such as `mem::zeroed` resolve through their first segment.
        if (d.code == "E0433") {
            auto sep = d.primary_symbol.find("::");
            if (sep != std::string::npos) d.primary_symbol = d.primary_symbol.substr(0, sep);
        }
        d.namespace_hint = namespace_hint(d.message);
    }
    return d;
}

std::vector<Diagnostic> compile_check(const std::vector<std::string>& items, const ScaffoldConfig& scaffold,
                                      const std::string& crate_id) {
    auto rustc = find_executable(scaffold.rustc);
    if (!rustc) throw ToolchainMissing("Rust compiler `" + scaffold.rustc + "` not found");
    for (std::size_t i = 0; i < items.size(); ++i) {
        auto issues = rust::check_syntax(items[i]);
        if (!issues.empty())
            throw ScaffoldError("item " + std::to_string(i + 1) + " of `" + crate_id + "` does not parse: " +
                                issues.front().message);
    }
    auto root = scaffold.scratch_root.empty() ? std::filesystem::temp_directory_path() / "migratekit-scratch"
                                              : scaffold.scratch_root;
    auto dir = root / text::file_stem_for_id(crate_id);
    std::string lib;
    if (scaffold.no_std) lib += "#![no_std]\n";
    if (!scaffold.prelude.empty()) lib += scaffold.prelude + "\n";
    for (const auto& item : items) lib += "\n" + item + "\n";
    try {
        std::filesystem::remove_all(dir);
        std::filesystem::create_directories(dir / "src");
        std::filesystem::create_directories(dir / "target");
        fs::write_file_atomic(dir / "Cargo.toml", "[package]\nname = \"scratch\"\nversion = \"0.0.0\"\nedition = \"" +
                                                      scaffold.edition + "\"\n\n[lib]\npath = \"src/lib.rs\"\n");
        fs::write_file_atomic(dir / "src" / "lib.rs", lib);
    } catch (const std::exception& e) {
        throw ScaffoldError("cannot write scratch crate for `" + crate_id + "`: " + e.what());
    }
    auto result = run_process({rustc->string(), "--crate-type=lib", "--crate-name=scratch", "--edition=" + scaffold.edition,
                               "--error-format=json", "--emit=metadata", "-o", "target/libscratch.rmeta", "src/lib.rs"},
                              dir);
    std::vector<Diagnostic> out;
    for (const auto& line : text::split_lines(result.err))
        if (auto d = parse_rustc_diagnostic(std::string(line))) out.push_back(std::move(*d));
    if (result.exit_code != 0 && out.empty()) {
        Diagnostic d;
        d.level = "error";
        d.message = "rustc exited with status " + std::to_string(result.exit_code);
        d.rendered = result.err;
        out.push_back(std::move(d));
    }
    return out;
}

std::string to_string(ProbeStatus s) {
    switch (s) {
        case ProbeStatus::compiles: return "compiles";
        case ProbeStatus::unresolved_remaining: return "unresolved-remaining";
        case ProbeStatus::compile_error: return "compile-error";
    }
    return "compile-error";
}

ProbeStatus probe_status_from_string(const std::string& s) {
    if (s == "compiles") return ProbeStatus::compiles;
    if (s == "unresolved-remaining") return ProbeStatus::unresolved_remaining;
    if (s == "compile-error") return ProbeStatus::compile_error;
    throw ConfigError("unknown probe status `" + s + "`");
}

const UnitItem& ResolvedUnit::core() const {
    for (const auto& i : items)
        if (i.origin == ItemOrigin::core) return i;
    throw ConfigError("unit `" + core_id + "` has no core item");
}

UnitItem& ResolvedUnit::core() { return const_cast<UnitItem&>(std::as_const(*this).core()); }

std::vector<std::string> ResolvedUnit::texts() const {
    std::vector<std::string> out;
    for (const auto& i : items) out.push_back(i.text);
    return out;
}

std::string ResolvedUnit::render() const {
    std::string out;
    for (const auto& i : items) {
        if (!out.empty()) out += "\n";
        out += i.text + "\n";
    }
    return out;
}

std::optional<Definition> lookup_definition(const std::string& name, const ContextCatalog& catalog,
                                            const CalleeMap& callees, const std::string& hint) {
    if (auto it = callees.find(name); it != callees.end())
        return Definition{it->second.text, ItemOrigin::callee, it->second.provenance, it->second.lazy};
    auto found = catalog.lookup(name);
    if (found.empty()) return std::nullopt;
    auto rank = [&](CatalogKind k) {
        if (hint == "type") return k == CatalogKind::type ? 0 : 1;
        if (hint == "function") return k == CatalogKind::extern_fn ? 0 : k == CatalogKind::type ? 2 : 1;
        if (hint == "value") return k == CatalogKind::type ? 1 : 0;
        return 0;
    };
    // lookup() is already in default priority order; the sort is stable.
    std::stable_sort(found.begin(), found.end(), [&](auto* a, auto* b) { return rank(a->kind) < rank(b->kind); });
    Provenance p = found.front()->provenance == Provenance::generated ? Provenance::catalog : found.front()->provenance;
    return Definition{found.front()->rust_text, ItemOrigin::catalog, p, false};
}

ResolvedUnit probe_item(const std::string& core_id, const std::string& core_name, const std::string& core_text,
                        Provenance core_provenance, const ContextCatalog& catalog, const CalleeMap& callees,
                        const ProbeOptions& options, const std::vector<UnitItem>& initial_context) {
    if (options.max_iters < 1) throw ConfigError("probe max_iters must be at least 1");
    ResolvedUnit unit;
    unit.core_id = core_id;
    unit.core_name = core_name;
    UnitItem core{core_name, core_text, ItemOrigin::core, core_provenance};
    std::vector<UnitItem> context = initial_context;
    std::set<std::string> present{core_name};
    for (const auto& i : context) present.insert(i.name);
    std::string crate = core_id;

    for (int iter = 1; iter <= options.max_iters; ++iter) {
        unit.items = context;
        unit.items.push_back(core);
        unit.iterations_used = iter;
        unit.diagnostics = compile_check(unit.texts(), options.scaffold, crate);
        unit.unresolved.clear();
        if (unit.diagnostics.empty()) {
            unit.status = ProbeStatus::compiles;
            return unit;
        }
        bool added = false;
        for (const auto& d : unit.diagnostics) {
            if (!is_missing_symbol_code(d.code) || d.primary_symbol.empty()) continue;
            const auto& name = d.primary_symbol;
            if (present.count(name)) continue;
            auto def = lookup_definition(name, catalog, callees, d.namespace_hint);
            if (!def) {
                if (std::find(unit.unresolved.begin(), unit.unresolved.end(), name) == unit.unresolved.end())
                    unit.unresolved.push_back(name);
                continue;
            }
            present.insert(name);
            // An extern block or enum alias may bring several names at once.
            try {
                for (const auto& item : rust::parse_items(def->text))
                    for (const auto& n : item.names) present.insert(n);
            } catch (const ParseFailed&) {
            }
            if (def->lazy) unit.lazy_callees.push_back(name);
            context.push_back({name, def->text, def->origin, def->provenance});
            added = true;
        }
        if (!added) break;
    }
    if (!unit.diagnostics.empty()) {
        // Items appended on the last allowed iteration were never compiled;
        // report the state that was actually checked.
        unit.status = unit.unresolved.empty() ? ProbeStatus::compile_error : ProbeStatus::unresolved_remaining;
    }
    return unit;
}

ResolvedUnit probe(const TranslatedFunction& core, const ContextCatalog& catalog, const CalleeMap& callees,
                   const ProbeOptions& options) {
    if (core.status == TranslationStatus::syntax_failed)
        throw ConfigError("`" + core.core_id + "` has no syntactically valid translation to probe");
    return probe_item(core.core_id, core.core_name, core.rust_text, Provenance::translated, catalog, callees, options);
}

nlohmann::json to_json(const Diagnostic& d) {
    return {{"code", d.code},
            {"level", d.level},
            {"message", d.message},
            {"rendered", d.rendered},
            {"primary_symbol", d.primary_symbol},
            {"namespace_hint", d.namespace_hint},
            {"span",
             {{"line_start", d.span.line_start},
              {"column_start", d.span.column_start},
              {"line_end", d.span.line_end},
              {"column_end", d.span.column_end},
              {"text", d.span.text}}}};
}

Diagnostic diagnostic_from_json(const nlohmann::json& j) {
    Diagnostic d;
    d.code = j.at("code").get<std::string>();
    d.level = j.at("level").get<std::string>();
    d.message = j.at("message").get<std::string>();
    d.rendered = j.at("rendered").get<std::string>();
    d.primary_symbol = j.at("primary_symbol").get<std::string>();
    d.namespace_hint = j.value("namespace_hint", "");
    const auto& s = j.at("span");
    d.span = {s.at("line_start").get<int>(), s.at("column_start").get<int>(), s.at("line_end").get<int>(),
              s.at("column_end").get<int>(), s.at("text").get<std::string>()};
    return d;
}

namespace {

std::string origin_string(ItemOrigin o) {
    switch (o) {
        case ItemOrigin::core: return "core";
        case ItemOrigin::callee: return "callee";
        case ItemOrigin::catalog: return "catalog";
    }
    return "catalog";
}

ItemOrigin origin_from_string(const std::string& s) {
    if (s == "core") return ItemOrigin::core;
    if (s == "callee") return ItemOrigin::callee;
    if (s == "catalog") return ItemOrigin::catalog;
    throw ConfigError("unknown item origin `" + s + "`");
}

}  // namespace

nlohmann::json to_json(const ResolvedUnit& u) {
    auto items = nlohmann::json::array();
    for (const auto& i : u.items)
        items.push_back({{"name", i.name},
                         {"text", i.text},
                         {"origin", origin_string(i.origin)},
                         {"provenance", to_string(i.provenance)}});
    auto diags = nlohmann::json::array();
    for (const auto& d : u.diagnostics) diags.push_back(to_json(d));
    return {{"core_id", u.core_id},
            {"core_name", u.core_name},
            {"items", items},
            {"diagnostics", diags},
            {"iterations_used", u.iterations_used},
            {"status", to_string(u.status)},
            {"unresolved", u.unresolved},
            {"lazy_callees", u.lazy_callees}};
}

ResolvedUnit resolved_unit_from_json(const nlohmann::json& j) {
    ResolvedUnit u;
    u.core_id = j.at("core_id").get<std::string>();
    u.core_name = j.at("core_name").get<std::string>();
    for (const auto& i : j.at("items"))
        u.items.push_back({i.at("name").get<std::string>(), i.at("text").get<std::string>(),
                           origin_from_string(i.at("origin").get<std::string>()),
                           provenance_from_string(i.at("provenance").get<std::string>())});
    for (const auto& d : j.at("diagnostics")) u.diagnostics.push_back(diagnostic_from_json(d));
    u.iterations_used = j.at("iterations_used").get<int>();
    u.status = probe_status_from_string(j.at("status").get<std::string>());
    u.unresolved = j.at("unresolved").get<std::vector<std::string>>();
    u.lazy_callees = j.at("lazy_callees").get<std::vector<std::string>>();
    return u;
}

}  // namespace migratekit

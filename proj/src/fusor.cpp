#include "migratekit/fusor.hpp"

#include <algorithm>

#include "migratekit/errors.hpp"
#include "migratekit/rust_items.hpp"
#include "migratekit/util/text.hpp"

namespace migratekit {

namespace {

bool is_extern_decl_of(const ModuleItem& item, const std::string& fn_name) {
    if (item.function) return false;
    try {
        auto parsed = rust::parse_items(item.text);
        return parsed.size() == 1 && parsed[0].kind == rust::ItemKind::extern_block &&
               parsed[0].names == std::vector<std::string>{fn_name};
    } catch (const ParseFailed&) {
        return false;
    }
}

bool is_context_provenance(Provenance p) { return p == Provenance::catalog || p == Provenance::generated; }

std::vector<ModuleItem> module_items(const ResolvedUnit& u) {
    std::vector<ModuleItem> out;
    for (const auto& i : u.items) {
        bool fn = i.origin != ItemOrigin::catalog;
        out.push_back({i.name, i.text, i.provenance, fn, i.origin == ItemOrigin::core ? u.core_id : std::string()});
    }
    return out;
}

struct Accumulator {
    std::vector<ModuleItem> context;
    std::vector<ModuleItem> functions;

    ModuleItem* find(std::vector<ModuleItem>& v, const std::string& name) {
        auto it = std::find_if(v.begin(), v.end(), [&](auto& m) { return m.name == name; });
        return it == v.end() ? nullptr : &*it;
    }

    /// Returns the conflicts met; with `raise` the first one is thrown instead.
    std::vector<Conflict> merge(const std::vector<ModuleItem>& incoming, bool raise) {
        std::vector<Conflict> conflicts;
        for (const auto& item : incoming) {
            if (!item.function) {
                if (find(functions, item.name) && is_extern_decl_of(item, item.name)) continue;
                if (auto* have = find(context, item.name)) {
                    if (!is_context_provenance(have->provenance) && is_context_provenance(item.provenance)) *have = item;
                    continue;
                }
                context.push_back(item);
                continue;
            }
            std::erase_if(context, [&](const ModuleItem& c) { return is_extern_decl_of(c, item.name); });
            auto* have = find(functions, item.name);
            if (!have) {
                functions.push_back(item);
                continue;
            }
            if (!have->owner.empty() && !item.owner.empty()) {
                if (text::normalize_ws(have->text) == text::normalize_ws(item.text)) continue;
                if (raise) throw ConflictingDefinition(item.name, have->text, item.text);
                conflicts.push_back({item.name, have->owner, have->text, item.owner, item.text});
                continue;
            }
            if (have->owner.empty() && !item.owner.empty()) *have = item;
        }
        return conflicts;
    }

    std::vector<ModuleItem> items() const {
        auto out = context;
        out.insert(out.end(), functions.begin(), functions.end());
        return out;
    }
};

bool has_core(const ResolvedUnit& u) {
    return std::any_of(u.items.begin(), u.items.end(), [](auto& i) { return i.origin == ItemOrigin::core; });
}

}  // namespace

std::map<std::string, Provenance> RustModule::provenance() const {
    std::map<std::string, Provenance> out;
    for (const auto& i : items) out[i.name] = i.provenance;
    return out;
}

std::vector<std::string> RustModule::names() const {
    std::vector<std::string> out;
    for (const auto& i : items) out.push_back(i.name);
    return out;
}

std::vector<std::string> RustModule::texts() const {
    std::vector<std::string> out;
    for (const auto& i : items) out.push_back(i.text);
    return out;
}

std::string RustModule::render() const {
    std::string out;
    for (const auto& i : items) {
        if (!out.empty()) out += "\n";
        out += i.text;
        out += "\n";
    }
    return out;
}

ResolvedUnit fuse_step(const ResolvedUnit& parent, const ResolvedUnit& child) {
    Accumulator acc;
    acc.merge(module_items(child), true);
    acc.merge(module_items(parent), true);
    ResolvedUnit out;
    out.core_id = parent.core_id;
    out.core_name = parent.core_name;
    for (const auto& m : acc.items()) {
        ItemOrigin origin = !m.function ? ItemOrigin::catalog
                            : m.owner == parent.core_id ? ItemOrigin::core
                                                        : ItemOrigin::callee;
        out.items.push_back({m.name, m.text, origin, m.provenance});
    }
    out.status = ProbeStatus::compile_error;  // not checked here
    for (const auto* u : {&child, &parent})
        for (const auto& n : u->unresolved)
            if (std::find(out.unresolved.begin(), out.unresolved.end(), n) == out.unresolved.end())
                out.unresolved.push_back(n);
    return out;
}

void recheck(RustModule& module, const ScaffoldConfig& scaffold, const std::string& crate_id) {
    module.diagnostics = compile_check(module.texts(), scaffold, crate_id);
    module.compiles = module.diagnostics.empty();
}

RustModule fuse_module(const std::vector<std::vector<std::string>>& schedule,
                       const std::map<std::string, ResolvedUnit>& units, const FuseOptions& options) {
    RustModule module;
    Accumulator acc;
    int index = 0;
    for (const auto& group : schedule) {
        for (const auto& id : group) {
            auto it = units.find(id);
            if (it == units.end()) throw ConfigError("no resolved unit for scheduled function `" + id + "`");
            const ResolvedUnit& unit = it->second;
            FusionStep step;
            step.index = index;
            step.kind = index == 0 ? "seed" : "merge";
            step.unit_id = id;
            ++index;

            if (!has_core(unit)) {
                step.note = "unit " + id + " has no usable core; left for review";
                module.residue.push_back({id, unit.core_name, "no usable translation"});
            } else {
                auto conflicts = acc.merge(module_items(unit), options.raise_conflicts);
                for (auto& c : conflicts) {
                    step.note += (step.note.empty() ? "" : "; ") + std::string("conflicting definition of `") + c.name +
                                 "` kept from " + c.kept_unit;
                    module.residue.push_back({id, c.name, "conflicting definition"});
                    module.conflicts.push_back(std::move(c));
                }
                if (unit.status != ProbeStatus::compiles) {
                    step.note += (step.note.empty() ? "" : "; ") + std::string("unit ") + id + " is " +
                                 to_string(unit.status) + "; core carried verbatim";
                    module.residue.push_back({id, unit.core_name, to_string(unit.status)});
                }
            }
            if (options.compile_each_step) {
                step.checked = true;
                step.diagnostics = compile_check(
                    [&] {
                        std::vector<std::string> t;
                        for (const auto& m : acc.items()) t.push_back(m.text);
                        return t;
                    }(),
                    options.scaffold, options.crate_prefix + "-" + std::to_string(step.index));
                step.compiled = step.diagnostics.empty();
            }
            module.fusion_log.push_back(std::move(step));
        }
    }
    if (index == 0) throw EmptyInput("fusion schedule is empty");
    module.items = acc.items();
    if (options.compile_each_step) {
        module.compiles = module.fusion_log.back().compiled;
        module.diagnostics = module.fusion_log.back().diagnostics;
    } else {
        recheck(module, options.scaffold, options.crate_prefix + "-final");
    }
    return module;
}

namespace {

nlohmann::json diags_json(const std::vector<Diagnostic>& ds) {
    auto out = nlohmann::json::array();
    for (const auto& d : ds) out.push_back(to_json(d));
    return out;
}

std::vector<Diagnostic> diags_from(const nlohmann::json& j) {
    std::vector<Diagnostic> out;
    for (const auto& d : j) out.push_back(diagnostic_from_json(d));
    return out;
}

}  // namespace

nlohmann::json fusion_log_json(const RustModule& m) {
    auto log = nlohmann::json::array();
    for (const auto& s : m.fusion_log)
        log.push_back({{"index", s.index},
                       {"kind", s.kind},
                       {"unit_id", s.unit_id},
                       {"checked", s.checked},
                       {"compiled", s.compiled},
                       {"diagnostics", diags_json(s.diagnostics)},
                       {"note", s.note}});
    return log;
}

nlohmann::json conflicts_json(const RustModule& m) {
    auto out = nlohmann::json::array();
    for (const auto& c : m.conflicts)
        out.push_back({{"name", c.name},
                       {"kept_unit", c.kept_unit},
                       {"kept_text", c.kept_text},
                       {"other_unit", c.other_unit},
                       {"other_text", c.other_text}});
    return out;
}

nlohmann::json to_json(const RustModule& m) {
    auto items = nlohmann::json::array();
    for (const auto& i : m.items)
        items.push_back({{"name", i.name},
                         {"text", i.text},
                         {"provenance", to_string(i.provenance)},
                         {"function", i.function},
                         {"owner", i.owner}});
    auto residue = nlohmann::json::array();
    for (const auto& r : m.residue) residue.push_back({{"unit_id", r.unit_id}, {"name", r.name}, {"reason", r.reason}});
    return {{"items", items},
            {"fusion_log", fusion_log_json(m)},
            {"conflicts", conflicts_json(m)},
            {"residue", residue},
            {"compiles", m.compiles},
            {"diagnostics", diags_json(m.diagnostics)}};
}

RustModule rust_module_from_json(const nlohmann::json& j) {
    RustModule m;
    for (const auto& i : j.at("items"))
        m.items.push_back({i.at("name").get<std::string>(), i.at("text").get<std::string>(),
                           provenance_from_string(i.at("provenance").get<std::string>()), i.at("function").get<bool>(),
                           i.at("owner").get<std::string>()});
    for (const auto& s : j.at("fusion_log"))
        m.fusion_log.push_back({s.at("index").get<int>(), s.at("kind").get<std::string>(),
                                s.at("unit_id").get<std::string>(), s.at("checked").get<bool>(),
                                s.at("compiled").get<bool>(), diags_from(s.at("diagnostics")),
                                s.at("note").get<std::string>()});
    for (const auto& c : j.at("conflicts"))
        m.conflicts.push_back({c.at("name").get<std::string>(), c.at("kept_unit").get<std::string>(),
                               c.at("kept_text").get<std::string>(), c.at("other_unit").get<std::string>(),
                               c.at("other_text").get<std::string>()});
    for (const auto& r : j.at("residue"))
        m.residue.push_back(
            {r.at("unit_id").get<std::string>(), r.at("name").get<std::string>(), r.at("reason").get<std::string>()});
    m.compiles = j.at("compiles").get<bool>();
    m.diagnostics = diags_from(j.at("diagnostics"));
    return m;
}

}  // namespace migratekit

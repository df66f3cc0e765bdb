#include "migratekit/repairer.hpp"

#include <algorithm>

#include "migratekit/errors.hpp"
#include "migratekit/rust_items.hpp"
#include "migratekit/util/fs.hpp"
#include "migratekit/util/text.hpp"

namespace migratekit {

std::string to_string(AttemptOutcome o) {
    switch (o) {
        case AttemptOutcome::compiles: return "compiles";
        case AttemptOutcome::still_failing: return "still-failing";
        case AttemptOutcome::rejected_noncore_edit: return "rejected-noncore-edit";
    }
    return "still-failing";
}

namespace {

AttemptOutcome attempt_outcome_from_string(const std::string& s) {
    if (s == "compiles") return AttemptOutcome::compiles;
    if (s == "still-failing") return AttemptOutcome::still_failing;
    if (s == "rejected-noncore-edit") return AttemptOutcome::rejected_noncore_edit;
    throw ConfigError("unknown attempt outcome `" + s + "`");
}

Diagnostic synthetic(const std::string& message) {
    Diagnostic d;
    d.level = "error";
    d.message = message;
    d.rendered = "error: " + message + "\n";
    return d;
}

}  // namespace

std::string to_string(RepairStatus s) {
    switch (s) {
        case RepairStatus::repaired: return "repaired";
        case RepairStatus::fallback_applied: return "fallback-applied";
        case RepairStatus::manual_required: return "manual-required";
    }
    return "manual-required";
}

RepairStatus repair_status_from_string(const std::string& s) {
    if (s == "repaired") return RepairStatus::repaired;
    if (s == "fallback-applied") return RepairStatus::fallback_applied;
    if (s == "manual-required") return RepairStatus::manual_required;
    throw ConfigError("unknown repair status `" + s + "`");
}

std::optional<int> RepairOutcome::compiled_round() const {
    if (final_status != RepairStatus::repaired) return std::nullopt;
    for (const auto& a : attempts)
        if (a.outcome == AttemptOutcome::compiles) return a.round;
    return 0;
}

FallbackStore load_fallback_store(const std::filesystem::path& path) {
    try {
        return nlohmann::json::parse(fs::read_file(path)).get<FallbackStore>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("fallback store " + path.string() + ": " + e.what());
    }
}

void save_fallback_store(const FallbackStore& store, const std::filesystem::path& path) {
    fs::write_file_atomic(path, nlohmann::json(store).dump(2) + "\n");
}

std::string render_repair_prompt(const ResolvedUnit& unit, const std::vector<Diagnostic>& diagnostics,
                                 const std::vector<std::string>& project_rules, int max_diagnostics) {
    const std::string& name = unit.core_name;
    std::string out;
    out += "You are repairing a Rust function produced while migrating C code to Rust.\n\n";
    out += "## Problematic code\n\n```rust\n" + unit.render() + "```\n\n";
    out += "## Compiler errors\n\n```text\n";
    int shown = 0;
    for (const auto& d : diagnostics) {
        if (shown == max_diagnostics) break;
        std::string msg = d.rendered.empty() ? "error: " + d.message + "\n" : d.rendered;
        out += msg;
        if (out.back() != '\n') out += '\n';
        ++shown;
    }
    out += "```\n";
    if (static_cast<int>(diagnostics.size()) > shown)
        out += "(" + std::to_string(diagnostics.size() - shown) + " further errors not shown)\n";
    out += "\n## Repair guidelines\n\n";
    out += "- Change only the function `" + name + "`. Every other item above is fixed and must not be edited.\n";
    out += "- Do not add items; all other definitions already exist under their current names.\n";
    out += "- Keep the function name `" + name + "` and translate every statement; never leave placeholders.\n";
    out += "- Answer with one ```rust fenced block holding only the repaired function.\n\n";
    out += "## Project requirements\n\n";
    if (project_rules.empty()) out += "- (none)\n";
    for (const auto& r : project_rules) out += "- " + r + "\n";
    return out;
}

UnitItem apply_fallback(const std::string& core_id, const std::string& core_name, const FallbackStore& store) {
    auto it = store.find(core_id);
    if (it == store.end()) throw FallbackMissing("no fallback translation for `" + core_id + "`");
    std::string text = text::extract_code_block(it->second);
    std::vector<rust::Item> fns;
    try {
        for (auto& i : rust::parse_items(text))
            if (i.kind == rust::ItemKind::function) fns.push_back(std::move(i));
    } catch (const ParseFailed& e) {
        throw FallbackMissing("fallback for `" + core_id + "` does not parse: " + e.what());
    }
    if (fns.empty()) throw FallbackMissing("fallback for `" + core_id + "` holds no function");
    auto chosen = std::find_if(fns.begin(), fns.end(), [&](auto& f) { return f.name == core_name; });
    std::string item = chosen != fns.end() ? chosen->text : rust::rename_function(fns.front().text, core_name);
    return {core_name, rust::make_unsafe_fn(item), ItemOrigin::core, Provenance::fallback};
}

namespace {

std::vector<UnitItem> context_of(const ResolvedUnit& u) {
    std::vector<UnitItem> out;
    for (const auto& i : u.items)
        if (i.origin != ItemOrigin::core) out.push_back(i);
    return out;
}

void finish_with_fallback(RepairOutcome& out, const std::string& core_name, const ContextCatalog& catalog,
                          const CalleeMap& callees, const FallbackStore& store, const RepairOptions& options,
                          const std::vector<UnitItem>& context) {
    try {
        auto item = apply_fallback(out.core_id, core_name, store);
        out.final_unit = probe_item(out.core_id, core_name, item.text, Provenance::fallback, catalog, callees,
                                    options.probe, context);
        out.final_status = RepairStatus::fallback_applied;
    } catch (const FallbackMissing& e) {
        out.final_status = RepairStatus::manual_required;
        out.note += (out.note.empty() ? "" : "; ") + std::string(e.what());
    }
}

}  // namespace

RepairOutcome repair(const ResolvedUnit& unit, Backend& backend, const ContextCatalog& catalog,
                     const CalleeMap& callees, const FallbackStore& store, const RepairOptions& options,
                     const std::string& c_source) {
    if (options.cap < 1) throw ConfigError("repair cap must be at least 1");
    RepairOutcome out;
    out.core_id = unit.core_id;
    out.final_unit = unit;
    if (unit.status == ProbeStatus::compiles) {
        out.final_status = RepairStatus::repaired;
        return out;
    }
    ResolvedUnit current = unit;
    std::vector<Diagnostic> diags = unit.diagnostics;
    if (diags.empty()) diags.push_back(synthetic("unit did not compile"));

    for (int round = 1; round <= options.cap; ++round) {
        RepairAttempt attempt;
        attempt.round = round;
        attempt.input_diagnostics = diags;
        std::string prompt = render_repair_prompt(current, diags, options.project_rules, options.max_diagnostics);
        attempt.completion = backend.complete({Task::repair, unit.core_id, prompt, c_source, unit.core_name, round});

        std::map<std::string, std::string> context;
        for (const auto& i : current.items)
            if (i.origin != ItemOrigin::core) context[i.name] = i.text;

        std::string code = text::extract_code_block(attempt.completion);
        auto issues = rust::check_syntax(code);
        std::string core_text;
        if (issues.empty()) {
            bool edited = false;
            std::vector<rust::Item> fns;
            for (auto& item : rust::parse_items(code)) {
                auto ctx = context.find(item.name);
                if (item.name == unit.core_name && item.kind == rust::ItemKind::function) {
                    core_text = item.text;
                    continue;
                }
                if (ctx != context.end()) {
                    if (text::normalize_ws(ctx->second) != text::normalize_ws(item.text)) {
                        edited = true;
                        attempt.rejected_items.push_back(item.name);
                    }
                    continue;
                }
                if (item.kind == rust::ItemKind::function) fns.push_back(item);
                attempt.rejected_items.push_back(item.name);
            }
            if (core_text.empty() && fns.size() == 1) {
                core_text = rust::rename_function(fns.front().text, unit.core_name);
                attempt.rejected_items.erase(
                    std::find(attempt.rejected_items.begin(), attempt.rejected_items.end(), fns.front().name));
            }
            if (edited) {
                attempt.outcome = AttemptOutcome::rejected_noncore_edit;
                attempt.repaired_core = core_text;
                attempt.output_diagnostics = {synthetic("completion edits items other than `" + unit.core_name + "`")};
                out.attempts.push_back(std::move(attempt));
                continue;
            }
        }
        if (core_text.empty()) {
            attempt.outcome = AttemptOutcome::still_failing;
            attempt.output_diagnostics = {
                synthetic(issues.empty() ? "completion holds no function `" + unit.core_name + "`"
                                         : "completion does not parse: " + issues.front().message)};
            out.attempts.push_back(std::move(attempt));
            continue;
        }
        attempt.repaired_core = core_text;
        auto next = probe_item(unit.core_id, unit.core_name, core_text, Provenance::translated, catalog, callees,
                               options.probe, context_of(current));
        attempt.output_diagnostics = next.diagnostics;
        if (next.status == ProbeStatus::compiles) {
            attempt.outcome = AttemptOutcome::compiles;
            out.attempts.push_back(std::move(attempt));
            out.final_unit = std::move(next);
            out.final_status = RepairStatus::repaired;
            return out;
        }
        attempt.outcome = AttemptOutcome::still_failing;
        out.attempts.push_back(std::move(attempt));
        current = std::move(next);
        diags = current.diagnostics;
        if (diags.empty()) diags.push_back(synthetic("unit did not compile"));
    }
    out.final_unit = current;
    out.note = "repair cap of " + std::to_string(options.cap) + " reached";
    finish_with_fallback(out, unit.core_name, catalog, callees, store, options, context_of(unit));
    return out;
}

RepairOutcome fallback_only(const std::string& core_id, const std::string& core_name, const ContextCatalog& catalog,
                            const CalleeMap& callees, const FallbackStore& store, const RepairOptions& options,
                            const std::string& note) {
    RepairOutcome out;
    out.core_id = core_id;
    out.note = note;
    out.final_unit.core_id = core_id;
    out.final_unit.core_name = core_name;
    finish_with_fallback(out, core_name, catalog, callees, store, options, {});
    return out;
}

nlohmann::json to_json(const RepairAttempt& a) {
    auto in = nlohmann::json::array(), outd = nlohmann::json::array();
    for (const auto& d : a.input_diagnostics) in.push_back(to_json(d));
    for (const auto& d : a.output_diagnostics) outd.push_back(to_json(d));
    return {{"round", a.round},
            {"input_diagnostics", in},
            {"completion", a.completion},
            {"repaired_core", a.repaired_core},
            {"outcome", to_string(a.outcome)},
            {"output_diagnostics", outd},
            {"rejected_items", a.rejected_items}};
}

RepairAttempt repair_attempt_from_json(const nlohmann::json& j) {
    RepairAttempt a;
    a.round = j.at("round").get<int>();
    for (const auto& d : j.at("input_diagnostics")) a.input_diagnostics.push_back(diagnostic_from_json(d));
    a.completion = j.at("completion").get<std::string>();
    a.repaired_core = j.at("repaired_core").get<std::string>();
    a.outcome = attempt_outcome_from_string(j.at("outcome").get<std::string>());
    for (const auto& d : j.at("output_diagnostics")) a.output_diagnostics.push_back(diagnostic_from_json(d));
    a.rejected_items = j.at("rejected_items").get<std::vector<std::string>>();
    return a;
}

nlohmann::json to_json(const RepairOutcome& o) {
    auto attempts = nlohmann::json::array();
    for (const auto& a : o.attempts) attempts.push_back(to_json(a));
    return {{"core_id", o.core_id},
            {"final_status", to_string(o.final_status)},
            {"attempts", attempts},
            {"final_unit", to_json(o.final_unit)},
            {"note", o.note}};
}

RepairOutcome repair_outcome_from_json(const nlohmann::json& j) {
    RepairOutcome o;
    o.core_id = j.at("core_id").get<std::string>();
    o.final_status = repair_status_from_string(j.at("final_status").get<std::string>());
    for (const auto& a : j.at("attempts")) o.attempts.push_back(repair_attempt_from_json(a));
    o.final_unit = resolved_unit_from_json(j.at("final_unit"));
    o.note = j.at("note").get<std::string>();
    return o;
}

}  // namespace migratekit

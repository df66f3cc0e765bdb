#include "migratekit/translator.hpp"

#include <algorithm>

#include "migratekit/errors.hpp"
#include "migratekit/syntax/c_syntax.hpp"
#include "migratekit/util/text.hpp"

namespace migratekit {

std::string to_string(TranslationStatus s) {
    switch (s) {
        case TranslationStatus::syntax_ok: return "syntax-ok";
        case TranslationStatus::syntax_failed: return "syntax-failed";
        case TranslationStatus::lazy_flagged: return "lazy-flagged";
    }
    return "syntax-failed";
}

TranslationStatus translation_status_from_string(const std::string& s) {
    if (s == "syntax-ok") return TranslationStatus::syntax_ok;
    if (s == "lazy-flagged") return TranslationStatus::lazy_flagged;
    if (s == "syntax-failed") return TranslationStatus::syntax_failed;
    throw ConfigError("unknown translation status `" + s + "`");
}

namespace {

std::string comment_body(std::string_view c) {
    std::string_view s = c;
    if (s.rfind("//", 0) == 0) {
        s.remove_prefix(2);
        while (!s.empty() && (s.front() == '/' || s.front() == '!')) s.remove_prefix(1);
    } else if (s.rfind("/*", 0) == 0) {
        s.remove_prefix(2);
        if (s.size() >= 2 && s.substr(s.size() - 2) == "*/") s.remove_suffix(2);
        while (!s.empty() && (s.front() == '*' || s.front() == '!')) s.remove_prefix(1);
    }
    return std::string(text::trim(s));
}

bool only_dots(std::string_view s) {
    s = text::trim(s);
    if (s.size() >= 1 && s.back() == ';') s.remove_suffix(1);
    s = text::trim(s);
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c == '.'; }) && s.size() >= 3;
}

}  // namespace

LazinessVerdict detect_laziness(const std::string& c_body, const std::string& rust_text, const LazinessConfig& config) {
    if (text::trim(c_body).empty() || text::trim(rust_text).empty())
        throw EmptyInput("laziness check needs both the C body and the Rust text");
    LazinessVerdict v;
    for (const auto& c : rust::comments(rust_text)) {
        std::string body = comment_body(c);
        std::string lower = text::to_lower(body);
        bool hit = only_dots(body);
        for (const auto& p : config.patterns)
            if (!hit && lower.find(text::to_lower(p)) != std::string::npos) hit = true;
        if (hit) v.evidence.push_back({"placeholder-comment", std::string(text::trim(c)), 0.0});
    }
    // An ellipsis standing alone where a statement belongs.
    for (const auto& line : text::split_lines(rust_text))
        if (only_dots(line)) v.evidence.push_back({"placeholder-comment", std::string(text::trim(line)), 0.0});

    v.c_statements = csyntax::count_c_statements(c_body);
    v.rust_statements = rust::count_statements(rust_text);
    v.ratio = v.c_statements == 0 ? 1.0 : static_cast<double>(v.rust_statements) / v.c_statements;
    if (v.c_statements >= config.min_c_statements && v.ratio < config.ratio_threshold)
        v.evidence.push_back({"statement-ratio",
                              std::to_string(v.rust_statements) + "/" + std::to_string(v.c_statements), v.ratio});
    v.lazy = !v.evidence.empty();
    return v;
}

namespace {

void c_block(std::string& out, const std::string& title, const std::vector<Declaration>& decls) {
    out += "### " + title + "\n```c\n";
    std::vector<std::size_t> seen;
    bool any = false;
    for (const auto& d : decls) {
        if (std::find(seen.begin(), seen.end(), d.entry) != seen.end()) continue;
        seen.push_back(d.entry);
        out += d.decl_text + "\n";
        any = true;
    }
    if (!any) out += "/* none */\n";
    out += "```\n\n";
}

}  // namespace

std::string render_translation_prompt(const TranslationUnit& unit, const std::vector<std::string>& project_rules) {
    const std::string& name = unit.core.name;
    std::string out;
    out += "You are migrating a C code base to Rust, one function at a time.\n\n";
    out += "## Code context\n\n";
    out += "The C code below is split into context and the code to be converted. The context lists the "
           "declarations the function depends on; Rust definitions for all of them already exist under the "
           "same names.\n\n";
    c_block(out, "Types and macros", unit.types_and_macros);
    c_block(out, "External variables", unit.external_variables);
    c_block(out, "Called functions", unit.called_functions);
    out += "### The code to be converted\n```c\n" + unit.core.body_text;
    if (out.back() != '\n') out += '\n';
    out += "```\n\n";
    out += "## Translation guidelines\n\n";
    out += "- Translate only the function `" + name + "`. Do not emit Rust for anything in the context.\n";
    out += "- Keep the name `" + name + "` and refer to context symbols by their C names.\n";
    out += "- Translate every statement. Never replace code with a comment or an ellipsis.\n";
    out += "- Answer with one ```rust fenced block holding the single function.\n\n";
    out += "## Project requirements\n\n";
    if (project_rules.empty()) out += "- (none)\n";
    for (const auto& r : project_rules) out += "- " + r + "\n";
    return out;
}

CoreExtraction extract_core(const std::string& completion, const std::string& core_name,
                            const std::vector<std::string>& context_names) {
    CoreExtraction ex;
    std::string code = text::extract_code_block(completion);
    ex.issues = rust::check_syntax(code);
    if (!ex.issues.empty()) {
        ex.text = code;
        return ex;
    }
    std::vector<rust::Item> fns;
    for (auto& item : rust::parse_items(code))
        if (item.kind == rust::ItemKind::function) fns.push_back(std::move(item));
    for (const auto& f : fns) {
        if (f.name == core_name) {
            ex.text = f.text;
            return ex;
        }
    }
    for (const auto& f : fns) {
        if (std::find(context_names.begin(), context_names.end(), f.name) != context_names.end()) continue;
        ex.text = rust::rename_function(f.text, core_name);
        ex.renamed = true;
        return ex;
    }
    ex.text = code;
    ex.issues.push_back({1, 1, "completion holds no function item for `" + core_name + "`"});
    return ex;
}

TranslatedFunction translate(const TranslationUnit& unit, Backend& backend, const TranslateOptions& options) {
    if (options.retry_cap < 1) throw ConfigError("retry cap must be at least 1");
    TranslatedFunction out;
    out.core_id = unit.core.id;
    out.core_name = unit.core.name;
    std::string prompt = render_translation_prompt(unit, options.project_rules);
    std::vector<std::string> context_names;
    for (const auto& d : unit.all_declarations()) context_names.push_back(d.symbol.name);

    for (int attempt = 1; attempt <= options.retry_cap; ++attempt) {
        CompletionRequest req{Task::translate, unit.core.id, prompt, unit.core.body_text, unit.core.name, attempt};
        std::string completion = backend.complete(req);
        out.completions.push_back(completion);
        out.attempts = attempt;
        auto ex = extract_core(completion, unit.core.name, context_names);
        out.rust_text = ex.text;
        out.issues = ex.issues;
        out.renamed = ex.renamed;
        if (ex.issues.empty()) {
            out.laziness = detect_laziness(unit.core.body_text, out.rust_text, options.laziness);
            out.status = out.laziness.lazy ? TranslationStatus::lazy_flagged : TranslationStatus::syntax_ok;
            return out;
        }
    }
    out.status = TranslationStatus::syntax_failed;
    return out;
}

nlohmann::json to_json(const LazinessVerdict& v) {
    auto ev = nlohmann::json::array();
    for (const auto& e : v.evidence) ev.push_back({{"rule", e.rule}, {"detail", e.detail}, {"ratio", e.ratio}});
    return {{"lazy", v.lazy},
            {"evidence", ev},
            {"c_statements", v.c_statements},
            {"rust_statements", v.rust_statements},
            {"ratio", v.ratio}};
}

LazinessVerdict laziness_verdict_from_json(const nlohmann::json& j) {
    LazinessVerdict v;
    v.lazy = j.at("lazy").get<bool>();
    for (const auto& e : j.at("evidence"))
        v.evidence.push_back({e.at("rule").get<std::string>(), e.at("detail").get<std::string>(),
                              e.at("ratio").get<double>()});
    v.c_statements = j.at("c_statements").get<int>();
    v.rust_statements = j.at("rust_statements").get<int>();
    v.ratio = j.at("ratio").get<double>();
    return v;
}

nlohmann::json to_json(const TranslatedFunction& t) {
    auto issues = nlohmann::json::array();
    for (const auto& i : t.issues) issues.push_back({{"line", i.line}, {"column", i.column}, {"message", i.message}});
    return {{"core_id", t.core_id},       {"core_name", t.core_name}, {"rust_text", t.rust_text},
            {"attempts", t.attempts},     {"laziness", to_json(t.laziness)}, {"status", to_string(t.status)},
            {"completions", t.completions}, {"issues", issues},       {"renamed", t.renamed}};
}

TranslatedFunction translated_function_from_json(const nlohmann::json& j) {
    TranslatedFunction t;
    t.core_id = j.at("core_id").get<std::string>();
    t.core_name = j.at("core_name").get<std::string>();
    t.rust_text = j.at("rust_text").get<std::string>();
    t.attempts = j.at("attempts").get<int>();
    t.laziness = laziness_verdict_from_json(j.at("laziness"));
    t.status = translation_status_from_string(j.at("status").get<std::string>());
    t.completions = j.at("completions").get<std::vector<std::string>>();
    for (const auto& i : j.at("issues"))
        t.issues.push_back({i.at("line").get<int>(), i.at("column").get<int>(), i.at("message").get<std::string>()});
    t.renamed = j.value("renamed", false);
    return t;
}

}  // namespace migratekit

#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "migratekit/backend.hpp"
#include "migratekit/context_prober.hpp"
#include "migratekit/rust_items.hpp"

namespace migratekit {

struct LazinessConfig {
    std::vector<std::string> patterns = {"rest of", "remaining", "omitted", "similar to above"};
    double ratio_threshold = 0.4;
    int min_c_statements = 10;
};

struct LazinessEvidence {
    std::string rule;    // "placeholder-comment" or "statement-ratio"
    std::string detail;  // matching comment, or "rust/c" counts
    double ratio = 0.0;
};

struct LazinessVerdict {
    bool lazy = false;
    std::vector<LazinessEvidence> evidence;
    int c_statements = 0;
    int rust_statements = 0;
    double ratio = 0.0;
};

/// Throws EmptyInput when either text is blank.
LazinessVerdict detect_laziness(const std::string& c_body, const std::string& rust_text,
                                const LazinessConfig& config = {});

enum class TranslationStatus { syntax_ok, syntax_failed, lazy_flagged };

std::string to_string(TranslationStatus s);
TranslationStatus translation_status_from_string(const std::string& s);

struct TranslatedFunction {
    std::string core_id;
    std::string core_name;
    std::string rust_text;  // the core function item only
    int attempts = 0;
    LazinessVerdict laziness;
    TranslationStatus status = TranslationStatus::syntax_failed;
    std::vector<std::string> completions;  // raw backend output per attempt
    std::vector<rust::SyntaxIssue> issues;  // of the last attempt
    bool renamed = false;
};

struct TranslateOptions {
    int retry_cap = 3;
    std::vector<std::string> project_rules;
    LazinessConfig laziness;
};

std::string render_translation_prompt(const TranslationUnit& unit, const std::vector<std::string>& project_rules);

struct CoreExtraction {
    std::string text;  // empty when no usable function item exists
    std::vector<rust::SyntaxIssue> issues;
    bool renamed = false;
};

/// Takes the code out of a completion, checks it, and keeps only the item
/// for `core_name`; a lone differently-named function is renamed. Names in
/// `context_names` are never taken for the core.
CoreExtraction extract_core(const std::string& completion, const std::string& core_name,
                            const std::vector<std::string>& context_names = {});

/// Throws BackendUnavailable / FixtureMiss from the backend.
TranslatedFunction translate(const TranslationUnit& unit, Backend& backend, const TranslateOptions& options = {});

nlohmann::json to_json(const TranslatedFunction& t);
TranslatedFunction translated_function_from_json(const nlohmann::json& j);
nlohmann::json to_json(const LazinessVerdict& v);
LazinessVerdict laziness_verdict_from_json(const nlohmann::json& j);

}  // namespace migratekit

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "migratekit/catalog.hpp"
#include "migratekit/translator.hpp"

namespace migratekit {

struct Span {
    int line_start = 0;
    int column_start = 0;
    int line_end = 0;
    int column_end = 0;
    std::string text;  // highlighted source text of the primary span
};

struct Diagnostic {
    std::string code;  // "E0425"; empty for uncoded errors such as syntax errors
    std::string level;
    std::string message;
    std::string rendered;
    std::string primary_symbol;  // set for resolution-class codes
    std::string namespace_hint;  // "type", "value", "function" or empty
    Span span;
};

/// Error codes the prober treats as missing or misused symbols.
const std::set<std::string>& resolution_codes();
bool is_resolution_code(const std::string& code);

struct ScaffoldConfig {
    std::string rustc = "rustc";
    std::string edition = "2021";
    /// Crate attributes placed before the items; the default silences lints
    /// that translated C trips over.
    std::string prelude =
        "#![allow(dead_code, unused, non_camel_case_types, non_snake_case, non_upper_case_globals, "
        "static_mut_refs, improper_ctypes)]";
    bool no_std = false;
    std::filesystem::path scratch_root;  // defaults to a directory under the system temp dir
};

/// Parses one line of rustc's JSON diagnostic stream; nullopt for non-errors
/// and summary lines.
std::optional<Diagnostic> parse_rustc_diagnostic(const std::string& json_line);

/// Type-checks `items` as one library crate in `<scratch_root>/<crate_id>/`.
/// Returns the error diagnostics; empty means the items compile. Throws
/// ToolchainMissing when rustc is absent and ScaffoldError when an item does
/// not parse or the crate cannot be written.
std::vector<Diagnostic> compile_check(const std::vector<std::string>& items, const ScaffoldConfig& scaffold,
                                      const std::string& crate_id);

enum class ProbeStatus { compiles, unresolved_remaining, compile_error };
std::string to_string(ProbeStatus s);
ProbeStatus probe_status_from_string(const std::string& s);

enum class ItemOrigin { core, callee, catalog };

struct UnitItem {
    std::string name;
    std::string text;
    ItemOrigin origin = ItemOrigin::catalog;
    Provenance provenance = Provenance::catalog;
};

struct ResolvedUnit {
    std::string core_id;
    std::string core_name;
    std::vector<UnitItem> items;  // context items in the order they were added, then the core
    std::vector<Diagnostic> diagnostics;
    int iterations_used = 0;
    ProbeStatus status = ProbeStatus::compile_error;
    std::vector<std::string> unresolved;    // names no source could supply
    std::vector<std::string> lazy_callees;  // pulled-in callees whose translation was flagged lazy

    const UnitItem& core() const;
    UnitItem& core();
    std::vector<std::string> texts() const;
    std::string render() const;
};

struct CalleeItem {
    std::string text;
    Provenance provenance = Provenance::translated;
    bool lazy = false;
};
using CalleeMap = std::map<std::string, CalleeItem>;

struct Definition {
    std::string text;
    ItemOrigin origin = ItemOrigin::catalog;
    Provenance provenance = Provenance::catalog;
    bool lazy = false;
};

/// Callees win over the catalog. Among catalog kinds, `hint` (the namespace
/// rustc was searching) picks first; otherwise type, macro-const, variable,
/// extern-fn.
std::optional<Definition> lookup_definition(const std::string& name, const ContextCatalog& catalog,
                                            const CalleeMap& callees, const std::string& hint = {});

struct ProbeOptions {
    int max_iters = 20;
    ScaffoldConfig scaffold;
};

/// Compiles the core, appends definitions for every missing symbol, and
/// repeats until it compiles, makes no progress, or hits max_iters. Items in
/// `initial_context` are kept as they are and extended, never edited.
ResolvedUnit probe_item(const std::string& core_id, const std::string& core_name, const std::string& core_text,
                        Provenance core_provenance, const ContextCatalog& catalog, const CalleeMap& callees,
                        const ProbeOptions& options = {}, const std::vector<UnitItem>& initial_context = {});

/// Throws ConfigError when `core` did not pass the syntax stage.
ResolvedUnit probe(const TranslatedFunction& core, const ContextCatalog& catalog, const CalleeMap& callees,
                   const ProbeOptions& options = {});

nlohmann::json to_json(const Diagnostic& d);
Diagnostic diagnostic_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ResolvedUnit& u);
ResolvedUnit resolved_unit_from_json(const nlohmann::json& j);

}  // namespace migratekit

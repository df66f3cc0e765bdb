#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "migratekit/rust_prober.hpp"

namespace migratekit {

struct ModuleItem {
    std::string name;
    std::string text;
    Provenance provenance = Provenance::catalog;
    bool function = false;  // translated or fallback function, as opposed to context
    std::string owner;      // unit id whose core this is; empty for context and callee copies
};

struct FusionStep {
    int index = 0;
    std::string kind;  // "seed" or "merge"
    std::string unit_id;
    bool checked = false;  // false when compile checks were disabled for this step
    bool compiled = false;
    std::vector<Diagnostic> diagnostics;
    std::string note;
};

struct Conflict {
    std::string name;
    std::string kept_unit;
    std::string kept_text;
    std::string other_unit;
    std::string other_text;
};

/// Unit or item left for the review stage.
struct Residue {
    std::string unit_id;
    std::string name;
    std::string reason;
};

struct RustModule {
    std::vector<ModuleItem> items;  // context first, then functions leaves-first
    std::vector<FusionStep> fusion_log;
    std::vector<Conflict> conflicts;
    std::vector<Residue> residue;
    bool compiles = false;
    std::vector<Diagnostic> diagnostics;  // of the final compile check

    std::map<std::string, Provenance> provenance() const;
    std::vector<std::string> names() const;
    std::vector<std::string> texts() const;
    /// Items separated by blank lines, newline-terminated; the text of module.rs.
    std::string render() const;
};

/// Merges `child` (already fused, leaves side) into `parent`. Duplicates by
/// name keep one copy: an owning core over callee copies, the catalog copy
/// for context items. Extern declarations of functions present in the merge
/// are dropped. Throws ConflictingDefinition when two translated cores of the
/// same name differ.
ResolvedUnit fuse_step(const ResolvedUnit& parent, const ResolvedUnit& child);

struct FuseOptions {
    bool compile_each_step = true;
    /// When false, conflicts keep the accumulated copy and are recorded in
    /// RustModule::conflicts for review instead of being thrown.
    bool raise_conflicts = true;
    ScaffoldConfig scaffold;
    std::string crate_prefix = "fusion";
};

/// Folds every scheduled unit into one accumulator, leaves first. Units that
/// are not compiling are carried verbatim and logged red; ids whose unit has
/// no core become residue.
RustModule fuse_module(const std::vector<std::vector<std::string>>& schedule,
                       const std::map<std::string, ResolvedUnit>& units, const FuseOptions& options = {});

/// Compile check of the whole module; updates compiles and diagnostics.
void recheck(RustModule& module, const ScaffoldConfig& scaffold, const std::string& crate_id);

nlohmann::json to_json(const RustModule& m);
RustModule rust_module_from_json(const nlohmann::json& j);
nlohmann::json fusion_log_json(const RustModule& m);
nlohmann::json conflicts_json(const RustModule& m);

}  // namespace migratekit

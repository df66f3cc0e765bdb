#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "migratekit/backend.hpp"
#include "migratekit/catalog.hpp"
#include "migratekit/rust_prober.hpp"

namespace migratekit {

enum class AttemptOutcome { compiles, still_failing, rejected_noncore_edit };
std::string to_string(AttemptOutcome o);

struct RepairAttempt {
    int round = 0;  // 1-based
    std::vector<Diagnostic> input_diagnostics;
    std::string completion;
    std::string repaired_core;  // empty when the completion held no usable core
    AttemptOutcome outcome = AttemptOutcome::still_failing;
    std::vector<Diagnostic> output_diagnostics;
    std::vector<std::string> rejected_items;  // non-core items the completion tried to add or edit
};

enum class RepairStatus { repaired, fallback_applied, manual_required };
std::string to_string(RepairStatus s);
RepairStatus repair_status_from_string(const std::string& s);

struct RepairOutcome {
    std::string core_id;
    RepairStatus final_status = RepairStatus::manual_required;
    std::vector<RepairAttempt> attempts;
    ResolvedUnit final_unit;
    std::string note;

    /// Round at which the unit first compiled: 0 when it needed no repair,
    /// nullopt when no LLM round got it compiling.
    std::optional<int> compiled_round() const;
};

/// Unsafe fallback translations keyed by FunctionUnit id.
using FallbackStore = std::map<std::string, std::string>;
FallbackStore load_fallback_store(const std::filesystem::path& path);
void save_fallback_store(const FallbackStore& store, const std::filesystem::path& path);

struct RepairOptions {
    int cap = 3;
    int max_diagnostics = 20;
    std::vector<std::string> project_rules;
    ProbeOptions probe;
};

/// Deterministic prompt holding the unit, the verbatim compiler messages (at
/// most `max_diagnostics` of them) and edit-core-only instructions.
std::string render_repair_prompt(const ResolvedUnit& unit, const std::vector<Diagnostic>& diagnostics,
                                 const std::vector<std::string>& project_rules, int max_diagnostics = 20);

/// Stored fallback for `core_id`, renamed to `core_name` and marked unsafe.
/// Throws FallbackMissing.
UnitItem apply_fallback(const std::string& core_id, const std::string& core_name, const FallbackStore& store);

/// Up to `cap` rounds of prompt, completion and recompile; then the fallback
/// store, then manual-required. `c_source` is forwarded to the backend.
RepairOutcome repair(const ResolvedUnit& unit, Backend& backend, const ContextCatalog& catalog,
                     const CalleeMap& callees, const FallbackStore& store, const RepairOptions& options = {},
                     const std::string& c_source = {});

/// Substitutes the fallback straight away, for cores that never produced a
/// usable translation.
RepairOutcome fallback_only(const std::string& core_id, const std::string& core_name, const ContextCatalog& catalog,
                            const CalleeMap& callees, const FallbackStore& store, const RepairOptions& options,
                            const std::string& note);

nlohmann::json to_json(const RepairAttempt& a);
RepairAttempt repair_attempt_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RepairOutcome& o);
RepairOutcome repair_outcome_from_json(const nlohmann::json& j);

}  // namespace migratekit

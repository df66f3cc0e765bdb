#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "migratekit/c_frontend.hpp"

namespace migratekit {

enum class SymbolKind { variable, function, type, macro, field_unknown };

std::string to_string(SymbolKind kind);
SymbolKind symbol_kind_from_string(const std::string& s);

struct SymbolRef {
    std::string name;
    SymbolKind kind = SymbolKind::variable;
    std::string origin;  // FunctionUnit id

    bool operator==(const SymbolRef&) const = default;
};

struct Declaration {
    SymbolRef symbol;
    std::string decl_text;
    std::string file;
    int line = 0;
    std::size_t entry = 0;  // index into CodebaseIndex::entries; equal for shared texts

    bool operator==(const Declaration&) const = default;
};

struct AmbiguityNote {
    std::string name;
    std::string chosen;                   // "file:line"
    std::vector<std::string> candidates;  // "file:line", in preference order
};

/// Searchable view of every declaration and function signature in a module.
class CodebaseIndex {
public:
    struct Entry {
        DeclKind kind;
        std::string file;
        int line = 0;
        std::string text;
        std::vector<std::string> names;
        std::vector<std::string> deps;
        bool is_definition = true;
        bool synthesized = false;  // prototype synthesized from a definition
        bool static_function = false;
    };

    explicit CodebaseIndex(const ModuleIR& module, std::set<std::string> builtins = {});

    const std::vector<Entry>& entries() const { return entries_; }
    const Entry& entry(std::size_t i) const { return entries_.at(i); }
    std::vector<std::size_t> lookup(const std::string& name) const;

    bool is_macro(const std::string& name) const;
    bool is_builtin(const std::string& name) const;
    /// Shortest include distance from `from` to `to` (0 for the same file).
    std::optional<int> include_distance(const std::string& from, const std::string& to) const;

private:
    std::vector<Entry> entries_;
    std::map<std::string, std::vector<std::size_t>> by_name_;
    std::map<std::string, std::set<std::string>> include_edges_;
    std::set<std::string> builtins_;
};

/// C keywords and identifiers every C toolchain predefines.
const std::set<std::string>& c_keywords();
const std::set<std::string>& default_builtins();

std::vector<SymbolRef> collect_unresolved(const FunctionUnit& core, const CodebaseIndex& index);

struct SearchResult {
    Declaration declaration;
    std::optional<AmbiguityNote> ambiguity;
};

/// Throws SymbolNotFound when the name has no declaration in the codebase.
SearchResult global_search(const SymbolRef& sym, const std::string& core_file, const CodebaseIndex& index);

struct TranslationUnit {
    FunctionUnit core;
    std::vector<Declaration> types_and_macros;  // macros first, then types
    std::vector<Declaration> external_variables;
    std::vector<Declaration> called_functions;
    std::vector<SymbolRef> unresolved;
    std::vector<AmbiguityNote> ambiguities;
    std::vector<std::string> warnings;
    int context_line_count = 0;

    std::vector<Declaration> all_declarations() const;
    bool operator==(const TranslationUnit& o) const;
};

enum class BudgetPolicy { error, truncate };

struct ContextOptions {
    int line_budget = 200;
    BudgetPolicy on_overflow = BudgetPolicy::error;
};

/// Orders declarations (macros, types, variables, prototypes), adds the
/// transitive closure of type and macro dependencies, and enforces the line
/// budget. Throws ContextBudgetExceeded under BudgetPolicy::error.
TranslationUnit assemble_context(const FunctionUnit& core, const std::vector<Declaration>& decls,
                                 const CodebaseIndex& index, const ContextOptions& options = {});

/// collect_unresolved + global_search + assemble_context for one function.
TranslationUnit probe_context(const FunctionUnit& core, const CodebaseIndex& index,
                              const ContextOptions& options = {});

/// The unit as compilable-order C text: context blocks, then the core.
std::string render_context_c(const TranslationUnit& unit);

nlohmann::json unresolved_report(const TranslationUnit& unit);

nlohmann::json to_json(const TranslationUnit& unit);
TranslationUnit translation_unit_from_json(const nlohmann::json& j);
nlohmann::json to_json(const FunctionUnit& fu);
FunctionUnit function_unit_from_json(const nlohmann::json& j);

}  // namespace migratekit

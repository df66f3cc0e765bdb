#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace migratekit {

enum class FileKind { source, header };

struct SourceFile {
    std::string path;  // relative to the codebase root, '/' separated
    std::string text;
    FileKind kind = FileKind::source;
    std::vector<std::string> includes;  // include targets as written
};

/// How a free identifier is used inside a function.
struct IdentifierUse {
    bool call = false;   // applied to an argument list
    bool type = false;   // typedef name or struct/union/enum tag
    bool value = false;  // any other expression position
};

struct FunctionUnit {
    std::string id;  // "<path>::<name>"
    std::string file;
    std::string name;
    int start_line = 0;
    int end_line = 0;
    std::uint32_t begin = 0;  // byte range of body_text in the file
    std::uint32_t end = 0;
    std::string body_text;
    std::string signature;  // prototype synthesized from the definition, with ';'
    bool is_static = false;
    std::set<std::string> locals;
    std::set<std::string> referenced;            // tags appear as "struct x"
    std::map<std::string, IdentifierUse> usage;  // keyed like referenced
    std::vector<std::string> calls;              // direct callee names, first-seen order
    std::vector<std::string> pointer_calls;      // names of function pointers invoked
    std::vector<std::string> signature_deps;     // type names and tags in the signature
    int statement_count = 0;

    int line_count() const { return end_line - start_line + 1; }
};

enum class DeclKind { macro, type, variable, function };

/// A top-level item that is not a function definition.
struct ModuleDecl {
    DeclKind kind = DeclKind::variable;
    std::string file;
    int line = 0;
    int end_line = 0;
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
    std::string text;
    std::vector<std::string> names;  // every name it defines ("struct x" for tags)
    std::vector<std::string> deps;   // type names, tags and other identifiers it mentions
    bool is_definition = true;       // false for extern variables and forward tags
    bool function_like_macro = false;
    bool enumerators = false;        // names beyond the tag are enum constants
    std::vector<std::string> macro_calls;  // identifiers applied to '(' inside a macro body
};

struct ModuleIR {
    std::filesystem::path root;
    std::vector<SourceFile> files;  // sorted by path
    std::vector<FunctionUnit> functions;
    std::vector<ModuleDecl> declarations;

    const SourceFile* file(const std::string& path) const;
    const FunctionUnit* function(const std::string& id) const;
    /// Definitions named `name`, preferring `from_file` for static functions.
    const FunctionUnit* resolve_callee(const std::string& name, const std::string& from_file) const;
    bool is_macro(const std::string& name) const;
};

struct ParseOptions {
    std::filesystem::path root;         // ids and paths are relative to this
    std::vector<std::string> defines;   // names treated as defined for #ifdef
};

/// `paths` may mix files and directories (scanned recursively for .c/.h).
ModuleIR parse_module(const std::vector<std::filesystem::path>& paths, const ParseOptions& options = {});

/// Parses in-memory files; used by tests and by generated corpora.
ModuleIR parse_sources(std::vector<SourceFile> files, const ParseOptions& options = {});

struct MacroEdge {
    std::string caller;  // function id
    std::string macro;
    std::string callee;  // function id when defined in the module, else the bare name
};

struct CallGraph {
    std::vector<std::string> nodes;  // (file, line) order
    std::set<std::pair<std::string, std::string>> edges;
    std::map<std::string, std::set<std::string>> external_calls;
    std::vector<MacroEdge> via_macro;
    std::vector<std::vector<std::string>> scc_order;  // leaves first
};

CallGraph build_call_graph(const ModuleIR& module);

std::vector<std::vector<std::string>> leaves_first_schedule(const CallGraph& graph);

nlohmann::json call_graph_to_json(const CallGraph& graph);
CallGraph call_graph_from_json(const nlohmann::json& j);

/// Text outside every function span, in order, with function spans removed.
std::string residual_text(const ModuleIR& module, const std::string& path);

}  // namespace migratekit

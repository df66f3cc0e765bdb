#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "migratekit/c_frontend.hpp"

// Generated inputs with labels known by construction, plus brute-force
// oracles to check the library against. Shared by the unit tests and the
// acceptance binary.

namespace migratekit::corpus {

struct GeneratedCModule {
    std::vector<SourceFile> files;
    std::vector<std::string> ids;  // in (file, line) order
    std::set<std::pair<std::string, std::string>> edges;
    std::map<std::string, std::set<std::string>> external_calls;
};

/// 1 to `max_functions` functions over one or two files, with nested calls,
/// calls in conditions, external calls, self recursion and cycles.
GeneratedCModule random_c_module(std::uint32_t seed, int max_functions = 12);

/// Call edges found by walking every call_expression in the parse tree.
std::set<std::pair<std::string, std::string>> tree_walk_edges(const std::vector<SourceFile>& files);

/// SCCs from the transitive closure, scheduled by repeatedly taking the ready
/// group whose first member comes earliest; members in position order.
std::vector<std::vector<std::string>> brute_force_schedule(
    const std::vector<std::string>& ids, const std::set<std::pair<std::string, std::string>>& edges);

/// Every cross-group edge points to an earlier group; groups partition ids.
bool schedule_is_sound(const std::vector<std::vector<std::string>>& schedule, const std::vector<std::string>& ids,
                       const std::set<std::pair<std::string, std::string>>& edges);

struct GeneratedSnippet {
    std::string text;
    int total = 0;   // non-blank lines
    int unsafe = 0;  // lines touched by an unsafe block or unsafe fn body
};

/// Rust items mixing safe code, multi-line and inline unsafe blocks, unsafe
/// fns, comments and blank lines, with per-line labels kept while writing.
GeneratedSnippet random_rust_snippet(std::uint32_t seed);

struct LazinessSample {
    std::string c;
    std::string rust;
    int c_lines = 0;
    bool lazy = false;  // how the sample was built
};

/// Functions of 50 to 900 lines; the share built lazily grows with length.
std::vector<LazinessSample> binned_laziness_corpus(std::uint32_t seed, int per_bin = 12);

}  // namespace migratekit::corpus

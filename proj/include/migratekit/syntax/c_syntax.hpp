#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "migratekit/syntax/tree.hpp"

// Helpers over the tree-sitter C grammar shared by the frontend, the
// laziness detector and the naive transpiler.
namespace migratekit::csyntax {

using syntax::Node;

/// Innermost name of a declarator chain (identifier, field_identifier or
/// type_identifier), or a null node.
Node declarator_name(Node declarator);

/// True when the declarator declares a function rather than an object
/// (function pointers are objects).
bool declares_function(Node declarator);

/// Nodes inside a function definition that fall outside the supported subset.
std::vector<Node> unsupported_constructs(const Node& function_definition);

struct Use {
    bool call = false;
    bool type = false;
    bool value = false;
};

struct FunctionScan {
    std::set<std::string> locals;
    std::map<std::string, Use> uses;          // every use, locals included
    std::vector<std::string> calls;           // identifier callees, first-seen order
    std::vector<std::string> pointer_calls;   // callees reached through fields or derefs
};

FunctionScan scan_function(const Node& function_definition);

/// Statement nodes under `node`; compound blocks and labels are not counted.
int count_statements(const Node& node);

/// Statement count of the first function definition in `c_text`, falling back
/// to the whole translation unit when there is none.
int count_c_statements(std::string_view c_text);

}  // namespace migratekit::csyntax

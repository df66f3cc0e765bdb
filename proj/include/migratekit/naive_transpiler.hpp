#pragma once

#include <map>
#include <string>
#include <string_view>

namespace migratekit {

class ContextCatalog;

/// Rust types of the names a C function can see from outside: globals and
/// constants, function results, struct fields and type aliases.
struct TypeEnv {
    std::map<std::string, std::string> globals;
    std::map<std::string, std::string> returns;  // "" for functions returning ()
    std::map<std::string, std::map<std::string, std::string>> fields;
    std::map<std::string, std::string> aliases;
};

/// Reads the types off the catalog's Rust items.
TypeEnv type_env(const ContextCatalog& catalog);

/// Statement-by-statement C to unsafe Rust for the mini-C subset. The result
/// is one `pub unsafe extern "C" fn` item with the C name. Throws
/// UnsupportedConstruct for anything outside the subset.
std::string naive_transpile(std::string_view c_function, const TypeEnv& env = {});

}  // namespace migratekit

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "migratekit/syntax/tree.hpp"

// Mapping of C types and constant expressions onto Rust, shared by the
// catalog generator and the naive transpiler.
namespace migratekit::ctypes {

using syntax::Node;

/// Rust spelling of an identifier, using raw identifiers for keywords.
std::string rust_ident(std::string_view name);

/// Rust type for a C type specifier (the `type` field of a declaration).
/// `is_const` reports a const qualifier among the declaration's specifiers.
/// Throws UnsupportedConstruct for anonymous tags and unknown specifiers.
std::string base_type(const Node& type_node);

/// Walks a declarator chain from the outside in, wrapping `base`. Returns the
/// full Rust type; `name` receives the declared identifier (empty for
/// abstract declarators).
std::string apply_declarator(std::string base, bool base_const, const Node& declarator, std::string* name);

/// True when the declaration-like node carries `const` among its specifiers.
bool has_const_qualifier(const Node& decl);

/// Rust parameter list and return type for a function_declarator.
struct Signature {
    std::string name;
    std::vector<std::pair<std::string, std::string>> params;  // (name, type); names may be empty
    bool variadic = false;
    std::string ret;  // empty for void
};
Signature function_signature(const Node& type_node, bool type_const, const Node& declarator);

struct ConstValue {
    bool floating = false;
    bool is_unsigned = false;
    long long i = 0;
    double f = 0.0;
};

using ConstLookup = std::function<std::optional<ConstValue>(const std::string&)>;

/// Evaluates a C constant expression node; nullopt when it is not constant.
std::optional<ConstValue> eval_const(const Node& expr, const ConstLookup& lookup);
/// Same, parsing `text` as an expression first.
std::optional<ConstValue> eval_const_text(std::string_view text, const ConstLookup& lookup);

/// Rust type bindgen-style generators pick for a constant: u32 for values
/// that fit, then i32, u64, i64; f64 for floating values.
std::string const_type(const ConstValue& v);
std::string const_literal(const ConstValue& v);

/// Zero value of a Rust type usable in a static initializer.
std::string zero_value(const std::string& rust_type);

}  // namespace migratekit::ctypes

#pragma once

#include <string>
#include <string_view>
#include <vector>

// Rust-side syntax helpers backed by the tree-sitter Rust grammar.
namespace migratekit::rust {

struct SyntaxIssue {
    int line = 0;    // 1-based
    int column = 0;  // 1-based
    std::string message;

    bool operator==(const SyntaxIssue&) const = default;
};

/// Empty iff `text` parses as a sequence of Rust items.
std::vector<SyntaxIssue> check_syntax(std::string_view text);

enum class ItemKind {
    function,
    struct_,
    enum_,
    union_,
    type_alias,
    constant,
    static_,
    extern_block,
    use,
    impl,
    trait,
    macro,
    module,
    other
};

struct Item {
    ItemKind kind = ItemKind::other;
    std::string name;                // primary name; "impl T", "use a::b" for unnamed kinds
    std::vector<std::string> names;  // every name defined (extern blocks may declare several)
    std::string text;                // including attached attributes and doc comments
    bool unsafe_fn = false;
};

/// Top-level items of `text`. Throws ParseFailed when the text does not parse.
std::vector<Item> parse_items(std::string_view text);

/// Renames the first function item of `item_text` and every identifier in it
/// that spelled the old name (recursive calls).
std::string rename_function(std::string_view item_text, const std::string& new_name);

/// Marks the first function item `unsafe` when it is not already.
std::string make_unsafe_fn(std::string_view item_text);

/// Statement nodes inside function bodies: let bindings, expression
/// statements and block tail expressions.
int count_statements(std::string_view rust_text);

/// Comment texts of `rust_text` in document order.
std::vector<std::string> comments(std::string_view rust_text);

struct LineCount {
    int safe = 0;
    int total = 0;
    int unsafe() const { return total - safe; }
};

/// Non-blank lines, split by whether they lie inside an unsafe block or an
/// unsafe fn body (delimiter lines included). Throws ParseFailed.
LineCount count_safe_lines(std::string_view rust_text);

std::string to_string(ItemKind kind);

}  // namespace migratekit::rust

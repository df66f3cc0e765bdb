#include "migratekit/rust_items.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

#include "migratekit/errors.hpp"
#include "migratekit/syntax/tree.hpp"
#include "migratekit/util/text.hpp"

namespace migratekit::rust {

using syntax::Node;

namespace {

bool is_comment(std::string_view t) { return t == "line_comment" || t == "block_comment"; }

bool is_attribute(std::string_view t) { return t == "attribute_item" || t == "inner_attribute_item"; }

const std::unordered_set<std::string_view>& item_types() {
    static const std::unordered_set<std::string_view> kItems = {
        "function_item", "struct_item",      "enum_item",        "union_item",
        "type_item",     "const_item",       "static_item",      "foreign_mod_item",
        "use_declaration", "impl_item",      "trait_item",       "macro_definition",
        "macro_invocation", "mod_item",      "extern_crate_declaration"};
    return kItems;
}

ItemKind kind_of(std::string_view t) {
    if (t == "function_item") return ItemKind::function;
    if (t == "struct_item") return ItemKind::struct_;
    if (t == "enum_item") return ItemKind::enum_;
    if (t == "union_item") return ItemKind::union_;
    if (t == "type_item") return ItemKind::type_alias;
    if (t == "const_item") return ItemKind::constant;
    if (t == "static_item") return ItemKind::static_;
    if (t == "foreign_mod_item") return ItemKind::extern_block;
    if (t == "use_declaration") return ItemKind::use;
    if (t == "impl_item") return ItemKind::impl;
    if (t == "trait_item") return ItemKind::trait;
    if (t == "macro_definition" || t == "macro_invocation") return ItemKind::macro;
    if (t == "mod_item") return ItemKind::module;
    return ItemKind::other;
}

bool has_unsafe_modifier(const Node& fn) {
    for (auto c : fn.children()) {
        if (c.type() == "function_modifiers")
            for (auto m : c.children())
                if (m.type() == "unsafe") return true;
    }
    return false;
}

std::vector<std::string> names_of(const Node& n) {
    auto t = n.type();
    if (t == "foreign_mod_item") {
        std::vector<std::string> out;
        if (auto body = n.field("body"))
            for (auto c : body.named_children())
                if (auto nm = c.field("name")) out.emplace_back(nm.text());
        return out;
    }
    if (t == "impl_item") {
        std::string s = "impl ";
        if (auto tr = n.field("trait")) s += std::string(tr.text()) + " for ";
        s += std::string(n.field("type").text());
        return {s};
    }
    if (t == "use_declaration") return {"use " + std::string(n.field("argument").text())};
    if (t == "macro_invocation") return {std::string(n.field("macro").text()) + "!"};
    if (t == "extern_crate_declaration") return {"extern crate " + std::string(n.field("name").text())};
    if (auto nm = n.field("name")) return {std::string(nm.text())};
    return {};
}

}  // namespace

std::string to_string(ItemKind kind) {
    switch (kind) {
        case ItemKind::function: return "fn";
        case ItemKind::struct_: return "struct";
        case ItemKind::enum_: return "enum";
        case ItemKind::union_: return "union";
        case ItemKind::type_alias: return "type";
        case ItemKind::constant: return "const";
        case ItemKind::static_: return "static";
        case ItemKind::extern_block: return "extern";
        case ItemKind::use: return "use";
        case ItemKind::impl: return "impl";
        case ItemKind::trait: return "trait";
        case ItemKind::macro: return "macro";
        case ItemKind::module: return "mod";
        case ItemKind::other: return "other";
    }
    return "other";
}

std::vector<SyntaxIssue> check_syntax(std::string_view text) {
    auto tree = syntax::Tree::parse(syntax::Language::rust, std::string(text));
    auto root = tree.root();
    std::vector<SyntaxIssue> issues;
    for (auto& e : syntax::error_nodes(root)) {
        std::string msg = e.is_missing() ? "missing `" + std::string(e.type()) + "`" : "unexpected input";
        if (e.is_error()) {
            auto snippet = text::trim(e.text());
            if (!snippet.empty()) msg += " near `" + std::string(snippet.substr(0, std::min<std::size_t>(snippet.size(), 24))) + "`";
        }
        issues.push_back({e.start_line(), e.start_column(), std::move(msg)});
    }
    if (!issues.empty()) return issues;
    for (auto c : root.named_children()) {
        auto t = c.type();
        if (is_comment(t) || is_attribute(t) || item_types().count(t)) continue;
        issues.push_back({c.start_line(), c.start_column(), "expected an item, found `" + std::string(t) + "`"});
    }
    return issues;
}

std::vector<Item> parse_items(std::string_view text) {
    auto tree = syntax::Tree::parse(syntax::Language::rust, std::string(text));
    auto root = tree.root();
    if (root.has_error()) {
        auto errs = syntax::error_nodes(root);
        throw ParseFailed("Rust text does not parse (line " +
                          std::to_string(errs.empty() ? 1 : errs.front().start_line()) + ")");
    }
    std::vector<Item> items;
    std::uint32_t pending_start = 0;
    bool pending = false;
    int pending_end_line = 0;
    for (auto c : root.named_children()) {
        auto t = c.type();
        if (is_comment(t) || t == "attribute_item") {
            // Attributes and comments directly above an item belong to it.
            if (!pending || c.start_line() > pending_end_line + 1) pending_start = c.start_byte();
            pending = true;
            pending_end_line = c.end_line();
            continue;
        }
        if (t == "inner_attribute_item") {
            pending = false;
            continue;
        }
        Item item;
        item.kind = kind_of(t);
        item.names = names_of(c);
        item.name = item.names.empty() ? std::string(c.text().substr(0, 32)) : item.names.front();
        std::uint32_t begin = (pending && c.start_line() <= pending_end_line + 1) ? pending_start : c.start_byte();
        item.text = std::string(text.substr(begin, c.end_byte() - begin));
        item.unsafe_fn = t == "function_item" && has_unsafe_modifier(c);
        items.push_back(std::move(item));
        pending = false;
    }
    return items;
}

std::string rename_function(std::string_view item_text, const std::string& new_name) {
    auto tree = syntax::Tree::parse(syntax::Language::rust, std::string(item_text));
    Node fn;
    for (auto c : tree.root().named_children())
        if (c.type() == "function_item") {
            fn = c;
            break;
        }
    if (!fn) return std::string(item_text);
    std::string old_name(fn.field("name").text());
    if (old_name == new_name) return std::string(item_text);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> spans;
    syntax::walk(fn, [&](const Node& n) {
        if (n.type() == "identifier" && n.text() == old_name) spans.emplace_back(n.start_byte(), n.end_byte());
        return true;
    });
    std::string out(item_text);
    for (auto it = spans.rbegin(); it != spans.rend(); ++it) out.replace(it->first, it->second - it->first, new_name);
    return out;
}

std::string make_unsafe_fn(std::string_view item_text) {
    auto tree = syntax::Tree::parse(syntax::Language::rust, std::string(item_text));
    Node fn;
    for (auto c : tree.root().named_children())
        if (c.type() == "function_item") {
            fn = c;
            break;
        }
    if (!fn || has_unsafe_modifier(fn)) return std::string(item_text);
    // `unsafe` goes after const/async and before extern and `fn`.
    std::uint32_t at = 0;
    for (auto c : fn.children()) {
        if (c.type() == "function_modifiers") {
            for (auto m : c.children())
                if (m.type() == "extern_modifier") {
                    at = m.start_byte();
                    break;
                }
            if (at) break;
        }
        if (c.type() == "fn") {
            at = c.start_byte();
            break;
        }
    }
    std::string out(item_text);
    out.insert(at, "unsafe ");
    return out;
}

int count_statements(std::string_view rust_text) {
    auto tree = syntax::Tree::parse(syntax::Language::rust, std::string(rust_text));
    int count = 0;
    syntax::walk(tree.root(), [&](const Node& n) {
        if (n.type() != "block") return true;
        for (auto c : n.named_children()) {
            auto t = c.type();
            if (is_comment(t) || is_attribute(t) || t == "empty_statement" || t == "label") continue;
            ++count;
        }
        return true;
    });
    return count;
}

std::vector<std::string> comments(std::string_view rust_text) {
    auto tree = syntax::Tree::parse(syntax::Language::rust, std::string(rust_text));
    std::vector<std::string> out;
    syntax::walk(tree.root(), [&](const Node& n) {
        if (is_comment(n.type())) {
            out.emplace_back(n.text());
            return false;
        }
        return true;
    });
    return out;
}

LineCount count_safe_lines(std::string_view rust_text) {
    auto tree = syntax::Tree::parse(syntax::Language::rust, std::string(rust_text));
    auto root = tree.root();
    if (root.has_error()) throw ParseFailed("cannot count safe lines: the text does not parse");
    std::set<int> unsafe_lines;
    auto mark = [&](const Node& n) {
        for (int l = n.start_line(); l <= n.end_line(); ++l) unsafe_lines.insert(l);
    };
    syntax::walk(root, [&](const Node& n) {
        if (n.type() == "unsafe_block") {
            mark(n);
            return false;
        }
        if (n.type() == "function_item" && has_unsafe_modifier(n)) {
            if (auto body = n.field("body")) mark(body);
            return false;
        }
        return true;
    });
    LineCount c;
    auto lines = text::split_lines(rust_text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (text::is_blank(lines[i])) continue;
        ++c.total;
        if (!unsafe_lines.count(static_cast<int>(i) + 1)) ++c.safe;
    }
    return c;
}

}  // namespace migratekit::rust

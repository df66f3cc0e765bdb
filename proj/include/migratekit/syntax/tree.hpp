#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <tree_sitter/api.h>

namespace migratekit::syntax {

enum class Language { c, rust };

const TSLanguage* ts_language(Language lang);

/// Thin value wrapper over TSNode that carries the source buffer so text()
/// needs no extra argument. Valid only while its Tree is alive.
class Node {
public:
    Node() = default;
    Node(TSNode node, const std::string* source) : node_(node), source_(source) {}

    bool null() const { return ts_node_is_null(node_); }
    explicit operator bool() const { return !null(); }

    std::string_view type() const { return null() ? std::string_view{} : ts_node_type(node_); }
    TSSymbol symbol() const { return ts_node_symbol(node_); }
    bool named() const { return ts_node_is_named(node_); }
    bool is_error() const { return ts_node_is_error(node_); }
    bool is_missing() const { return ts_node_is_missing(node_); }
    bool has_error() const { return ts_node_has_error(node_); }

    std::uint32_t start_byte() const { return ts_node_start_byte(node_); }
    std::uint32_t end_byte() const { return ts_node_end_byte(node_); }
    /// 1-based line numbers.
    int start_line() const { return static_cast<int>(ts_node_start_point(node_).row) + 1; }
    int end_line() const { return static_cast<int>(ts_node_end_point(node_).row) + 1; }
    /// 1-based column of the first byte.
    int start_column() const { return static_cast<int>(ts_node_start_point(node_).column) + 1; }

    std::string_view text() const;

    std::uint32_t child_count() const { return ts_node_child_count(node_); }
    std::uint32_t named_child_count() const { return ts_node_named_child_count(node_); }
    Node child(std::uint32_t i) const { return {ts_node_child(node_, i), source_}; }
    Node named_child(std::uint32_t i) const { return {ts_node_named_child(node_, i), source_}; }
    Node field(std::string_view name) const;
    /// Field name under which child `i` hangs off this node, or empty.
    std::string_view field_name_of_child(std::uint32_t i) const;
    Node parent() const { return {ts_node_parent(node_), source_}; }
    Node next_sibling() const { return {ts_node_next_sibling(node_), source_}; }
    Node prev_sibling() const { return {ts_node_prev_sibling(node_), source_}; }
    Node next_named_sibling() const { return {ts_node_next_named_sibling(node_), source_}; }
    Node prev_named_sibling() const { return {ts_node_prev_named_sibling(node_), source_}; }

    std::vector<Node> children() const;
    std::vector<Node> named_children() const;

    /// S-expression of the subtree (named nodes only).
    std::string sexp() const;

    const TSNode& raw() const { return node_; }
    bool operator==(const Node& other) const { return ts_node_eq(node_, other.node_); }

private:
    TSNode node_{};
    const std::string* source_ = nullptr;
};

class Tree {
public:
    static Tree parse(Language lang, std::string source);

    Node root() const { return {ts_tree_root_node(tree_.get()), source_.get()}; }
    const std::string& source() const { return *source_; }
    Language language() const { return lang_; }

private:
    struct Deleter {
        void operator()(TSTree* t) const { ts_tree_delete(t); }
    };
    Tree(Language lang, std::unique_ptr<std::string> source, TSTree* tree)
        : lang_(lang), source_(std::move(source)), tree_(tree) {}

    Language lang_;
    std::unique_ptr<std::string> source_;
    std::unique_ptr<TSTree, Deleter> tree_;
};

/// Pre-order traversal. `visit` returns false to skip the node's children.
template <class Visit>
void walk(const Node& node, Visit&& visit) {
    if (node.null()) return;
    if (!visit(node)) return;
    for (std::uint32_t i = 0, n = node.child_count(); i < n; ++i) walk(node.child(i), visit);
}

/// Every ERROR or MISSING node below `node`, in document order.
std::vector<Node> error_nodes(const Node& node);

}  // namespace migratekit::syntax

#include "migratekit/syntax/tree.hpp"

#include <cstdlib>
#include <stdexcept>

extern "C" {
const TSLanguage* tree_sitter_c(void);
const TSLanguage* tree_sitter_rust(void);
}

namespace migratekit::syntax {

const TSLanguage* ts_language(Language lang) {
    switch (lang) {
        case Language::c: return tree_sitter_c();
        case Language::rust: return tree_sitter_rust();
    }
    return nullptr;
}

std::string_view Node::text() const {
    if (null() || !source_) return {};
    auto b = start_byte();
    auto e = end_byte();
    if (e > source_->size()) e = static_cast<std::uint32_t>(source_->size());
    if (b > e) b = e;
    return std::string_view(*source_).substr(b, e - b);
}

Node Node::field(std::string_view name) const {
    return {ts_node_child_by_field_name(node_, name.data(), static_cast<std::uint32_t>(name.size())), source_};
}

std::string_view Node::field_name_of_child(std::uint32_t i) const {
    const char* name = ts_node_field_name_for_child(node_, i);
    return name ? std::string_view(name) : std::string_view{};
}

std::vector<Node> Node::children() const {
    std::vector<Node> out;
    for (std::uint32_t i = 0, n = child_count(); i < n; ++i) out.push_back(child(i));
    return out;
}

std::vector<Node> Node::named_children() const {
    std::vector<Node> out;
    for (std::uint32_t i = 0, n = named_child_count(); i < n; ++i) out.push_back(named_child(i));
    return out;
}

std::string Node::sexp() const {
    char* s = ts_node_string(node_);
    std::string out(s ? s : "");
    std::free(s);
    return out;
}

namespace {

struct ParserHandle {
    TSParser* parser = ts_parser_new();
    ~ParserHandle() { ts_parser_delete(parser); }
};

}  // namespace

Tree Tree::parse(Language lang, std::string source) {
    // Parsers are cheap but not thread-safe; one per thread and language.
    thread_local ParserHandle c_parser;
    thread_local ParserHandle rust_parser;
    TSParser* parser = lang == Language::c ? c_parser.parser : rust_parser.parser;
    if (ts_parser_language(parser) == nullptr && !ts_parser_set_language(parser, ts_language(lang)))
        throw std::runtime_error("tree-sitter language version mismatch");
    auto owned = std::make_unique<std::string>(std::move(source));
    TSTree* tree = ts_parser_parse_string(parser, nullptr, owned->data(), static_cast<std::uint32_t>(owned->size()));
    if (!tree) throw std::runtime_error("tree-sitter parse failed");
    return Tree(lang, std::move(owned), tree);
}

std::vector<Node> error_nodes(const Node& node) {
    std::vector<Node> out;
    walk(node, [&](const Node& n) {
        if (n.is_error() || n.is_missing()) {
            out.push_back(n);
            return false;
        }
        return n.has_error();
    });
    return out;
}

}  // namespace migratekit::syntax

#include "migratekit/syntax/c_syntax.hpp"

#include <algorithm>
#include <unordered_set>

namespace migratekit::csyntax {

Node declarator_name(Node d) {
    while (d) {
        auto t = d.type();
        if (t == "identifier" || t == "field_identifier" || t == "type_identifier" || t == "primitive_type") return d;
        if (t == "parenthesized_declarator" || t == "parenthesized_type_declarator") {
            d = d.named_child(0);
            continue;
        }
        auto next = d.field("declarator");
        if (!next) return {};
        d = next;
    }
    return {};
}

bool declares_function(Node d) {
    while (d) {
        auto t = d.type();
        if (t == "function_declarator") {
            auto inner = d.field("declarator");
            return inner && (inner.type() == "identifier" || inner.type() == "field_identifier");
        }
        if (t == "init_declarator" || t == "pointer_declarator" || t == "attributed_declarator") {
            d = d.field("declarator");
            if (!d) d = {};
            continue;
        }
        return false;
    }
    return false;
}

std::vector<Node> unsupported_constructs(const Node& fn) {
    static const std::unordered_set<std::string_view> kUnsupported = {
        "gnu_asm_expression", "function_definition", "ms_based_modifier", "generic_expression",
        "linkage_specification", "seh_try_statement"};
    std::vector<Node> out;
    bool top = true;
    syntax::walk(fn, [&](const Node& n) {
        if (top) {
            top = false;
            return true;
        }
        if (kUnsupported.count(n.type())) {
            out.push_back(n);
            return false;
        }
        return true;
    });
    return out;
}

namespace {

std::string tag_key(std::string_view specifier_type, std::string_view tag) {
    std::string kw = specifier_type == "struct_specifier" ? "struct"
                     : specifier_type == "union_specifier" ? "union"
                                                           : "enum";
    return kw + " " + std::string(tag);
}

bool is_tag_specifier(std::string_view t) {
    return t == "struct_specifier" || t == "union_specifier" || t == "enum_specifier";
}

void push_unique(std::vector<std::string>& v, std::string s) {
    if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(std::move(s));
}

}  // namespace

FunctionScan scan_function(const Node& fn) {
    FunctionScan scan;
    auto fn_name = declarator_name(fn.field("declarator"));
    std::unordered_set<std::uint32_t> declaring;  // start bytes of declaring identifiers
    if (fn_name) declaring.insert(fn_name.start_byte());

    syntax::walk(fn, [&](const Node& n) {
        auto t = n.type();
        if (t == "declaration" || t == "parameter_declaration" || t == "type_definition") {
            for (std::uint32_t i = 0; i < n.child_count(); ++i) {
                if (n.field_name_of_child(i) != "declarator") continue;
                if (auto id = declarator_name(n.child(i)); id && !(id == fn_name)) {
                    declaring.insert(id.start_byte());
                    scan.locals.emplace(id.text());
                }
            }
        } else if (t == "enumerator") {
            auto nm = n.field("name");
            declaring.insert(nm.start_byte());
            scan.locals.emplace(nm.text());
        }
        return true;
    });

    syntax::walk(fn, [&](const Node& n) {
        auto t = n.type();
        if (t == "identifier") {
            if (declaring.count(n.start_byte())) return false;
            auto parent = n.parent();
            std::string name(n.text());
            auto& use = scan.uses[name];
            if (parent.type() == "call_expression" && parent.field("function") == n) {
                use.call = true;
                push_unique(scan.calls, name);
            } else {
                use.value = true;
            }
            return false;
        }
        if (t == "type_identifier") {
            if (declaring.count(n.start_byte())) return false;
            auto parent = n.parent();
            if (is_tag_specifier(parent.type()) && parent.field("name") == n)
                scan.uses[tag_key(parent.type(), n.text())].type = true;
            else
                scan.uses[std::string(n.text())].type = true;
            return false;
        }
        if (t == "call_expression") {
            auto callee = n.field("function");
            if (callee.type() == "field_expression") {
                push_unique(scan.pointer_calls, std::string(callee.field("field").text()));
            } else if (callee.type() == "parenthesized_expression") {
                Node inner = callee.named_child(0);
                while (inner && (inner.type() == "pointer_expression" || inner.type() == "parenthesized_expression"))
                    inner = inner.type() == "pointer_expression" ? inner.field("argument") : inner.named_child(0);
                if (inner && inner.type() == "identifier") push_unique(scan.pointer_calls, std::string(inner.text()));
                else if (inner && inner.type() == "field_expression")
                    push_unique(scan.pointer_calls, std::string(inner.field("field").text()));
            }
        }
        return true;
    });
    return scan;
}

int count_statements(const Node& node) {
    static const std::unordered_set<std::string_view> kStatements = {
        "expression_statement", "declaration",       "return_statement", "if_statement",
        "for_statement",        "while_statement",   "do_statement",     "switch_statement",
        "break_statement",      "continue_statement", "goto_statement"};
    int count = 0;
    syntax::walk(node, [&](const Node& n) {
        if (kStatements.count(n.type())) ++count;
        return true;
    });
    return count;
}

int count_c_statements(std::string_view c_text) {
    auto tree = syntax::Tree::parse(syntax::Language::c, std::string(c_text));
    auto root = tree.root();
    for (auto child : root.named_children())
        if (child.type() == "function_definition") return count_statements(child.field("body"));
    return count_statements(root);
}

}  // namespace migratekit::csyntax

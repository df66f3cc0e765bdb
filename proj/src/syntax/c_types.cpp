#include "migratekit/syntax/c_types.hpp"

#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "migratekit/errors.hpp"
#include "migratekit/syntax/c_syntax.hpp"

namespace migratekit::ctypes {

std::string rust_ident(std::string_view name) {
    static const std::set<std::string_view> kKeywords = {
        "as",    "break",  "const", "continue", "else",    "enum",   "extern", "false",  "fn",     "for",
        "if",    "impl",   "in",    "let",      "loop",    "match",  "mod",    "move",   "mut",    "pub",
        "ref",   "return", "static", "struct",  "trait",   "true",   "type",   "unsafe", "use",    "where",
        "while", "async",  "await", "dyn",      "abstract", "become", "box",   "do",     "final",  "macro",
        "override", "priv", "typeof", "unsized", "virtual", "yield", "try",    "gen"};
    static const std::set<std::string_view> kUnrawable = {"self", "Self", "super", "crate", "_"};
    if (kUnrawable.count(name)) return std::string(name) + "_";
    if (kKeywords.count(name)) return "r#" + std::string(name);
    return std::string(name);
}

namespace {

const std::map<std::string_view, std::string_view>& primitives() {
    static const std::map<std::string_view, std::string_view> m = {
        {"void", "()"},         {"char", "i8"},          {"int", "i32"},         {"float", "f32"},
        {"double", "f64"},      {"bool", "bool"},        {"_Bool", "bool"},      {"size_t", "usize"},
        {"ssize_t", "isize"},   {"ptrdiff_t", "isize"},  {"intptr_t", "isize"},  {"uintptr_t", "usize"},
        {"int8_t", "i8"},       {"int16_t", "i16"},      {"int32_t", "i32"},     {"int64_t", "i64"},
        {"uint8_t", "u8"},      {"uint16_t", "u16"},     {"uint32_t", "u32"},    {"uint64_t", "u64"}};
    return m;
}

std::string sized_type(const Node& n) {
    int longs = 0;
    bool is_unsigned = false, is_short = false;
    std::string inner;
    for (auto c : n.children()) {
        auto t = c.text();
        if (t == "long") ++longs;
        else if (t == "short") is_short = true;
        else if (t == "unsigned") is_unsigned = true;
        else if (t == "signed") is_unsigned = false;
        else if (c.type() == "primitive_type") inner = std::string(t);
    }
    if (inner == "char") return is_unsigned ? "u8" : "i8";
    if (inner == "double") return "f64";
    std::string bits = is_short ? "16" : longs > 0 ? "64" : "32";
    return (is_unsigned ? "u" : "i") + bits;
}

}  // namespace

std::string base_type(const Node& n) {
    auto t = n.type();
    if (t == "primitive_type") {
        auto it = primitives().find(n.text());
        if (it == primitives().end())
            throw UnsupportedConstruct("C type `" + std::string(n.text()) + "` has no Rust mapping");
        return std::string(it->second);
    }
    if (t == "sized_type_specifier") return sized_type(n);
    if (t == "type_identifier") return rust_ident(n.text());
    if (t == "struct_specifier" || t == "union_specifier" || t == "enum_specifier") {
        auto name = n.field("name");
        if (!name) throw UnsupportedConstruct("anonymous " + std::string(t.substr(0, t.find('_'))) + " type");
        return rust_ident(name.text());
    }
    throw UnsupportedConstruct("C type form `" + std::string(t) + "` is outside the supported subset");
}

bool has_const_qualifier(const Node& decl) {
    for (auto c : decl.children())
        if (c.type() == "type_qualifier" && c.text() == "const") return true;
    return false;
}

namespace {

std::string pointer_to(const std::string& target, bool target_const) {
    if (target == "()") return target_const ? "*const core::ffi::c_void" : "*mut core::ffi::c_void";
    if (target.rfind("unsafe extern \"C\" fn", 0) == 0) return "Option<" + target + ">";
    return (target_const ? "*const " : "*mut ") + target;
}

std::string fn_type(const Signature& sig) {
    std::string s = "unsafe extern \"C\" fn(";
    for (std::size_t i = 0; i < sig.params.size(); ++i) {
        if (i) s += ", ";
        s += sig.params[i].second;
    }
    if (sig.variadic) s += sig.params.empty() ? "..." : ", ...";
    s += ")";
    if (!sig.ret.empty()) s += " -> " + sig.ret;
    return s;
}

void parameters(const Node& list, Signature& sig) {
    auto kids = list.named_children();
    if (kids.size() == 1 && kids[0].type() == "parameter_declaration" && !kids[0].field("declarator")) {
        auto ty = kids[0].field("type");
        if (ty.type() == "primitive_type" && ty.text() == "void") return;
    }
    int index = 0;
    for (auto p : kids) {
        if (p.type() == "variadic_parameter") {
            sig.variadic = true;
            continue;
        }
        if (p.type() != "parameter_declaration") continue;
        std::string name;
        std::string ty = base_type(p.field("type"));
        if (auto d = p.field("declarator")) ty = apply_declarator(ty, has_const_qualifier(p), d, &name);
        // Arrays decay to pointers in parameter position.
        if (!ty.empty() && ty.front() == '[') {
            auto semi = ty.rfind(';');
            ty = "*mut " + ty.substr(1, semi - 1);
        }
        if (ty == "()") throw UnsupportedConstruct("void parameter");
        if (name.empty()) name = "arg" + std::to_string(index);
        sig.params.emplace_back(rust_ident(name), ty);
        ++index;
    }
}

}  // namespace

std::string apply_declarator(std::string ty, bool is_const, const Node& d, std::string* name) {
    Node cur = d;
    while (cur) {
        auto t = cur.type();
        if (t == "identifier" || t == "field_identifier" || t == "type_identifier") {
            if (name) *name = std::string(cur.text());
            break;
        }
        if (t == "parenthesized_declarator" || t == "abstract_parenthesized_declarator") {
            cur = cur.named_child(0);
            continue;
        }
        if (t == "init_declarator" || t == "attributed_declarator") {
            cur = cur.field("declarator");
            continue;
        }
        if (t == "pointer_declarator" || t == "abstract_pointer_declarator") {
            ty = pointer_to(ty, is_const);
            is_const = has_const_qualifier(cur);
            cur = cur.field("declarator");
            continue;
        }
        if (t == "array_declarator" || t == "abstract_array_declarator") {
            auto size = cur.field("size");
            if (!size) {
                ty = pointer_to(ty, is_const);
            } else {
                auto v = eval_const(size, [](const std::string&) { return std::nullopt; });
                std::string len = v && !v->floating ? std::to_string(v->i) : std::string(size.text()) + " as usize";
                ty = "[" + ty + "; " + len + "]";
            }
            is_const = false;
            cur = cur.field("declarator");
            continue;
        }
        if (t == "function_declarator" || t == "abstract_function_declarator") {
            Signature sig;
            sig.ret = ty == "()" ? "" : ty;
            parameters(cur.field("parameters"), sig);
            ty = fn_type(sig);
            is_const = false;
            cur = cur.field("declarator");
            continue;
        }
        throw UnsupportedConstruct("declarator form `" + std::string(t) + "` is outside the supported subset");
    }
    return ty;
}

Signature function_signature(const Node& type_node, bool type_const, const Node& declarator) {
    // Find the function_declarator that binds the name; what wraps it shapes
    // the return type.
    Node fd = declarator;
    std::vector<Node> wrappers;
    while (fd && fd.type() != "function_declarator") {
        if (fd.type() == "pointer_declarator") wrappers.push_back(fd);
        fd = fd.type() == "parenthesized_declarator" ? fd.named_child(0) : fd.field("declarator");
    }
    if (!fd) throw UnsupportedConstruct("not a function declarator");
    Signature sig;
    std::string ret = base_type(type_node);
    bool c = type_const;
    for (auto& w : wrappers) {
        ret = pointer_to(ret, c);
        c = has_const_qualifier(w);
    }
    sig.ret = ret == "()" ? "" : ret;
    auto inner = csyntax::declarator_name(fd.field("declarator"));
    sig.name = inner ? std::string(inner.text()) : std::string();
    parameters(fd.field("parameters"), sig);
    return sig;
}

namespace {

std::optional<ConstValue> number(std::string_view s) {
    std::string t(s);
    bool is_hex = t.size() > 2 && t[0] == '0' && (t[1] == 'x' || t[1] == 'X');
    bool is_float = !is_hex && (t.find('.') != std::string::npos || t.find('e') != std::string::npos ||
                                t.find('E') != std::string::npos);
    ConstValue v;
    if (is_float) {
        while (!t.empty() && (t.back() == 'f' || t.back() == 'F' || t.back() == 'l' || t.back() == 'L')) t.pop_back();
        v.floating = true;
        try {
            v.f = std::stod(t);
        } catch (...) {
            return std::nullopt;
        }
        return v;
    }
    while (!t.empty() && std::string_view("uUlL").find(t.back()) != std::string_view::npos) {
        if (t.back() == 'u' || t.back() == 'U') v.is_unsigned = true;
        t.pop_back();
    }
    try {
        std::size_t used = 0;
        unsigned long long u;
        if (is_hex) u = std::stoull(t.substr(2), &used, 16), used += 2;
        else if (t.size() > 2 && t[0] == '0' && (t[1] == 'b' || t[1] == 'B')) u = std::stoull(t.substr(2), &used, 2), used += 2;
        else if (t.size() > 1 && t[0] == '0') u = std::stoull(t, &used, 8);
        else u = std::stoull(t, &used, 10);
        if (used != t.size()) return std::nullopt;
        v.i = static_cast<long long>(u);
    } catch (...) {
        return std::nullopt;
    }
    return v;
}

double as_double(const ConstValue& v) { return v.floating ? v.f : static_cast<double>(v.i); }

}  // namespace

std::optional<ConstValue> eval_const(const Node& e, const ConstLookup& lookup) {
    if (!e) return std::nullopt;
    auto t = e.type();
    if (t == "number_literal") return number(e.text());
    if (t == "char_literal") {
        auto s = e.text();
        if (s.size() == 3) return ConstValue{false, false, static_cast<unsigned char>(s[1]), 0.0};
        if (s.size() == 4 && s[1] == '\\') {
            static const std::map<char, int> esc = {{'n', 10}, {'t', 9}, {'0', 0}, {'\\', 92}, {'\'', 39}, {'r', 13}};
            auto it = esc.find(s[2]);
            if (it != esc.end()) return ConstValue{false, false, it->second, 0.0};
        }
        return std::nullopt;
    }
    if (t == "true") return ConstValue{false, false, 1, 0.0};
    if (t == "false") return ConstValue{false, false, 0, 0.0};
    if (t == "identifier") return lookup(std::string(e.text()));
    if (t == "parenthesized_expression") return eval_const(e.named_child(0), lookup);
    if (t == "cast_expression") {
        auto v = eval_const(e.field("value"), lookup);
        if (!v) return v;
        auto ty = e.field("type").text();
        bool to_unsigned = ty.find("unsigned") != std::string_view::npos || ty.find("size_t") != std::string_view::npos ||
                           (ty.find("uint") != std::string_view::npos);
        bool to_float = ty.find("double") != std::string_view::npos || ty.find("float") != std::string_view::npos;
        if (to_float) return ConstValue{true, false, 0, as_double(*v)};
        if (v->floating) v = ConstValue{false, false, static_cast<long long>(v->f), 0.0};
        v->is_unsigned = to_unsigned;
        return v;
    }
    if (t == "unary_expression") {
        auto v = eval_const(e.field("argument"), lookup);
        if (!v) return v;
        auto op = e.field("operator").text();
        if (op == "-") {
            if (v->floating) v->f = -v->f;
            else v->i = -v->i;
            return v;
        }
        if (op == "+") return v;
        if (v->floating) return std::nullopt;
        if (op == "~") {
            v->i = ~v->i;
            if (v->is_unsigned) v->i &= 0xffffffffLL;
            return v;
        }
        if (op == "!") return ConstValue{false, false, v->i == 0, 0.0};
        return std::nullopt;
    }
    if (t == "binary_expression") {
        auto a = eval_const(e.field("left"), lookup);
        auto b = eval_const(e.field("right"), lookup);
        if (!a || !b) return std::nullopt;
        auto op = e.field("operator").text();
        if (a->floating || b->floating) {
            double x = as_double(*a), y = as_double(*b);
            if (op == "+") return ConstValue{true, false, 0, x + y};
            if (op == "-") return ConstValue{true, false, 0, x - y};
            if (op == "*") return ConstValue{true, false, 0, x * y};
            if (op == "/" && y != 0) return ConstValue{true, false, 0, x / y};
            return std::nullopt;
        }
        long long x = a->i, y = b->i;
        ConstValue r{false, a->is_unsigned || b->is_unsigned, 0, 0.0};
        if (op == "+") r.i = x + y;
        else if (op == "-") r.i = x - y;
        else if (op == "*") r.i = x * y;
        else if (op == "/") {
            if (y == 0) return std::nullopt;
            r.i = x / y;
        } else if (op == "%") {
            if (y == 0) return std::nullopt;
            r.i = x % y;
        } else if (op == "<<") {
            if (y < 0 || y > 62) return std::nullopt;
            r.i = x << y;
        } else if (op == ">>") {
            if (y < 0 || y > 63) return std::nullopt;
            r.i = x >> y;
        } else if (op == "&") r.i = x & y;
        else if (op == "|") r.i = x | y;
        else if (op == "^") r.i = x ^ y;
        else if (op == "&&") r = {false, false, (x && y) ? 1 : 0, 0.0};
        else if (op == "||") r = {false, false, (x || y) ? 1 : 0, 0.0};
        else if (op == "==") r = {false, false, x == y, 0.0};
        else if (op == "!=") r = {false, false, x != y, 0.0};
        else if (op == "<") r = {false, false, x < y, 0.0};
        else if (op == ">") r = {false, false, x > y, 0.0};
        else if (op == "<=") r = {false, false, x <= y, 0.0};
        else if (op == ">=") r = {false, false, x >= y, 0.0};
        else return std::nullopt;
        return r;
    }
    if (t == "conditional_expression") {
        auto c = eval_const(e.field("condition"), lookup);
        if (!c) return c;
        bool truth = c->floating ? c->f != 0 : c->i != 0;
        return eval_const(truth ? e.field("consequence") : e.field("alternative"), lookup);
    }
    if (t == "sizeof_expression") {
        auto ty = e.field("type");
        if (!ty) return std::nullopt;
        auto tn = ty.field("type");
        if (!tn || ty.field("declarator")) {
            if (ty.field("declarator") && ty.field("declarator").type() == "abstract_pointer_declarator")
                return ConstValue{false, true, 8, 0.0};
            if (!tn) return std::nullopt;
        }
        static const std::map<std::string, long long> sizes = {
            {"i8", 1}, {"u8", 1}, {"i16", 2}, {"u16", 2}, {"i32", 4}, {"u32", 4}, {"i64", 8}, {"u64", 8},
            {"f32", 4}, {"f64", 8}, {"usize", 8}, {"isize", 8}, {"bool", 1}};
        try {
            auto it = sizes.find(base_type(tn));
            if (it != sizes.end()) return ConstValue{false, true, it->second, 0.0};
        } catch (const UnsupportedConstruct&) {
        }
        return std::nullopt;
    }
    return std::nullopt;
}

std::optional<ConstValue> eval_const_text(std::string_view text, const ConstLookup& lookup) {
    std::string src = "int __mk_const = (" + std::string(text) + ");\n";
    auto tree = syntax::Tree::parse(syntax::Language::c, src);
    auto root = tree.root();
    if (root.has_error()) return std::nullopt;
    auto decl = root.named_child(0);
    if (!decl || decl.type() != "declaration") return std::nullopt;
    auto init = decl.field("declarator");
    if (!init || init.type() != "init_declarator") return std::nullopt;
    return eval_const(init.field("value"), lookup);
}

std::string const_type(const ConstValue& v) {
    if (v.floating) return "f64";
    if (v.i >= 0 && v.i <= std::numeric_limits<std::uint32_t>::max()) return "u32";
    if (v.i < 0 && v.i >= std::numeric_limits<std::int32_t>::min() && !v.is_unsigned) return "i32";
    if (v.i >= 0 || v.is_unsigned) return "u64";
    return "i64";
}

std::string const_literal(const ConstValue& v) {
    if (v.floating) {
        std::string s = std::to_string(v.f);
        if (std::isfinite(v.f) && std::floor(v.f) == v.f && std::fabs(v.f) < 1e15) {
            s = std::to_string(static_cast<long long>(v.f)) + ".0";
        } else {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.17g", v.f);
            s = buf;
            if (s.find('.') == std::string::npos && s.find('e') == std::string::npos) s += ".0";
        }
        return s;
    }
    if (const_type(v) == "u64") return std::to_string(static_cast<unsigned long long>(v.i));
    return std::to_string(v.i);
}

std::string zero_value(const std::string& ty) {
    static const std::set<std::string> ints = {"i8", "u8", "i16", "u16", "i32", "u32", "i64",
                                               "u64", "isize", "usize"};
    if (ints.count(ty)) return "0";
    if (ty == "f32" || ty == "f64") return "0.0";
    if (ty == "bool") return "false";
    if (ty.rfind("*mut ", 0) == 0) return "core::ptr::null_mut()";
    if (ty.rfind("*const ", 0) == 0) return "core::ptr::null()";
    if (ty.rfind("Option<", 0) == 0) return "None";
    return "unsafe { core::mem::zeroed() }";
}

}  // namespace migratekit::ctypes

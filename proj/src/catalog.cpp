#include "migratekit/catalog.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "migratekit/errors.hpp"
#include "migratekit/rust_items.hpp"
#include "migratekit/syntax/c_syntax.hpp"
#include "migratekit/syntax/c_types.hpp"
#include "migratekit/syntax/tree.hpp"
#include "migratekit/util/fs.hpp"

namespace migratekit {

std::string to_string(CatalogKind kind) {
    switch (kind) {
        case CatalogKind::type: return "type";
        case CatalogKind::macro_const: return "macro-const";
        case CatalogKind::variable: return "variable";
        case CatalogKind::extern_fn: return "extern-fn";
    }
    return "type";
}

CatalogKind catalog_kind_from_string(const std::string& s) {
    if (s == "type") return CatalogKind::type;
    if (s == "macro-const") return CatalogKind::macro_const;
    if (s == "variable") return CatalogKind::variable;
    if (s == "extern-fn") return CatalogKind::extern_fn;
    throw ConfigError("unknown catalog kind `" + s + "`");
}

std::string to_string(Provenance p) {
    switch (p) {
        case Provenance::translated: return "translated";
        case Provenance::catalog: return "catalog";
        case Provenance::fallback: return "fallback";
        case Provenance::manual: return "manual";
        case Provenance::generated: return "generated";
    }
    return "generated";
}

Provenance provenance_from_string(const std::string& s) {
    if (s == "translated") return Provenance::translated;
    if (s == "catalog") return Provenance::catalog;
    if (s == "fallback") return Provenance::fallback;
    if (s == "manual") return Provenance::manual;
    if (s == "generated") return Provenance::generated;
    throw ConfigError("unknown provenance `" + s + "`");
}

void ContextCatalog::add(CatalogEntry entry) {
    auto issues = rust::check_syntax(entry.rust_text);
    if (!issues.empty())
        throw ConfigError("catalog entry `" + entry.name + "` is not a Rust item: " + issues.front().message);
    for (const auto& e : entries_)
        if (e.name == entry.name && e.kind == entry.kind)
            throw ConfigError("catalog already holds " + to_string(entry.kind) + " `" + entry.name + "`");
    entries_.push_back(std::move(entry));
}

std::vector<const CatalogEntry*> ContextCatalog::lookup(const std::string& name) const {
    std::vector<const CatalogEntry*> out;
    for (const auto& e : entries_)
        if (e.name == name) out.push_back(&e);
    std::stable_sort(out.begin(), out.end(), [](auto* a, auto* b) { return a->kind < b->kind; });
    return out;
}

ContextCatalog ContextCatalog::from_json(const nlohmann::json& j) {
    ContextCatalog c;
    for (const auto& e : j.at("entries"))
        c.add({e.at("name").get<std::string>(), catalog_kind_from_string(e.at("kind").get<std::string>()),
               e.at("rust_text").get<std::string>(),
               provenance_from_string(e.value("provenance", std::string("generated")))});
    return c;
}

ContextCatalog ContextCatalog::load(const std::filesystem::path& path) {
    try {
        return from_json(nlohmann::json::parse(fs::read_file(path)));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("catalog " + path.string() + ": " + e.what());
    }
}

nlohmann::json ContextCatalog::to_json() const {
    auto arr = nlohmann::json::array();
    for (const auto& e : entries_)
        arr.push_back({{"name", e.name},
                       {"kind", to_string(e.kind)},
                       {"rust_text", e.rust_text},
                       {"provenance", to_string(e.provenance)}});
    return {{"entries", arr}};
}

void ContextCatalog::save(const std::filesystem::path& path) const {
    fs::write_file_atomic(path, to_json().dump(2) + "\n");
}

namespace {

using syntax::Node;
using syntax::Tree;

std::string tag_name(const std::string& key) {
    auto sp = key.find(' ');
    return sp == std::string::npos ? key : key.substr(sp + 1);
}

/// C string literal body as Rust byte-string text plus its byte length, or
/// nullopt for escapes we do not translate.
std::optional<std::pair<std::string, int>> byte_string(const Node& lit) {
    std::string out;
    int len = 0;
    for (auto c : lit.named_children()) {
        if (c.type() == "string_content") {
            for (char ch : c.text()) {
                if (static_cast<unsigned char>(ch) < 0x20 || static_cast<unsigned char>(ch) >= 0x7f) return std::nullopt;
                out += ch;
                ++len;
            }
        } else if (c.type() == "escape_sequence") {
            auto t = c.text();
            static const std::set<std::string_view> simple = {"\\n", "\\t", "\\r", "\\\\", "\\\"", "\\'", "\\0"};
            if (!simple.count(t)) return std::nullopt;
            out += t == "\\'" ? "'" : std::string(t);
            ++len;
        } else {
            return std::nullopt;
        }
    }
    return std::make_pair(out + "\\0", len + 1);
}

class Generator {
public:
    Generator(const ModuleIR& m, std::vector<SkippedDecl>* skipped) : module_(m), skipped_(skipped) {}

    ContextCatalog run() {
        index();
        for (const auto& d : module_.declarations) {
            try {
                switch (d.kind) {
                    case DeclKind::macro: macro(d); break;
                    case DeclKind::type: type(d); break;
                    case DeclKind::variable: variable(d); break;
                    case DeclKind::function: prototype(d.text, d); break;
                }
            } catch (const UnsupportedConstruct& e) {
                skip(d.names.empty() ? std::string() : d.names.front(), d, e.what());
            }
        }
        for (const auto& f : module_.functions) {
            ModuleDecl d;
            d.file = f.file;
            d.line = f.start_line;
            d.names = {f.name};
            try {
                prototype(f.signature, d);
            } catch (const UnsupportedConstruct& e) {
                skip(f.name, d, e.what());
            }
        }
        return std::move(catalog_);
    }

private:
    const ModuleIR& module_;
    std::vector<SkippedDecl>* skipped_;
    ContextCatalog catalog_;
    std::set<std::string> defined_tags_;   // "struct x" keys with a body somewhere
    std::set<std::string> defined_vars_;
    std::map<std::string, const ModuleDecl*> macros_;
    std::map<std::string, ctypes::ConstValue> constants_;
    std::set<std::string> evaluating_;

    void skip(const std::string& name, const ModuleDecl& d, const std::string& reason) {
        if (skipped_) skipped_->push_back({name, d.file, d.line, reason});
    }

    void index() {
        for (const auto& d : module_.declarations) {
            if (d.kind == DeclKind::type && d.is_definition)
                for (const auto& n : d.names)
                    if (n.find(' ') != std::string::npos) defined_tags_.insert(n);
            if (d.kind == DeclKind::variable && d.is_definition)
                for (const auto& n : d.names) defined_vars_.insert(n);
            if (d.kind == DeclKind::macro && !d.function_like_macro) macros_.emplace(d.names.front(), &d);
        }
        for (const auto& d : module_.declarations)
            if (d.enumerators) enum_values(d);
    }

    std::optional<ctypes::ConstValue> constant(const std::string& name) {
        auto it = constants_.find(name);
        if (it != constants_.end()) return it->second;
        auto m = macros_.find(name);
        if (m == macros_.end() || evaluating_.count(name)) return std::nullopt;
        evaluating_.insert(name);
        auto tree = Tree::parse(syntax::Language::c, m->second->text + "\n");
        auto def = tree.root().named_child(0);
        std::optional<ctypes::ConstValue> v;
        if (def && def.field("value"))
            v = ctypes::eval_const_text(def.field("value").text(), [this](const std::string& n) { return constant(n); });
        evaluating_.erase(name);
        if (v) constants_[name] = *v;
        return v;
    }

    ctypes::ConstLookup lookup() {
        return [this](const std::string& n) { return constant(n); };
    }

    Node enum_body(const Node& root) {
        Node found;
        std::function<void(const Node&)> walk = [&](const Node& n) {
            if (found) return;
            if (n.type() == "enum_specifier" && n.field("body")) {
                found = n;
                return;
            }
            for (auto c : n.named_children()) walk(c);
        };
        walk(root);
        return found;
    }

    void enum_values(const ModuleDecl& d) {
        auto tree = Tree::parse(syntax::Language::c, d.text + "\n");
        auto spec = enum_body(tree.root());
        if (!spec) return;
        long long next = 0;
        for (auto e : spec.field("body").named_children()) {
            if (e.type() != "enumerator") continue;
            std::string name(e.field("name").text());
            if (auto v = e.field("value")) {
                auto cv = ctypes::eval_const(v, lookup());
                if (!cv || cv->floating) continue;
                next = cv->i;
            }
            constants_[name] = ctypes::ConstValue{false, false, next, 0.0};
            ++next;
        }
    }

    void add(const std::string& name, CatalogKind kind, std::string text, const ModuleDecl& d) {
        for (auto* e : catalog_.lookup(name)) {
            if (e->kind != kind) continue;
            if (e->rust_text != text) skip(name, d, "conflicts with an earlier " + to_string(kind) + " of that name");
            return;
        }
        catalog_.add({name, kind, std::move(text), Provenance::generated});
    }

    void macro(const ModuleDecl& d) {
        if (d.function_like_macro) {
            skip(d.names.front(), d, "function-like macro");
            return;
        }
        const auto& name = d.names.front();
        auto v = constant(name);
        if (v) {
            add(name, CatalogKind::macro_const,
                "pub const " + ctypes::rust_ident(name) + ": " + ctypes::const_type(*v) + " = " +
                    ctypes::const_literal(*v) + ";",
                d);
            return;
        }
        auto tree = Tree::parse(syntax::Language::c, d.text + "\n");
        auto def = tree.root().named_child(0);
        if (def && def.field("value")) {
            auto value_tree = Tree::parse(syntax::Language::c, "char *x = " + std::string(def.field("value").text()) + ";\n");
            auto init = value_tree.root().named_child(0).field("declarator").field("value");
            if (init && init.type() == "string_literal" && !value_tree.root().has_error()) {
                if (auto bs = byte_string(init)) {
                    add(name, CatalogKind::macro_const,
                        "pub const " + ctypes::rust_ident(name) + ": &[u8; " + std::to_string(bs->second) + "] = b\"" +
                            bs->first + "\";",
                        d);
                    return;
                }
            }
        }
        skip(name, d, def && def.field("value") ? "macro body is not a constant" : "macro has no value");
    }

    std::string fields(const Node& body) {
        std::string out;
        for (auto f : body.named_children()) {
            if (f.type() == "comment") continue;
            if (f.type() != "field_declaration") throw UnsupportedConstruct("field form `" + std::string(f.type()) + "`");
            for (auto c : f.named_children())
                if (c.type() == "bitfield_clause") throw UnsupportedConstruct("bit-field");
            auto type_node = f.field("type");
            std::string base = ctypes::base_type(type_node);
            bool is_const = ctypes::has_const_qualifier(f);
            bool any = false;
            for (std::uint32_t i = 0; i < f.child_count(); ++i) {
                if (f.field_name_of_child(i) != "declarator") continue;
                std::string fname;
                auto ty = ctypes::apply_declarator(base, is_const, f.child(i), &fname);
                out += "    pub " + ctypes::rust_ident(fname) + ": " + ty + ",\n";
                any = true;
            }
            if (!any) throw UnsupportedConstruct("anonymous member");
        }
        return out;
    }

    void record(const Node& spec, const std::string& rust_name, const ModuleDecl& d) {
        bool is_union = spec.type() == "union_specifier";
        std::string text = "#[repr(C)]\n#[derive(Clone, Copy)]\npub " + std::string(is_union ? "union " : "struct ") +
                           ctypes::rust_ident(rust_name) + " {\n" + fields(spec.field("body")) + "}";
        add(rust_name, CatalogKind::type, text, d);
    }

    void enumeration(const Node& spec, const std::string& rust_name, const ModuleDecl& d) {
        bool negative = false;
        std::vector<std::string> names;
        for (auto e : spec.field("body").named_children()) {
            if (e.type() != "enumerator") continue;
            std::string n(e.field("name").text());
            auto it = constants_.find(n);
            if (it == constants_.end()) {
                skip(n, d, "enumerator value is not a constant");
                continue;
            }
            negative |= it->second.i < 0;
            names.push_back(n);
        }
        std::string repr = negative ? "i32" : "u32";
        std::string alias = rust_name.empty() ? repr : ctypes::rust_ident(rust_name);
        if (!rust_name.empty()) add(rust_name, CatalogKind::type, "pub type " + alias + " = " + repr + ";", d);
        for (const auto& n : names)
            add(n, CatalogKind::macro_const,
                "pub const " + ctypes::rust_ident(n) + ": " + alias + " = " + std::to_string(constants_[n].i) + ";", d);
    }

    void opaque(const std::string& key, const ModuleDecl& d) {
        if (defined_tags_.count(key)) return;
        auto name = tag_name(key);
        add(name, CatalogKind::type,
            "#[repr(C)]\npub struct " + ctypes::rust_ident(name) + " {\n    _opaque: [u8; 0],\n}", d);
    }

    void tag(const Node& spec, const std::string& fallback_name, const ModuleDecl& d) {
        auto name_node = spec.field("name");
        std::string name = name_node ? std::string(name_node.text()) : fallback_name;
        std::string kw(spec.type().substr(0, spec.type().find('_')));
        if (!spec.field("body")) {
            if (name_node && kw != "enum") opaque(kw + " " + name, d);
            return;
        }
        if (kw == "enum") enumeration(spec, name, d);
        else if (!name.empty()) record(spec, name, d);
        else throw UnsupportedConstruct("anonymous " + kw);
    }

    void type(const ModuleDecl& d) {
        auto tree = Tree::parse(syntax::Language::c, d.text + "\n");
        for (auto n : tree.root().named_children()) {
            if (n.type() == "type_definition") {
                auto type_node = n.field("type");
                bool is_tag = type_node.type() == "struct_specifier" || type_node.type() == "union_specifier" ||
                              type_node.type() == "enum_specifier";
                std::vector<std::pair<std::string, Node>> decls;
                for (std::uint32_t i = 0; i < n.child_count(); ++i)
                    if (n.field_name_of_child(i) == "declarator") {
                        auto id = csyntax::declarator_name(n.child(i));
                        if (id) decls.emplace_back(std::string(id.text()), n.child(i));
                    }
                if (decls.empty()) continue;
                // An anonymous tagged body takes the first typedef name.
                if (is_tag) tag(type_node, type_node.field("name") ? "" : decls.front().first, d);
                for (const auto& [alias, declarator] : decls) {
                    if (is_tag && !type_node.field("name") && alias == decls.front().first &&
                        declarator.type() == "type_identifier" && type_node.field("body"))
                        continue;
                    auto ty = ctypes::apply_declarator(ctypes::base_type(type_node), ctypes::has_const_qualifier(n),
                                                       declarator, nullptr);
                    if (ty == ctypes::rust_ident(alias)) continue;
                    add(alias, CatalogKind::type, "pub type " + ctypes::rust_ident(alias) + " = " + ty + ";", d);
                }
            } else if (n.type() == "struct_specifier" || n.type() == "union_specifier" || n.type() == "enum_specifier") {
                tag(n, "", d);
            } else if (n.type() == "declaration") {
                auto t = n.field("type");
                if (t.type() == "struct_specifier" || t.type() == "union_specifier" || t.type() == "enum_specifier")
                    tag(t, "", d);
            }
        }
    }

    std::string initializer(const std::string& ty, const Node& value) {
        if (!value) return ctypes::zero_value(ty);
        if (value.type() == "string_literal" && (ty == "*mut i8" || ty == "*const i8" || ty == "*const u8" || ty == "*mut u8")) {
            if (auto bs = byte_string(value)) return "b\"" + bs->first + "\".as_ptr() as " + ty;
        }
        if (value.type() == "initializer_list" && ty.front() == '[') {
            auto semi = ty.rfind(';');
            std::string elem = ty.substr(1, semi - 1);
            std::string out = "[";
            int count = 0;
            for (auto c : value.named_children()) {
                auto s = scalar(elem, c);
                if (!s) return ctypes::zero_value(ty);
                out += (count++ ? ", " : "") + *s;
            }
            long long len = -1;
            try {
                len = std::stoll(ty.substr(semi + 2, ty.size() - semi - 3));
            } catch (...) {
                return ctypes::zero_value(ty);
            }
            for (; count < len; ++count) out += (count ? ", " : "") + ctypes::zero_value(elem);
            return out + "]";
        }
        if (auto s = scalar(ty, value)) return *s;
        return ctypes::zero_value(ty);
    }

    std::optional<std::string> scalar(const std::string& ty, const Node& value) {
        static const std::set<std::string> ints = {"i8", "u8", "i16", "u16", "i32", "u32", "i64", "u64", "isize", "usize"};
        auto v = ctypes::eval_const(value, lookup());
        if (!v) return std::nullopt;
        if (ints.count(ty)) {
            long long i = v->floating ? static_cast<long long>(v->f) : v->i;
            return i < 0 && ty.front() == 'u' ? "(" + std::to_string(i) + "i64) as " + ty : std::to_string(i);
        }
        if (ty == "f32" || ty == "f64") {
            ctypes::ConstValue f{true, false, 0, v->floating ? v->f : static_cast<double>(v->i)};
            return ctypes::const_literal(f);
        }
        if (ty == "bool") return (v->floating ? v->f != 0 : v->i != 0) ? "true" : "false";
        if (!v->floating && v->i == 0 && (ty.rfind("*", 0) == 0 || ty.rfind("Option<", 0) == 0)) return ctypes::zero_value(ty);
        return std::nullopt;
    }

    void variable(const ModuleDecl& d) {
        auto tree = Tree::parse(syntax::Language::c, d.text + "\n");
        auto n = tree.root().named_child(0);
        if (!n || n.type() != "declaration") throw UnsupportedConstruct("variable declaration form");
        auto type_node = n.field("type");
        std::string base = ctypes::base_type(type_node);
        bool is_const = ctypes::has_const_qualifier(n);
        for (std::uint32_t i = 0; i < n.child_count(); ++i) {
            if (n.field_name_of_child(i) != "declarator") continue;
            auto decl = n.child(i);
            if (csyntax::declares_function(decl)) continue;
            Node value;
            Node inner = decl;
            if (decl.type() == "init_declarator") {
                value = decl.field("value");
                inner = decl.field("declarator");
            }
            std::string name;
            std::string ty;
            if (inner.type() == "array_declarator" && !inner.field("size") && value &&
                value.type() == "initializer_list") {
                ty = "[" + ctypes::apply_declarator(base, is_const, inner.field("declarator"), &name) + "; " +
                     std::to_string(value.named_child_count()) + "]";
            } else {
                ty = ctypes::apply_declarator(base, is_const, inner, &name);
            }
            if (!d.is_definition) {
                if (defined_vars_.count(name)) continue;
                add(name, CatalogKind::variable,
                    "extern \"C\" {\n    pub static mut " + ctypes::rust_ident(name) + ": " + ty + ";\n}", d);
                continue;
            }
            bool plain = ty.find('*') == std::string::npos && ty.find("Option<") == std::string::npos;
            std::string kw = is_const && plain ? "pub static " : "pub static mut ";
            add(name, CatalogKind::variable, kw + ctypes::rust_ident(name) + ": " + ty + " = " + initializer(ty, value) + ";",
                d);
        }
    }

    void prototype(const std::string& text, const ModuleDecl& d) {
        auto tree = Tree::parse(syntax::Language::c, text + "\n");
        auto n = tree.root().named_child(0);
        if (!n || n.type() != "declaration" || tree.root().has_error())
            throw UnsupportedConstruct("prototype form");
        for (std::uint32_t i = 0; i < n.child_count(); ++i) {
            if (n.field_name_of_child(i) != "declarator") continue;
            auto decl = n.child(i);
            if (!csyntax::declares_function(decl)) continue;
            auto sig = ctypes::function_signature(n.field("type"), ctypes::has_const_qualifier(n), decl);
            std::string line = "    pub fn " + ctypes::rust_ident(sig.name) + "(";
            for (std::size_t k = 0; k < sig.params.size(); ++k)
                line += (k ? ", " : "") + sig.params[k].first + ": " + sig.params[k].second;
            if (sig.variadic) line += sig.params.empty() ? "..." : ", ...";
            line += ")";
            if (!sig.ret.empty()) line += " -> " + sig.ret;
            add(sig.name, CatalogKind::extern_fn, "extern \"C\" {\n" + line + ";\n}", d);
        }
    }
};

}  // namespace

ContextCatalog generate_catalog(const ModuleIR& module, std::vector<SkippedDecl>* skipped) {
    return Generator(module, skipped).run();
}

}  // namespace migratekit

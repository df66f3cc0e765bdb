#include "migratekit/naive_transpiler.hpp"

#include <functional>
#include <map>
#include <memory>
#include <set>
#include <vector>

#include "migratekit/catalog.hpp"
#include "migratekit/errors.hpp"
#include "migratekit/syntax/c_syntax.hpp"
#include "migratekit/syntax/c_types.hpp"
#include "migratekit/syntax/tree.hpp"

namespace migratekit {

namespace {

using syntax::Node;

struct Expr {
    std::string s;
    std::string ty;        // Rust type when known; "bool" for conditions
    bool literal = false;  // untyped numeric literal
    bool null = false;     // NULL or a literal 0 usable as a pointer
};

bool is_numeric(const std::string& t) {
    static const std::set<std::string> n = {"i8", "u8", "i16", "u16", "i32", "u32", "i64",
                                            "u64", "isize", "usize", "f32", "f64"};
    return n.count(t) > 0;
}
bool is_float(const std::string& t) { return t == "f32" || t == "f64"; }
bool is_pointer(const std::string& t) { return t.rfind("*mut ", 0) == 0 || t.rfind("*const ", 0) == 0; }
bool is_array(const std::string& t) { return !t.empty() && t.front() == '['; }

std::string pointee(const std::string& t) {
    if (t.rfind("*mut ", 0) == 0) return t.substr(5);
    if (t.rfind("*const ", 0) == 0) return t.substr(7);
    if (is_array(t)) return t.substr(1, t.rfind(';') - 1);
    return {};
}

std::string null_for(const std::string& t) {
    return t.rfind("*const ", 0) == 0 ? "core::ptr::null()" : "core::ptr::null_mut()";
}

std::string text_of_type(const Node& n) {
    std::string out;
    bool space = false;
    for (char c : n.text()) {
        if (c == ' ' || c == '\n' || c == '\t') {
            space = true;
            continue;
        }
        if (space && !out.empty()) out += ' ';
        space = false;
        out += c;
    }
    return out;
}

[[noreturn]] void unsupported(const Node& n, const std::string& what) {
    throw UnsupportedConstruct(what + " at line " + std::to_string(n.start_line()) + " is outside the naive subset");
}

class Transpiler {
public:
    explicit Transpiler(const TypeEnv& env) : env_(env) {}

    std::string run(std::string_view c_function) {
        tree_ = std::make_unique<syntax::Tree>(syntax::Tree::parse(syntax::Language::c, std::string(c_function)));
        auto root = tree_->root();
        if (root.has_error()) throw UnsupportedConstruct("C function does not parse");
        Node fn;
        for (auto c : root.named_children())
            if (c.type() == "function_definition") fn = c;
        if (!fn) throw UnsupportedConstruct("no function definition to transpile");

        auto sig = ctypes::function_signature(fn.field("type"), ctypes::has_const_qualifier(fn), fn.field("declarator"));
        if (sig.variadic) unsupported(fn, "variadic definition");
        ret_ = sig.ret;
        scopes_.emplace_back();
        std::string head = "pub unsafe extern \"C\" fn " + ctypes::rust_ident(sig.name) + "(";
        for (std::size_t i = 0; i < sig.params.size(); ++i) {
            head += (i ? ", " : "") + std::string("mut ") + sig.params[i].first + ": " + sig.params[i].second;
            declare(sig.params[i].first, sig.params[i].second);
        }
        head += ")";
        if (!ret_.empty()) head += " -> " + ret_;
        out_ = head + " {\n";
        auto body = fn.field("body");
        indent_ = 1;
        block_items(body);
        if (!ret_.empty()) {
            auto kids = body.named_children();
            bool ends_in_return = !kids.empty() && kids.back().type() == "return_statement";
            if (!ends_in_return) line("unreachable!()");
        }
        out_ += "}";
        return out_;
    }

private:
    const TypeEnv& env_;
    std::unique_ptr<syntax::Tree> tree_;
    std::string out_;
    int indent_ = 0;
    std::string ret_;
    std::vector<std::map<std::string, std::string>> scopes_;
    int label_seq_ = 0;
    struct Target {
        std::string break_label;
        std::string continue_label;  // empty for switches
    };
    std::vector<Target> targets_;

    void line(const std::string& s) { out_ += std::string(indent_ * 4, ' ') + s + "\n"; }

    void declare(const std::string& name, const std::string& ty) { scopes_.back()[name] = ty; }
    std::string type_of(const std::string& name) const {
        for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
            auto f = it->find(name);
            if (f != it->end()) return f->second;
        }
        auto g = env_.globals.find(name);
        return g == env_.globals.end() ? std::string() : g->second;
    }

    std::string resolve_alias(std::string ty) const {
        for (int guard = 0; guard < 16; ++guard) {
            auto a = env_.aliases.find(ty);
            if (a == env_.aliases.end()) break;
            ty = a->second;
        }
        return ty;
    }

    std::string field_type(const std::string& record, const std::string& field) const {
        auto r = env_.fields.find(resolve_alias(record));
        if (r == env_.fields.end()) return {};
        auto f = r->second.find(field);
        return f == r->second.end() ? std::string() : f->second;
    }

    // ---- expressions

    std::string conv(const Expr& e, const std::string& want) {
        if (want.empty()) return e.ty == "bool" ? "((" + e.s + ") as i32)" : e.s;
        if (want == "bool") return cond(e);
        if ((e.null || (e.literal && e.s == "0")) && is_pointer(want)) return null_for(want);
        if (e.ty == "bool") return "((" + e.s + ") as " + want + ")";
        if (e.literal) return is_float(want) && e.s.find('.') == std::string::npos ? "((" + e.s + ") as " + want + ")" : e.s;
        if (e.ty.empty() || e.ty == want) return e.s;
        if ((is_numeric(e.ty) && is_numeric(want)) || (is_pointer(e.ty) && is_pointer(want)))
            return "((" + e.s + ") as " + want + ")";
        if (is_array(e.ty) && is_pointer(want)) return e.s + ".as_mut_ptr()";
        return e.s;
    }

    std::string cond(const Expr& e) {
        if (e.ty == "bool") return e.s;
        if (is_pointer(e.ty)) return "!(" + e.s + ").is_null()";
        if (is_float(e.ty)) return "(" + e.s + ") != 0.0";
        return "(" + e.s + ") != 0";
    }

    std::string literal(std::string_view text) {
        std::string t(text);
        bool hex = t.size() > 2 && t[0] == '0' && (t[1] == 'x' || t[1] == 'X');
        bool flt = !hex && (t.find('.') != std::string::npos || t.find('e') != std::string::npos ||
                            t.find('E') != std::string::npos);
        while (!t.empty() && std::string_view(flt ? "fFlL" : "uUlL").find(t.back()) != std::string_view::npos)
            t.pop_back();
        if (flt) {
            if (t.back() == '.') t += "0";
            if (t.front() == '.') t = "0" + t;
            return t;
        }
        if (!hex && t.size() > 1 && t[0] == '0') return "0o" + t.substr(1);
        return t;
    }

    std::string rust_type(const Node& type_descriptor) {
        auto base = ctypes::base_type(type_descriptor.field("type"));
        auto decl = type_descriptor.field("declarator");
        if (!decl) return base;
        return ctypes::apply_declarator(base, ctypes::has_const_qualifier(type_descriptor), decl, nullptr);
    }

    Expr expr(const Node& n) {
        auto t = n.type();
        if (t == "number_literal") {
            auto s = literal(n.text());
            return {s, "", true, false};
        }
        if (t == "char_literal") {
            auto v = ctypes::eval_const(n, [](const std::string&) { return std::nullopt; });
            if (!v) unsupported(n, "character literal");
            return {std::to_string(v->i), "", true, false};
        }
        if (t == "true" || t == "false") return {std::string(t), "bool"};
        if (t == "null") return {"core::ptr::null_mut()", "", false, true};
        if (t == "string_literal" || t == "concatenated_string") {
            std::string bytes;
            std::vector<Node> parts = t == "string_literal" ? std::vector<Node>{n} : n.named_children();
            for (auto& p : parts)
                for (auto c : p.named_children()) bytes += c.text();
            return {"b\"" + bytes + "\\0\".as_ptr() as *mut i8", "*mut i8"};
        }
        if (t == "identifier") {
            std::string name(n.text());
            if (name == "NULL") return {"core::ptr::null_mut()", "", false, true};
            return {ctypes::rust_ident(name), resolve_alias(type_of(name))};
        }
        if (t == "parenthesized_expression") {
            auto inner = expr(n.named_child(0));
            inner.s = "(" + inner.s + ")";
            return inner;
        }
        if (t == "binary_expression") return binary(n);
        if (t == "unary_expression") {
            auto op = n.field("operator").text();
            auto a = expr(n.field("argument"));
            if (op == "!") return {"!(" + cond(a) + ")", "bool"};
            if (op == "-") return {"-" + a.s, a.ty, a.literal, false};
            if (op == "+") return a;
            if (op == "~") return {"!" + a.s, a.ty, a.literal, false};
            unsupported(n, "unary operator");
        }
        if (t == "pointer_expression") {
            auto op = n.field("operator").text();
            auto arg = n.field("argument");
            if (op == "*") {
                auto a = expr(arg);
                return {"*" + a.s, pointee(a.ty)};
            }
            auto a = lvalue(arg);
            std::string ty = a.ty.empty() ? "" : "*mut " + a.ty;
            return {"core::ptr::addr_of_mut!(" + a.s + ")", ty};
        }
        if (t == "field_expression") {
            auto base = expr(n.field("argument"));
            std::string field = ctypes::rust_ident(n.field("field").text());
            bool arrow = n.child(1).text() == "->";
            std::string record = arrow ? pointee(resolve_alias(base.ty)) : base.ty;
            return {arrow ? "(*" + base.s + ")." + field : base.s + "." + field,
                    resolve_alias(field_type(record, std::string(n.field("field").text())))};
        }
        if (t == "subscript_expression") return subscript(n);
        if (t == "call_expression") {
            auto fn = n.field("function");
            if (fn.type() != "identifier") unsupported(n, "indirect call");
            std::string callee = ctypes::rust_ident(fn.text());
            // Function pointers are Option-wrapped on the Rust side.
            if (type_of(std::string(fn.text())).rfind("Option<", 0) == 0) callee = callee + ".unwrap()";
            std::string s = callee + "(";
            std::string ret;
            if (auto r = env_.returns.find(std::string(fn.text())); r != env_.returns.end()) ret = r->second;
            int i = 0;
            for (auto a : n.field("arguments").named_children()) {
                if (a.type() == "comment") continue;
                s += (i++ ? ", " : "") + conv(expr(a), "");
            }
            return {s + ")", resolve_alias(ret)};
        }
        if (t == "cast_expression") {
            auto ty = rust_type(n.field("type"));
            auto v = expr(n.field("value"));
            if (ty == "()") return {"{ let _ = " + v.s + "; }", "()"};
            if (v.null && is_pointer(ty)) return {null_for(ty), ty, false, true};
            if (v.ty == "bool") return {"((" + v.s + ") as " + ty + ")", ty};
            return {"((" + v.s + ") as " + ty + ")", ty};
        }
        if (t == "sizeof_expression") {
            if (auto ty = n.field("type")) return {"core::mem::size_of::<" + rust_type(ty) + ">()", "usize"};
            auto v = n.field("value");
            if (v && v.type() == "parenthesized_expression") v = v.named_child(0);
            if (v && v.type() == "identifier" && !type_of(std::string(v.text())).empty())
                return {"core::mem::size_of::<" + type_of(std::string(v.text())) + ">()", "usize"};
            unsupported(n, "sizeof of an untyped expression");
        }
        if (t == "conditional_expression") {
            auto c = expr(n.field("condition"));
            auto a = expr(n.field("consequence"));
            auto b = expr(n.field("alternative"));
            std::string ty = !a.ty.empty() ? a.ty : b.ty;
            return {"(if " + cond(c) + " { " + conv(a, ty == "bool" ? "" : ty) + " } else { " +
                        conv(b, ty == "bool" ? "" : ty) + " })",
                    ty == "bool" ? "i32" : ty, a.literal && b.literal, false};
        }
        unsupported(n, "expression `" + std::string(t) + "`");
    }

    Expr lvalue(const Node& n) {
        auto t = n.type();
        if (t == "identifier" || t == "field_expression" || t == "subscript_expression" ||
            t == "parenthesized_expression" || (t == "pointer_expression" && n.field("operator").text() == "*"))
            return expr(n);
        unsupported(n, "assignment target");
    }

    Expr subscript(const Node& n) {
        auto base = expr(n.field("argument"));
        auto idx = expr(n.field("index"));
        std::string elem = pointee(base.ty);
        if (is_array(base.ty)) return {base.s + "[(" + idx.s + ") as usize]", elem};
        return {"*" + base.s + ".offset((" + idx.s + ") as isize)", elem};
    }

    Expr binary(const Node& n) {
        auto op = std::string(n.field("operator").text());
        auto a = expr(n.field("left"));
        auto b = expr(n.field("right"));
        if (op == "&&" || op == "||") return {"(" + cond(a) + " " + op + " " + cond(b) + ")", "bool"};
        bool compare = op == "==" || op == "!=" || op == "<" || op == ">" || op == "<=" || op == ">=";
        // A literal 0 only means NULL next to something known to be a pointer.
        if (is_pointer(a.ty) && b.literal && b.s == "0") b.null = true;
        if (is_pointer(b.ty) && a.literal && a.s == "0") a.null = true;
        if (is_pointer(a.ty) || is_pointer(b.ty) || a.null || b.null) {
            if (compare) {
                if (b.null && (op == "==" || op == "!=")) return {std::string(op == "!=" ? "!" : "") + "(" + a.s + ").is_null()", "bool"};
                if (a.null && (op == "==" || op == "!=")) return {std::string(op == "!=" ? "!" : "") + "(" + b.s + ").is_null()", "bool"};
                return {"(" + a.s + " " + op + " " + b.s + ")", "bool"};
            }
            if (is_pointer(a.ty) && (op == "+" || op == "-") && !is_pointer(b.ty))
                return {"(" + a.s + ").offset(" + (op == "-" ? "-" : std::string()) + "((" + b.s + ") as isize))", a.ty};
            if (is_pointer(a.ty) && is_pointer(b.ty) && op == "-")
                return {"((" + a.s + ").offset_from(" + b.s + ") as isize)", "isize"};
        }
        std::string ty = a.literal ? b.ty : a.ty;
        if (ty == "bool") ty = "i32";
        std::string want = is_numeric(ty) ? ty : "";
        bool shift = op == "<<" || op == ">>";
        std::string lhs = conv(a, want);
        std::string rhs = shift ? conv(b, "u32") : conv(b, want);
        if (shift && b.literal) rhs = b.s;
        if (compare) return {"(" + lhs + " " + op + " " + rhs + ")", "bool"};
        return {"(" + lhs + " " + op + " " + rhs + ")", ty, a.literal && b.literal, false};
    }

    // ---- statements

    void block_items(const Node& compound) {
        for (auto c : compound.named_children()) statement(c);
    }

    void scoped_block(const Node& n) {
        scopes_.emplace_back();
        if (n.type() == "compound_statement") block_items(n);
        else statement(n);
        scopes_.pop_back();
    }

    void declaration(const Node& n, bool is_static) {
        auto base = ctypes::base_type(n.field("type"));
        bool is_const = ctypes::has_const_qualifier(n);
        for (std::uint32_t i = 0; i < n.child_count(); ++i) {
            if (n.field_name_of_child(i) != "declarator") continue;
            auto d = n.child(i);
            if (csyntax::declares_function(d)) continue;
            Node value;
            Node inner = d;
            if (d.type() == "init_declarator") {
                value = d.field("value");
                inner = d.field("declarator");
            }
            std::string name;
            std::string ty;
            if (inner.type() == "array_declarator" && !inner.field("size") && value &&
                value.type() == "initializer_list")
                ty = "[" + ctypes::apply_declarator(base, is_const, inner.field("declarator"), &name) + "; " +
                     std::to_string(value.named_child_count()) + "]";
            else
                ty = ctypes::apply_declarator(base, is_const, inner, &name);
            std::string init = initializer(ty, value);
            if (is_static) line("static mut " + ctypes::rust_ident(name) + ": " + ty + " = " + init + ";");
            else line("let mut " + ctypes::rust_ident(name) + ": " + ty + " = " + init + ";");
            declare(name, ty);
        }
    }

    std::string initializer(const std::string& ty, const Node& value) {
        if (!value) return ctypes::zero_value(ty);
        if (value.type() == "initializer_list") {
            if (!is_array(ty)) unsupported(value, "aggregate initializer");
            std::string elem = pointee(ty);
            auto semi = ty.rfind(';');
            long long len = std::stoll(ty.substr(semi + 2, ty.size() - semi - 3));
            std::string s = "[";
            long long k = 0;
            for (auto c : value.named_children()) s += (k++ ? ", " : "") + conv(expr(c), elem);
            for (; k < len; ++k) s += (k ? ", " : "") + ctypes::zero_value(elem);
            return s + "]";
        }
        return conv(expr(value), ty);
    }

    std::string label(char kind, int id) { return "'" + std::string(1, kind) + std::to_string(id); }

    bool contains_continue(const Node& n) {
        bool found = false;
        syntax::walk(n, [&](const Node& c) {
            auto t = c.type();
            if (found) return false;
            if (c != n && (t == "for_statement" || t == "while_statement" || t == "do_statement")) return false;
            if (t == "continue_statement") found = true;
            return !found;
        });
        return found;
    }

    void loop_body(const Node& body, const std::string& cont) {
        if (!cont.empty()) {
            line(cont + ": {");
            ++indent_;
            scoped_block(body);
            --indent_;
            line("}");
        } else {
            scoped_block(body);
        }
    }

    void statement(const Node& n) {
        auto t = n.type();
        if (t == "comment") return;
        if (t == "declaration") {
            bool is_static = false;
            for (auto c : n.named_children())
                if (c.type() == "storage_class_specifier") {
                    if (c.text() == "static") is_static = true;
                    else if (c.text() != "register" && c.text() != "auto") unsupported(n, "storage class");
                }
            declaration(n, is_static);
            return;
        }
        if (t == "compound_statement") {
            line("{");
            ++indent_;
            scoped_block(n);
            --indent_;
            line("}");
            return;
        }
        if (t == "expression_statement") {
            if (n.named_child_count() == 0) return;
            expression_statement(n.named_child(0));
            return;
        }
        if (t == "return_statement") {
            if (n.named_child_count() == 0) line("return;");
            else line("return " + conv(expr(n.named_child(0)), ret_) + ";");
            return;
        }
        if (t == "if_statement") {
            if_chain(n);
            return;
        }
        if (t == "while_statement") {
            int id = ++label_seq_;
            auto c = n.field("condition").named_child(0);
            bool forever = c.type() == "number_literal" && c.text() != "0";
            targets_.push_back({label('l', id), label('l', id)});
            line(label('l', id) + ": " + (forever ? std::string("loop") : "while " + cond(expr(c))) + " {");
            ++indent_;
            scoped_block(n.field("body"));
            --indent_;
            line("}");
            targets_.pop_back();
            return;
        }
        if (t == "do_statement") {
            int id = ++label_seq_;
            bool cont = contains_continue(n.field("body"));
            targets_.push_back({label('l', id), cont ? label('c', id) : label('l', id)});
            line(label('l', id) + ": loop {");
            ++indent_;
            loop_body(n.field("body"), cont ? label('c', id) : "");
            line("if !(" + cond(expr(n.field("condition").named_child(0))) + ") {");
            line("    break;");
            line("}");
            --indent_;
            line("}");
            targets_.pop_back();
            return;
        }
        if (t == "for_statement") {
            for_statement(n);
            return;
        }
        if (t == "break_statement") {
            if (targets_.empty()) unsupported(n, "break outside a loop");
            line("break " + targets_.back().break_label + ";");
            return;
        }
        if (t == "continue_statement") {
            for (auto it = targets_.rbegin(); it != targets_.rend(); ++it) {
                if (it->continue_label.empty()) continue;
                bool is_loop_label = it->continue_label[1] == 'l';
                line((is_loop_label ? "continue " : "break ") + it->continue_label + ";");
                return;
            }
            unsupported(n, "continue outside a loop");
        }
        if (t == "switch_statement") {
            switch_statement(n);
            return;
        }
        unsupported(n, "statement `" + std::string(t) + "`");
    }

    void if_chain(Node n) {
        line("if " + cond(expr(n.field("condition").named_child(0))) + " {");
        while (true) {
            ++indent_;
            scoped_block(n.field("consequence"));
            --indent_;
            auto alt = n.field("alternative");
            if (alt && alt.type() == "else_clause") alt = alt.named_child(0);
            if (!alt) break;
            if (alt.type() == "if_statement") {
                line("} else if " + cond(expr(alt.field("condition").named_child(0))) + " {");
                n = alt;
                continue;
            }
            line("} else {");
            ++indent_;
            scoped_block(alt);
            --indent_;
            break;
        }
        line("}");
    }

    void for_statement(const Node& n) {
        int id = ++label_seq_;
        auto init = n.field("initializer");
        auto condition = n.field("condition");
        auto update = n.field("update");
        line("{");
        ++indent_;
        scopes_.emplace_back();
        if (init) {
            if (init.type() == "declaration") declaration(init, false);
            else expression_statement(init);
        }
        // A continue must still run the update step, so it leaves a labeled
        // block around the body instead of jumping to the loop head.
        bool via_block = update && contains_continue(n.field("body"));
        targets_.push_back({label('l', id), via_block ? label('c', id) : label('l', id)});
        line(label('l', id) + ": " + (condition ? "while " + cond(expr(condition)) : std::string("loop")) + " {");
        ++indent_;
        loop_body(n.field("body"), via_block ? label('c', id) : "");
        if (update) {
            if (update.type() == "comma_expression")
                for (auto u : update.named_children()) expression_statement(u);
            else
                expression_statement(update);
        }
        --indent_;
        line("}");
        targets_.pop_back();
        scopes_.pop_back();
        --indent_;
        line("}");
    }

    // Constants whose type differs from the scrutinee cannot be patterns;
    // they become guard comparisons with a cast.
    std::string case_pattern(const Node& v, const std::string& scrutinee_ty, bool& needs_guard) {
        if (v.type() == "identifier") {
            std::string name(v.text());
            auto ty = resolve_alias(type_of(name));
            if (!ty.empty() && !scrutinee_ty.empty() && ty != scrutinee_ty) {
                needs_guard = true;
                return "((" + ctypes::rust_ident(name) + ") as " + scrutinee_ty + ")";
            }
            return ctypes::rust_ident(name);
        }
        auto val = ctypes::eval_const(v, [](const std::string&) { return std::nullopt; });
        if (!val || val->floating) unsupported(v, "case label");
        return std::to_string(val->i);
    }

    bool terminates(const std::vector<Node>& stmts) {
        if (stmts.empty()) return false;
        auto t = stmts.back().type();
        return t == "break_statement" || t == "return_statement" || t == "continue_statement";
    }

    void switch_statement(const Node& n) {
        int id = ++label_seq_;
        auto scrutinee = expr(n.field("condition").named_child(0));
        struct Arm {
            std::vector<std::string> patterns;
            std::vector<Node> body;
            bool is_default = false;
            bool guard = false;
        };
        std::vector<Arm> arms;
        std::vector<std::string> pending;
        bool pending_default = false;
        bool pending_guard = false;
        auto cases = n.field("body").named_children();
        for (std::size_t i = 0; i < cases.size(); ++i) {
            auto c = cases[i];
            if (c.type() == "comment") continue;
            if (c.type() != "case_statement") unsupported(c, "statement outside a case");
            auto value = c.field("value");
            if (value) pending.push_back(case_pattern(value, scrutinee.ty, pending_guard));
            else pending_default = true;
            std::vector<Node> body;
            for (auto s : c.named_children())
                if (s != value && s.type() != "comment") body.push_back(s);
            if (body.empty() && i + 1 < cases.size()) continue;
            bool last = i + 1 == cases.size();
            if (!last && !terminates(body)) unsupported(c, "switch fallthrough");
            arms.push_back({pending, body, pending_default, pending_guard});
            pending.clear();
            pending_default = false;
            pending_guard = false;
        }
        targets_.push_back({label('s', id), ""});
        line(label('s', id) + ": {");
        ++indent_;
        line("match " + conv(scrutinee, "") + " {");
        ++indent_;
        bool has_default = false;
        for (const auto& arm : arms) {
            std::string pat;
            if (arm.is_default) {
                pat = "_";
                has_default = true;
            } else {
                for (std::size_t k = 0; k < arm.patterns.size(); ++k) {
                    if (arm.guard) pat += (k ? " || " : "case_value if ") + std::string("case_value == ") + arm.patterns[k];
                    else pat += (k ? " | " : "") + arm.patterns[k];
                }
            }
            line(pat + " => {");
            ++indent_;
            scopes_.emplace_back();
            for (const auto& s : arm.body) statement(s);
            scopes_.pop_back();
            --indent_;
            line("}");
        }
        if (!has_default) line("_ => {}");
        --indent_;
        line("}");
        --indent_;
        line("}");
        targets_.pop_back();
    }

    void expression_statement(const Node& e) {
        auto t = e.type();
        if (t == "assignment_expression") {
            auto target = lvalue(e.field("left"));
            auto op = std::string(e.field("operator").text());
            auto value = expr(e.field("right"));
            if (op == "=") {
                line(target.s + " = " + conv(value, target.ty) + ";");
                return;
            }
            if (is_pointer(target.ty) && (op == "+=" || op == "-=")) {
                line(target.s + " = " + target.s + ".offset(" + (op == "-=" ? "-" : std::string()) + "((" + value.s +
                     ") as isize));");
                return;
            }
            bool shift = op == "<<=" || op == ">>=";
            std::string rhs = shift ? (value.literal ? value.s : conv(value, "u32"))
                                    : conv(value, is_numeric(target.ty) ? target.ty : "");
            line(target.s + " " + op + " " + rhs + ";");
            return;
        }
        if (t == "update_expression") {
            auto target = lvalue(e.field("argument"));
            bool inc = e.text().find("++") != std::string_view::npos;
            if (is_pointer(target.ty))
                line(target.s + " = " + target.s + ".offset(" + (inc ? "1" : "-1") + ");");
            else
                line(target.s + (inc ? " += 1;" : " -= 1;"));
            return;
        }
        if (t == "comma_expression") {
            for (auto c : e.named_children()) expression_statement(c);
            return;
        }
        auto v = expr(e);
        if (t == "call_expression") line(v.s + ";");
        else if (t == "cast_expression" && v.ty == "()") line(v.s);
        else line("let _ = " + v.s + ";");
    }
};

}  // namespace

std::string naive_transpile(std::string_view c_function, const TypeEnv& env) { return Transpiler(env).run(c_function); }

TypeEnv type_env(const ContextCatalog& catalog) {
    TypeEnv env;
    auto type_text = [](const Node& n) { return n ? text_of_type(n) : std::string(); };
    auto name_of = [](const Node& n) {
        std::string s(n.text());
        return s.rfind("r#", 0) == 0 ? s.substr(2) : s;
    };
    for (const auto& e : catalog.entries()) {
        auto tree = syntax::Tree::parse(syntax::Language::rust, e.rust_text);
        std::function<void(const Node&)> visit = [&](const Node& n) {
            auto t = n.type();
            if (t == "static_item" || t == "const_item") {
                env.globals[name_of(n.field("name"))] = type_text(n.field("type"));
            } else if (t == "function_signature_item" || t == "function_item") {
                env.returns[name_of(n.field("name"))] = type_text(n.field("return_type"));
            } else if (t == "type_item") {
                env.aliases[name_of(n.field("name"))] = type_text(n.field("type"));
            } else if (t == "struct_item" || t == "union_item") {
                auto& f = env.fields[name_of(n.field("name"))];
                if (auto body = n.field("body"))
                    for (auto d : body.named_children())
                        if (d.type() == "field_declaration")
                            f[name_of(d.field("name"))] = type_text(d.field("type"));
            }
            for (auto c : n.named_children()) visit(c);
        };
        visit(tree.root());
    }
    return env;
}

}  // namespace migratekit

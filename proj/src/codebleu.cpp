#include "migratekit/codebleu.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>

#include "migratekit/errors.hpp"
#include "migratekit/rust_items.hpp"
#include "migratekit/syntax/tree.hpp"

namespace migratekit::codebleu {

namespace {

bool py_space(unsigned char c) { return c == ' ' || (c >= '\t' && c <= '\r') || (c >= 0x1c && c <= 0x1f); }

std::string_view py_strip(std::string_view s) {
    while (!s.empty() && py_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && py_space(s.back())) s.remove_suffix(1);
    return s;
}

using Gram = std::vector<std::string>;

/// N-gram counts in first-occurrence order.
std::vector<std::pair<Gram, long>> ngram_counts(const std::vector<std::string>& tokens, std::size_t n) {
    std::vector<std::pair<Gram, long>> out;
    std::map<Gram, std::size_t> pos;
    if (tokens.size() < n) return out;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        Gram g(tokens.begin() + i, tokens.begin() + i + n);
        auto [it, fresh] = pos.emplace(g, out.size());
        if (fresh)
            out.emplace_back(std::move(g), 1);
        else
            ++out[it->second].second;
    }
    return out;
}

long count_of(const std::vector<std::pair<Gram, long>>& counts, const Gram& g) {
    for (const auto& [k, v] : counts)
        if (k == g) return v;
    return 0;
}

double combine(const std::array<std::pair<double, double>, 4>& p, std::size_t hyp_len, std::size_t ref_len) {
    double bp;
    if (hyp_len > ref_len)
        bp = 1;
    else if (hyp_len == 0)
        bp = 0;
    else
        bp = std::exp(1 - static_cast<double>(ref_len) / static_cast<double>(hyp_len));
    if (p[0].first == 0) return 0;
    double sum = 0;
    for (const auto& [num, den] : p) sum += 0.25 * std::log((num == 0 ? num + 0.1 : num) / den);
    return bp * std::exp(sum);
}

}  // namespace

const std::vector<std::string>& rust_keywords() {
    static const std::vector<std::string> k = {
        "as",    "async", "await",  "block",   "bool",   "break",  "char",  "const",       "continue", "crate",
        "default", "dyn", "else",   "enum",    "expr",   "extern", "f32",   "f64",         "false",    "fn",
        "for",   "i128",  "i16",    "i32",     "i64",    "i8",     "ident", "if",          "impl",     "in",
        "isize", "item",  "let",    "lifetime", "literal", "loop", "macro_rules!", "match", "meta",     "mod",
        "move",  "mut",   "pat",    "path",    "pub",    "ref",    "return", "self",       "static",   "stmt",
        "str",   "struct", "super", "trait",   "true",   "tt",     "ty",    "type",        "u128",     "u16",
        "u32",   "u64",   "u8",     "union",   "unsafe", "use",    "usize", "vis",         "where",    "while",
        "yield"};
    return k;
}

std::vector<std::string> split_tokens(std::string_view s) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && py_space(s[i])) ++i;
        std::size_t j = i;
        while (j < s.size() && !py_space(s[j])) ++j;
        if (j > i) out.emplace_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

double bleu(const std::vector<std::string>& hyp, const std::vector<std::string>& ref) {
    std::array<std::pair<double, double>, 4> p{};
    for (std::size_t n = 1; n <= 4; ++n) {
        auto counts = ngram_counts(hyp, n);
        auto ref_counts = ngram_counts(ref, n);
        long num = 0, total = 0;
        for (const auto& [g, c] : counts) {
            num += std::min(c, count_of(ref_counts, g));
            total += c;
        }
        p[n - 1] = {static_cast<double>(num), static_cast<double>(std::max(1L, total))};
    }
    return combine(p, hyp.size(), ref.size());
}

double weighted_bleu(const std::vector<std::string>& hyp, const std::vector<std::string>& ref) {
    const auto& kw = rust_keywords();
    auto weight = [&](const std::string& t) { return std::find(kw.begin(), kw.end(), t) != kw.end() ? 1.0 : 0.2; };
    std::array<std::pair<double, double>, 4> p{};
    for (std::size_t n = 1; n <= 4; ++n) {
        auto counts = ngram_counts(hyp, n);
        auto ref_counts = ngram_counts(ref, n);
        double num = 0, den = 0;
        for (const auto& [g, c] : ref_counts) {
            double w = n == 1 ? weight(g[0]) : 1.0;
            num += static_cast<double>(std::min(c, count_of(counts, g))) * w;
            den += static_cast<double>(c) * w;
        }
        p[n - 1] = {num, std::max(1.0, den)};
    }
    // The reference measures each [tokens, weights] reference pair, whose
    // length is 2, so the brevity penalty only bites on 1- or 2-token texts.
    return combine(p, hyp.size(), 2);
}

std::string remove_comments(std::string_view src) {
    std::string out;
    std::size_t i = 0;
    auto quoted = [&](char q) -> std::optional<std::size_t> {
        std::size_t j = i + 1;
        while (j < src.size()) {
            if (src[j] == '\\') {
                if (j + 1 >= src.size()) return std::nullopt;
                j += 2;
            } else if (src[j] == q) {
                return j + 1;
            } else {
                ++j;
            }
        }
        return std::nullopt;
    };
    while (i < src.size()) {
        if (src.compare(i, 2, "//") == 0) {
            auto nl = src.find('\n', i);
            i = nl == std::string_view::npos ? src.size() : nl;
            out += ' ';
            continue;
        }
        if (src.compare(i, 2, "/*") == 0) {
            auto close = src.find("*/", i + 2);
            if (close != std::string_view::npos) {
                i = close + 2;
                out += ' ';
                continue;
            }
        }
        if (src[i] == '\'' || src[i] == '"') {
            if (auto end = quoted(src[i])) {
                out.append(src.substr(i, *end - i));
                i = *end;
                continue;
            }
        }
        out += src[i++];
    }
    std::string joined;
    std::size_t start = 0;
    while (start <= out.size()) {
        auto nl = out.find('\n', start);
        std::string_view line(out.data() + start, (nl == std::string::npos ? out.size() : nl) - start);
        if (!py_strip(line).empty()) {
            if (!joined.empty()) joined += '\n';
            joined.append(line);
        }
        if (nl == std::string::npos) break;
        start = nl + 1;
    }
    return joined;
}

namespace {

syntax::Tree parse(std::string_view code) { return syntax::Tree::parse(syntax::Language::rust, std::string(code)); }

std::vector<std::string> subtree_sexps(const syntax::Node& root) {
    std::vector<std::string> out;
    std::vector<syntax::Node> stack{root};
    while (!stack.empty()) {
        auto node = stack.back();
        stack.pop_back();
        out.push_back(node.sexp());
        for (std::uint32_t i = 0; i < node.child_count(); ++i)
            if (node.child(i).child_count() != 0) stack.push_back(node.child(i));
    }
    return out;
}

}  // namespace

double syntax_match(std::string_view candidate, std::string_view reference) {
    auto cand_tree = parse(remove_comments(py_strip(candidate)));
    auto ref_tree = parse(remove_comments(py_strip(reference)));
    auto cand = subtree_sexps(cand_tree.root());
    auto ref = subtree_sexps(ref_tree.root());
    std::set<std::string> cand_set(cand.begin(), cand.end());
    long matched = 0;
    for (const auto& s : ref)
        if (cand_set.count(s)) ++matched;
    return static_cast<double>(matched) / static_cast<double>(ref.size());
}

namespace {

// Data flow, mirroring the reference's DFG_rust walk over the parse tree.

using Point = std::pair<std::uint32_t, std::uint32_t>;
using Span = std::pair<Point, Point>;

struct Flow {
    std::string code;
    int idx;
    std::string relation;
    std::vector<std::string> parents;
    std::vector<int> parent_idx;
};

using States = std::map<std::string, std::vector<int>>;

Span span_of(const syntax::Node& n) {
    auto s = ts_node_start_point(n.raw());
    auto e = ts_node_end_point(n.raw());
    return {{s.row, s.column}, {e.row, e.column}};
}

bool is_token(const syntax::Node& n) {
    auto t = n.type();
    return (n.child_count() == 0 || t == "string_literal" || t == "string" || t == "character_literal") &&
           t != "comment";
}

void token_spans(const syntax::Node& n, std::vector<Span>& out) {
    if (is_token(n)) {
        out.push_back(span_of(n));
        return;
    }
    for (std::uint32_t i = 0; i < n.child_count(); ++i) token_spans(n.child(i), out);
}

/// Slices a UTF-8 line the way Python slices a str: by code point, using
/// the (byte) columns tree-sitter reports.
std::string py_slice(const std::string& line, std::size_t from, std::optional<std::size_t> to) {
    std::vector<std::size_t> starts;
    for (std::size_t i = 0; i < line.size(); ++i)
        if ((static_cast<unsigned char>(line[i]) & 0xC0) != 0x80) starts.push_back(i);
    std::size_t n = starts.size();
    std::size_t a = std::min(from, n);
    std::size_t b = to ? std::min(*to, n) : n;
    if (b <= a) return {};
    std::size_t begin = starts[a];
    std::size_t end = b == n ? line.size() : starts[b];
    return line.substr(begin, end - begin);
}

std::string token_text(const Span& s, const std::vector<std::string>& lines) {
    auto line = [&](std::uint32_t r) -> const std::string& {
        static const std::string empty;
        if (r >= lines.size()) throw ParseFailed("token row out of range");
        return lines[r];
    };
    if (s.first.first == s.second.first) return py_slice(line(s.first.first), s.first.second, s.second.second);
    std::string out = py_slice(line(s.first.first), s.first.second, std::nullopt);
    for (auto r = s.first.first + 1; r < s.second.first; ++r) out += line(r);
    out += py_slice(line(s.second.first), 0, s.second.second);
    return out;
}

struct Walker {
    std::map<Span, std::pair<int, std::string>> index_to_code;

    const std::pair<int, std::string>& lookup(const Span& s) const {
        auto it = index_to_code.find(s);
        if (it == index_to_code.end()) throw ParseFailed("token missing from index");
        return it->second;
    }

    void variable_spans(const syntax::Node& n, std::vector<Span>& out) const {
        if (n.null()) throw ParseFailed("missing node");
        if (is_token(n)) {
            auto s = span_of(n);
            if (n.type() != lookup(s).second) out.push_back(s);
            return;
        }
        for (std::uint32_t i = 0; i < n.child_count(); ++i) variable_spans(n.child(i), out);
    }

    static void sort_by_idx(std::vector<Flow>& d) {
        std::stable_sort(d.begin(), d.end(), [](const Flow& a, const Flow& b) { return a.idx < b.idx; });
    }

    static std::vector<Flow> merge_repeats(std::vector<Flow> d) {
        std::vector<Flow> out;
        std::map<std::tuple<std::string, int, std::string>, std::size_t> at;
        for (auto& f : d) {
            auto key = std::make_tuple(f.code, f.idx, f.relation);
            auto it = at.find(key);
            if (it == at.end()) {
                at.emplace(key, out.size());
                out.push_back(std::move(f));
                continue;
            }
            auto& m = out[it->second];
            std::set<std::string> names(m.parents.begin(), m.parents.end());
            names.insert(f.parents.begin(), f.parents.end());
            m.parents.assign(names.begin(), names.end());
            std::set<int> idx(m.parent_idx.begin(), m.parent_idx.end());
            idx.insert(f.parent_idx.begin(), f.parent_idx.end());
            m.parent_idx.assign(idx.begin(), idx.end());
        }
        sort_by_idx(out);
        return out;
    }

    std::pair<std::vector<Flow>, States> walk(const syntax::Node& node, States states) const {
        static const std::set<std::string_view> assignment = {"assignment_expression", "compound_assignment_expr",
                                                              "let_expression"};
        static const std::set<std::string_view> if_statement = {"if_expression", "if_let_expression",
                                                                "match_expression", "else"};
        static const std::set<std::string_view> while_statement = {"while_expression", "while_let_expression",
                                                                   "loop_expression"};
        if (node.null()) throw ParseFailed("missing node");
        auto type = node.type();
        std::vector<Flow> dfg;

        if (is_token(node)) {
            const auto& [idx, code] = lookup(span_of(node));
            if (type == code) return {{}, states};
            if (auto it = states.find(code); it != states.end())
                return {{Flow{code, idx, "comesFrom", {code}, it->second}}, states};
            if (type == "identifier") states[code] = {idx};
            return {{Flow{code, idx, "comesFrom", {}, {}}}, states};
        }
        if (type == "function_item") {
            auto name = node.child(1);
            std::optional<syntax::Node> value;
            if (node.child_count() >= 3) value = node.child(2);
            std::vector<Span> names;
            variable_spans(name, names);
            if (!value) {
                for (const auto& s : names) {
                    const auto& [idx, code] = lookup(s);
                    dfg.push_back({code, idx, "comesFrom", {}, {}});
                    states[code] = {idx};
                }
                sort_by_idx(dfg);
                return {dfg, states};
            }
            std::vector<Span> values;
            variable_spans(*value, values);
            auto [temp, next] = walk(*value, states);
            states = std::move(next);
            dfg = std::move(temp);
            for (const auto& s1 : names) {
                const auto& [idx1, code1] = lookup(s1);
                for (const auto& s2 : values) {
                    const auto& [idx2, code2] = lookup(s2);
                    dfg.push_back({code1, idx1, "comesFrom", {code2}, {idx2}});
                }
                states[code1] = {idx1};
            }
            sort_by_idx(dfg);
            return {dfg, states};
        }
        if (assignment.count(type)) {
            auto left = node.field("left");
            auto right = node.field("right");
            auto [temp, next] = walk(right, states);
            states = std::move(next);
            dfg = std::move(temp);
            std::vector<Span> names, values;
            variable_spans(left, names);
            variable_spans(right, values);
            for (const auto& s1 : names) {
                const auto& [idx1, code1] = lookup(s1);
                for (const auto& s2 : values) {
                    const auto& [idx2, code2] = lookup(s2);
                    dfg.push_back({code1, idx1, "computedFrom", {code2}, {idx2}});
                }
                states[code1] = {idx1};
            }
            sort_by_idx(dfg);
            return {dfg, states};
        }
        if (if_statement.count(type)) {
            States current = states;
            std::vector<States> others;
            bool flag = false;
            bool tag = type.find("else") != std::string_view::npos;
            for (std::uint32_t i = 0; i < node.child_count(); ++i) {
                auto child = node.child(i);
                if (child.type().find("else") != std::string_view::npos) tag = true;
                if (!if_statement.count(child.type()) && !flag) {
                    auto [temp, next] = walk(child, current);
                    current = std::move(next);
                    dfg.insert(dfg.end(), temp.begin(), temp.end());
                } else {
                    flag = true;
                    auto [temp, next] = walk(child, states);
                    dfg.insert(dfg.end(), temp.begin(), temp.end());
                    others.push_back(std::move(next));
                }
            }
            others.push_back(current);
            if (!tag) others.push_back(states);
            States merged;
            for (const auto& dic : others)
                for (const auto& [k, v] : dic) merged[k].insert(merged[k].end(), v.begin(), v.end());
            for (auto& [k, v] : merged) {
                std::sort(v.begin(), v.end());
                v.erase(std::unique(v.begin(), v.end()), v.end());
            }
            sort_by_idx(dfg);
            return {dfg, merged};
        }
        if (type == "for_expression") {
            for (std::uint32_t i = 0; i < node.child_count(); ++i) {
                auto [temp, next] = walk(node.child(i), states);
                states = std::move(next);
                dfg.insert(dfg.end(), temp.begin(), temp.end());
            }
            return {merge_repeats(std::move(dfg)), states};
        }
        if (while_statement.count(type)) {
            for (int pass = 0; pass < 2; ++pass)
                for (std::uint32_t i = 0; i < node.child_count(); ++i) {
                    auto [temp, next] = walk(node.child(i), states);
                    states = std::move(next);
                    dfg.insert(dfg.end(), temp.begin(), temp.end());
                }
            return {merge_repeats(std::move(dfg)), states};
        }
        for (std::uint32_t i = 0; i < node.child_count(); ++i) {
            auto [temp, next] = walk(node.child(i), states);
            states = std::move(next);
            dfg.insert(dfg.end(), temp.begin(), temp.end());
        }
        sort_by_idx(dfg);
        return {dfg, states};
    }
};

std::vector<std::string> split_newlines(const std::string& code) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto nl = code.find('\n', start);
        out.push_back(code.substr(start, nl == std::string::npos ? std::string::npos : nl - start));
        if (nl == std::string::npos) break;
        start = nl + 1;
    }
    return out;
}

std::vector<Flow> data_flow(const std::string& code) {
    auto tree = parse(code);
    std::vector<Span> spans;
    token_spans(tree.root(), spans);
    auto lines = split_newlines(code);
    Walker w;
    std::vector<Flow> dfg;
    try {
        for (std::size_t i = 0; i < spans.size(); ++i)
            w.index_to_code[spans[i]] = {static_cast<int>(i), token_text(spans[i], lines)};
        dfg = w.walk(tree.root(), {}).first;
    } catch (const ParseFailed&) {
        dfg.clear();
    }
    Walker::sort_by_idx(dfg);
    std::set<int> used;
    for (const auto& d : dfg) {
        if (!d.parent_idx.empty()) used.insert(d.idx);
        used.insert(d.parent_idx.begin(), d.parent_idx.end());
    }
    std::vector<Flow> kept;
    std::map<int, std::size_t> at;
    for (auto& d : dfg) {
        if (!used.count(d.idx)) continue;
        auto it = at.find(d.idx);
        if (it == at.end()) {
            at.emplace(d.idx, kept.size());
            kept.push_back(std::move(d));
            continue;
        }
        auto& m = kept[it->second];
        std::set<std::string> names(m.parents.begin(), m.parents.end());
        names.insert(d.parents.begin(), d.parents.end());
        m.parents.assign(names.begin(), names.end());
    }
    return kept;
}

}  // namespace

std::vector<DataFlow> normalized_dataflow(std::string_view code) {
    std::map<std::string, std::string> names;
    auto norm = [&](const std::string& n) -> const std::string& {
        auto it = names.find(n);
        if (it == names.end()) it = names.emplace(n, "var_" + std::to_string(names.size())).first;
        return it->second;
    };
    std::vector<DataFlow> out;
    for (const auto& f : data_flow(remove_comments(py_strip(code)))) {
        DataFlow d;
        for (const auto& p : f.parents) norm(p);
        d.var = norm(f.code);
        d.relation = f.relation;
        for (const auto& p : f.parents) d.parents.push_back(norm(p));
        out.push_back(std::move(d));
    }
    return out;
}

double dataflow_match(std::string_view candidate, std::string_view reference) {
    auto cand = normalized_dataflow(candidate);
    auto ref = normalized_dataflow(reference);
    if (ref.empty()) return 0;
    long matched = 0;
    for (const auto& r : ref) {
        auto it = std::find(cand.begin(), cand.end(), r);
        if (it != cand.end()) {
            ++matched;
            cand.erase(it);
        }
    }
    return static_cast<double>(matched) / static_cast<double>(ref.size());
}

Score score(std::string_view candidate, std::string_view reference, const Weights& weights) {
    double wsum = weights[0] + weights[1] + weights[2] + weights[3];
    if (std::abs(wsum - 1.0) > 1e-9) throw ConfigError("CodeBLEU weights must sum to 1");
    for (auto text : {candidate, reference}) {
        auto issues = rust::check_syntax(text);
        if (!issues.empty())
            throw ParseFailed("CodeBLEU input does not parse at line " + std::to_string(issues[0].line) + ": " +
                              issues[0].message);
    }
    auto hyp = split_tokens(py_strip(candidate));
    auto ref = split_tokens(py_strip(reference));
    Score s;
    s.ngram = bleu(hyp, ref);
    s.weighted_ngram = weighted_bleu(hyp, ref);
    s.syntax = syntax_match(candidate, reference);
    s.dataflow = dataflow_match(candidate, reference);
    s.codebleu = weights[0] * s.ngram + weights[1] * s.weighted_ngram + weights[2] * s.syntax +
                 weights[3] * (s.dataflow == 0 ? 1.0 : s.dataflow);
    return s;
}

}  // namespace migratekit::codebleu

#include "migratekit/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include "migratekit/errors.hpp"
#include "migratekit/util/fs.hpp"
#include "migratekit/util/hash.hpp"

namespace migratekit {

namespace {

class TomlReader {
public:
    explicit TomlReader(std::string_view text) : s_(text) {}

    nlohmann::json parse() {
        nlohmann::json out = nlohmann::json::object();
        std::string section;
        out[section] = nlohmann::json::object();
        while (true) {
            skip_blank_lines();
            if (eof()) break;
            if (peek() == '[') {
                ++i_;
                skip_inline_space();
                std::string name = bare_key();
                skip_inline_space();
                expect(']');
                section = name;
                if (out.contains(section) && section.size()) fail("section [" + section + "] appears twice");
                out[section] = nlohmann::json::object();
            } else {
                std::string key = bare_key();
                skip_inline_space();
                expect('=');
                skip_inline_space();
                auto v = value();
                if (out[section].contains(key)) fail("key `" + key + "` appears twice");
                out[section][key] = std::move(v);
            }
            end_of_line();
        }
        if (out[""].empty()) out.erase("");
        return out;
    }

private:
    std::string_view s_;
    std::size_t i_ = 0;
    int line_ = 1;

    bool eof() const { return i_ >= s_.size(); }
    char peek() const { return eof() ? '\0' : s_[i_]; }

    [[noreturn]] void fail(const std::string& what) const {
        throw ConfigError("config line " + std::to_string(line_) + ": " + what);
    }

    void expect(char c) {
        if (peek() != c) fail(std::string("expected `") + c + "`");
        ++i_;
    }

    void skip_inline_space() {
        while (!eof() && (peek() == ' ' || peek() == '\t')) ++i_;
    }

    void skip_comment() {
        if (peek() == '#')
            while (!eof() && peek() != '\n') ++i_;
    }

    void skip_blank_lines() {
        while (!eof()) {
            skip_inline_space();
            skip_comment();
            if (peek() == '\r') ++i_;
            if (peek() != '\n') return;
            ++i_;
            ++line_;
        }
    }

    void end_of_line() {
        skip_inline_space();
        skip_comment();
        if (peek() == '\r') ++i_;
        if (eof()) return;
        if (peek() != '\n') fail("unexpected text after value");
        ++i_;
        ++line_;
    }

    std::string bare_key() {
        std::size_t start = i_;
        while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-')) ++i_;
        if (start == i_) fail("expected a key");
        return std::string(s_.substr(start, i_ - start));
    }

    nlohmann::json value() {
        char c = peek();
        if (c == '"') return basic_string();
        if (c == '\'') return literal_string();
        if (c == '[') return array();
        if (s_.substr(i_, 4) == "true") {
            i_ += 4;
            return true;
        }
        if (s_.substr(i_, 5) == "false") {
            i_ += 5;
            return false;
        }
        return number();
    }

    nlohmann::json basic_string() {
        ++i_;
        std::string out;
        while (true) {
            if (eof() || peek() == '\n') fail("unterminated string");
            char c = s_[i_++];
            if (c == '"') return out;
            if (c != '\\') {
                out += c;
                continue;
            }
            if (eof()) fail("unterminated escape");
            char e = s_[i_++];
            switch (e) {
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                case 'r': out += '\r'; break;
                case '"': out += '"'; break;
                case '\\': out += '\\'; break;
                default: fail(std::string("unsupported escape `\\") + e + "`");
            }
        }
    }

    nlohmann::json literal_string() {
        ++i_;
        auto end = s_.find('\'', i_);
        auto nl = s_.find('\n', i_);
        if (end == std::string_view::npos || (nl != std::string_view::npos && nl < end)) fail("unterminated string");
        std::string out(s_.substr(i_, end - i_));
        i_ = end + 1;
        return out;
    }

    nlohmann::json array() {
        ++i_;
        auto out = nlohmann::json::array();
        while (true) {
            skip_blank_lines();
            if (peek() == ']') {
                ++i_;
                return out;
            }
            out.push_back(value());
            skip_blank_lines();
            if (peek() == ',') {
                ++i_;
                continue;
            }
            skip_blank_lines();
            expect(']');
            return out;
        }
    }

    nlohmann::json number() {
        std::size_t start = i_;
        while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '+' || peek() == '-' ||
                          peek() == '.' || peek() == '_'))
            ++i_;
        std::string tok;
        for (char c : s_.substr(start, i_ - start))
            if (c != '_') tok += c;
        if (tok.empty()) fail("expected a value");
        bool is_float = tok.find_first_of(".eE") != std::string::npos;
        const char* b = tok.data() + (tok[0] == '+' ? 1 : 0);
        const char* e = tok.data() + tok.size();
        if (is_float) {
            double d = 0;
            auto r = std::from_chars(b, e, d);
            if (r.ec != std::errc() || r.ptr != e) fail("bad number `" + tok + "`");
            return d;
        }
        long long n = 0;
        auto r = std::from_chars(b, e, n);
        if (r.ec != std::errc() || r.ptr != e) fail("bad value `" + tok + "`");
        return n;
    }
};

/// Typed access that rejects unknown keys once every known one is read.
class Section {
public:
    Section(const nlohmann::json& all, const std::string& name) : name_(name) {
        if (all.contains(name)) j_ = all.at(name);
    }

    template <typename T>
    void get(const std::string& key, T& out) {
        seen_.push_back(key);
        if (!j_.contains(key)) return;
        try {
            out = j_.at(key).get<T>();
        } catch (const nlohmann::json::exception&) {
            throw ConfigError("[" + name_ + "] " + key + " has the wrong type");
        }
    }

    void path(const std::string& key, std::optional<std::filesystem::path>& out, const std::filesystem::path& base) {
        std::string s;
        get(key, s);
        if (!s.empty()) out = base / s;
    }

    void finish() const {
        for (const auto& [k, v] : j_.items())
            if (std::find(seen_.begin(), seen_.end(), k) == seen_.end())
                throw ConfigError("unknown key `" + k + "` in [" + name_ + "]");
    }

private:
    std::string name_;
    nlohmann::json j_ = nlohmann::json::object();
    std::vector<std::string> seen_;
};

std::string rel(const std::optional<std::filesystem::path>& p) { return p ? p->generic_string() : ""; }

}  // namespace

nlohmann::json parse_toml_subset(std::string_view text) { return TomlReader(text).parse(); }

Config config_from_toml(std::string_view text, const std::filesystem::path& config_dir) {
    auto all = parse_toml_subset(text);
    static const std::vector<std::string> known = {"codebase", "backend", "translate", "laziness", "context",
                                                   "probe",    "repair",  "catalog",   "fallback", "report"};
    for (const auto& [k, v] : all.items())
        if (std::find(known.begin(), known.end(), k) == known.end())
            throw ConfigError(k.empty() ? "keys must sit under a [section]" : "unknown section [" + k + "]");

    Config c;
    c.config_dir = config_dir;

    Section code(all, "codebase");
    std::string root = ".";
    code.get("root", root);
    c.root = config_dir / root;
    code.get("files", c.files);
    code.get("defines", c.defines);
    code.get("module_name", c.module_name);
    code.finish();

    Section be(all, "backend");
    be.get("kind", c.backend);
    std::string fixture;
    be.get("fixture", fixture);
    if (!fixture.empty()) c.fixture = config_dir / fixture;
    be.get("endpoint", c.http.endpoint);
    be.get("model", c.http.model);
    be.get("temperature", c.http.temperature);
    be.get("timeout_seconds", c.http.timeout_seconds);
    be.get("max_parallel", c.http.max_parallel);
    be.finish();

    Section tr(all, "translate");
    tr.get("retry_cap", c.retry_cap);
    tr.get("rules", c.rules);
    tr.get("jobs", c.jobs);
    tr.finish();

    Section lz(all, "laziness");
    lz.get("patterns", c.laziness.patterns);
    lz.get("ratio_threshold", c.laziness.ratio_threshold);
    lz.get("min_c_statements", c.laziness.min_c_statements);
    lz.finish();

    Section cx(all, "context");
    cx.get("line_budget", c.context.line_budget);
    std::string overflow = "error";
    cx.get("on_overflow", overflow);
    cx.finish();
    if (overflow == "error") c.context.on_overflow = BudgetPolicy::error;
    else if (overflow == "truncate") c.context.on_overflow = BudgetPolicy::truncate;
    else throw ConfigError("[context] on_overflow must be \"error\" or \"truncate\"");

    Section pr(all, "probe");
    pr.get("max_iters", c.max_iters);
    pr.get("rustc", c.rustc);
    pr.get("edition", c.edition);
    pr.get("no_std", c.no_std);
    pr.finish();

    Section rp(all, "repair");
    rp.get("cap", c.repair_cap);
    rp.get("max_diagnostics", c.max_diagnostics);
    rp.finish();

    Section cat(all, "catalog");
    cat.path("path", c.catalog, config_dir);
    cat.finish();
    Section fb(all, "fallback");
    fb.path("store", c.fallback_store, config_dir);
    fb.finish();
    Section rep(all, "report");
    rep.path("reference", c.reference, config_dir);
    rep.finish();

    for (auto [name, v] : {std::pair<const char*, int>{"translate.retry_cap", c.retry_cap},
                           {"translate.jobs", c.jobs},
                           {"probe.max_iters", c.max_iters},
                           {"repair.cap", c.repair_cap},
                           {"repair.max_diagnostics", c.max_diagnostics},
                           {"context.line_budget", c.context.line_budget},
                           {"backend.max_parallel", c.http.max_parallel}})
        if (v < 1) throw ConfigError(std::string(name) + " must be at least 1");
    if (!(c.laziness.ratio_threshold > 0 && c.laziness.ratio_threshold <= 1))
        throw ConfigError("laziness.ratio_threshold must lie in (0, 1]");
    if (c.backend == "replay" && c.fixture.empty()) throw ConfigError("the replay backend needs [backend] fixture");
    if (c.backend == "live-http" && (c.http.endpoint.empty() || c.http.model.empty()))
        throw ConfigError("the live-http backend needs [backend] endpoint and model");
    if (c.backend != "replay" && c.backend != "live-http" && c.backend != "fallback-rule")
        throw ConfigError("unknown backend kind `" + c.backend + "`");
    return c;
}

Config load_config(const std::filesystem::path& path) {
    auto abs = std::filesystem::absolute(path);
    return config_from_toml(fs::read_file(abs), abs.parent_path());
}

nlohmann::json Config::to_json() const {
    return {{"codebase", {{"root", root.generic_string()}, {"files", files}, {"defines", defines},
                          {"module_name", module_name}}},
            {"backend", {{"kind", backend}, {"fixture", fixture.generic_string()}, {"endpoint", http.endpoint},
                         {"model", http.model}, {"temperature", http.temperature},
                         {"timeout_seconds", http.timeout_seconds}, {"max_parallel", http.max_parallel}}},
            {"translate", {{"retry_cap", retry_cap}, {"rules", rules}, {"jobs", jobs}}},
            {"laziness", {{"patterns", laziness.patterns}, {"ratio_threshold", laziness.ratio_threshold},
                          {"min_c_statements", laziness.min_c_statements}}},
            {"context", {{"line_budget", context.line_budget},
                         {"on_overflow", context.on_overflow == BudgetPolicy::error ? "error" : "truncate"}}},
            {"probe", {{"max_iters", max_iters}, {"rustc", rustc}, {"edition", edition}, {"no_std", no_std}}},
            {"repair", {{"cap", repair_cap}, {"max_diagnostics", max_diagnostics}}},
            {"catalog", {{"path", rel(catalog)}}},
            {"fallback", {{"store", rel(fallback_store)}}},
            {"report", {{"reference", rel(reference)}}}};
}

std::string Config::hash() const { return sha256_hex(to_json().dump()); }

std::unique_ptr<Backend> make_backend(const Config& config) {
    if (config.backend == "replay") return std::make_unique<ReplayBackend>(config.fixture);
    if (config.backend == "live-http") return std::make_unique<HttpBackend>(config.http);
    return std::make_unique<RuleBackend>();
}

}  // namespace migratekit

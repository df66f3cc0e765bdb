#include "migratekit/orchestrator.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <istream>
#include <mutex>
#include <ostream>
#include <regex>
#include <set>
#include <thread>

#include "migratekit/codebleu.hpp"
#include "migratekit/errors.hpp"
#include "migratekit/naive_transpiler.hpp"
#include "migratekit/rust_items.hpp"
#include "migratekit/util/fs.hpp"
#include "migratekit/util/hash.hpp"
#include "migratekit/util/process.hpp"
#include "migratekit/util/text.hpp"

namespace migratekit {

namespace {

const std::vector<std::pair<Stage, const char*>> kStageNames = {
    {Stage::split, "split"},         {Stage::cprobe, "cprobe"}, {Stage::translate, "translate"},
    {Stage::rustprobe, "rustprobe"}, {Stage::repair, "repair"}, {Stage::fuse, "fuse"},
    {Stage::review, "review"},       {Stage::report, "report"}};

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

nlohmann::json read_json(const std::filesystem::path& p) { return nlohmann::json::parse(fs::read_file(p)); }

std::string hash_of(std::initializer_list<std::string_view> parts) {
    std::string all;
    for (auto p : parts) {
        all += std::to_string(p.size());
        all += ':';
        all += p;
    }
    return sha256_hex(all);
}

nlohmann::json callee_json(const CalleeMap& m) {
    auto j = nlohmann::json::object();
    for (const auto& [name, c] : m) j[name] = {{"text", c.text}, {"provenance", to_string(c.provenance)}, {"lazy", c.lazy}};
    return j;
}

}  // namespace

std::string to_string(Stage s) {
    for (const auto& [st, name] : kStageNames)
        if (st == s) return name;
    return "split";
}

Stage stage_from_string(const std::string& s) {
    for (const auto& [st, name] : kStageNames)
        if (s == name) return st;
    throw ConfigError("unknown stage `" + s + "`");
}

nlohmann::json to_json(const LaneFailure& f) {
    return {{"id", f.id}, {"stage", to_string(f.stage)}, {"kind", f.kind}, {"message", f.message}};
}

std::filesystem::path Workspace::function(const std::string& id, const std::string& suffix) const {
    return functions() / (text::file_stem_for_id(id) + suffix);
}

struct Pipeline::Impl {
    Pipeline& p;
    nlohmann::json state;
    std::mutex mu;  // guards state and the write counter
    long writes = 0;
    long crash_after = -1;

    // Loaded from the split artifacts on demand.
    bool loaded = false;
    std::vector<FunctionUnit> units;
    CallGraph graph;
    ContextCatalog catalog;
    std::string split_hash;
    std::optional<FallbackStore> store;

    explicit Impl(Pipeline& owner) : p(owner) {
        if (const char* c = std::getenv("MIGRATEKIT_CRASH_AFTER_WRITES")) crash_after = std::atol(c);
        if (std::filesystem::exists(p.ws_.state())) {
            state = read_json(p.ws_.state());
        } else {
            state = {{"functions", nlohmann::json::object()}, {"stages", nlohmann::json::object()}};
        }
        state["config_hash"] = p.config_.hash();
    }

    // ---- state ----------------------------------------------------------

    /// Caller holds mu.
    void save_locked() {
        fs::write_file_atomic(p.ws_.state(), dump(state));
        // Test hook: simulate a kill right after the n-th committed write.
        if (crash_after >= 0 && ++writes >= crash_after) std::_Exit(75);
    }

    void save() {
        std::lock_guard lock(mu);
        save_locked();
    }

    nlohmann::json& fn(const std::string& id) {
        auto& f = state["functions"][id];
        if (f.is_null()) f = {{"stage", "split"}, {"hashes", nlohmann::json::object()}, {"status", ""}};
        return f;
    }

    std::string recorded(const std::string& id, Stage s) {
        std::lock_guard lock(mu);
        const auto& h = fn(id)["hashes"];
        auto k = to_string(s);
        return h.contains(k) ? h[k].get<std::string>() : "";
    }

    void mark(const std::string& id, Stage s, const std::string& input_hash, const std::string& status) {
        std::lock_guard lock(mu);
        auto& f = fn(id);
        f["hashes"][to_string(s)] = input_hash;
        if (stage_from_string(f["stage"].get<std::string>()) < s) f["stage"] = to_string(s);
        f["status"] = status;
        f.erase("halted");
        save_locked();
    }

    void halt(const std::string& id, Stage s, const Error& e) {
        std::lock_guard lock(mu);
        auto& f = fn(id);
        f["halted"] = to_json(LaneFailure{id, s, e.kind(), e.what()});
        f["status"] = "halted";
        f["hashes"].erase(to_string(s));
        save_locked();
    }

    /// Lanes that failed before `s` sit out; one that failed at `s` is retried.
    bool alive(const std::string& id, Stage s) {
        std::lock_guard lock(mu);
        const auto& f = fn(id);
        if (!f.contains("halted")) return true;
        return stage_from_string(f["halted"]["stage"].get<std::string>()) >= s;
    }

    std::vector<LaneFailure> halted() {
        std::lock_guard lock(mu);
        std::vector<LaneFailure> out;
        for (const auto& [id, f] : state["functions"].items()) {
            if (!f.contains("halted")) continue;
            const auto& h = f["halted"];
            out.push_back({id, stage_from_string(h["stage"]), h["kind"], h["message"]});
        }
        return out;
    }

    void set_global(Stage s, const std::string& hash) {
        std::lock_guard lock(mu);
        state["stages"][to_string(s)] = hash;
        save_locked();
    }

    std::string global(Stage s) {
        std::lock_guard lock(mu);
        auto k = to_string(s);
        return state["stages"].contains(k) ? state["stages"][k].get<std::string>() : "";
    }

    // ---- split artifacts -------------------------------------------------

    void require(const std::filesystem::path& artifact) {
        if (!std::filesystem::exists(artifact))
            throw MissingPrerequisite("missing " + std::filesystem::relative(artifact, p.ws_.dir).generic_string());
    }

    void load() {
        if (loaded) return;
        require(p.ws_.split());
        require(p.ws_.callgraph());
        require(p.ws_.catalog());
        auto sj = read_json(p.ws_.split());
        units.clear();
        for (const auto& f : sj.at("functions")) units.push_back(function_unit_from_json(f));
        graph = call_graph_from_json(read_json(p.ws_.callgraph()));
        catalog = ContextCatalog::load(p.ws_.catalog());
        split_hash = global(Stage::split);
        loaded = true;
    }

    const FunctionUnit& unit(const std::string& id) {
        for (const auto& u : units)
            if (u.id == id) return u;
        throw ConfigError("unknown function `" + id + "`");
    }

    std::vector<std::filesystem::path> source_paths() const {
        if (p.config_.files.empty()) return {p.config_.root};
        std::vector<std::filesystem::path> out;
        for (const auto& f : p.config_.files) out.push_back(p.config_.root / f);
        return out;
    }

    ModuleIR parse() const {
        ParseOptions o;
        o.root = p.config_.root;
        o.defines = p.config_.defines;
        return parse_module(source_paths(), o);
    }

    // ---- options ---------------------------------------------------------

    ProbeOptions probe_options() const {
        ProbeOptions o;
        o.max_iters = p.config_.max_iters;
        o.scaffold.rustc = p.config_.rustc;
        o.scaffold.edition = p.config_.edition;
        o.scaffold.no_std = p.config_.no_std;
        o.scaffold.scratch_root = p.ws_.scratch();
        return o;
    }

    RepairOptions repair_options() const {
        RepairOptions o;
        o.cap = p.config_.repair_cap;
        o.max_diagnostics = p.config_.max_diagnostics;
        o.project_rules = p.config_.rules;
        o.probe = probe_options();
        return o;
    }

    std::string backend_identity() const {
        std::string id = p.backend_->kind();
        if (p.config_.backend == "replay" && std::filesystem::exists(p.config_.fixture))
            id += ":" + sha256_hex(fs::read_file(p.config_.fixture));
        if (p.config_.backend == "live-http") id += ":" + p.config_.http.endpoint + ":" + p.config_.http.model;
        return id;
    }

    std::string catalog_hash() { return sha256_hex(catalog.to_json().dump()); }

    /// Schedule groups restricted to lanes alive at `s`.
    std::vector<std::vector<std::string>> schedule(Stage s) {
        std::vector<std::vector<std::string>> out;
        for (const auto& g : leaves_first_schedule(graph)) {
            std::vector<std::string> keep;
            for (const auto& id : g)
                if (alive(id, s)) keep.push_back(id);
            if (!keep.empty()) out.push_back(keep);
        }
        return out;
    }

    /// Everything reachable from `id`, since a callee's text drags its own
    /// callees into the unit.
    std::vector<std::string> callees_of(const std::string& id) {
        std::set<std::string> seen{id};
        std::vector<std::string> out, todo{id};
        while (!todo.empty()) {
            auto cur = todo.back();
            todo.pop_back();
            for (const auto& [a, b] : graph.edges)
                if (a == cur && seen.insert(b).second) {
                    out.push_back(b);
                    todo.push_back(b);
                }
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    /// Group index and position within the group, per id.
    std::map<std::string, std::pair<std::size_t, std::size_t>> positions(
        const std::vector<std::vector<std::string>>& groups) {
        std::map<std::string, std::pair<std::size_t, std::size_t>> at;
        for (std::size_t g = 0; g < groups.size(); ++g)
            for (std::size_t k = 0; k < groups[g].size(); ++k) at[groups[g][k]] = {g, k};
        return at;
    }

    std::optional<TranslatedFunction> translation(const std::string& id) {
        auto path = p.ws_.function(id, ".translate.json");
        if (!std::filesystem::exists(path)) return std::nullopt;
        return translated_function_from_json(read_json(path));
    }

    /// Same-group peers come in as raw translations; callees in earlier
    /// groups only once their probed unit compiles.
    CalleeMap probe_callees(const std::string& id, const std::map<std::string, std::pair<std::size_t, std::size_t>>& at) {
        CalleeMap m;
        for (const auto& cid : callees_of(id)) {
            if (!at.count(cid)) continue;
            const auto& name = unit(cid).name;
            if (m.count(name)) continue;
            auto t = translation(cid);
            if (!t || t->status == TranslationStatus::syntax_failed) continue;
            bool lazy = t->laziness.lazy;
            if (at.at(cid).first == at.at(id).first) {
                m[name] = {t->rust_text, Provenance::translated, lazy};
                continue;
            }
            auto path = p.ws_.function(cid, ".probe.json");
            if (!std::filesystem::exists(path)) continue;
            auto pj = read_json(path);
            if (!pj.contains("unit")) continue;
            auto u = resolved_unit_from_json(pj["unit"]);
            if (u.status == ProbeStatus::compiles) m[name] = {u.core().text, u.core().provenance, lazy};
        }
        return m;
    }

    /// Final cores of callees that are done; later members of the same group
    /// are still raw translations.
    CalleeMap repair_callees(const std::string& id, const std::map<std::string, std::pair<std::size_t, std::size_t>>& at) {
        CalleeMap m;
        for (const auto& cid : callees_of(id)) {
            if (!at.count(cid)) continue;
            const auto& name = unit(cid).name;
            if (m.count(name)) continue;
            auto t = translation(cid);
            bool lazy = t && t->laziness.lazy;
            bool done = at.at(cid).first < at.at(id).first ||
                        (at.at(cid).first == at.at(id).first && at.at(cid).second < at.at(id).second);
            if (!done) {
                if (t && t->status != TranslationStatus::syntax_failed)
                    m[name] = {t->rust_text, Provenance::translated, lazy};
                continue;
            }
            auto path = p.ws_.function(cid, ".repair.json");
            if (!std::filesystem::exists(path)) continue;
            auto o = repair_outcome_from_json(read_json(path).at("outcome"));
            if (o.final_status == RepairStatus::manual_required) continue;
            m[name] = {o.final_unit.core().text, o.final_unit.core().provenance, lazy};
        }
        return m;
    }

    /// The configured fallback, else the rule-based transpilation when the
    /// function is inside the supported subset.
    FallbackStore fallback_for(const FunctionUnit& fu) {
        if (!store) store = p.config_.fallback_store ? load_fallback_store(*p.config_.fallback_store) : FallbackStore{};
        if (auto it = store->find(fu.id); it != store->end()) return {{fu.id, it->second}};
        try {
            return {{fu.id, naive_transpile(fu.body_text, type_env(catalog))}};
        } catch (const Error&) {
            return {};
        }
    }

    // ---- review helpers ---------------------------------------------------

    void print_summary(const RustModule& m, std::ostream& out) {
        for (const auto& r : m.residue) out << "residue " << r.unit_id << " `" << r.name << "`: " << r.reason << "\n";
        for (const auto& c : m.conflicts)
            out << "conflict `" << c.name << "`: kept " << c.kept_unit << ", also defined by " << c.other_unit << "\n";
        out << (m.compiles ? "module compiles\n" : "module does not compile\n");
        for (const auto& d : m.diagnostics) out << d.rendered << (d.rendered.empty() || d.rendered.back() == '\n' ? "" : "\n");
    }
};

Pipeline::Pipeline(Config config, std::filesystem::path workdir, std::unique_ptr<Backend> backend)
    : config_(std::move(config)), ws_{std::move(workdir)}, backend_(std::move(backend)) {
    std::filesystem::create_directories(ws_.functions());
    std::filesystem::create_directories(ws_.scratch());
    // Temp files left by a write that was killed before its rename.
    static const std::regex stale(R"(.*\.tmp\.[0-9]+$)");
    for (const auto& d : {ws_.dir, ws_.functions()})
        for (const auto& e : std::filesystem::directory_iterator(d))
            if (e.is_regular_file() && std::regex_match(e.path().filename().string(), stale))
                std::filesystem::remove(e.path());
    if (!backend_) backend_ = make_backend(config_);
    impl_ = std::make_unique<Impl>(*this);
}

Pipeline::~Pipeline() = default;

void Pipeline::split() {
    auto module = impl_->parse();
    auto graph = build_call_graph(module);

    std::vector<std::string> warnings;
    ContextCatalog catalog;
    if (config_.catalog && std::filesystem::exists(*config_.catalog)) {
        catalog = ContextCatalog::load(*config_.catalog);
    } else {
        if (config_.catalog) warnings.push_back("catalog " + config_.catalog->generic_string() + " not found; generated one");
        std::vector<SkippedDecl> skipped;
        catalog = generate_catalog(module, &skipped);
        for (const auto& s : skipped)
            warnings.push_back("no binding for `" + s.name + "` at " + s.file + ":" + std::to_string(s.line) + ": " +
                               s.reason);
    }

    nlohmann::json files = nlohmann::json::array();
    for (const auto& f : module.files) files.push_back({{"path", f.path}, {"sha256", sha256_hex(f.text)}});
    nlohmann::json fns = nlohmann::json::array();
    for (const auto& f : module.functions) {
        fns.push_back(to_json(f));
        fs::write_if_changed(ws_.function(f.id, ".c"), f.body_text);
    }
    std::string split_text = dump({{"files", files}, {"functions", fns}, {"warnings", warnings}});
    std::string catalog_text = dump(catalog.to_json());
    fs::write_if_changed(ws_.split(), split_text);
    fs::write_if_changed(ws_.callgraph(), dump(call_graph_to_json(graph)));
    fs::write_if_changed(ws_.catalog(), catalog_text);
    impl_->loaded = false;
    impl_->set_global(Stage::split, hash_of({split_text, catalog_text}));
}

void Pipeline::cprobe() {
    impl_->load();
    auto module = impl_->parse();
    CodebaseIndex index(module);
    nlohmann::json opts = config_.to_json()["context"];
    for (const auto& fu : impl_->units) {
        if (!impl_->alive(fu.id, Stage::cprobe)) continue;
        auto input = hash_of({impl_->split_hash, fu.id, opts.dump()});
        auto ctx = ws_.function(fu.id, ".ctx.json");
        if (impl_->recorded(fu.id, Stage::cprobe) == input && std::filesystem::exists(ctx)) continue;
        const FunctionUnit* current = module.function(fu.id);
        try {
            if (!current) throw MissingPrerequisite("function `" + fu.id + "` is gone from the sources; run split");
            auto unit = probe_context(*current, index, config_.context);
            fs::write_file_atomic(ws_.function(fu.id, ".ctx.c"), render_context_c(unit));
            fs::write_file_atomic(ctx, dump(to_json(unit)));
            impl_->mark(fu.id, Stage::cprobe, input,
                        unit.unresolved.empty() ? "context-complete" : "context-unresolved");
        } catch (const MissingPrerequisite&) {
            throw;
        } catch (const Error& e) {
            impl_->halt(fu.id, Stage::cprobe, e);
        }
    }
}

void Pipeline::translate() {
    impl_->load();
    std::vector<std::string> ids;
    for (const auto& fu : impl_->units)
        if (impl_->alive(fu.id, Stage::translate)) {
            impl_->require(ws_.function(fu.id, ".ctx.json"));
            ids.push_back(fu.id);
        }
    TranslateOptions opts;
    opts.retry_cap = config_.retry_cap;
    opts.project_rules = config_.rules;
    opts.laziness = config_.laziness;
    std::string settings = config_.to_json()["translate"].dump() + config_.to_json()["laziness"].dump() +
                           impl_->backend_identity();

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < ids.size(); i = next++) {
            const auto& id = ids[i];
            auto ctx_text = fs::read_file(ws_.function(id, ".ctx.json"));
            auto input = hash_of({ctx_text, settings});
            auto out = ws_.function(id, ".translate.json");
            if (impl_->recorded(id, Stage::translate) == input && std::filesystem::exists(out)) continue;
            try {
                auto unit = translation_unit_from_json(nlohmann::json::parse(ctx_text));
                auto t = migratekit::translate(unit, *backend_, opts);
                for (std::size_t a = 0; a < t.completions.size(); ++a)
                    fs::write_file_atomic(ws_.function(id, ".rs.attempt" + std::to_string(a + 1)), t.completions[a]);
                fs::write_file_atomic(ws_.function(id, ".core.rs"), t.rust_text + "\n");
                fs::write_file_atomic(out, dump(to_json(t)));
                impl_->mark(id, Stage::translate, input, to_string(t.status));
            } catch (const Error& e) {
                impl_->halt(id, Stage::translate, e);
            }
        }
    };
    std::vector<std::thread> pool;
    int n = std::min<int>(config_.jobs, static_cast<int>(ids.size()));
    for (int k = 1; k < n; ++k) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
}

void Pipeline::rustprobe() {
    impl_->load();
    auto groups = impl_->schedule(Stage::rustprobe);
    for (const auto& g : groups)
        for (const auto& id : g) impl_->require(ws_.function(id, ".translate.json"));
    auto at = impl_->positions(groups);
    auto opts = impl_->probe_options();
    std::string settings = config_.to_json()["probe"].dump() + impl_->catalog_hash();
    for (const auto& g : groups) {
        for (const auto& id : g) {
            auto t_text = fs::read_file(ws_.function(id, ".translate.json"));
            auto t = translated_function_from_json(nlohmann::json::parse(t_text));
            auto callees = impl_->probe_callees(id, at);
            auto cj = callee_json(callees);
            auto input = hash_of({t_text, cj.dump(), settings});
            auto out = ws_.function(id, ".probe.json");
            if (impl_->recorded(id, Stage::rustprobe) == input && std::filesystem::exists(out)) continue;
            try {
                if (t.status == TranslationStatus::syntax_failed) {
                    fs::write_file_atomic(out, dump({{"skipped", "syntax-failed"}, {"callees", cj}}));
                    impl_->mark(id, Stage::rustprobe, input, "skipped");
                    continue;
                }
                auto unit = probe(t, impl_->catalog, callees, opts);
                fs::write_file_atomic(ws_.function(id, ".resolved.rs"), unit.render());
                fs::write_file_atomic(out, dump({{"unit", to_json(unit)}, {"callees", cj}}));
                impl_->mark(id, Stage::rustprobe, input, to_string(unit.status));
            } catch (const ToolchainMissing&) {
                throw;
            } catch (const Error& e) {
                impl_->halt(id, Stage::rustprobe, e);
            }
        }
    }
}

void Pipeline::repair() {
    impl_->load();
    auto groups = impl_->schedule(Stage::repair);
    for (const auto& g : groups)
        for (const auto& id : g) impl_->require(ws_.function(id, ".probe.json"));
    auto at = impl_->positions(groups);
    auto opts = impl_->repair_options();
    std::string settings = config_.to_json()["repair"].dump() + config_.to_json()["probe"].dump() +
                           impl_->catalog_hash() + impl_->backend_identity();
    for (const auto& g : groups) {
        for (const auto& id : g) {
            const auto& fu = impl_->unit(id);
            auto probe_text = fs::read_file(ws_.function(id, ".probe.json"));
            auto pj = nlohmann::json::parse(probe_text);
            auto callees = impl_->repair_callees(id, at);
            auto cj = callee_json(callees);
            auto fallback = impl_->fallback_for(fu);
            auto input = hash_of({probe_text, cj.dump(), nlohmann::json(fallback).dump(), settings});
            auto out = ws_.function(id, ".repair.json");
            if (impl_->recorded(id, Stage::repair) == input && std::filesystem::exists(out)) continue;
            try {
                RepairOutcome outcome;
                bool refreshed = false;
                if (!pj.contains("unit")) {
                    outcome = fallback_only(id, fu.name, impl_->catalog, callees, fallback, opts,
                                            "the translation never passed the syntax check");
                } else {
                    auto unit = resolved_unit_from_json(pj["unit"]);
                    if (cj != pj["callees"]) {
                        // Callees changed since probing (repaired or replaced): probe again first.
                        unit = probe_item(id, fu.name, unit.core().text, unit.core().provenance, impl_->catalog,
                                          callees, opts.probe);
                        refreshed = true;
                    }
                    outcome = migratekit::repair(unit, *backend_, impl_->catalog, callees, fallback, opts, fu.body_text);
                }
                std::string jsonl;
                for (const auto& a : outcome.attempts) jsonl += to_json(a).dump() + "\n";
                fs::write_file_atomic(ws_.function(id, ".repair.jsonl"), jsonl);
                fs::write_file_atomic(out, dump({{"outcome", to_json(outcome)}, {"callees", cj}, {"refreshed", refreshed}}));
                impl_->mark(id, Stage::repair, input, to_string(outcome.final_status));
            } catch (const ToolchainMissing&) {
                throw;
            } catch (const Error& e) {
                impl_->halt(id, Stage::repair, e);
            }
        }
    }
}

void Pipeline::fuse() {
    impl_->load();
    auto groups = impl_->schedule(Stage::fuse);
    std::map<std::string, ResolvedUnit> units;
    std::string all;
    for (const auto& g : groups)
        for (const auto& id : g) {
            impl_->require(ws_.function(id, ".repair.json"));
            auto text = fs::read_file(ws_.function(id, ".repair.json"));
            all += text;
            units[id] = repair_outcome_from_json(nlohmann::json::parse(text).at("outcome")).final_unit;
        }
    auto halted = impl_->halted();
    nlohmann::json hj = nlohmann::json::array();
    for (const auto& h : halted) hj.push_back(to_json(h));
    auto input = hash_of({all, nlohmann::json(groups).dump(), hj.dump(), config_.to_json()["probe"].dump()});
    if (impl_->global(Stage::fuse) == input && std::filesystem::exists(ws_.module_json()) &&
        std::filesystem::exists(ws_.fused_rs()))
        return;

    FuseOptions fo;
    fo.compile_each_step = true;
    fo.raise_conflicts = false;  // conflicts go to review
    fo.scaffold = impl_->probe_options().scaffold;
    RustModule module;
    if (!groups.empty()) module = fuse_module(groups, units, fo);
    if (groups.empty()) recheck(module, fo.scaffold, "fusion-empty");
    for (const auto& h : halted)
        module.residue.push_back({h.id, impl_->unit(h.id).name,
                                  "lane halted at " + to_string(h.stage) + ": " + h.kind + ": " + h.message});

    auto text = module.render();
    fs::write_file_atomic(ws_.fused_rs(), text);
    fs::write_file_atomic(ws_.dir / "fused.json", dump(to_json(module)));
    fs::write_file_atomic(ws_.module_rs(), text);
    fs::write_file_atomic(ws_.module_json(), dump(to_json(module)));
    fs::write_file_atomic(ws_.fusion_log(), dump(fusion_log_json(module)));
    fs::write_file_atomic(ws_.conflicts(), dump(conflicts_json(module)));
    fs::write_file_atomic(ws_.review(), dump({{"edits", nlohmann::json::array()}}));
    {
        std::lock_guard lock(impl_->mu);
        impl_->state["module_hash"] = sha256_hex(text);
    }
    impl_->set_global(Stage::fuse, input);
}

ReviewSummary Pipeline::review(std::istream& in, std::ostream& out) {
    impl_->require(ws_.module_json());
    auto module = rust_module_from_json(read_json(ws_.module_json()));
    ReviewSummary s;
    auto finish = [&] {
        s.module_compiles = module.compiles;
        s.residue_left = module.residue.size();
        s.conflicts_left = module.conflicts.size();
        return s;
    };
    if (module.residue.empty() && module.conflicts.empty() && module.compiles) {
        out << "nothing to review\n";
        s.nothing_to_review = true;
        return finish();
    }
    impl_->print_summary(module, out);
    auto scaffold = impl_->probe_options().scaffold;

    std::string line;
    while (std::getline(in, line)) {
        auto cmd = std::string(text::trim(line));
        if (cmd.empty()) continue;
        if (cmd == "quit" || cmd == "q") break;
        if (cmd == "list") {
            impl_->print_summary(module, out);
            continue;
        }
        auto space = cmd.find(' ');
        std::string verb = cmd.substr(0, space);
        std::string name = space == std::string::npos ? "" : std::string(text::trim(cmd.substr(space + 1)));
        if (verb == "show" && !name.empty()) {
            bool found = false;
            for (const auto& it : module.items)
                if (it.name == name) {
                    out << it.text << "\n";
                    found = true;
                }
            for (const auto& c : module.conflicts)
                if (c.name == name) out << "-- other definition from " << c.other_unit << ":\n" << c.other_text << "\n";
            if (!found) out << "no item `" << name << "`\n";
            continue;
        }
        if (verb != "edit" || name.empty()) {
            out << "commands: list, show <name>, edit <name> (end the item with .end), quit\n";
            continue;
        }
        std::string replacement;
        while (std::getline(in, line) && text::trim(line) != ".end") replacement += line + "\n";
        while (!replacement.empty() && replacement.back() == '\n') replacement.pop_back();

        std::vector<rust::Item> items;
        if (rust::check_syntax(replacement).empty()) items = rust::parse_items(replacement);
        if (items.size() != 1 || items[0].name != name) {
            out << "rejected: the replacement must be exactly one item named `" << name << "`\n";
            ++s.rejected;
            continue;
        }
        RustModule edited = module;
        std::string before;
        bool replaced = false;
        for (auto& it : edited.items)
            if (it.name == name && !replaced) {
                before = it.text;
                it.text = replacement;
                it.provenance = Provenance::manual;
                replaced = true;
            }
        if (!replaced)
            edited.items.push_back({name, replacement, Provenance::manual, items[0].kind == rust::ItemKind::function, ""});
        recheck(edited, scaffold, "review");

        bool conflict = std::any_of(module.conflicts.begin(), module.conflicts.end(),
                                    [&](const Conflict& c) { return c.name == name; });
        auto errors_before = module.diagnostics.size(), errors_after = edited.diagnostics.size();
        bool ok = edited.compiles || errors_after < errors_before || (conflict && errors_after <= errors_before);
        if (!ok) {
            out << "rejected: the edit does not compile\n";
            for (const auto& d : edited.diagnostics) out << d.rendered << "\n";
            ++s.rejected;
            continue;
        }
        std::erase_if(edited.residue, [&](const Residue& r) { return r.name == name; });
        std::erase_if(edited.conflicts, [&](const Conflict& c) { return c.name == name; });
        module = std::move(edited);
        auto text = module.render();
        auto rj = read_json(ws_.review());
        rj["edits"].push_back({{"name", name}, {"before", before}, {"after", replacement}});
        fs::write_file_atomic(ws_.review(), dump(rj));
        fs::write_file_atomic(ws_.module_rs(), text);
        fs::write_file_atomic(ws_.module_json(), dump(to_json(module)));
        fs::write_file_atomic(ws_.conflicts(), dump(conflicts_json(module)));
        {
            std::lock_guard lock(impl_->mu);
            impl_->state["module_hash"] = sha256_hex(text);
            impl_->save_locked();
        }
        ++s.accepted;
        out << "accepted `" << name << "`; " << (module.compiles ? "module compiles" : "module still fails") << "\n";
        if (module.residue.empty() && module.conflicts.empty() && module.compiles) {
            out << "nothing left to review\n";
            break;
        }
    }
    return finish();
}

MetricsReport Pipeline::report() {
    impl_->load();
    impl_->require(ws_.module_json());
    impl_->require(ws_.fused_rs());
    auto module = rust_module_from_json(read_json(ws_.module_json()));
    auto fused = rust_module_from_json(read_json(ws_.dir / "fused.json"));
    std::string module_text = fs::read_file(ws_.module_rs());
    std::string fused_text = fs::read_file(ws_.fused_rs());

    MetricsReport r;
    r.module_name = config_.module_name;
    {
        std::lock_guard lock(impl_->mu);
        if (impl_->state.value("module_hash", "") != sha256_hex(module_text))
            r.flags.push_back("module.rs was edited outside review (hash mismatch); its MML is not attributed");
    }
    for (const auto& h : impl_->halted())
        r.flags.push_back("lane " + h.id + " halted at " + to_string(h.stage) + ": " + h.kind);

    auto owned = [](const RustModule& m, const std::string& id) -> const ModuleItem* {
        for (const auto& it : m.items)
            if (it.owner == id) return &it;
        return nullptr;
    };
    auto& mm = r.module;
    mm.csr_by_round.assign(static_cast<std::size_t>(config_.repair_cap) + 1, Ratio{0, 0});
    for (const auto& fu : impl_->units) {
        FunctionMetrics f;
        f.c_lines = fu.line_count();
        auto t = impl_->translation(fu.id);
        if (t) {
            f.lazy = t->laziness.lazy;
            ++mm.laziness.den;
            mm.laziness.num += f.lazy ? 1 : 0;
        }
        std::optional<int> round;
        auto rp = ws_.function(fu.id, ".repair.json");
        if (std::filesystem::exists(rp)) round = repair_outcome_from_json(read_json(rp).at("outcome")).compiled_round();
        f.compiled = round.has_value();
        ++mm.csr.den;
        mm.csr.num += f.compiled ? 1 : 0;
        for (std::size_t k = 0; k < mm.csr_by_round.size(); ++k) {
            ++mm.csr_by_round[k].den;
            if (round && *round <= static_cast<int>(k)) ++mm.csr_by_round[k].num;
        }
        if (const auto* item = owned(module, fu.id)) {
            f.provenance = to_string(item->provenance);
            f.line_count = text::count_nonblank_lines(item->text);
            try {
                f.safe_lines = count_safe_lines(item->text).safe;
            } catch (const ParseFailed&) {
            }
            const auto* before = owned(fused, fu.id);
            f.mml = compute_mml(before ? before->text : "", item->text);
        } else {
            f.provenance = "missing";
        }
        r.per_function[fu.id] = f;
    }

    mm.total_lines = text::count_nonblank_lines(module_text);
    mm.total_lines_raw = text::count_lines(module_text);
    mm.mml_count = compute_mml(fused_text, module_text);
    try {
        mm.sc_count = count_safe_lines(module_text).safe;
        if (mm.total_lines > 0) mm.sc_pct = pct_value(mm.sc_count, mm.total_lines);
    } catch (const ParseFailed&) {
        r.flags.push_back("module.rs does not parse; safe-code counts are unavailable");
    }
    for (const auto& it : module.items) {
        if (!it.function || it.provenance != Provenance::translated) continue;
        mm.llm_lines += text::count_nonblank_lines(it.text);
        try {
            mm.sc_llm_count += count_safe_lines(it.text).safe;
        } catch (const ParseFailed&) {
        }
    }
    if (mm.total_lines > 0) mm.mml_pct = pct_value(mm.mml_count, mm.total_lines);
    if (mm.llm_lines > 0) mm.sc_llm_pct = pct_value(mm.sc_llm_count, mm.llm_lines);
    if (mm.laziness.den > 0) mm.laziness_pct = pct_value(mm.laziness.num, mm.laziness.den);
    if (config_.reference) {
        try {
            mm.codebleu = codebleu::score(module_text, fs::read_file(*config_.reference)).codebleu;
        } catch (const Error& e) {
            r.flags.push_back(std::string("CodeBLEU unavailable: ") + e.what());
        }
    }

    fs::write_file_atomic(ws_.report_json(), dump(to_json(r)));
    fs::write_file_atomic(ws_.report_md(), render_markdown(r));
    impl_->set_global(Stage::report, sha256_hex(dump(to_json(r))));
    return r;
}

RunSummary Pipeline::run() {
    if (!find_executable(config_.rustc)) throw ToolchainMissing("rustc not found: " + config_.rustc);
    split();
    cprobe();
    translate();
    rustprobe();
    repair();
    fuse();
    RunSummary s;
    s.report = report();
    s.halted = halted();
    auto module = rust_module_from_json(read_json(ws_.module_json()));
    s.module_compiles = module.compiles;
    for (const auto& r : module.residue) s.residue.push_back(r.unit_id + ": " + r.reason);
    s.conflicts = module.conflicts.size();
    s.exit_code = exit_code();
    return s;
}

void Pipeline::retry(const std::string& id, Stage from) {
    if (from == Stage::split || from > Stage::repair) throw ConfigError("retry applies to cprobe through repair");
    std::lock_guard lock(impl_->mu);
    if (!impl_->state["functions"].contains(id)) throw ConfigError("unknown function `" + id + "`");
    auto& f = impl_->fn(id);
    for (auto s = static_cast<int>(from); s <= static_cast<int>(Stage::repair); ++s)
        f["hashes"].erase(to_string(static_cast<Stage>(s)));
    f["stage"] = to_string(static_cast<Stage>(static_cast<int>(from) - 1));
    f.erase("halted");
    f["status"] = "retry";
    impl_->state["stages"].erase(to_string(Stage::fuse));
    impl_->save_locked();
}

std::vector<LaneFailure> Pipeline::halted() const { return impl_->halted(); }

int Pipeline::exit_code() const {
    if (!impl_->halted().empty()) return 2;
    if (!std::filesystem::exists(ws_.module_json())) return 2;
    auto module = rust_module_from_json(read_json(ws_.module_json()));
    return module.compiles && module.conflicts.empty() && module.residue.empty() ? 0 : 2;
}

}  // namespace migratekit

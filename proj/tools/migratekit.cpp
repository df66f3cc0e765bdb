#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "migratekit/errors.hpp"
#include "migratekit/orchestrator.hpp"
#include "migratekit/util/fs.hpp"

using namespace migratekit;

namespace {

int lanes_exit(const Pipeline& p) { return p.halted().empty() ? 0 : 2; }

void print_halted(const Pipeline& p) {
    for (const auto& h : p.halted())
        std::cerr << "halted " << h.id << " at " << to_string(h.stage) << ": " << h.kind << ": " << h.message << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"C to Rust migration pipeline"};
    app.require_subcommand(1);
    std::string config_path, workdir, script, retry_id, retry_from = "translate";

    auto add = [&](const std::string& name, const std::string& help) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "config file")->required()->check(CLI::ExistingFile);
        sub->add_option("--workdir", workdir, "workspace directory")->required();
        return sub;
    };
    add("run", "all stages, then the report");
    add("split", "parse the sources, write the call graph and catalog");
    add("cprobe", "attach C context to every function");
    add("translate", "translate every function");
    add("rustprobe", "resolve Rust dependencies, leaves first");
    add("repair", "repair non-compiling units");
    add("fuse", "merge units into module.rs");
    add("review", "fix residue and conflicts interactively")
        ->add_option("--script", script, "read commands from a file instead of stdin")
        ->check(CLI::ExistingFile);
    add("report", "compute metrics into report.json and report.md");
    auto* retry = add("retry", "re-run one function from a stage");
    retry->add_option("id", retry_id, "function id")->required();
    retry->add_option("--from", retry_from, "first stage to re-run");

    CLI11_PARSE(app, argc, argv);
    auto* sub = app.get_subcommands().front();
    const std::string cmd = sub->get_name();

    try {
        Pipeline p(load_config(config_path), workdir);
        if (cmd == "run") {
            auto s = p.run();
            std::cout << render_markdown(s.report);
            print_halted(p);
            for (const auto& r : s.residue) std::cerr << "residue " << r << "\n";
            if (s.conflicts > 0) std::cerr << s.conflicts << " conflict(s) left for review\n";
            return s.exit_code;
        }
        if (cmd == "split") {
            p.split();
            return 0;
        }
        if (cmd == "cprobe") p.cprobe();
        if (cmd == "translate") p.translate();
        if (cmd == "rustprobe") p.rustprobe();
        if (cmd == "repair") p.repair();
        if (cmd == "fuse") {
            p.fuse();
            print_halted(p);
            return p.exit_code();
        }
        if (cmd == "review") {
            ReviewSummary r;
            if (script.empty()) {
                r = p.review(std::cin, std::cout);
            } else {
                std::ifstream in(script);
                r = p.review(in, std::cout);
            }
            return r.nothing_to_review || (r.module_compiles && r.residue_left == 0 && r.conflicts_left == 0) ? 0 : 2;
        }
        if (cmd == "report") {
            std::cout << render_markdown(p.report());
            return p.exit_code();
        }
        if (cmd == "retry") {
            p.retry(retry_id, stage_from_string(retry_from));
            return 0;
        }
        print_halted(p);
        return lanes_exit(p);
    } catch (const Error& e) {
        std::cerr << "error: " << e.kind() << ": " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

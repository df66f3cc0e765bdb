#include <doctest.h>

#include "migratekit/c_frontend.hpp"
#include "migratekit/metrics.hpp"
#include "migratekit/translator.hpp"
#include "support/corpus.hpp"

using namespace migratekit;

TEST_CASE("call graphs of generated modules match the oracles") {
    int cycles = 0, self_loops = 0, two_file = 0, decoys = 0;
    for (std::uint32_t seed = 1; seed <= 200; ++seed) {
        CAPTURE(seed);
        auto gen = corpus::random_c_module(seed);
        auto module = parse_sources(gen.files);
        auto graph = build_call_graph(module);
        REQUIRE(graph.nodes == gen.ids);
        CHECK(graph.edges == gen.edges);
        CHECK(corpus::tree_walk_edges(gen.files) == gen.edges);
        CHECK(graph.external_calls == gen.external_calls);
        auto schedule = leaves_first_schedule(graph);
        CHECK(schedule == corpus::brute_force_schedule(gen.ids, gen.edges));
        CHECK(corpus::schedule_is_sound(schedule, gen.ids, graph.edges));
        for (const auto& g : schedule) cycles += g.size() > 1;
        for (const auto& [a, b] : gen.edges) self_loops += a == b;
        two_file += gen.files.size() == 2;
        for (const auto& [id, ext] : gen.external_calls) decoys += ext.count("fp");
    }
    // The seeds exercise every shape the generator can produce.
    CHECK(cycles > 20);
    CHECK(self_loops > 20);
    CHECK(two_file > 20);
    CHECK(decoys > 20);
}

TEST_CASE("the soundness check rejects a reversed schedule") {
    std::vector<std::string> ids = {"a", "b"};
    std::set<std::pair<std::string, std::string>> edges = {{"a", "b"}};
    CHECK(corpus::schedule_is_sound({{"b"}, {"a"}}, ids, edges));
    CHECK_FALSE(corpus::schedule_is_sound({{"a"}, {"b"}}, ids, edges));
    CHECK_FALSE(corpus::schedule_is_sound({{"b"}}, ids, edges));
}

TEST_CASE("safe line counts of generated snippets match their construction") {
    for (std::uint32_t seed = 1; seed <= 100; ++seed) {
        CAPTURE(seed);
        auto g = corpus::random_rust_snippet(seed);
        CAPTURE(g.text);
        auto c = count_safe_lines(g.text);
        CHECK(c.total == g.total);
        CHECK(c.unsafe() == g.unsafe);
        CHECK(c.safe + c.unsafe() == c.total);
    }
}

TEST_CASE("laziness rises with function length on the binned corpus") {
    auto samples = corpus::binned_laziness_corpus(7);
    std::vector<LazinessVerdict> verdicts;
    std::vector<int> lines;
    for (const auto& s : samples) {
        auto v = detect_laziness(s.c, s.rust);
        CHECK(v.lazy == s.lazy);
        verdicts.push_back(v);
        lines.push_back(s.c_lines);
    }
    auto rates = laziness_rate(verdicts, lines, {{0, 200}, {200, 400}, {400, 600}, {600, std::nullopt}});
    double prev = -1;
    for (const auto& b : rates.bins) {
        REQUIRE(b.pct.has_value());
        CHECK(*b.pct >= prev);
        prev = *b.pct;
    }
    CHECK(rates.bins.front().pct < rates.bins.back().pct);
}

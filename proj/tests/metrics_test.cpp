#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "migratekit/codebleu.hpp"
#include "migratekit/errors.hpp"
#include "migratekit/metrics.hpp"
#include "migratekit/util/fs.hpp"
#include "migratekit/util/text.hpp"

using namespace migratekit;

namespace {

std::string lines(int n, const std::string& stem = "line") {
    std::string out;
    for (int i = 0; i < n; ++i) out += "    let " + stem + std::to_string(i) + " = " + std::to_string(i) + ";\n";
    return out;
}

nlohmann::json codebleu_pairs() {
    auto path = std::filesystem::path(MIGRATEKIT_FIXTURES) / "codebleu" / "pairs.json";
    return nlohmann::json::parse(fs::read_file(path)).at("pairs");
}

}  // namespace

TEST_CASE("mml: identical texts and single replacements") {
    std::string fn = "fn f() {\n" + lines(8) + "}\n";
    CHECK(compute_mml(fn, fn) == 0);
    auto edited = fn;
    edited.replace(edited.find("line3 = 3"), 9, "line3 = 33");
    CHECK(compute_mml(fn, edited) == 1);
    // Blank lines and trailing whitespace are not lines.
    CHECK(compute_mml(fn, "\n" + fn + "   \n\n") == 0);
}

TEST_CASE("mml: additions, changes and deletion blocks") {
    std::string base = lines(10);
    auto split = text::split_lines(base);
    auto join = [](const std::vector<std::string>& v) { return text::join(v, "\n") + "\n"; };

    auto ins = split;
    ins.insert(ins.begin() + 4, {"    extra_a();", "    extra_b();"});
    CHECK(compute_mml(base, join(ins)) == 2);

    auto del = split;
    del.erase(del.begin() + 2, del.begin() + 5);
    CHECK(compute_mml(base, join(del)) == 1);  // one contiguous block

    auto two_blocks = split;
    two_blocks.erase(two_blocks.begin() + 7);
    two_blocks.erase(two_blocks.begin() + 2);
    CHECK(compute_mml(base, join(two_blocks)) == 2);

    auto shrink = split;  // three lines replaced by one: one change plus one deleted block
    shrink.erase(shrink.begin() + 3, shrink.begin() + 6);
    shrink.insert(shrink.begin() + 3, "    merged();");
    CHECK(compute_mml(base, join(shrink)) == 2);

    auto grow = split;  // one line replaced by three: one change plus two additions
    grow[5] = "    a();";
    grow.insert(grow.begin() + 6, {"    b();", "    c();"});
    CHECK(compute_mml(base, join(grow)) == 3);

    CHECK(compute_mml("", base) == 10);
    CHECK(compute_mml(base, "") == 1);
}

TEST_CASE("mml: counts match the edits applied to distinct-line texts") {
    // Oracle by construction: on texts whose lines are all distinct, k
    // isolated one-line replacements cost exactly k.
    std::string base = lines(40);
    auto split = text::split_lines(base);
    for (int k = 1; k <= 8; ++k) {
        auto v = split;
        for (int e = 0; e < k; ++e) v[static_cast<std::size_t>(e * 5 + 1)] = "    changed" + std::to_string(e) + "();";
        CHECK(compute_mml(base, text::join(v, "\n")) == k);
    }
}

TEST_CASE("safe line counting") {
    std::string safe = "fn f(x: i32) -> i32 {\n    let y = x + 1;\n    y\n}";
    auto c = count_safe_lines(safe);
    CHECK(c.safe == c.total);
    CHECK(c.total == 4);

    std::string mixed = "fn g(p: *mut i32) {\n    let a = 1;\n    unsafe {\n        *p = a;\n        *p += 1;\n        *p *= 2;\n    }\n}";
    auto m = count_safe_lines(mixed);
    CHECK(m.total == 8);
    CHECK(m.unsafe() == 5);
    CHECK(m.safe == 3);
    CHECK_THROWS_AS(count_safe_lines("fn broken( {"), ParseFailed);
}

TEST_CASE("compilation success rate keeps exact ratios") {
    std::vector<bool> r(18, false);
    for (int i = 0; i < 7; ++i) r[i] = true;
    CHECK(compute_csr(r) == Ratio{7, 18});
    CHECK(compute_csr(r).value() == doctest::Approx(0.3889).epsilon(1e-4));
    for (int i = 7; i < 15; ++i) r[i] = true;
    CHECK(compute_csr(r).str() == "15/18");
    CHECK(compute_csr(std::vector<bool>(5, true)).value() == 1.0);
    CHECK_THROWS_AS(compute_csr({}), EmptyInput);
}

TEST_CASE("laziness rates per length bin") {
    std::vector<LazinessVerdict> v(6);
    v[4].lazy = v[5].lazy = true;
    std::vector<int> n = {10, 50, 150, 250, 700, 720};
    std::vector<LengthBin> bins = {{0, 200}, {200, 400}, {400, 600}, {600, std::nullopt}};
    auto r = laziness_rate(v, n, bins);
    CHECK(r.overall == Ratio{2, 6});
    CHECK(r.bins[0].pct == 0.0);
    CHECK(r.bins[1].pct == 0.0);
    CHECK_FALSE(r.bins[2].pct.has_value());  // absent, not zero
    CHECK(r.bins[3].pct == 100.0);
    CHECK(bins[3].label() == "[600, inf)");

    std::vector<LazinessVerdict> none(3);
    CHECK(laziness_rate(none, {1, 2, 3}, {}).overall.value() == 0.0);
    CHECK_THROWS_AS(laziness_rate(none, {1, 2}, {}), LengthMismatch);
    CHECK_THROWS_AS(laziness_rate({}, {}, {}), EmptyInput);
}

TEST_CASE("percentages round half up to two places") {
    CHECK(format_pct(74, 570) == "12.98");
    CHECK(format_pct(46, 321) == "14.33");
    CHECK(format_pct(1, 8) == "12.50");
    CHECK(format_pct(1, 3) == "33.33");
    CHECK(format_pct(2, 3) == "66.67");
    CHECK(format_pct(1, 200) == "0.50");
    CHECK(format_pct(1, 20000) == "0.01");  // 0.005 rounds up
    CHECK(format_pct(0, 7) == "0.00");
    CHECK(format_pct(7, 7) == "100.00");
    CHECK(pct_value(1, 18) == doctest::Approx(5.56));
    CHECK_THROWS_AS(format_pct(1, 0), EmptyInput);
    // Oracle: the exact decimal expansion decides, independent of doubles.
    for (long t = 1; t <= 300; ++t)
        for (long c = 0; c <= t; ++c) {
            long scaled = c * 100000 / t;  // three decimals past the percent point, truncated
            long expect = scaled / 10 + (scaled % 10 >= 5 ? 1 : 0);
            char buf[32];
            std::snprintf(buf, sizeof buf, "%ld.%02ld", expect / 100, expect % 100);
            REQUIRE(format_pct(c, t) == buf);
        }
}

TEST_CASE("report markdown mirrors the end-to-end table columns") {
    MetricsReport r;
    r.module_name = "demo";
    r.module.total_lines = 570;
    r.module.llm_lines = 535;
    r.module.mml_count = 74;
    r.module.sc_count = 564;
    r.module.sc_llm_count = 529;
    auto md = render_markdown(r);
    CHECK(md.find("| # Line | # Line-LLM | # MML | # SC | # SC-LLM | % MML | % SC | % SC-LLM |") != std::string::npos);
    CHECK(md.find("| demo | 570 | 535 | 74 | 564 | 529 | 12.98% |") != std::string::npos);
    CHECK(to_json(r).at("module").at("total_lines") == 570);
}

TEST_CASE("codebleu tokenization follows whitespace splitting") {
    CHECK(codebleu::split_tokens("  fn f() {\n\tx }\x1f") == std::vector<std::string>{"fn", "f()", "{", "x", "}"});
    CHECK(codebleu::remove_comments("a // c\n/* b */ \"//s\"\n\n") == "a  \n  \"//s\"");
}

TEST_CASE("codebleu agrees with the reference implementation") {
    auto pairs = codebleu_pairs();
    REQUIRE(pairs.size() == 20);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto& p = pairs[i];
        CAPTURE(i);
        auto s = codebleu::score(p.at("candidate").get<std::string>(), p.at("reference").get<std::string>());
        CHECK(std::abs(s.ngram - p.at("ngram").get<double>()) <= 1e-6);
        CHECK(std::abs(s.weighted_ngram - p.at("weighted_ngram").get<double>()) <= 1e-6);
        CHECK(std::abs(s.syntax - p.at("syntax").get<double>()) <= 1e-6);
        CHECK(std::abs(s.dataflow - p.at("dataflow").get<double>()) <= 1e-6);
        CHECK(std::abs(s.codebleu - p.at("codebleu").get<double>()) <= 1e-6);
    }
}

TEST_CASE("codebleu of a text with itself is 1 and scores stay in [0, 1]") {
    for (const auto& p : codebleu_pairs()) {
        for (const char* key : {"candidate", "reference"}) {
            auto text = p.at(key).get<std::string>();
            if (codebleu::split_tokens(text).size() < 4) continue;  // BLEU-4 needs a 4-gram
            CHECK(codebleu::score(text, text).codebleu == doctest::Approx(1.0));
        }
        auto s = codebleu::score(p.at("candidate").get<std::string>(), p.at("reference").get<std::string>(),
                                 {0.1, 0.2, 0.3, 0.4});
        CHECK(s.codebleu >= 0.0);
        CHECK(s.codebleu <= 1.0);
    }
    CHECK_THROWS_AS(codebleu::score("fn f( {", "fn f() {}"), ParseFailed);
    CHECK_THROWS_AS(codebleu::score("fn f() {}", "fn f() {}", {0.5, 0.5, 0.5, 0.5}), ConfigError);
}

#include "migratekit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "migratekit/errors.hpp"
#include "migratekit/util/text.hpp"

namespace migratekit {

namespace {

std::vector<std::string> diff_lines(std::string_view text) {
    std::vector<std::string> out;
    for (const auto& l : text::split_lines(text)) {
        auto t = text::rtrim(l);
        if (!t.empty()) out.emplace_back(t);
    }
    return out;
}

}  // namespace

int compute_mml(std::string_view before, std::string_view after) {
    auto a = diff_lines(before);
    auto b = diff_lines(after);
    std::size_t pre = 0;
    while (pre < a.size() && pre < b.size() && a[pre] == b[pre]) ++pre;
    std::size_t suf = 0;
    while (suf < a.size() - pre && suf < b.size() - pre && a[a.size() - 1 - suf] == b[b.size() - 1 - suf]) ++suf;
    std::size_t n = a.size() - pre - suf, m = b.size() - pre - suf;
    if (n == 0 && m == 0) return 0;

    // lcs[i][j] = LCS length of a[pre+i..] and b[pre+j..].
    std::vector<std::uint32_t> lcs((n + 1) * (m + 1), 0);
    auto at = [&](std::size_t i, std::size_t j) -> std::uint32_t& { return lcs[i * (m + 1) + j]; };
    for (std::size_t i = n; i-- > 0;)
        for (std::size_t j = m; j-- > 0;)
            at(i, j) = a[pre + i] == b[pre + j] ? at(i + 1, j + 1) + 1 : std::max(at(i + 1, j), at(i, j + 1));

    int total = 0;
    int deleted = 0, inserted = 0;
    auto close_hunk = [&] {
        total += inserted + (deleted > inserted ? 1 : 0);
        deleted = inserted = 0;
    };
    std::size_t i = 0, j = 0;
    while (i < n || j < m) {
        if (i < n && j < m && a[pre + i] == b[pre + j]) {
            close_hunk();
            ++i;
            ++j;
        } else if (j == m || (i < n && at(i + 1, j) >= at(i, j + 1))) {
            ++deleted;
            ++i;
        } else {
            ++inserted;
            ++j;
        }
    }
    close_hunk();
    return total;
}

Ratio compute_csr(const std::vector<bool>& compiled) {
    if (compiled.empty()) throw EmptyInput("compilation success rate of an empty list");
    return {static_cast<long>(std::count(compiled.begin(), compiled.end(), true)), static_cast<long>(compiled.size())};
}

std::string LengthBin::label() const {
    return "[" + std::to_string(lo) + ", " + (hi ? std::to_string(*hi) : std::string("inf")) + ")";
}

LazinessRates laziness_rate(const std::vector<LazinessVerdict>& verdicts, const std::vector<int>& line_counts,
                            const std::vector<LengthBin>& bins) {
    if (verdicts.size() != line_counts.size())
        throw LengthMismatch(std::to_string(verdicts.size()) + " verdicts but " + std::to_string(line_counts.size()) +
                             " line counts");
    if (verdicts.empty()) throw EmptyInput("laziness rate of an empty list");
    LazinessRates out;
    out.overall.den = static_cast<long>(verdicts.size());
    for (const auto& v : verdicts) out.overall.num += v.lazy ? 1 : 0;
    for (const auto& bin : bins) {
        BinRate r{bin, {}, std::nullopt};
        for (std::size_t i = 0; i < verdicts.size(); ++i) {
            if (!bin.contains(line_counts[i])) continue;
            ++r.lazy.den;
            if (verdicts[i].lazy) ++r.lazy.num;
        }
        if (r.lazy.den > 0) r.pct = 100.0 * r.lazy.value();
        out.bins.push_back(r);
    }
    return out;
}

namespace {

/// Hundredths of a percent, rounded half-up.
long long pct_hundredths(long count, long total) {
    if (total <= 0) throw EmptyInput("percentage of an empty total");
    if (count < 0) throw ConfigError("negative count in a percentage");
    auto num = static_cast<__int128>(count) * 20000 + total;
    return static_cast<long long>(num / (static_cast<__int128>(2) * total));
}

}  // namespace

std::string format_pct(long count, long total) {
    long long q = pct_hundredths(count, total);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%lld.%02lld", q / 100, q % 100);
    return buf;
}

double pct_value(long count, long total) { return static_cast<double>(pct_hundredths(count, total)) / 100.0; }

TablePercentages table_percentages(const TableCounts& c) {
    return {format_pct(c.mml, c.lines), format_pct(c.sc, c.lines), format_pct(c.sc_llm, c.llm_lines)};
}

std::string table_header() {
    return "| Module | # Line | # Line-LLM | # MML | # SC | # SC-LLM | % MML | % SC | % SC-LLM |\n"
           "|---|---:|---:|---:|---:|---:|---:|---:|---:|\n";
}

std::string table_row(const std::string& name, const TableCounts& c) {
    auto pct = [](long n, long d) { return d > 0 ? format_pct(n, d) + "%" : std::string("n/a"); };
    return "| " + name + " | " + std::to_string(c.lines) + " | " + std::to_string(c.llm_lines) + " | " +
           std::to_string(c.mml) + " | " + std::to_string(c.sc) + " | " + std::to_string(c.sc_llm) + " | " +
           pct(c.mml, c.lines) + " | " + pct(c.sc, c.lines) + " | " + pct(c.sc_llm, c.llm_lines) + " |\n";
}

namespace {

nlohmann::json opt(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

nlohmann::json ratio_json(const Ratio& r) { return {{"num", r.num}, {"den", r.den}, {"value", r.value()}}; }

}  // namespace

nlohmann::json to_json(const MetricsReport& r) {
    auto per = nlohmann::json::object();
    for (const auto& [id, f] : r.per_function)
        per[id] = {{"line_count", f.line_count}, {"safe_lines", f.safe_lines}, {"lazy", f.lazy},
                   {"compiled", f.compiled},     {"mml", f.mml},               {"provenance", f.provenance},
                   {"c_lines", f.c_lines}};
    const auto& m = r.module;
    auto rounds = nlohmann::json::array();
    for (const auto& c : m.csr_by_round) rounds.push_back(ratio_json(c));
    return {{"module_name", r.module_name},
            {"per_function", per},
            {"module",
             {{"total_lines", m.total_lines},
              {"total_lines_raw", m.total_lines_raw},
              {"llm_lines", m.llm_lines},
              {"mml_count", m.mml_count},
              {"mml_pct", opt(m.mml_pct)},
              {"sc_count", m.sc_count},
              {"sc_pct", opt(m.sc_pct)},
              {"sc_llm_count", m.sc_llm_count},
              {"sc_llm_pct", opt(m.sc_llm_pct)},
              {"csr", ratio_json(m.csr)},
              {"csr_by_round", rounds},
              {"laziness", ratio_json(m.laziness)},
              {"laziness_pct", opt(m.laziness_pct)},
              {"codebleu", opt(m.codebleu)}}},
            {"flags", r.flags}};
}

std::string render_markdown(const MetricsReport& r) {
    const auto& m = r.module;
    std::string out = "# Migration report: " + r.module_name + "\n\n";
    out += table_header();
    out += table_row(r.module_name, {m.total_lines, m.llm_lines, m.mml_count, m.sc_count, m.sc_llm_count});
    out += "\nPhysical lines including blanks: " + std::to_string(m.total_lines_raw) + "\n\n";
    out += "| Metric | Value |\n|---|---|\n";
    out += "| CSR | " + m.csr.str() + (m.csr.den ? " (" + format_pct(m.csr.num, m.csr.den) + "%)" : "") + " |\n";
    for (std::size_t k = 0; k < m.csr_by_round.size(); ++k)
        out += "| CSR after " + std::to_string(k) + " repair rounds | " + m.csr_by_round[k].str() + " |\n";
    out += "| Laziness | " + m.laziness.str() +
           (m.laziness.den ? " (" + format_pct(m.laziness.num, m.laziness.den) + "%)" : "") + " |\n";
    if (m.codebleu) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.4f", *m.codebleu);
        out += std::string("| CodeBLEU | ") + buf + " |\n";
    }
    out += "\n## Functions\n\n| Function | Lines | Safe | Lazy | Compiled | MML | Provenance |\n"
           "|---|---:|---:|---|---|---:|---|\n";
    for (const auto& [id, f] : r.per_function)
        out += "| " + id + " | " + std::to_string(f.line_count) + " | " + std::to_string(f.safe_lines) + " | " +
               (f.lazy ? "yes" : "no") + " | " + (f.compiled ? "yes" : "no") + " | " + std::to_string(f.mml) + " | " +
               f.provenance + " |\n";
    if (!r.flags.empty()) {
        out += "\n## Flags\n\n";
        for (const auto& f : r.flags) out += "- " + f + "\n";
    }
    return out;
}

}  // namespace migratekit

#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "migratekit/rust_items.hpp"
#include "migratekit/translator.hpp"

namespace migratekit {

/// Manually modified lines from `before` to `after`: an LCS diff over
/// non-blank, right-trimmed lines. Each inserted line counts once (as a
/// change when it replaces a deleted line); deletions beyond the inserted
/// lines of a hunk count 1 per contiguous block.
int compute_mml(std::string_view before, std::string_view after);

/// Non-blank lines, and the ones outside unsafe regions. Throws ParseFailed.
inline rust::LineCount count_safe_lines(std::string_view rust_text) { return rust::count_safe_lines(rust_text); }

struct Ratio {
    long num = 0;
    long den = 0;
    double value() const { return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den); }
    std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }
    bool operator==(const Ratio&) const = default;
};

/// Compiled / total, kept as an exact ratio. Throws EmptyInput.
Ratio compute_csr(const std::vector<bool>& compiled);

/// Line-count range [lo, hi); hi = nullopt is unbounded.
struct LengthBin {
    int lo = 0;
    std::optional<int> hi;
    bool contains(int n) const { return n >= lo && (!hi || n < *hi); }
    std::string label() const;
};

struct BinRate {
    LengthBin bin;
    Ratio lazy;                 // lazy / members
    std::optional<double> pct;  // absent when the bin has no members
};

struct LazinessRates {
    Ratio overall;
    std::vector<BinRate> bins;
};

/// Throws LengthMismatch when the lists differ in length and EmptyInput when
/// they are empty.
LazinessRates laziness_rate(const std::vector<LazinessVerdict>& verdicts, const std::vector<int>& line_counts,
                            const std::vector<LengthBin>& bins);

/// round(100 * count / total, 2), half-up, computed in integers so the
/// printed digits never depend on binary floating point. Throws EmptyInput
/// when total is 0.
std::string format_pct(long count, long total);
double pct_value(long count, long total);

/// Raw counts behind one row of the end-to-end table.
struct TableCounts {
    long lines = 0;
    long llm_lines = 0;
    long mml = 0;
    long sc = 0;
    long sc_llm = 0;
};

struct TablePercentages {
    std::string mml;     // mml / lines
    std::string sc;      // sc / lines
    std::string sc_llm;  // sc_llm / llm_lines
};
TablePercentages table_percentages(const TableCounts& c);
/// "| name | lines | llm | mml | sc | sc-llm | %mml | %sc | %sc-llm |"
std::string table_row(const std::string& name, const TableCounts& c);
std::string table_header();

struct FunctionMetrics {
    int line_count = 0;
    int safe_lines = 0;
    bool lazy = false;
    bool compiled = false;  // the LLM core compiled within the repair cap
    int mml = 0;
    std::string provenance;
    int c_lines = 0;  // length of the C source function
};

struct ModuleMetrics {
    int total_lines = 0;      // non-blank
    int total_lines_raw = 0;  // physical, blank lines included
    int llm_lines = 0;
    int mml_count = 0;
    int sc_count = 0;
    int sc_llm_count = 0;
    std::optional<double> mml_pct, sc_pct, sc_llm_pct;
    Ratio csr;
    std::vector<Ratio> csr_by_round;  // rounds 0..cap
    Ratio laziness;
    std::optional<double> laziness_pct;
    std::optional<double> codebleu;
};

struct MetricsReport {
    std::string module_name;
    std::map<std::string, FunctionMetrics> per_function;
    ModuleMetrics module;
    std::vector<std::string> flags;  // e.g. edits made outside review
};

nlohmann::json to_json(const MetricsReport& r);
std::string render_markdown(const MetricsReport& r);

}  // namespace migratekit

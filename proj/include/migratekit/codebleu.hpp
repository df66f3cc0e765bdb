#pragma once

#include <array>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

// CodeBLEU for Rust, following the reference `codebleu` Python package
// (0.7.x) term for term so scores agree with it to floating-point noise.

namespace migratekit::codebleu {

struct Score {
    double codebleu = 0;
    double ngram = 0;
    double weighted_ngram = 0;
    double syntax = 0;
    double dataflow = 0;  // as reported; 0 is replaced by 1 in the weighted sum
};

using Weights = std::array<double, 4>;
inline constexpr Weights kDefaultWeights{0.25, 0.25, 0.25, 0.25};

/// Throws ParseFailed when either text is not a valid Rust item sequence and
/// ConfigError when the weights do not sum to 1.
Score score(std::string_view candidate, std::string_view reference, const Weights& weights = kDefaultWeights);

// Components, exposed for testing.

/// Python str.split() over ASCII whitespace.
std::vector<std::string> split_tokens(std::string_view s);
/// Sentence BLEU-4 with add-0.1 smoothing of zero precisions.
double bleu(const std::vector<std::string>& hypothesis, const std::vector<std::string>& reference);
/// Keyword-weighted unigram recall variant, brevity penalty against length 2.
double weighted_bleu(const std::vector<std::string>& hypothesis, const std::vector<std::string>& reference);
/// Comments replaced by a space, blank lines dropped; string literals kept.
std::string remove_comments(std::string_view source);
double syntax_match(std::string_view candidate, std::string_view reference);

struct DataFlow {
    std::string var;
    std::string relation;
    std::vector<std::string> parents;
    bool operator==(const DataFlow&) const = default;
};
/// Normalized data-flow edges (variable names renamed var_0, var_1, ...).
std::vector<DataFlow> normalized_dataflow(std::string_view code);
/// Matched reference edges / reference edges; 0 when the reference has none.
double dataflow_match(std::string_view candidate, std::string_view reference);

const std::vector<std::string>& rust_keywords();

}  // namespace migratekit::codebleu

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace biomt {

using Tokens = std::vector<std::string>;

// Evaluation tokenizer: compatibility-normalizes, splits punctuation and
// symbols into single-codepoint tokens and splits on whitespace. Case is
// preserved unless `lowercase` is set.
Tokens tokenize_eval(std::string_view text, bool lowercase = false);

struct NgramPrecision {
    int order{0};
    std::uint64_t matched{0}; // clipped match count
    std::uint64_t total{0};   // candidate n-gram count
};

// Clipped (modified) n-gram precision over a corpus, single reference per
// hypothesis. Throws PairCountMismatch when the lists differ in length.
NgramPrecision modified_precision(const std::vector<Tokens>& hypotheses,
                                  const std::vector<Tokens>& references, int order);

// 1 when c > r, otherwise exp(1 - r/c). By convention c == 0 with r > 0
// yields 0 (handled as score-zero upstream).
double brevity_penalty(std::uint64_t candidate_length, std::uint64_t reference_length);

enum class BleuSmoothing {
    none,                 // any zero match count zeroes the score
    add_one_from_order_2, // add 1 to matched and total for n >= 2
};

std::string to_string(BleuSmoothing smoothing);
BleuSmoothing parse_smoothing(std::string_view name);

struct BleuReport {
    std::vector<NgramPrecision> precisions;
    std::uint64_t candidate_length{0};
    std::uint64_t reference_length{0};
    double brevity_penalty{1.0};
    double score{0.0}; // 0-100 scale
    int max_order{4};
    BleuSmoothing smoothing{BleuSmoothing::none};

    nlohmann::json to_json() const;
    // e.g. "BLEU = 41.37 (BP=1.000, c=102, r=99, p_n=62.4/48.1/33.3/21.9)"
    std::string summary_line() const;
};

// Corpus-level BLEU, geometric mean of orders 1..max_order times the brevity
// penalty. Throws EmptyCorpus on empty input and PairCountMismatch on
// unaligned lists.
BleuReport corpus_bleu(const std::vector<Tokens>& hypotheses,
                       const std::vector<Tokens>& references, int max_order = 4,
                       BleuSmoothing smoothing = BleuSmoothing::none);

} // namespace biomt

#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "biomt/bleu.hpp"
#include "biomt/core.hpp"

namespace biomt {

// Lexical translation model t(e|f) with interned vocabularies. The empty
// string is the NULL source word when enabled; real tokens are never empty,
// so there is no collision.
struct TranslationTable {
    std::vector<std::string> source_words; // id -> word; id 0 is NULL when includes_null
    std::vector<std::string> target_words;
    std::unordered_map<std::string, int> source_ids;
    std::unordered_map<std::string, int> target_ids;
    // probs[f_id]: (e_id, t(e|f)) sorted by descending prob, then target word.
    std::vector<std::vector<std::pair<int, double>>> probs;
    bool includes_null{false};

    // 0.0 for unseen pairs.
    double prob(const std::string& target_word, const std::string& source_word) const;
    bool knows_source(const std::string& source_word) const;
};

struct Ibm1Result {
    TranslationTable table;
    std::vector<double> log_likelihood; // one entry per iteration, non-decreasing
};

// Standard Model 1 EM: t initialized uniform over cooccurring words, per-token
// posterior normalization in the E-step, count normalization in the M-step.
// The likelihood recorded for iteration i is the corpus log-likelihood under
// the parameters that iteration started from. Texts are tokenized with
// tokenize_eval. Throws EmptyCorpus.
Ibm1Result train_ibm1(const std::vector<SegmentPair>& bitext, int iterations,
                      bool use_null = false);

// Add-k bigram model over tokenized target sentences. Histories include the
// <s> sentinel; the vocabulary includes </s> but not <s>, so every
// conditional sums to one over vocab().
struct LanguageModel {
    double k{1.0};
    std::unordered_map<std::string, std::unordered_map<std::string, std::uint64_t>> bigrams;
    std::unordered_map<std::string, std::uint64_t> history_totals;
    std::unordered_set<std::string> vocab; // target word types + </s>

    static const std::string kBos; // "<s>"
    static const std::string kEos; // "</s>"

    // (count(h,w) + k) / (count(h) + k * |V|); defined for any w, including
    // words outside the vocabulary (count 0).
    double prob(const std::string& word, const std::string& history) const;
    double log_prob(const std::string& word, const std::string& history) const;
};

LanguageModel train_bigram_lm(const std::vector<Tokens>& target_sentences, double k);

struct DecoderWeights {
    double lambda_tm{1.0};
    double lambda_lm{1.0};
    int beam_width{4};
};

// Throws InvalidSpec unless lambda_tm, lambda_lm >= 0, their sum is positive
// and beam_width >= 1.
void validate_weights(const DecoderWeights& weights);

// Monotone word-by-word beam search. Per position the candidates are the top
// target words by t(e|f) (capped at kDecoderCandidateCap); a source token
// unknown to the table is copied verbatim. Hypotheses are scored with
// lambda_tm * sum log t + lambda_lm * sum log p_lm (including the </s>
// transition), probabilities floored at 1e-12 before the log. Ties are broken
// toward the lexicographically smaller output, so decoding is deterministic.
Tokens decode(const Tokens& source_tokens, const TranslationTable& table,
              const LanguageModel& lm, const DecoderWeights& weights);

inline constexpr int kDecoderCandidateCap = 32;
inline constexpr double kLogFloor = 1e-12;

// Combined model score of a fixed output under the decoder's objective.
double hypothesis_score(const Tokens& source_tokens, const Tokens& output,
                        const TranslationTable& table, const LanguageModel& lm,
                        const DecoderWeights& weights);

// Decodes every source side and scores against the target side with add-one
// smoothed corpus BLEU (desk-scale corpora lose 4-gram matches too easily for
// the unsmoothed score).
BleuReport evaluate_baseline(const std::vector<SegmentPair>& test_bitext,
                             const TranslationTable& table, const LanguageModel& lm,
                             const DecoderWeights& weights, int threads = 1);

// Model files are TSV with a one-line versioned header.
void save_translation_table(std::ostream& out, const TranslationTable& table);
TranslationTable load_translation_table(std::istream& in);
void save_language_model(std::ostream& out, const LanguageModel& lm);
LanguageModel load_language_model(std::istream& in);

} // namespace biomt

#include "biomt/smt.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <thread>

#include "biomt/text.hpp"

namespace biomt {
namespace {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double floored_log(double p) {
    return std::log(std::max(p, kLogFloor));
}

} // namespace

double TranslationTable::prob(const std::string& target_word,
                              const std::string& source_word) const {
    auto f = source_ids.find(source_word);
    if (f == source_ids.end()) return 0.0;
    auto e = target_ids.find(target_word);
    if (e == target_ids.end()) return 0.0;
    for (const auto& [e_id, p] : probs[static_cast<std::size_t>(f->second)]) {
        if (e_id == e->second) return p;
    }
    return 0.0;
}

bool TranslationTable::knows_source(const std::string& source_word) const {
    return source_ids.count(source_word) > 0;
}

Ibm1Result train_ibm1(const std::vector<SegmentPair>& bitext, int iterations, bool use_null) {
    if (iterations <= 0) throw ValidationError("iterations must be positive");

    std::vector<std::vector<int>> src_sents;
    std::vector<std::vector<int>> tgt_sents;
    TranslationTable table;
    table.includes_null = use_null;
    if (use_null) {
        table.source_words.push_back("");
        table.source_ids.emplace("", 0);
    }
    auto intern = [](const std::string& w, std::vector<std::string>& words,
                     std::unordered_map<std::string, int>& ids) {
        auto [it, inserted] = ids.emplace(w, static_cast<int>(words.size()));
        if (inserted) words.push_back(w);
        return it->second;
    };
    for (const auto& pair : bitext) {
        auto src_tokens = tokenize_eval(pair.source_text);
        auto tgt_tokens = tokenize_eval(pair.target_text);
        if (src_tokens.empty() || tgt_tokens.empty()) continue;
        std::vector<int> src;
        std::vector<int> tgt;
        for (const auto& w : src_tokens) {
            src.push_back(intern(w, table.source_words, table.source_ids));
        }
        for (const auto& w : tgt_tokens) {
            tgt.push_back(intern(w, table.target_words, table.target_ids));
        }
        src_sents.push_back(std::move(src));
        tgt_sents.push_back(std::move(tgt));
    }
    if (src_sents.empty()) throw EmptyCorpus();

    const auto n_source = table.source_words.size();

    // Uniform initialization over cooccurring pairs.
    std::vector<std::unordered_map<int, double>> t(n_source);
    for (std::size_t s = 0; s < src_sents.size(); ++s) {
        for (int e : tgt_sents[s]) {
            if (use_null) t[0][e] = 1.0;
            for (int f : src_sents[s]) t[static_cast<std::size_t>(f)][e] = 1.0;
        }
    }
    for (auto& row : t) {
        const double uniform = 1.0 / static_cast<double>(row.size());
        for (auto& [e, p] : row) p = uniform;
    }

    Ibm1Result result;
    std::vector<std::unordered_map<int, double>> counts(n_source);
    for (int iter = 0; iter < iterations; ++iter) {
        for (auto& row : counts) row.clear();
        double log_likelihood = 0.0;
        for (std::size_t s = 0; s < src_sents.size(); ++s) {
            const auto& src = src_sents[s];
            const auto& tgt = tgt_sents[s];
            const double positions = static_cast<double>(src.size() + (use_null ? 1 : 0));
            for (int e : tgt) {
                double denom = use_null ? t[0].at(e) : 0.0;
                for (int f : src) denom += t[static_cast<std::size_t>(f)].at(e);
                log_likelihood += std::log(denom) - std::log(positions);
                if (use_null) counts[0][e] += t[0].at(e) / denom;
                for (int f : src) {
                    auto fi = static_cast<std::size_t>(f);
                    counts[fi][e] += t[fi].at(e) / denom;
                }
            }
        }
        result.log_likelihood.push_back(log_likelihood);
        for (std::size_t f = 0; f < n_source; ++f) {
            double total = 0.0;
            for (const auto& [e, c] : counts[f]) total += c;
            if (total <= 0.0) continue;
            for (auto& [e, c] : counts[f]) t[f][e] = c / total;
        }
    }

    table.probs.resize(n_source);
    for (std::size_t f = 0; f < n_source; ++f) {
        auto& row = table.probs[f];
        row.assign(t[f].begin(), t[f].end());
        std::sort(row.begin(), row.end(), [&table](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return table.target_words[static_cast<std::size_t>(a.first)] <
                   table.target_words[static_cast<std::size_t>(b.first)];
        });
    }
    result.table = std::move(table);
    return result;
}

const std::string LanguageModel::kBos = "<s>";
const std::string LanguageModel::kEos = "</s>";

double LanguageModel::prob(const std::string& word, const std::string& history) const {
    std::uint64_t pair_count = 0;
    std::uint64_t history_count = 0;
    auto h = bigrams.find(history);
    if (h != bigrams.end()) {
        auto w = h->second.find(word);
        if (w != h->second.end()) pair_count = w->second;
    }
    auto ht = history_totals.find(history);
    if (ht != history_totals.end()) history_count = ht->second;
    const double v = static_cast<double>(vocab.size());
    return (static_cast<double>(pair_count) + k) / (static_cast<double>(history_count) + k * v);
}

double LanguageModel::log_prob(const std::string& word, const std::string& history) const {
    return floored_log(prob(word, history));
}

LanguageModel train_bigram_lm(const std::vector<Tokens>& target_sentences, double k) {
    if (k <= 0.0) throw InvalidSpec("add-k constant must be positive");
    if (target_sentences.empty()) throw EmptyCorpus();
    LanguageModel lm;
    lm.k = k;
    lm.vocab.insert(LanguageModel::kEos);
    for (const auto& sentence : target_sentences) {
        const std::string* history = &LanguageModel::kBos;
        for (const auto& word : sentence) {
            ++lm.bigrams[*history][word];
            ++lm.history_totals[*history];
            lm.vocab.insert(word);
            history = &word;
        }
        ++lm.bigrams[*history][LanguageModel::kEos];
        ++lm.history_totals[*history];
    }
    return lm;
}

void validate_weights(const DecoderWeights& weights) {
    if (weights.lambda_tm < 0.0 || weights.lambda_lm < 0.0) {
        throw InvalidSpec("decoder weights must be non-negative");
    }
    if (weights.lambda_tm + weights.lambda_lm <= 0.0) {
        throw InvalidSpec("at least one decoder weight must be positive");
    }
    if (weights.beam_width < 1) throw InvalidSpec("beam width must be >= 1");
}

namespace {

struct Candidate {
    std::string word;
    double tm_log; // lambda-free log t(e|f); 0 for verbatim-copied OOV tokens
};

struct Hypothesis {
    Tokens words;
    double score{0.0};
};

bool hyp_less(const Hypothesis& a, const Hypothesis& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.words < b.words;
}

std::vector<Candidate> candidates_for(const std::string& source_word,
                                      const TranslationTable& table) {
    std::vector<Candidate> out;
    auto f = table.source_ids.find(source_word);
    if (f == table.source_ids.end()) {
        out.push_back({source_word, 0.0});
        return out;
    }
    const auto& row = table.probs[static_cast<std::size_t>(f->second)];
    const std::size_t n = std::min<std::size_t>(row.size(), kDecoderCandidateCap);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back({table.target_words[static_cast<std::size_t>(row[i].first)],
                       floored_log(row[i].second)});
    }
    if (out.empty()) out.push_back({source_word, 0.0});
    return out;
}

} // namespace

Tokens decode(const Tokens& source_tokens, const TranslationTable& table,
              const LanguageModel& lm, const DecoderWeights& weights) {
    validate_weights(weights);
    if (source_tokens.empty()) return {};

    std::vector<Hypothesis> beam{Hypothesis{}};
    for (const auto& source_word : source_tokens) {
        const auto options = candidates_for(source_word, table);
        std::vector<Hypothesis> expanded;
        expanded.reserve(beam.size() * options.size());
        for (const auto& hyp : beam) {
            const std::string& history = hyp.words.empty() ? LanguageModel::kBos : hyp.words.back();
            for (const auto& option : options) {
                Hypothesis next;
                next.words = hyp.words;
                next.words.push_back(option.word);
                next.score = hyp.score + weights.lambda_tm * option.tm_log +
                             weights.lambda_lm * lm.log_prob(option.word, history);
                expanded.push_back(std::move(next));
            }
        }
        std::sort(expanded.begin(), expanded.end(), hyp_less);
        if (expanded.size() > static_cast<std::size_t>(weights.beam_width)) {
            expanded.resize(static_cast<std::size_t>(weights.beam_width));
        }
        beam = std::move(expanded);
    }
    for (auto& hyp : beam) {
        hyp.score += weights.lambda_lm * lm.log_prob(LanguageModel::kEos, hyp.words.back());
    }
    std::sort(beam.begin(), beam.end(), hyp_less);
    return beam.front().words;
}

double hypothesis_score(const Tokens& source_tokens, const Tokens& output,
                        const TranslationTable& table, const LanguageModel& lm,
                        const DecoderWeights& weights) {
    if (source_tokens.size() != output.size()) {
        throw ValidationError("hypothesis_score needs one output token per source token");
    }
    double score = 0.0;
    const std::string* history = &LanguageModel::kBos;
    for (std::size_t i = 0; i < output.size(); ++i) {
        if (table.knows_source(source_tokens[i])) {
            score += weights.lambda_tm * floored_log(table.prob(output[i], source_tokens[i]));
        } else if (output[i] != source_tokens[i]) {
            score += weights.lambda_tm * floored_log(0.0);
        }
        score += weights.lambda_lm * lm.log_prob(output[i], *history);
        history = &output[i];
    }
    if (!output.empty()) {
        score += weights.lambda_lm * lm.log_prob(LanguageModel::kEos, *history);
    }
    return score;
}

BleuReport evaluate_baseline(const std::vector<SegmentPair>& test_bitext,
                             const TranslationTable& table, const LanguageModel& lm,
                             const DecoderWeights& weights, int threads) {
    if (test_bitext.empty()) throw EmptyCorpus();
    validate_weights(weights);

    std::vector<Tokens> sources(test_bitext.size());
    std::vector<Tokens> references(test_bitext.size());
    for (std::size_t i = 0; i < test_bitext.size(); ++i) {
        sources[i] = tokenize_eval(test_bitext[i].source_text);
        references[i] = tokenize_eval(test_bitext[i].target_text);
    }

    std::vector<Tokens> hypotheses(test_bitext.size());
    const int n_threads = std::max(1, std::min<int>(threads, static_cast<int>(sources.size())));
    if (n_threads == 1) {
        for (std::size_t i = 0; i < sources.size(); ++i) {
            hypotheses[i] = decode(sources[i], table, lm, weights);
        }
    } else {
        // Sentences are independent; a fixed index split keeps results
        // identical for any thread count.
        std::vector<std::thread> workers;
        for (int w = 0; w < n_threads; ++w) {
            workers.emplace_back([&, w]() {
                for (std::size_t i = static_cast<std::size_t>(w); i < sources.size();
                     i += static_cast<std::size_t>(n_threads)) {
                    hypotheses[i] = decode(sources[i], table, lm, weights);
                }
            });
        }
        for (auto& worker : workers) worker.join();
    }
    return corpus_bleu(hypotheses, references, 4, BleuSmoothing::add_one_from_order_2);
}

void save_translation_table(std::ostream& out, const TranslationTable& table) {
    out << "biomt-ttable\t1\tnull=" << (table.includes_null ? 1 : 0) << "\n";
    std::vector<int> order(table.source_words.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&table](int a, int b) {
        return table.source_words[static_cast<std::size_t>(a)] <
               table.source_words[static_cast<std::size_t>(b)];
    });
    for (int f : order) {
        const auto& word = table.source_words[static_cast<std::size_t>(f)];
        for (const auto& [e, p] : table.probs[static_cast<std::size_t>(f)]) {
            out << word << '\t' << table.target_words[static_cast<std::size_t>(e)] << '\t'
                << format_double(p) << '\n';
        }
    }
}

TranslationTable load_translation_table(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("empty translation table file");
    auto header = text::split(line, '\t');
    if (header.size() < 3 || header[0] != "biomt-ttable" || header[1] != "1") {
        throw ValidationError("bad translation table header");
    }
    TranslationTable table;
    table.includes_null = header[2] == "null=1";
    auto intern = [](const std::string& w, std::vector<std::string>& words,
                     std::unordered_map<std::string, int>& ids) {
        auto [it, inserted] = ids.emplace(w, static_cast<int>(words.size()));
        if (inserted) words.push_back(w);
        return it->second;
    };
    if (table.includes_null) intern("", table.source_words, table.source_ids);
    std::uint64_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto cols = text::split(line, '\t');
        if (cols.size() != 3) throw MalformedRow(line_no, "expected f, e, prob");
        const int f = intern(cols[0], table.source_words, table.source_ids);
        const int e = intern(cols[1], table.target_words, table.target_ids);
        char* end = nullptr;
        const double p = std::strtod(cols[2].c_str(), &end);
        if (end == cols[2].c_str()) throw MalformedRow(line_no, "bad probability");
        if (static_cast<std::size_t>(f) >= table.probs.size()) {
            table.probs.resize(static_cast<std::size_t>(f) + 1);
        }
        table.probs[static_cast<std::size_t>(f)].emplace_back(e, p);
    }
    table.probs.resize(table.source_words.size());
    for (auto& row : table.probs) {
        std::sort(row.begin(), row.end(), [&table](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return table.target_words[static_cast<std::size_t>(a.first)] <
                   table.target_words[static_cast<std::size_t>(b.first)];
        });
    }
    return table;
}

void save_language_model(std::ostream& out, const LanguageModel& lm) {
    out << "biomt-lm\t1\tk=" << format_double(lm.k) << "\n";
    std::vector<std::pair<std::string, std::string>> rows;
    for (const auto& [h, events] : lm.bigrams) {
        for (const auto& [w, c] : events) rows.emplace_back(h, w);
    }
    std::sort(rows.begin(), rows.end());
    for (const auto& [h, w] : rows) {
        out << h << '\t' << w << '\t' << lm.bigrams.at(h).at(w) << '\n';
    }
}

LanguageModel load_language_model(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("empty language model file");
    auto header = text::split(line, '\t');
    if (header.size() < 3 || header[0] != "biomt-lm" || header[1] != "1" ||
        header[2].rfind("k=", 0) != 0) {
        throw ValidationError("bad language model header");
    }
    LanguageModel lm;
    lm.k = std::strtod(header[2].c_str() + 2, nullptr);
    if (lm.k <= 0.0) throw ValidationError("language model k must be positive");
    lm.vocab.insert(LanguageModel::kEos);
    std::uint64_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto cols = text::split(line, '\t');
        if (cols.size() != 3) throw MalformedRow(line_no, "expected history, word, count");
        const std::uint64_t count = std::strtoull(cols[2].c_str(), nullptr, 10);
        lm.bigrams[cols[0]][cols[1]] += count;
        lm.history_totals[cols[0]] += count;
        lm.vocab.insert(cols[1]);
    }
    return lm;
}

} // namespace biomt

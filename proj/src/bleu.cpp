#include "biomt/bleu.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include "biomt/errors.hpp"
#include "biomt/text.hpp"

namespace biomt {
namespace {

// Tokens contain no whitespace, so a space-joined key is unambiguous.
void count_ngrams(const Tokens& tokens, int n,
                  std::unordered_map<std::string, std::uint64_t>& counts) {
    if (static_cast<int>(tokens.size()) < n) return;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        std::string key = tokens[i];
        for (int j = 1; j < n; ++j) {
            key += ' ';
            key += tokens[i + j];
        }
        ++counts[key];
    }
}

} // namespace

Tokens tokenize_eval(std::string_view input, bool lowercase) {
    std::string normalized =
        lowercase ? text::compat_fold(input) : text::compat_normalize(input);
    return text::split_tokens(normalized);
}

NgramPrecision modified_precision(const std::vector<Tokens>& hypotheses,
                                  const std::vector<Tokens>& references, int order) {
    if (hypotheses.size() != references.size()) {
        throw PairCountMismatch(hypotheses.size(), references.size());
    }
    if (order < 1) throw ValidationError("n-gram order must be >= 1");

    NgramPrecision p;
    p.order = order;
    std::unordered_map<std::string, std::uint64_t> hyp_counts;
    std::unordered_map<std::string, std::uint64_t> ref_counts;
    for (std::size_t s = 0; s < hypotheses.size(); ++s) {
        const auto& hyp = hypotheses[s];
        if (static_cast<int>(hyp.size()) < order) continue;
        p.total += hyp.size() - order + 1;

        hyp_counts.clear();
        ref_counts.clear();
        count_ngrams(hyp, order, hyp_counts);
        count_ngrams(references[s], order, ref_counts);
        for (const auto& [ngram, count] : hyp_counts) {
            auto it = ref_counts.find(ngram);
            if (it != ref_counts.end()) {
                p.matched += std::min(count, it->second);
            }
        }
    }
    return p;
}

double brevity_penalty(std::uint64_t candidate_length, std::uint64_t reference_length) {
    if (candidate_length == 0) return reference_length == 0 ? 1.0 : 0.0;
    if (candidate_length > reference_length) return 1.0;
    return std::exp(1.0 - static_cast<double>(reference_length) /
                              static_cast<double>(candidate_length));
}

std::string to_string(BleuSmoothing smoothing) {
    switch (smoothing) {
        case BleuSmoothing::none: return "none";
        case BleuSmoothing::add_one_from_order_2: return "add_one_from_order_2";
    }
    throw InternalError("unhandled smoothing mode");
}

BleuSmoothing parse_smoothing(std::string_view name) {
    if (name == "none") return BleuSmoothing::none;
    if (name == "add_one_from_order_2" || name == "add1") {
        return BleuSmoothing::add_one_from_order_2;
    }
    throw ValidationError("unknown smoothing mode: " + std::string(name));
}

nlohmann::json BleuReport::to_json() const {
    nlohmann::json precs = nlohmann::json::array();
    for (const auto& p : precisions) {
        precs.push_back({{"order", p.order}, {"matched", p.matched}, {"total", p.total}});
    }
    return {{"score", score},
            {"brevity_penalty", brevity_penalty},
            {"candidate_length", candidate_length},
            {"reference_length", reference_length},
            {"max_order", max_order},
            {"smoothing", to_string(smoothing)},
            {"precisions", precs}};
}

std::string BleuReport::summary_line() const {
    std::ostringstream out;
    out.setf(std::ios::fixed);
    out.precision(2);
    out << "BLEU = " << score << " (BP=";
    out.precision(3);
    out << brevity_penalty << ", c=" << candidate_length << ", r=" << reference_length
        << ", p_n=";
    out.precision(1);
    for (std::size_t i = 0; i < precisions.size(); ++i) {
        if (i > 0) out << '/';
        const auto& p = precisions[i];
        if (p.total == 0) {
            out << "n/a";
        } else {
            out << 100.0 * static_cast<double>(p.matched) / static_cast<double>(p.total);
        }
    }
    out << ")";
    return out.str();
}

BleuReport corpus_bleu(const std::vector<Tokens>& hypotheses,
                       const std::vector<Tokens>& references, int max_order,
                       BleuSmoothing smoothing) {
    if (hypotheses.size() != references.size()) {
        throw PairCountMismatch(hypotheses.size(), references.size());
    }
    if (hypotheses.empty()) throw EmptyCorpus();
    if (max_order < 1) throw ValidationError("max n-gram order must be >= 1");

    BleuReport report;
    report.max_order = max_order;
    report.smoothing = smoothing;
    for (const auto& hyp : hypotheses) report.candidate_length += hyp.size();
    for (const auto& ref : references) report.reference_length += ref.size();
    for (int n = 1; n <= max_order; ++n) {
        report.precisions.push_back(modified_precision(hypotheses, references, n));
    }
    report.brevity_penalty = brevity_penalty(report.candidate_length, report.reference_length);

    if (report.candidate_length == 0) {
        report.score = 0.0;
        return report;
    }

    double log_sum = 0.0;
    bool zero = false;
    for (const auto& p : report.precisions) {
        double matched = static_cast<double>(p.matched);
        double total = static_cast<double>(p.total);
        if (smoothing == BleuSmoothing::add_one_from_order_2 && p.order >= 2) {
            matched += 1.0;
            total += 1.0;
        }
        if (matched <= 0.0 || total <= 0.0) {
            zero = true;
            break;
        }
        log_sum += std::log(matched / total);
    }
    report.score =
        zero ? 0.0
             : 100.0 * report.brevity_penalty * std::exp(log_sum / static_cast<double>(max_order));
    return report;
}

} // namespace biomt

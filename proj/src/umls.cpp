#include "biomt/umls.hpp"

namespace biomt {

nlohmann::json ExtractionReport::to_json() const {
    return {{"concepts_seen", concepts_seen},
            {"pairs_emitted", pairs_emitted},
            {"concepts_missing_source", concepts_missing_source},
            {"concepts_missing_target", concepts_missing_target}};
}

bool ConceptPairExtractor::RankedAtom::better_than(const RankedAtom& other) const {
    // The trailing term comparison makes the order total even for synthetic
    // data where two atoms share a SUI, so extraction is permutation-proof.
    return std::tie(ts_rank, ispref_rank, supp_rank, sui, term) <
           std::tie(other.ts_rank, other.ispref_rank, other.supp_rank, other.sui, other.term);
}

void ConceptPairExtractor::add(const ConceptAtom& atom) {
    const bool is_source = atom.lat == pair_.source;
    const bool is_target = atom.lat == pair_.target;
    if (!is_source && !is_target) return;

    RankedAtom ranked{atom.ts == "P" ? 0 : 1,
                      atom.ispref == 'Y' ? 0 : 1,
                      atom.suppress == 'N' ? 0 : 1,
                      atom.sui,
                      atom.str_text};
    auto& sides = by_cui_[atom.cui];
    auto& slot = is_source ? sides.source : sides.target;
    if (!slot.has_value() || ranked.better_than(*slot)) {
        slot = std::move(ranked);
    }
}

std::pair<std::vector<TermPair>, ExtractionReport> ConceptPairExtractor::finish() const {
    std::vector<TermPair> pairs;
    ExtractionReport report;
    report.concepts_seen = by_cui_.size();
    for (const auto& [cui, sides] : by_cui_) {
        if (sides.source.has_value() && sides.target.has_value()) {
            pairs.push_back(TermPair{cui, sides.source->term, sides.target->term, pair_});
            ++report.pairs_emitted;
        } else if (sides.source.has_value()) {
            ++report.concepts_missing_target;
        } else {
            ++report.concepts_missing_source;
        }
    }
    // by_cui_ is an ordered map, so pairs are already sorted by CUI.
    return {std::move(pairs), report};
}

std::pair<std::vector<TermPair>, ExtractionReport>
extract_parallel_concepts(const std::vector<ConceptAtom>& atoms, const LangPair& pair) {
    ConceptPairExtractor extractor(pair);
    for (const auto& atom : atoms) extractor.add(atom);
    return extractor.finish();
}

void write_term_pairs_tsv(std::ostream& out, const std::vector<TermPair>& pairs) {
    out << "cui\tsource_term\ttarget_term\n";
    for (const auto& p : pairs) {
        out << p.cui << '\t' << p.source_term << '\t' << p.target_term << '\n';
    }
}

} // namespace biomt

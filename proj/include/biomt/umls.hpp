#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "biomt/ingest.hpp"

namespace biomt {

struct TermPair {
    std::string cui;
    std::string source_term;
    std::string target_term;
    LangPair pair;

    bool operator==(const TermPair&) const = default;
};

struct ExtractionReport {
    std::uint64_t concepts_seen{0};
    std::uint64_t pairs_emitted{0};
    std::uint64_t concepts_missing_source{0};
    std::uint64_t concepts_missing_target{0};

    nlohmann::json to_json() const;
};

// Streaming accumulator: feed atoms in any order, then finish() yields one
// TermPair per concept that has at least one atom on each side, sorted by
// CUI. The atom chosen per (concept, language) is the best-ranked one under
// (TS='P', then ISPREF='Y', then SUPPRESS='N', then smallest SUI, then the
// term string); the rank is a total order, so the result is independent of
// input order.
class ConceptPairExtractor {
public:
    explicit ConceptPairExtractor(LangPair pair) : pair_(std::move(pair)) {}

    void add(const ConceptAtom& atom);
    std::pair<std::vector<TermPair>, ExtractionReport> finish() const;

private:
    struct RankedAtom {
        int ts_rank;     // 0 when TS == "P"
        int ispref_rank; // 0 when ISPREF == 'Y'
        int supp_rank;   // 0 when SUPPRESS == 'N'
        std::string sui;
        std::string term;

        bool better_than(const RankedAtom& other) const;
    };

    struct Sides {
        std::optional<RankedAtom> source;
        std::optional<RankedAtom> target;
    };

    LangPair pair_;
    std::map<std::string, Sides> by_cui_;
};

std::pair<std::vector<TermPair>, ExtractionReport>
extract_parallel_concepts(const std::vector<ConceptAtom>& atoms, const LangPair& pair);

// TSV with header: cui, source_term, target_term.
void write_term_pairs_tsv(std::ostream& out, const std::vector<TermPair>& pairs);

} // namespace biomt

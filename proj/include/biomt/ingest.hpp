#pragma once

#include <cstdint>
#include <functional>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "biomt/core.hpp"

// Streaming parsers. Each one reads line by line and hands records to a
// sink, so memory stays bounded per record regardless of file size.
namespace biomt {

using SegmentSink = std::function<void(SegmentPair&&)>;

struct BitextParseReport {
    std::uint64_t emitted{0};
    std::uint64_t blank_pairs_dropped{0};
};

// Pairs line i of `source` with line i of `target`. Blank-blank pairs are
// dropped and counted; a one-sided blank throws AsymmetricBlank; differing
// line counts throw LineCountMismatch with both totals.
BitextParseReport parse_bitext(std::istream& source, std::istream& target,
                               const LangPair& pair, const std::string& corpus_id,
                               const SegmentSink& sink);

std::vector<SegmentPair> read_bitext(std::istream& source, std::istream& target,
                                     const LangPair& pair, const std::string& corpus_id,
                                     BitextParseReport* report = nullptr);

// Tab-separated bitext: source, target, optional doc_id in column 3. Rows
// with fewer than two columns (or a one-sided empty cell) throw MalformedRow;
// rows empty on both sides are dropped and counted.
BitextParseReport parse_tsv_bitext(std::istream& input, const LangPair& pair,
                                   const std::string& corpus_id, const SegmentSink& sink);

std::vector<SegmentPair> read_tsv_bitext(std::istream& input, const LangPair& pair,
                                         const std::string& corpus_id,
                                         BitextParseReport* report = nullptr);

// One row of the concept file (MRCONSO.RRF layout:
// CUI|LAT|TS|LUI|STT|SUI|ISPREF|AUI|SAUI|SCUI|SDUI|SAB|TTY|CODE|STR|SRL|SUPPRESS|CVF|).
struct ConceptAtom {
    std::string cui;
    LanguageTag lat;
    std::string ts;
    char ispref{'N'};
    std::string sui;
    std::string aui;
    std::string sab;
    std::string str_text;
    char suppress{'N'};

    bool operator==(const ConceptAtom&) const = default;
};

struct SkippedRow {
    std::uint64_t line_no;
    std::string reason;
};

struct MrconsoReport {
    std::uint64_t input_lines{0};
    std::uint64_t emitted{0};
    std::uint64_t skipped_language{0};
    std::uint64_t malformed{0};
    std::vector<SkippedRow> malformed_rows;

    // "line_no\treason" per skipped/malformed row.
    std::string errors_to_tsv() const;
};

using ConceptSink = std::function<void(ConceptAtom&&)>;

inline constexpr std::uint64_t kDefaultMalformedCap = 1000;

// Emits one atom per row whose LAT is in `keep_languages`; other rows are
// skipped and counted. Malformed rows (field count != 18, empty CUI or STR)
// are collected into the report up to `malformed_cap`, after which the parse
// fails hard. Always: emitted + skipped_language + malformed == input_lines.
MrconsoReport parse_mrconso(std::istream& input, const std::vector<LanguageTag>& keep_languages,
                            const ConceptSink& sink,
                            std::uint64_t malformed_cap = kDefaultMalformedCap);

std::vector<ConceptAtom> read_mrconso(std::istream& input,
                                      const std::vector<LanguageTag>& keep_languages,
                                      MrconsoReport* report = nullptr,
                                      std::uint64_t malformed_cap = kDefaultMalformedCap);

struct DocMeta {
    std::optional<std::string> pmid;
    std::optional<std::string> pii;
    std::string title;
    std::optional<LanguageTag> language;

    bool operator==(const DocMeta&) const = default;
};

struct DocMetaReport {
    std::uint64_t emitted{0};
    std::uint64_t empty_rows_skipped{0};
};

using DocMetaSink = std::function<void(DocMeta&&)>;

// TSV with a header row naming columns among {pmid, pii, title, language};
// the title column is mandatory (MissingColumn otherwise). Rows that are
// empty in every recognized column are skipped and counted.
DocMetaReport parse_doc_metadata(std::istream& input, const DocMetaSink& sink);

std::vector<DocMeta> read_doc_metadata(std::istream& input, DocMetaReport* report = nullptr);

} // namespace biomt

#include "biomt/ingest.hpp"

#include <algorithm>

#include "biomt/text.hpp"

namespace biomt {
namespace {

// getline with CRLF tolerance.
bool next_line(std::istream& in, std::string& line) {
    if (!std::getline(in, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
}

std::uint64_t drain_line_count(std::istream& in) {
    std::uint64_t n = 0;
    std::string line;
    while (next_line(in, line)) ++n;
    return n;
}

} // namespace

BitextParseReport parse_bitext(std::istream& source, std::istream& target,
                               const LangPair& pair, const std::string& corpus_id,
                               const SegmentSink& sink) {
    (void)pair; // carried for symmetry with the TSV parser; line pairing does not need it
    BitextParseReport report;
    std::string src_line;
    std::string tgt_line;
    std::uint64_t line_no = 0;
    while (true) {
        const bool have_src = next_line(source, src_line);
        const bool have_tgt = next_line(target, tgt_line);
        if (have_src != have_tgt) {
            std::uint64_t src_total = line_no + (have_src ? 1 + drain_line_count(source) : 0);
            std::uint64_t tgt_total = line_no + (have_tgt ? 1 + drain_line_count(target) : 0);
            throw LineCountMismatch(src_total, tgt_total);
        }
        if (!have_src) break;
        ++line_no;
        const auto src = text::trim(src_line);
        const auto tgt = text::trim(tgt_line);
        if (src.empty() && tgt.empty()) {
            ++report.blank_pairs_dropped;
            continue;
        }
        if (src.empty() || tgt.empty()) {
            throw AsymmetricBlank(line_no);
        }
        sink(SegmentPair{std::string(src), std::string(tgt), corpus_id, std::nullopt});
        ++report.emitted;
    }
    return report;
}

std::vector<SegmentPair> read_bitext(std::istream& source, std::istream& target,
                                     const LangPair& pair, const std::string& corpus_id,
                                     BitextParseReport* report) {
    std::vector<SegmentPair> out;
    auto r = parse_bitext(source, target, pair, corpus_id,
                          [&out](SegmentPair&& s) { out.push_back(std::move(s)); });
    if (report != nullptr) *report = r;
    return out;
}

BitextParseReport parse_tsv_bitext(std::istream& input, const LangPair& pair,
                                   const std::string& corpus_id, const SegmentSink& sink) {
    (void)pair;
    BitextParseReport report;
    std::string line;
    std::uint64_t line_no = 0;
    while (next_line(input, line)) {
        ++line_no;
        if (text::is_blank(line)) {
            ++report.blank_pairs_dropped;
            continue;
        }
        auto cols = text::split(line, '\t');
        if (cols.size() < 2) {
            throw MalformedRow(line_no, "expected at least 2 tab-separated columns");
        }
        const auto src = text::trim(cols[0]);
        const auto tgt = text::trim(cols[1]);
        if (src.empty() && tgt.empty()) {
            ++report.blank_pairs_dropped;
            continue;
        }
        if (src.empty() || tgt.empty()) {
            throw MalformedRow(line_no, "one-sided empty cell");
        }
        SegmentPair segment{std::string(src), std::string(tgt), corpus_id, std::nullopt};
        if (cols.size() >= 3) {
            auto doc = text::trim(cols[2]);
            if (!doc.empty()) segment.doc_id = std::string(doc);
        }
        sink(std::move(segment));
        ++report.emitted;
    }
    return report;
}

std::vector<SegmentPair> read_tsv_bitext(std::istream& input, const LangPair& pair,
                                         const std::string& corpus_id,
                                         BitextParseReport* report) {
    std::vector<SegmentPair> out;
    auto r = parse_tsv_bitext(input, pair, corpus_id,
                              [&out](SegmentPair&& s) { out.push_back(std::move(s)); });
    if (report != nullptr) *report = r;
    return out;
}

std::string MrconsoReport::errors_to_tsv() const {
    std::string out;
    for (const auto& row : malformed_rows) {
        out += std::to_string(row.line_no);
        out += '\t';
        out += row.reason;
        out += '\n';
    }
    return out;
}

MrconsoReport parse_mrconso(std::istream& input, const std::vector<LanguageTag>& keep_languages,
                            const ConceptSink& sink, std::uint64_t malformed_cap) {
    MrconsoReport report;
    std::string line;
    auto kept = [&keep_languages](const LanguageTag& lat) {
        return std::find(keep_languages.begin(), keep_languages.end(), lat) !=
               keep_languages.end();
    };
    auto malformed = [&report, malformed_cap](std::uint64_t line_no, const std::string& reason) {
        ++report.malformed;
        report.malformed_rows.push_back({line_no, reason});
        if (report.malformed > malformed_cap) {
            throw ValidationError("more than " + std::to_string(malformed_cap) +
                                  " malformed rows, aborting at line " + std::to_string(line_no));
        }
    };
    while (next_line(input, line)) {
        ++report.input_lines;
        // 18 fields with a trailing delimiter split into 19 pieces, the last empty.
        auto fields = text::split(line, '|');
        if (fields.size() != 19 || !fields[18].empty()) {
            malformed(report.input_lines, "expected 18 pipe-delimited fields");
            continue;
        }
        if (fields[0].empty() || fields[14].empty()) {
            malformed(report.input_lines, fields[0].empty() ? "empty CUI" : "empty STR");
            continue;
        }
        LanguageTag lat;
        try {
            lat = LanguageTag::parse(fields[1]);
        } catch (const ValidationError&) {
            malformed(report.input_lines, "bad LAT '" + fields[1] + "'");
            continue;
        }
        if (!kept(lat)) {
            ++report.skipped_language;
            continue;
        }
        ConceptAtom atom;
        atom.cui = std::move(fields[0]);
        atom.lat = lat;
        atom.ts = std::move(fields[2]);
        atom.sui = std::move(fields[5]);
        atom.ispref = fields[6].empty() ? 'N' : fields[6][0];
        atom.aui = std::move(fields[7]);
        atom.sab = std::move(fields[11]);
        atom.str_text = std::move(fields[14]);
        atom.suppress = fields[16].empty() ? 'N' : fields[16][0];
        sink(std::move(atom));
        ++report.emitted;
    }
    return report;
}

std::vector<ConceptAtom> read_mrconso(std::istream& input,
                                      const std::vector<LanguageTag>& keep_languages,
                                      MrconsoReport* report, std::uint64_t malformed_cap) {
    std::vector<ConceptAtom> out;
    auto r = parse_mrconso(input, keep_languages,
                           [&out](ConceptAtom&& a) { out.push_back(std::move(a)); }, malformed_cap);
    if (report != nullptr) *report = r;
    return out;
}

DocMetaReport parse_doc_metadata(std::istream& input, const DocMetaSink& sink) {
    DocMetaReport report;
    std::string line;
    if (!next_line(input, line)) {
        throw MissingColumn("title");
    }
    auto headers = text::split(line, '\t');
    int pmid_col = -1, pii_col = -1, title_col = -1, lang_col = -1;
    for (std::size_t i = 0; i < headers.size(); ++i) {
        const auto h = text::trim(headers[i]);
        if (h == "pmid") pmid_col = static_cast<int>(i);
        else if (h == "pii") pii_col = static_cast<int>(i);
        else if (h == "title") title_col = static_cast<int>(i);
        else if (h == "language") lang_col = static_cast<int>(i);
    }
    if (title_col < 0) throw MissingColumn("title");

    auto cell = [](const std::vector<std::string>& cols, int idx) -> std::string {
        if (idx < 0 || static_cast<std::size_t>(idx) >= cols.size()) return {};
        return std::string(text::trim(cols[static_cast<std::size_t>(idx)]));
    };

    while (next_line(input, line)) {
        auto cols = text::split(line, '\t');
        DocMeta doc;
        auto pmid = cell(cols, pmid_col);
        auto pii = cell(cols, pii_col);
        doc.title = cell(cols, title_col);
        auto lang = cell(cols, lang_col);
        if (pmid.empty() && pii.empty() && doc.title.empty()) {
            ++report.empty_rows_skipped;
            continue;
        }
        if (!pmid.empty()) doc.pmid = std::move(pmid);
        if (!pii.empty()) doc.pii = std::move(pii);
        if (!lang.empty()) {
            try {
                doc.language = LanguageTag::parse(lang);
            } catch (const ValidationError&) {
                // a junk language cell does not invalidate the record
            }
        }
        sink(std::move(doc));
        ++report.emitted;
    }
    return report;
}

std::vector<DocMeta> read_doc_metadata(std::istream& input, DocMetaReport* report) {
    std::vector<DocMeta> out;
    auto r = parse_doc_metadata(input, [&out](DocMeta&& d) { out.push_back(std::move(d)); });
    if (report != nullptr) *report = r;
    return out;
}

} // namespace biomt

#include <doctest.h>

#include <fstream>
#include <sstream>

#include "biomt/ingest.hpp"
#include "helpers.hpp"

using namespace biomt;

namespace {
const LangPair kPair = parse_lang_pair("SPA-ENG");
}

TEST_CASE("parse_bitext pairs lines in order") {
    std::istringstream src("a b\n");
    std::istringstream tgt("x y\n");
    auto pairs = read_bitext(src, tgt, kPair, "c1");
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0].source_text == "a b");
    CHECK(pairs[0].target_text == "x y");
    CHECK(pairs[0].corpus_id == "c1");
    CHECK_FALSE(pairs[0].doc_id.has_value());
}

TEST_CASE("parse_bitext on empty corpus") {
    std::istringstream src;
    std::istringstream tgt;
    BitextParseReport report;
    auto pairs = read_bitext(src, tgt, kPair, "c1", &report);
    CHECK(pairs.empty());
    CHECK(report.emitted == 0);
}

TEST_CASE("parse_bitext reports full line counts on mismatch") {
    std::istringstream src("uno\ndos\n");
    std::istringstream tgt("one\n");
    try {
        read_bitext(src, tgt, kPair, "c1");
        FAIL("expected LineCountMismatch");
    } catch (const LineCountMismatch& e) {
        CHECK(e.source_lines() == 2);
        CHECK(e.target_lines() == 1);
    }
}

TEST_CASE("parse_bitext drops blank-blank pairs and rejects one-sided blanks") {
    SUBCASE("blank-blank dropped and counted") {
        std::istringstream src("uno\n\ndos\n");
        std::istringstream tgt("one\n   \ntwo\n");
        BitextParseReport report;
        auto pairs = read_bitext(src, tgt, kPair, "c1", &report);
        CHECK(pairs.size() == 2);
        CHECK(report.blank_pairs_dropped == 1);
        CHECK(report.emitted == 2);
    }
    SUBCASE("one-sided blank throws with line number") {
        std::istringstream src("uno\n\n");
        std::istringstream tgt("one\ntwo\n");
        try {
            read_bitext(src, tgt, kPair, "c1");
            FAIL("expected AsymmetricBlank");
        } catch (const AsymmetricBlank& e) {
            CHECK(e.line_no() == 2);
        }
    }
}

TEST_CASE("parse_bitext emits only invariant-satisfying segments") {
    std::istringstream src("  padded  \nsegundo\n");
    std::istringstream tgt("first\r\nsecond\n");
    auto pairs = read_bitext(src, tgt, kPair, "c1");
    for (const auto& p : pairs) CHECK(segment_invariants_ok(p));
    CHECK(pairs[0].source_text == "padded");
    CHECK(pairs[0].target_text == "first");
}

TEST_CASE("parse_tsv_bitext maps columns and captures doc ids") {
    std::istringstream in("hola\thello\tS1\n");
    auto pairs = read_tsv_bitext(in, kPair, "c2");
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0].source_text == "hola");
    CHECK(pairs[0].target_text == "hello");
    REQUIRE(pairs[0].doc_id.has_value());
    CHECK(*pairs[0].doc_id == "S1");
}

TEST_CASE("parse_tsv_bitext rejects short rows with the line number") {
    std::istringstream in("solo_una_columna\n");
    try {
        read_tsv_bitext(in, kPair, "c2");
        FAIL("expected MalformedRow");
    } catch (const MalformedRow& e) {
        CHECK(e.line_no() == 1);
    }
}

TEST_CASE("parse_tsv_bitext preserves order") {
    std::istringstream in("a\tb\nc\td\n");
    auto pairs = read_tsv_bitext(in, kPair, "c2");
    REQUIRE(pairs.size() == 2);
    CHECK(pairs[0].source_text == "a");
    CHECK(pairs[1].source_text == "c");
}

TEST_CASE("parse_mrconso keeps requested languages and counts the rest") {
    const std::string row =
        "C0000001|ENG|P|L0001|PF|S0001|Y|A0001||||SRC|PT|X1|headache|0|N||\n";
    SUBCASE("kept row becomes an atom") {
        std::istringstream in(row);
        MrconsoReport report;
        auto atoms = read_mrconso(in, {LanguageTag::parse("ENG"), LanguageTag::parse("SPA")},
                                  &report);
        REQUIRE(atoms.size() == 1);
        CHECK(atoms[0].cui == "C0000001");
        CHECK(atoms[0].lat.code() == "ENG");
        CHECK(atoms[0].str_text == "headache");
        CHECK(atoms[0].ispref == 'Y');
        CHECK(atoms[0].sui == "S0001");
        CHECK(atoms[0].sab == "SRC");
        CHECK(report.emitted == 1);
    }
    SUBCASE("other-language row is skipped and counted") {
        std::string fre = row;
        fre.replace(fre.find("ENG"), 3, "FRE");
        std::istringstream in(fre);
        MrconsoReport report;
        auto atoms = read_mrconso(in, {LanguageTag::parse("ENG"), LanguageTag::parse("SPA")},
                                  &report);
        CHECK(atoms.empty());
        CHECK(report.skipped_language == 1);
    }
    SUBCASE("17-field row is malformed") {
        std::istringstream in("C0000001|ENG|P|L0001|PF|S0001|Y|A0001||||SRC|PT|X1|headache|0|N|\n");
        MrconsoReport report;
        auto atoms = read_mrconso(in, {LanguageTag::parse("ENG")}, &report);
        CHECK(atoms.empty());
        CHECK(report.malformed == 1);
        CHECK(report.errors_to_tsv().find("1\t") == 0);
    }
    SUBCASE("empty CUI or STR is malformed") {
        std::istringstream in(
            "|ENG|P|L0001|PF|S0001|Y|A0001||||SRC|PT|X1|headache|0|N||\n"
            "C0000002|ENG|P|L0001|PF|S0001|Y|A0001||||SRC|PT|X1||0|N||\n");
        MrconsoReport report;
        read_mrconso(in, {LanguageTag::parse("ENG")}, &report);
        CHECK(report.malformed == 2);
    }
}

TEST_CASE("parse_mrconso conservation: emitted + skipped + malformed = input lines") {
    std::ostringstream data;
    data << "C0000001|ENG|P|L1|PF|S1|Y|A1||||SRC|PT|X1|alpha|0|N||\n";
    data << "C0000001|FRE|P|L2|PF|S2|Y|A2||||SRC|PT|X1|alphe|0|N||\n";
    data << "bad row\n";
    data << "C0000002|SPA|P|L3|PF|S3|Y|A3||||SRC|PT|X1|beta|0|N||\n";
    std::istringstream in(data.str());
    MrconsoReport report;
    read_mrconso(in, {LanguageTag::parse("ENG"), LanguageTag::parse("SPA")}, &report);
    CHECK(report.input_lines == 4);
    CHECK(report.emitted + report.skipped_language + report.malformed == report.input_lines);
}

TEST_CASE("parse_mrconso hard-fails past the malformed cap") {
    std::ostringstream data;
    for (int i = 0; i < 5; ++i) data << "garbage line\n";
    std::istringstream in(data.str());
    CHECK_THROWS_AS(read_mrconso(in, {LanguageTag::parse("ENG")}, nullptr, 3), ValidationError);
}

TEST_CASE("fixture rows all carry exactly 18 fields") {
    // field-counting oracle for the published column layout
    std::ifstream in(testutil::fixture("mrconso_sample.rrf"));
    REQUIRE(in.good());
    std::string line;
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        CHECK(std::count(line.begin(), line.end(), '|') == 18);
        CHECK(line.back() == '|');
    }
    CHECK(rows == 50);
}

TEST_CASE("parse_doc_metadata maps header-named columns") {
    SUBCASE("full record") {
        std::istringstream in("pmid\tpii\ttitle\n123\tS0001\tEfeitos do exercício\n");
        auto docs = read_doc_metadata(in);
        REQUIRE(docs.size() == 1);
        CHECK(docs[0].pmid == "123");
        CHECK(docs[0].pii == "S0001");
        CHECK(docs[0].title == "Efeitos do exercício");
        CHECK_FALSE(docs[0].language.has_value());
    }
    SUBCASE("title-only record") {
        std::istringstream in("title\nA study\n");
        auto docs = read_doc_metadata(in);
        REQUIRE(docs.size() == 1);
        CHECK(docs[0].title == "A study");
        CHECK_FALSE(docs[0].pmid.has_value());
    }
    SUBCASE("missing title column") {
        std::istringstream in("pmid\n123\n");
        CHECK_THROWS_AS(read_doc_metadata(in), MissingColumn);
    }
    SUBCASE("empty rows are skipped with a count") {
        std::istringstream in("pmid\ttitle\n\t\n1\tA\n");
        DocMetaReport report;
        auto docs = read_doc_metadata(in, &report);
        CHECK(docs.size() == 1);
        CHECK(report.empty_rows_skipped == 1);
    }
    SUBCASE("language column is parsed when sane") {
        std::istringstream in("title\tlanguage\nA\tpor\nB\tzz9\n");
        auto docs = read_doc_metadata(in);
        REQUIRE(docs.size() == 2);
        CHECK(docs[0].language == LanguageTag::parse("POR"));
        CHECK_FALSE(docs[1].language.has_value());
    }
}

TEST_CASE("streaming parse of a million-line file stays record-bounded") {
    testutil::TempDir dir;
    constexpr std::uint64_t kLines = 1000000;
    {
        std::ofstream src(dir.file("big.src"), std::ios::binary);
        std::ofstream tgt(dir.file("big.tgt"), std::ios::binary);
        for (std::uint64_t i = 0; i < kLines; ++i) {
            src << "fuente " << i << '\n';
            tgt << "source " << i << '\n';
        }
    }
    std::ifstream src(dir.file("big.src"), std::ios::binary);
    std::ifstream tgt(dir.file("big.tgt"), std::ios::binary);
    std::uint64_t seen = 0;
    std::size_t max_len = 0;
    auto report = parse_bitext(src, tgt, kPair, "big", [&](SegmentPair&& s) {
        ++seen;
        max_len = std::max(max_len, s.source_text.size());
        // the sink discards; nothing accumulates anywhere
    });
    CHECK(seen == kLines);
    CHECK(report.emitted == kLines);
    CHECK(max_len < 32); // per-record footprint, not per-file
}

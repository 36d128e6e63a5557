#include <doctest.h>

#include <sstream>

#include "biomt/core.hpp"
#include "biomt/text.hpp"
#include "helpers.hpp"

using namespace biomt;

TEST_CASE("language tags parse to uppercase and compare case-insensitively") {
    CHECK(LanguageTag::parse("eng").code() == "ENG");
    CHECK(LanguageTag::parse("Spa") == LanguageTag::parse("SPA"));
    CHECK_THROWS_AS(LanguageTag::parse("EN"), ValidationError);
    CHECK_THROWS_AS(LanguageTag::parse("E1G"), ValidationError);
    CHECK_THROWS_AS(LanguageTag::parse(""), ValidationError);
}

TEST_CASE("registry starts with ENG SPA POR and is extensible") {
    CHECK(is_registered(LanguageTag::parse("ENG")));
    CHECK(is_registered(LanguageTag::parse("SPA")));
    CHECK(is_registered(LanguageTag::parse("POR")));
    CHECK_FALSE(is_registered(LanguageTag::parse("XXX")));
    register_language(LanguageTag::parse("GLG"));
    CHECK(is_registered(LanguageTag::parse("GLG")));
}

TEST_CASE("language pairs reject equal source and target") {
    CHECK_THROWS_AS(make_lang_pair(LanguageTag::parse("ENG"), LanguageTag::parse("ENG")),
                    ValidationError);
    auto pair = parse_lang_pair("SPA-ENG");
    CHECK(pair.source.code() == "SPA");
    CHECK(pair.target.code() == "ENG");
    CHECK(pair.label() == "SPA/ENG");
    CHECK(parse_lang_pair("ENG/POR").target.code() == "POR");
    CHECK_THROWS_AS(parse_lang_pair("ENGSPA"), ValidationError);
}

TEST_CASE("segment invariants") {
    SegmentPair good{"hola", "hello", "c1", std::nullopt};
    CHECK(segment_invariants_ok(good));
    CHECK_FALSE(segment_invariants_ok(SegmentPair{"  ", "hello", "c1", std::nullopt}));
    CHECK_FALSE(segment_invariants_ok(SegmentPair{"a\nb", "hello", "c1", std::nullopt}));
}

TEST_CASE("manifest JSON round-trip is exact") {
    CorpusManifest m;
    m.name = "scielo-sample";
    m.pair = parse_lang_pair("SPA-ENG");
    m.segment_count = 3;
    m.files.push_back(FileRef{FileFormat::bitext, {"a.spa", "a.eng"}, {"00ff", "11aa"}});
    m.files.push_back(FileRef{FileFormat::tsv, {"b.tsv"}, {"22bb"}});
    m.provenance_note = "unit test";

    auto j = manifest_to_json(m);
    CHECK(manifest_from_json(j) == m);

    // key order must not matter
    auto text = j.dump();
    CHECK(manifest_from_json(nlohmann::json::parse(text)) == m);
}

TEST_CASE("manifest JSON round-trip over randomized manifests") {
    std::mt19937_64 rng(20180501);
    for (int i = 0; i < 50; ++i) {
        CorpusManifest m;
        m.name = "corpus-" + std::to_string(rng() % 1000);
        m.pair = (rng() % 2) == 0 ? parse_lang_pair("ENG-SPA") : parse_lang_pair("POR-ENG");
        m.segment_count = rng() % 1000000;
        const auto n_files = 1 + rng() % 3;
        for (std::uint64_t f = 0; f < n_files; ++f) {
            if ((rng() % 2) == 0) {
                m.files.push_back(FileRef{FileFormat::bitext,
                                          {"f" + std::to_string(f) + ".src",
                                           "f" + std::to_string(f) + ".tgt"},
                                          {sha256_hex("x"), sha256_hex("y")}});
            } else {
                m.files.push_back(
                    FileRef{FileFormat::tsv, {"f" + std::to_string(f) + ".tsv"}, {}});
            }
        }
        m.provenance_note = "r" + std::to_string(rng());
        CHECK(manifest_from_json(manifest_to_json(m)) == m);
    }
}

TEST_CASE("unknown format tag is rejected at parse") {
    nlohmann::json j = {{"name", "x"},
                        {"pair", {{"source", "ENG"}, {"target", "SPA"}}},
                        {"segment_count", 0},
                        {"files", {{{"format", "tmx"}, {"paths", {"x.tmx"}}}}}};
    CHECK_THROWS_AS(manifest_from_json(j), UnsupportedFormat);
}

TEST_CASE("validate_manifest over a real fixture bitext") {
    testutil::TempDir dir;
    testutil::write_file(dir.file("a.spa"), "hola\nbuenos días\nadiós\n");
    testutil::write_file(dir.file("a.eng"), "hello\ngood morning\ngoodbye\n");

    CorpusManifest m;
    m.name = "toy";
    m.pair = parse_lang_pair("SPA-ENG");
    m.segment_count = 3;
    m.files.push_back(FileRef{FileFormat::bitext,
                              {"a.spa", "a.eng"},
                              {sha256_file_hex(dir.file("a.spa")),
                               sha256_file_hex(dir.file("a.eng"))}});

    SUBCASE("consistent manifest yields an empty report") {
        auto report = validate_manifest(m, dir.path().string());
        CHECK(report.ok());
        CHECK(report.to_tsv().empty());
    }
    SUBCASE("count mismatch is reported") {
        m.segment_count = 4;
        auto report = validate_manifest(m, dir.path().string());
        REQUIRE(report.violations.size() == 1);
        CHECK(report.violations[0].kind == ViolationKind::count_mismatch);
        CHECK(report.to_tsv().find("CountMismatch\t") == 0);
    }
    SUBCASE("unknown language is reported") {
        m.pair.source = LanguageTag::parse("XXX");
        auto report = validate_manifest(m, dir.path().string());
        REQUIRE(report.violations.size() == 1);
        CHECK(report.violations[0].kind == ViolationKind::unknown_language);
    }
    SUBCASE("checksum drift is reported") {
        testutil::write_file(dir.file("a.spa"), "hola\nbuenas tardes\nadiós\n");
        auto report = validate_manifest(m, dir.path().string());
        REQUIRE(report.violations.size() == 1);
        CHECK(report.violations[0].kind == ViolationKind::checksum_mismatch);
    }
    SUBCASE("unreadable file throws IoError") {
        m.files[0].paths[0] = "missing.spa";
        CHECK_THROWS_AS(validate_manifest(m, dir.path().string()), IoError);
    }
}

TEST_CASE("nmt config defaults match the captured submission settings") {
    NmtConfigCapture c;
    auto j = nmt_config_to_json(c);
    CHECK(j.size() == 7);
    CHECK(j.at("encoder_type") == "bidirectional_recurrent");
    CHECK(j.at("decoder_type") == "seq2seq_attention");
    CHECK(j.at("word_vector_size") == 600);
    CHECK(j.at("layers") == 4);
    CHECK(j.at("rnn_size") == 800);
    CHECK(j.at("batch_size") == 64);
    CHECK(j.at("vocabulary_size") == 50000);
    CHECK(nmt_config_from_json(j) == c);
}

TEST_CASE("nmt config rejects non-positive overrides") {
    NmtConfigCapture c;
    c.batch_size = 0;
    CHECK_THROWS_AS(validate_nmt_config(c), InvalidConfig);
    CHECK_THROWS_AS(nmt_config_from_json({{"layers", -1}}), InvalidConfig);
    auto partial = nmt_config_from_json({{"layers", 2}});
    CHECK(partial.layers == 2);
    CHECK(partial.word_vector_size == 600);
}

TEST_CASE("sha256 matches a known vector") {
    // echo -n "abc" | sha256sum
    CHECK(sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

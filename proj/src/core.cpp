#include "biomt/core.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>

#include "biomt/ingest.hpp"
#include "biomt/text.hpp"

namespace biomt {
namespace {

std::mutex g_registry_mutex;
std::set<std::string>& registry() {
    static std::set<std::string> tags{"ENG", "SPA", "POR"};
    return tags;
}

} // namespace

LanguageTag LanguageTag::parse(std::string_view code) {
    if (code.size() != 3 ||
        !std::all_of(code.begin(), code.end(),
                     [](unsigned char c) { return std::isalpha(c) != 0; })) {
        throw ValidationError("language tag must be three ASCII letters, got '" +
                              std::string(code) + "'");
    }
    LanguageTag tag;
    tag.code_.reserve(3);
    for (unsigned char c : code) {
        tag.code_.push_back(static_cast<char>(std::toupper(c)));
    }
    return tag;
}

bool is_registered(const LanguageTag& tag) {
    std::lock_guard lock(g_registry_mutex);
    return registry().count(tag.code()) > 0;
}

void register_language(const LanguageTag& tag) {
    std::lock_guard lock(g_registry_mutex);
    registry().insert(tag.code());
}

std::vector<LanguageTag> registered_languages() {
    std::lock_guard lock(g_registry_mutex);
    std::vector<LanguageTag> out;
    for (const auto& code : registry()) out.push_back(LanguageTag::parse(code));
    return out;
}

LangPair make_lang_pair(LanguageTag source, LanguageTag target) {
    if (source == target) {
        throw ValidationError("language pair must have distinct source and target, got " +
                              source.code());
    }
    return LangPair{std::move(source), std::move(target)};
}

LangPair parse_lang_pair(std::string_view s) {
    auto sep = s.find_first_of("-/");
    if (sep == std::string_view::npos) {
        throw ValidationError("language pair must look like SRC-TGT, got '" + std::string(s) + "'");
    }
    return make_lang_pair(LanguageTag::parse(s.substr(0, sep)),
                          LanguageTag::parse(s.substr(sep + 1)));
}

bool segment_invariants_ok(const SegmentPair& segment) {
    if (text::is_blank(segment.source_text) || text::is_blank(segment.target_text)) return false;
    if (segment.source_text.find('\n') != std::string::npos) return false;
    if (segment.target_text.find('\n') != std::string::npos) return false;
    return true;
}

std::string to_string(FileFormat format) {
    switch (format) {
        case FileFormat::bitext: return "bitext";
        case FileFormat::tsv: return "tsv";
    }
    throw InternalError("unhandled file format");
}

FileFormat parse_file_format(std::string_view tag) {
    if (tag == "bitext") return FileFormat::bitext;
    if (tag == "tsv") return FileFormat::tsv;
    throw UnsupportedFormat(std::string(tag));
}

nlohmann::json manifest_to_json(const CorpusManifest& m) {
    nlohmann::json files = nlohmann::json::array();
    for (const auto& f : m.files) {
        files.push_back({{"format", to_string(f.format)},
                         {"paths", f.paths},
                         {"checksums", f.checksums}});
    }
    return {{"name", m.name},
            {"pair", {{"source", m.pair.source.code()}, {"target", m.pair.target.code()}}},
            {"segment_count", m.segment_count},
            {"files", files},
            {"provenance", m.provenance_note}};
}

CorpusManifest manifest_from_json(const nlohmann::json& j) {
    try {
        CorpusManifest m;
        m.name = j.at("name").get<std::string>();
        m.pair.source = LanguageTag::parse(j.at("pair").at("source").get<std::string>());
        m.pair.target = LanguageTag::parse(j.at("pair").at("target").get<std::string>());
        m.segment_count = j.at("segment_count").get<std::uint64_t>();
        for (const auto& f : j.at("files")) {
            FileRef ref;
            ref.format = parse_file_format(f.at("format").get<std::string>());
            ref.paths = f.at("paths").get<std::vector<std::string>>();
            if (f.contains("checksums")) {
                ref.checksums = f.at("checksums").get<std::vector<std::string>>();
            }
            m.files.push_back(std::move(ref));
        }
        m.provenance_note = j.value("provenance", "");
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("bad manifest JSON: ") + e.what());
    }
}

void save_manifest(const CorpusManifest& manifest, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write manifest: " + path);
    out << manifest_to_json(manifest).dump(2) << "\n";
}

CorpusManifest load_manifest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read manifest: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("manifest is not valid JSON: " + path + ": " + e.what());
    }
    return manifest_from_json(j);
}

std::string to_string(ViolationKind kind) {
    switch (kind) {
        case ViolationKind::count_mismatch: return "CountMismatch";
        case ViolationKind::checksum_mismatch: return "ChecksumMismatch";
        case ViolationKind::unknown_language: return "UnknownLanguage";
    }
    throw InternalError("unhandled violation kind");
}

std::string ValidationReport::to_tsv() const {
    std::string out;
    for (const auto& v : violations) {
        out += to_string(v.kind);
        out += '\t';
        out += v.detail;
        out += '\n';
    }
    return out;
}

namespace {

std::uint64_t count_pairs_in_ref(const FileRef& ref, const std::filesystem::path& base,
                                 const LangPair& pair) {
    auto resolve = [&](const std::string& p) {
        std::filesystem::path path(p);
        return path.is_absolute() ? path : base / path;
    };
    std::uint64_t count = 0;
    auto counter = [&count](SegmentPair&&) { ++count; };
    if (ref.format == FileFormat::bitext) {
        if (ref.paths.size() != 2) {
            throw ValidationError("bitext file_ref needs exactly two paths");
        }
        std::ifstream src(resolve(ref.paths[0]), std::ios::binary);
        if (!src) throw IoError("cannot read " + ref.paths[0]);
        std::ifstream tgt(resolve(ref.paths[1]), std::ios::binary);
        if (!tgt) throw IoError("cannot read " + ref.paths[1]);
        parse_bitext(src, tgt, pair, "validate", counter);
    } else {
        if (ref.paths.size() != 1) {
            throw ValidationError("tsv file_ref needs exactly one path");
        }
        std::ifstream in(resolve(ref.paths[0]), std::ios::binary);
        if (!in) throw IoError("cannot read " + ref.paths[0]);
        parse_tsv_bitext(in, pair, "validate", counter);
    }
    return count;
}

} // namespace

ValidationReport validate_manifest(const CorpusManifest& manifest, const std::string& base_dir) {
    ValidationReport report;
    const std::filesystem::path base(base_dir);

    for (const auto& tag : {manifest.pair.source, manifest.pair.target}) {
        if (!is_registered(tag)) {
            report.violations.push_back(
                {ViolationKind::unknown_language, "unregistered language code " + tag.code()});
        }
    }

    std::uint64_t total = 0;
    for (const auto& ref : manifest.files) {
        total += count_pairs_in_ref(ref, base, manifest.pair);
        for (std::size_t i = 0; i < ref.paths.size(); ++i) {
            std::filesystem::path p(ref.paths[i]);
            if (!p.is_absolute()) p = base / p;
            const std::string actual = sha256_file_hex(p.string());
            if (i < ref.checksums.size() && !ref.checksums[i].empty() &&
                ref.checksums[i] != actual) {
                report.violations.push_back(
                    {ViolationKind::checksum_mismatch,
                     ref.paths[i] + ": expected " + ref.checksums[i] + ", got " + actual});
            }
        }
    }
    if (total != manifest.segment_count) {
        report.violations.push_back(
            {ViolationKind::count_mismatch, "manifest says " + std::to_string(manifest.segment_count) +
                                                ", files parse to " + std::to_string(total)});
    }
    return report;
}

void validate_nmt_config(const NmtConfigCapture& config) {
    auto check = [](int value, const char* name) {
        if (value <= 0) {
            throw InvalidConfig(std::string(name) + " must be positive, got " +
                                std::to_string(value));
        }
    };
    check(config.word_vector_size, "word_vector_size");
    check(config.layers, "layers");
    check(config.rnn_size, "rnn_size");
    check(config.batch_size, "batch_size");
    check(config.vocabulary_size, "vocabulary_size");
}

nlohmann::json nmt_config_to_json(const NmtConfigCapture& c) {
    return {{"encoder_type", "bidirectional_recurrent"},
            {"decoder_type", "seq2seq_attention"},
            {"word_vector_size", c.word_vector_size},
            {"layers", c.layers},
            {"rnn_size", c.rnn_size},
            {"batch_size", c.batch_size},
            {"vocabulary_size", c.vocabulary_size}};
}

NmtConfigCapture nmt_config_from_json(const nlohmann::json& j) {
    NmtConfigCapture c;
    try {
        if (j.contains("encoder_type") && j.at("encoder_type") != "bidirectional_recurrent") {
            throw InvalidConfig("unknown encoder_type");
        }
        if (j.contains("decoder_type") && j.at("decoder_type") != "seq2seq_attention") {
            throw InvalidConfig("unknown decoder_type");
        }
        c.word_vector_size = j.value("word_vector_size", c.word_vector_size);
        c.layers = j.value("layers", c.layers);
        c.rnn_size = j.value("rnn_size", c.rnn_size);
        c.batch_size = j.value("batch_size", c.batch_size);
        c.vocabulary_size = j.value("vocabulary_size", c.vocabulary_size);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidConfig(std::string("bad nmt config JSON: ") + e.what());
    }
    validate_nmt_config(c);
    return c;
}

namespace {

std::string digest_to_hex(const unsigned char* digest, unsigned int len) {
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xF]);
    }
    return out;
}

struct EvpCtx {
    EVP_MD_CTX* ctx;
    EvpCtx() : ctx(EVP_MD_CTX_new()) {
        if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
            throw InternalError("cannot initialize SHA-256");
        }
    }
    ~EvpCtx() { EVP_MD_CTX_free(ctx); }
};

} // namespace

std::string sha256_file_hex(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path);
    EvpCtx c;
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        EVP_DigestUpdate(c.ctx, buf, static_cast<std::size_t>(in.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(c.ctx, digest, &len);
    return digest_to_hex(digest, len);
}

std::string sha256_hex(std::string_view bytes) {
    EvpCtx c;
    EVP_DigestUpdate(c.ctx, bytes.data(), bytes.size());
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(c.ctx, digest, &len);
    return digest_to_hex(digest, len);
}

} // namespace biomt

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "biomt/errors.hpp"

namespace biomt {

// Three-letter language tag following UMLS LAT conventions (ENG, SPA, POR).
// Parsing checks syntax only; membership in the registry is a separate,
// extensible check so that data naming an unknown code can still be loaded
// and reported against.
class LanguageTag {
public:
    LanguageTag() = default;

    // Accepts exactly three ASCII letters, stored uppercase.
    static LanguageTag parse(std::string_view code);

    const std::string& code() const { return code_; }
    bool empty() const { return code_.empty(); }

    auto operator<=>(const LanguageTag&) const = default;

private:
    std::string code_;
};

// Registry defaults to {ENG, SPA, POR}.
bool is_registered(const LanguageTag& tag);
void register_language(const LanguageTag& tag);
std::vector<LanguageTag> registered_languages();

struct LangPair {
    LanguageTag source;
    LanguageTag target;

    auto operator<=>(const LangPair&) const = default;

    // "SRC/TGT", e.g. "SPA/ENG"
    std::string label() const { return source.code() + "/" + target.code(); }
};

// Throws ValidationError when source == target.
LangPair make_lang_pair(LanguageTag source, LanguageTag target);
// Parses "SRC-TGT" (also accepts "SRC/TGT").
LangPair parse_lang_pair(std::string_view text);

struct SegmentPair {
    std::string source_text;
    std::string target_text;
    std::string corpus_id;
    std::optional<std::string> doc_id;

    bool operator==(const SegmentPair&) const = default;
};

// Invariants: both texts non-blank after trimming, no embedded newline.
bool segment_invariants_ok(const SegmentPair& segment);

enum class FileFormat { bitext, tsv };

std::string to_string(FileFormat format);
FileFormat parse_file_format(std::string_view tag); // throws UnsupportedFormat

struct FileRef {
    FileFormat format{FileFormat::bitext};
    std::vector<std::string> paths;     // bitext: {source, target}; tsv: {path}
    std::vector<std::string> checksums; // sha256 hex, aligned with paths

    bool operator==(const FileRef&) const = default;
};

struct CorpusManifest {
    std::string name;
    LangPair pair;
    std::uint64_t segment_count{0};
    std::vector<FileRef> files;
    std::string provenance_note;

    bool operator==(const CorpusManifest&) const = default;
};

nlohmann::json manifest_to_json(const CorpusManifest& manifest);
CorpusManifest manifest_from_json(const nlohmann::json& j);
void save_manifest(const CorpusManifest& manifest, const std::string& path);
CorpusManifest load_manifest(const std::string& path);

enum class ViolationKind { count_mismatch, checksum_mismatch, unknown_language };

std::string to_string(ViolationKind kind);

struct Violation {
    ViolationKind kind;
    std::string detail;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
    // One "violation_kind\tdetail" line per entry.
    std::string to_tsv() const;
};

// Re-parses the referenced files, recomputes checksums and checks language
// registration. Unreadable files throw IoError; unknown format tags in the
// manifest JSON throw UnsupportedFormat at load time.
ValidationReport validate_manifest(const CorpusManifest& manifest,
                                   const std::string& base_dir = ".");

// Captured network settings for the seq2seq system; defaults are the
// submission values. Not a trainer, just a validated, serializable record.
enum class EncoderType { bidirectional_recurrent };
enum class DecoderType { seq2seq_attention };

struct NmtConfigCapture {
    EncoderType encoder_type{EncoderType::bidirectional_recurrent};
    DecoderType decoder_type{DecoderType::seq2seq_attention};
    int word_vector_size{600};
    int layers{4};
    int rnn_size{800};
    int batch_size{64};
    int vocabulary_size{50000};

    bool operator==(const NmtConfigCapture&) const = default;
};

// Throws InvalidConfig when a numeric field is not positive.
void validate_nmt_config(const NmtConfigCapture& config);
nlohmann::json nmt_config_to_json(const NmtConfigCapture& config);
NmtConfigCapture nmt_config_from_json(const nlohmann::json& j);

// SHA-256 over raw file bytes, lowercase hex. Throws IoError.
std::string sha256_file_hex(const std::string& path);
std::string sha256_hex(std::string_view bytes);

} // namespace biomt

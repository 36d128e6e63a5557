#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "biomt/ingest.hpp"

namespace biomt {

// Title key used for bibliographic matching: compatibility-normalized,
// case-folded, punctuation stripped, whitespace collapsed, trimmed.
std::string normalize_title(std::string_view raw);

struct ExclusionIndex {
    std::unordered_map<std::string, std::uint64_t> by_pii;       // pii -> record id
    std::unordered_map<std::string, std::uint64_t> by_title_key; // normalized title -> record id
    std::uint64_t record_count{0};
    std::uint64_t pii_collisions{0};
    std::uint64_t title_collisions{0};
};

// Duplicate keys keep the first record and bump the collision counters.
ExclusionIndex build_exclusion_index(const std::vector<DocMeta>& docs);

struct FilterReport {
    std::uint64_t input_segments{0};
    std::uint64_t kept_segments{0};
    std::uint64_t removed_segments{0};
    std::uint64_t matched_by_pii{0};   // distinct documents removed via pii
    std::uint64_t matched_by_title{0}; // distinct documents removed via title key
    std::uint64_t missing_title_warnings{0};

    nlohmann::json to_json() const;
    std::string to_tsv() const; // metric\tvalue lines
};

using TitleMap = std::unordered_map<std::string, std::string>; // doc_id -> raw title

// Streaming overlap filter. A segment is removed iff its doc_id equals an
// indexed pii, or the normalized title of its document hits the title index.
// Segments without doc_id are always kept; a doc_id missing from the title
// map is kept (pii check permitting) with a warning counted.
class OverlapFilter {
public:
    OverlapFilter(const ExclusionIndex& index, const TitleMap& titles_by_doc);

    // True when the segment survives. Counts as it goes.
    bool keep(const SegmentPair& segment);
    const FilterReport& report() const { return report_; }

private:
    enum class DocFate { removed_pii, removed_title, kept_missing_title, kept };

    const ExclusionIndex& index_;
    const TitleMap& titles_;
    FilterReport report_;
    std::unordered_map<std::string, DocFate> doc_fate_;
};

FilterReport filter_overlap(const std::vector<SegmentPair>& segments, const TitleMap& titles_by_doc,
                            const ExclusionIndex& index, const SegmentSink& kept,
                            const SegmentSink& removed);

// Reads a TSV with header columns doc_id and title.
TitleMap read_title_map(std::istream& input);

// Drops exact (source_text, target_text) duplicates after whitespace
// trimming, keeping the first occurrence.
class Deduplicator {
public:
    bool is_new(const SegmentPair& segment);
    std::uint64_t duplicates() const { return duplicates_; }

private:
    std::unordered_set<std::string> seen_;
    std::uint64_t duplicates_{0};
};

std::uint64_t dedup(const std::vector<SegmentPair>& segments, const SegmentSink& unique);

enum class PartitionUnit { segment, document };

std::string to_string(PartitionUnit unit);
PartitionUnit parse_partition_unit(std::string_view name);

struct PartitionSpec {
    std::uint64_t dev_size{0};
    std::uint64_t seed{42};
    PartitionUnit unit{PartitionUnit::segment};
};

struct PartitionResult {
    std::vector<SegmentPair> train;
    std::vector<SegmentPair> dev;
};

// Seeded, platform-independent draw of exactly dev_size units into dev; the
// complement is train. Both sides preserve the input order. unit=document
// keeps segments sharing a doc_id together (segments without doc_id are
// one-segment units). Throws InvalidSpec when dev_size >= the unit count.
PartitionResult partition(const std::vector<SegmentPair>& segments, const PartitionSpec& spec);

struct StatsTable {
    struct Row {
        std::string corpus;
        std::map<std::string, std::uint64_t> counts; // pair label -> count
    };
    std::vector<std::string> pair_labels;
    std::vector<Row> rows;
    std::map<std::string, std::uint64_t> totals; // pair label -> exact sum

    std::string render() const; // aligned columns, one total row
    std::string to_tsv() const; // corpus\t<pair>... rows plus a Total row
    nlohmann::json to_json() const;
};

// Counts straight from the manifests; totals are exact sums per language
// pair. Duplicate (name, pair) manifests are rejected.
StatsTable corpus_stats(const std::vector<CorpusManifest>& manifests);

} // namespace biomt

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "biomt/pipeline.hpp"

namespace biomt {

// One corpus to ingest: a line-aligned file pair or a TSV.
struct IngestSpec {
    std::string name;
    FileFormat format{FileFormat::bitext};
    std::string source_path; // bitext
    std::string target_path; // bitext
    std::string tsv_path;    // tsv
};

struct PipelineStage {
    enum class Type { ingest, filter, dedup, append_terms, partition };

    Type type{Type::ingest};
    std::vector<IngestSpec> corpora;  // ingest
    std::string exclusion_metadata;   // filter
    std::string corpus_titles;        // filter (optional)
    std::string mrconso;              // append_terms
    bool append_enabled{true};        // append_terms
    std::uint64_t dev_size{0};        // partition
    PartitionUnit unit{PartitionUnit::segment};
};

std::string to_string(PipelineStage::Type type);

// The whole workflow in one JSON file. Stage order is honored for filter and
// dedup; term pairs are always appended to the train split after
// partitioning, never to dev. Relative paths resolve against the config
// file's directory. All randomness flows from the single seed.
struct PipelineConfig {
    LangPair pair;
    std::uint64_t seed{42};
    std::string output_dir;
    std::vector<PipelineStage> stages;

    std::string base_dir{"."};
    std::string config_hash; // sha256 of the config file bytes
};

PipelineConfig load_pipeline_config(const std::string& path);
PipelineConfig pipeline_config_from_json(const nlohmann::json& j, const std::string& base_dir,
                                         const std::string& config_hash);

struct RunSummary {
    std::string config_hash;
    std::uint64_t seed{0};
    nlohmann::json stage_reports = nlohmann::json::array();
    nlohmann::json corpus_table; // per-corpus ingested counts
    std::uint64_t train_segments{0};
    std::uint64_t dev_segments{0};
    std::optional<std::string> error;

    nlohmann::json to_json() const;
};

struct RunOptions {
    bool append_terms{true}; // master switch for append_terms stages
};

// Executes the configured stages and writes train/dev bitext, per-output
// manifests and run_summary.json into output_dir. Reruns over identical
// inputs are byte-identical. On stage failure the partial summary (with the
// error recorded) is still written before the exception propagates.
RunSummary run_pipeline(const PipelineConfig& config, const RunOptions& options = {});

} // namespace biomt

#include "biomt/runner.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "biomt/umls.hpp"

namespace biomt {

namespace fs = std::filesystem;

std::string to_string(PipelineStage::Type type) {
    switch (type) {
        case PipelineStage::Type::ingest: return "ingest";
        case PipelineStage::Type::filter: return "filter";
        case PipelineStage::Type::dedup: return "dedup";
        case PipelineStage::Type::append_terms: return "append-terms";
        case PipelineStage::Type::partition: return "partition";
    }
    throw InternalError("unhandled stage type");
}

namespace {

PipelineStage::Type parse_stage_type(const std::string& name) {
    if (name == "ingest") return PipelineStage::Type::ingest;
    if (name == "filter") return PipelineStage::Type::filter;
    if (name == "dedup") return PipelineStage::Type::dedup;
    if (name == "append-terms") return PipelineStage::Type::append_terms;
    if (name == "partition") return PipelineStage::Type::partition;
    throw InvalidConfig("unknown stage type: " + name);
}

void validate_config(const PipelineConfig& config) {
    if (config.stages.empty()) throw InvalidConfig("stage list must not be empty");
    if (config.stages.front().type != PipelineStage::Type::ingest) {
        throw InvalidConfig("the first stage must be ingest");
    }
    int ingests = 0;
    int partitions = 0;
    for (const auto& stage : config.stages) {
        if (stage.type == PipelineStage::Type::ingest) {
            ++ingests;
            if (stage.corpora.empty()) throw InvalidConfig("ingest stage lists no corpora");
        }
        if (stage.type == PipelineStage::Type::partition) {
            ++partitions;
            if (stage.dev_size == 0) throw InvalidConfig("partition dev_size must be positive");
        }
    }
    if (ingests != 1) throw InvalidConfig("exactly one ingest stage is required");
    if (partitions != 1) throw InvalidConfig("exactly one partition stage is required");
    if (config.output_dir.empty()) throw InvalidConfig("output_dir must be set");
}

} // namespace

PipelineConfig pipeline_config_from_json(const nlohmann::json& j, const std::string& base_dir,
                                         const std::string& config_hash) {
    PipelineConfig config;
    config.base_dir = base_dir;
    config.config_hash = config_hash;
    try {
        config.pair = parse_lang_pair(j.at("pair").get<std::string>());
        config.seed = j.value("seed", std::uint64_t{42});
        config.output_dir = j.at("output_dir").get<std::string>();
        for (const auto& s : j.at("stages")) {
            PipelineStage stage;
            stage.type = parse_stage_type(s.at("type").get<std::string>());
            switch (stage.type) {
                case PipelineStage::Type::ingest:
                    for (const auto& c : s.at("corpora")) {
                        IngestSpec spec;
                        spec.name = c.at("name").get<std::string>();
                        spec.format = parse_file_format(c.at("format").get<std::string>());
                        if (spec.format == FileFormat::bitext) {
                            spec.source_path = c.at("source").get<std::string>();
                            spec.target_path = c.at("target").get<std::string>();
                        } else {
                            spec.tsv_path = c.at("path").get<std::string>();
                        }
                        stage.corpora.push_back(std::move(spec));
                    }
                    break;
                case PipelineStage::Type::filter:
                    stage.exclusion_metadata = s.at("exclusion_metadata").get<std::string>();
                    stage.corpus_titles = s.value("corpus_titles", "");
                    break;
                case PipelineStage::Type::dedup:
                    break;
                case PipelineStage::Type::append_terms:
                    stage.mrconso = s.at("mrconso").get<std::string>();
                    stage.append_enabled = s.value("enabled", true);
                    break;
                case PipelineStage::Type::partition:
                    stage.dev_size = s.at("dev_size").get<std::uint64_t>();
                    stage.unit = parse_partition_unit(s.value("unit", "segment"));
                    break;
            }
            config.stages.push_back(std::move(stage));
        }
    } catch (const nlohmann::json::exception& e) {
        throw InvalidConfig(std::string("bad pipeline config: ") + e.what());
    }
    validate_config(config);
    return config;
}

PipelineConfig load_pipeline_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read pipeline config: " + path);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(bytes);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidConfig("pipeline config is not valid JSON: " + path + ": " + e.what());
    }
    const auto base = fs::path(path).parent_path();
    return pipeline_config_from_json(j, base.empty() ? "." : base.string(), sha256_hex(bytes));
}

nlohmann::json RunSummary::to_json() const {
    nlohmann::json j{{"config_hash", config_hash},
                     {"seed", seed},
                     {"stages", stage_reports},
                     {"corpus_table", corpus_table},
                     {"train_segments", train_segments},
                     {"dev_segments", dev_segments}};
    if (error.has_value()) j["error"] = *error;
    return j;
}

namespace {

std::string resolve(const std::string& base, const std::string& path) {
    fs::path p(path);
    return p.is_absolute() ? p.string() : (fs::path(base) / p).string();
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path);
    return in;
}

void write_bitext_pair(const std::vector<SegmentPair>& segments, const std::string& src_path,
                       const std::string& tgt_path) {
    std::ofstream src(src_path, std::ios::binary);
    if (!src) throw IoError("cannot write " + src_path);
    std::ofstream tgt(tgt_path, std::ios::binary);
    if (!tgt) throw IoError("cannot write " + tgt_path);
    for (const auto& s : segments) {
        src << s.source_text << '\n';
        tgt << s.target_text << '\n';
    }
}

CorpusManifest output_manifest(const std::string& name, const LangPair& pair,
                               const std::vector<SegmentPair>& segments,
                               const std::string& src_path, const std::string& tgt_path,
                               const std::string& provenance) {
    CorpusManifest m;
    m.name = name;
    m.pair = pair;
    m.segment_count = segments.size();
    FileRef ref;
    ref.format = FileFormat::bitext;
    ref.paths = {fs::path(src_path).filename().string(), fs::path(tgt_path).filename().string()};
    ref.checksums = {sha256_file_hex(src_path), sha256_file_hex(tgt_path)};
    m.files.push_back(std::move(ref));
    m.provenance_note = provenance;
    return m;
}

} // namespace

RunSummary run_pipeline(const PipelineConfig& config, const RunOptions& options) {
    validate_config(config);
    RunSummary summary;
    summary.config_hash = config.config_hash;
    summary.seed = config.seed;

    const fs::path out_dir = resolve(config.base_dir, config.output_dir);
    fs::create_directories(out_dir);
    auto out_path = [&out_dir](const std::string& name) { return (out_dir / name).string(); };

    auto finalize_with_error = [&summary, &out_path](const std::string& message) {
        summary.error = message;
        std::ofstream out(out_path("run_summary.json"), std::ios::binary);
        if (out) out << summary.to_json().dump(2) << "\n";
    };

    try {
        std::vector<SegmentPair> segments;
        std::vector<CorpusManifest> ingested;
        TitleMap titles;
        bool have_filter = false;
        std::vector<SegmentPair> removed;
        std::vector<TermPair> term_pairs;
        nlohmann::json append_report;
        const PipelineStage* partition_stage = nullptr;

        for (const auto& stage : config.stages) {
            switch (stage.type) {
                case PipelineStage::Type::ingest: {
                    nlohmann::json corpora_reports = nlohmann::json::array();
                    for (const auto& spec : stage.corpora) {
                        BitextParseReport report;
                        const std::size_t before = segments.size();
                        auto sink = [&segments, &spec](SegmentPair&& s) {
                            s.corpus_id = spec.name;
                            segments.push_back(std::move(s));
                        };
                        if (spec.format == FileFormat::bitext) {
                            auto src = open_input(resolve(config.base_dir, spec.source_path));
                            auto tgt = open_input(resolve(config.base_dir, spec.target_path));
                            report = parse_bitext(src, tgt, config.pair, spec.name, sink);
                        } else {
                            auto in = open_input(resolve(config.base_dir, spec.tsv_path));
                            report = parse_tsv_bitext(in, config.pair, spec.name, sink);
                        }
                        CorpusManifest m;
                        m.name = spec.name;
                        m.pair = config.pair;
                        m.segment_count = segments.size() - before;
                        ingested.push_back(m);
                        corpora_reports.push_back({{"corpus", spec.name},
                                                   {"emitted", report.emitted},
                                                   {"blank_pairs_dropped",
                                                    report.blank_pairs_dropped}});
                    }
                    summary.stage_reports.push_back(
                        {{"stage", "ingest"},
                         {"corpora", corpora_reports},
                         {"total_segments", segments.size()}});
                    break;
                }
                case PipelineStage::Type::filter: {
                    auto meta_in =
                        open_input(resolve(config.base_dir, stage.exclusion_metadata));
                    auto docs = read_doc_metadata(meta_in);
                    auto index = build_exclusion_index(docs);
                    if (!stage.corpus_titles.empty()) {
                        auto titles_in = open_input(resolve(config.base_dir, stage.corpus_titles));
                        titles = read_title_map(titles_in);
                    }
                    std::vector<SegmentPair> kept;
                    kept.reserve(segments.size());
                    auto report = filter_overlap(
                        segments, titles, index,
                        [&kept](SegmentPair&& s) { kept.push_back(std::move(s)); },
                        [&removed](SegmentPair&& s) { removed.push_back(std::move(s)); });
                    segments = std::move(kept);
                    have_filter = true;
                    auto j = report.to_json();
                    j["stage"] = "filter";
                    j["index_records"] = index.record_count;
                    summary.stage_reports.push_back(std::move(j));
                    break;
                }
                case PipelineStage::Type::dedup: {
                    std::vector<SegmentPair> unique;
                    unique.reserve(segments.size());
                    auto duplicates =
                        dedup(segments, [&unique](SegmentPair&& s) { unique.push_back(std::move(s)); });
                    segments = std::move(unique);
                    summary.stage_reports.push_back({{"stage", "dedup"},
                                                     {"duplicates_removed", duplicates},
                                                     {"kept", segments.size()}});
                    break;
                }
                case PipelineStage::Type::append_terms: {
                    if (!options.append_terms || !stage.append_enabled) {
                        summary.stage_reports.push_back(
                            {{"stage", "append-terms"}, {"enabled", false}});
                        break;
                    }
                    auto in = open_input(resolve(config.base_dir, stage.mrconso));
                    MrconsoReport parse_report;
                    auto atoms = read_mrconso(in, {config.pair.source, config.pair.target},
                                              &parse_report);
                    auto [pairs, extraction] = extract_parallel_concepts(atoms, config.pair);
                    term_pairs = std::move(pairs);
                    append_report = {{"stage", "append-terms"},
                                     {"enabled", true},
                                     {"atoms_parsed", parse_report.emitted},
                                     {"extraction", extraction.to_json()},
                                     {"pairs_appended", term_pairs.size()}};
                    summary.stage_reports.push_back(append_report);
                    break;
                }
                case PipelineStage::Type::partition:
                    partition_stage = &stage;
                    break;
            }
        }

        PartitionSpec spec;
        spec.dev_size = partition_stage->dev_size;
        spec.seed = config.seed;
        spec.unit = partition_stage->unit;
        auto split = partition(segments, spec);
        summary.stage_reports.push_back({{"stage", "partition"},
                                         {"unit", to_string(spec.unit)},
                                         {"seed", spec.seed},
                                         {"train_segments", split.train.size()},
                                         {"dev_segments", split.dev.size()}});

        // Terminology pairs strengthen training only; dev stays natural text.
        for (const auto& term : term_pairs) {
            split.train.push_back(
                SegmentPair{term.source_term, term.target_term, "umls-terms", term.cui});
        }

        write_bitext_pair(split.train, out_path("train.src"), out_path("train.tgt"));
        write_bitext_pair(split.dev, out_path("dev.src"), out_path("dev.tgt"));
        if (have_filter) {
            write_bitext_pair(removed, out_path("removed.src"), out_path("removed.tgt"));
        }

        const std::string provenance = "run(config_hash=" + config.config_hash +
                                       ", seed=" + std::to_string(config.seed) + ")";
        save_manifest(output_manifest("train", config.pair, split.train, out_path("train.src"),
                                      out_path("train.tgt"), provenance),
                      out_path("train.manifest.json"));
        save_manifest(output_manifest("dev", config.pair, split.dev, out_path("dev.src"),
                                      out_path("dev.tgt"), provenance),
                      out_path("dev.manifest.json"));

        summary.corpus_table = corpus_stats(ingested).to_json();
        summary.train_segments = split.train.size();
        summary.dev_segments = split.dev.size();

        std::ofstream out(out_path("run_summary.json"), std::ios::binary);
        if (!out) throw IoError("cannot write " + out_path("run_summary.json"));
        out << summary.to_json().dump(2) << "\n";
        return summary;
    } catch (const std::exception& e) {
        finalize_with_error(e.what());
        throw;
    }
}

} // namespace biomt

// biomt: corpus construction and evaluation toolkit for biomedical MT.
// One binary, one subcommand per pipeline operation; every run is
// reproducible from its flags and config alone (no environment lookups).

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "biomt/bleu.hpp"
#include "biomt/core.hpp"
#include "biomt/ingest.hpp"
#include "biomt/pipeline.hpp"
#include "biomt/report.hpp"
#include "biomt/runner.hpp"
#include "biomt/smt.hpp"
#include "biomt/umls.hpp"

namespace fs = std::filesystem;
using namespace biomt;

namespace {

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path);
    return in;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    return out;
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
    auto out = open_output(path);
    out << j.dump(2) << "\n";
}

std::vector<std::string> read_lines(const std::string& path) {
    auto in = open_input(path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

// Shared --source/--target/--input corpus options.
struct CorpusInput {
    std::string source_path;
    std::string target_path;
    std::string tsv_path;

    void attach(CLI::App* cmd) {
        auto* src = cmd->add_option("--source", source_path, "source side of a line-aligned pair");
        auto* tgt = cmd->add_option("--target", target_path, "target side of a line-aligned pair");
        auto* tsv = cmd->add_option("--input", tsv_path,
                                    "TSV bitext (source, target, optional doc_id)");
        src->needs(tgt);
        tgt->needs(src);
        tsv->excludes(src);
    }

    std::vector<SegmentPair> read(const LangPair& pair, const std::string& corpus_id,
                                  BitextParseReport* report = nullptr) const {
        if (!tsv_path.empty()) {
            auto in = open_input(tsv_path);
            return read_tsv_bitext(in, pair, corpus_id, report);
        }
        if (source_path.empty()) {
            throw InvalidConfig("need --source/--target or --input");
        }
        auto src = open_input(source_path);
        auto tgt = open_input(target_path);
        return read_bitext(src, tgt, pair, corpus_id, report);
    }
};

void write_bitext(const std::vector<SegmentPair>& segments, const std::string& src_path,
                  const std::string& tgt_path) {
    auto src = open_output(src_path);
    auto tgt = open_output(tgt_path);
    for (const auto& s : segments) {
        src << s.source_text << '\n';
        tgt << s.target_text << '\n';
    }
}

void print_bleu(const BleuReport& report) {
    std::cout << report.to_json().dump(2) << "\n" << report.summary_line() << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"biomt: biomedical MT corpus construction and evaluation toolkit"};
    app.require_subcommand(1);

    // ---- ingest ----
    auto* ingest = app.add_subcommand("ingest", "parse a corpus, write canonical files + manifest");
    CorpusInput ingest_in;
    ingest_in.attach(ingest);
    std::string ingest_pair = "SPA-ENG";
    std::string ingest_name = "corpus";
    std::string ingest_out = ".";
    std::string ingest_note;
    ingest->add_option("--pair", ingest_pair, "language pair as SRC-TGT")->capture_default_str();
    ingest->add_option("--name", ingest_name, "corpus id recorded as provenance")
        ->capture_default_str();
    ingest->add_option("--out-dir", ingest_out, "output directory")->capture_default_str();
    ingest->add_option("--provenance", ingest_note, "free-form provenance note");
    ingest->callback([&] {
        const auto pair = parse_lang_pair(ingest_pair);
        BitextParseReport report;
        auto segments = ingest_in.read(pair, ingest_name, &report);
        fs::create_directories(ingest_out);
        CorpusManifest m;
        m.name = ingest_name;
        m.pair = pair;
        m.segment_count = segments.size();
        m.provenance_note = ingest_note;
        if (!ingest_in.tsv_path.empty()) {
            // canonical TSV keeps document ids for the filtering stage
            const auto path = (fs::path(ingest_out) / (ingest_name + ".tsv")).string();
            auto out = open_output(path);
            for (const auto& s : segments) {
                out << s.source_text << '\t' << s.target_text;
                if (s.doc_id.has_value()) out << '\t' << *s.doc_id;
                out << '\n';
            }
            out.close();
            m.files.push_back(
                FileRef{FileFormat::tsv, {ingest_name + ".tsv"}, {sha256_file_hex(path)}});
        } else {
            const auto src = (fs::path(ingest_out) / (ingest_name + ".src")).string();
            const auto tgt = (fs::path(ingest_out) / (ingest_name + ".tgt")).string();
            write_bitext(segments, src, tgt);
            m.files.push_back(FileRef{FileFormat::bitext,
                                      {ingest_name + ".src", ingest_name + ".tgt"},
                                      {sha256_file_hex(src), sha256_file_hex(tgt)}});
        }
        const auto manifest_path =
            (fs::path(ingest_out) / (ingest_name + ".manifest.json")).string();
        save_manifest(m, manifest_path);
        std::cout << "ingested " << segments.size() << " segments ("
                  << report.blank_pairs_dropped << " blank pairs dropped) -> " << manifest_path
                  << "\n";
    });

    // ---- umls-extract ----
    auto* umls = app.add_subcommand("umls-extract", "parallel concept pairs from an RRF file");
    std::string umls_rrf;
    std::string umls_pair = "ENG-SPA";
    std::string umls_out;
    std::string umls_report_path;
    std::string umls_errors_path;
    std::uint64_t umls_cap = kDefaultMalformedCap;
    umls->add_option("--mrconso", umls_rrf, "concept file (MRCONSO.RRF layout)")->required();
    umls->add_option("--pair", umls_pair, "language pair as SRC-TGT")->capture_default_str();
    umls->add_option("--out", umls_out, "output TSV (cui, source_term, target_term)")->required();
    umls->add_option("--report", umls_report_path, "write the extraction report JSON here");
    umls->add_option("--errors", umls_errors_path, "write malformed-row TSV here");
    umls->add_option("--malformed-cap", umls_cap, "abort after this many malformed rows")
        ->capture_default_str();
    umls->callback([&] {
        const auto pair = parse_lang_pair(umls_pair);
        auto in = open_input(umls_rrf);
        ConceptPairExtractor extractor(pair);
        auto parse_report = parse_mrconso(
            in, {pair.source, pair.target},
            [&extractor](ConceptAtom&& atom) { extractor.add(atom); }, umls_cap);
        auto [pairs, extraction] = extractor.finish();
        auto out = open_output(umls_out);
        write_term_pairs_tsv(out, pairs);
        auto j = extraction.to_json();
        j["parse"] = {{"input_lines", parse_report.input_lines},
                      {"emitted", parse_report.emitted},
                      {"skipped_language", parse_report.skipped_language},
                      {"malformed", parse_report.malformed}};
        if (!umls_report_path.empty()) write_json_file(umls_report_path, j);
        if (!umls_errors_path.empty()) {
            open_output(umls_errors_path) << parse_report.errors_to_tsv();
        }
        std::cout << "extracted " << pairs.size() << " concept pairs from "
                  << parse_report.emitted << " atoms -> " << umls_out << "\n";
    });

    // ---- filter ----
    auto* filter = app.add_subcommand("filter", "remove segments overlapping indexed documents");
    CorpusInput filter_in;
    filter_in.attach(filter);
    std::string filter_pair = "SPA-ENG";
    std::string filter_meta;
    std::string filter_titles;
    std::string filter_out = ".";
    filter->add_option("--pair", filter_pair)->capture_default_str();
    filter->add_option("--metadata", filter_meta, "bibliographic metadata TSV to exclude against")
        ->required();
    filter->add_option("--titles", filter_titles, "doc_id/title TSV for the corpus documents");
    filter->add_option("--out-dir", filter_out)->capture_default_str();
    filter->callback([&] {
        const auto pair = parse_lang_pair(filter_pair);
        auto segments = filter_in.read(pair, "filter-input");
        auto meta_in = open_input(filter_meta);
        auto index = build_exclusion_index(read_doc_metadata(meta_in));
        TitleMap titles;
        if (!filter_titles.empty()) {
            auto titles_in = open_input(filter_titles);
            titles = read_title_map(titles_in);
        }
        std::vector<SegmentPair> kept;
        std::vector<SegmentPair> removed;
        auto report = filter_overlap(
            segments, titles, index, [&](SegmentPair&& s) { kept.push_back(std::move(s)); },
            [&](SegmentPair&& s) { removed.push_back(std::move(s)); });
        fs::create_directories(filter_out);
        auto path = [&](const char* name) { return (fs::path(filter_out) / name).string(); };
        write_bitext(kept, path("kept.src"), path("kept.tgt"));
        write_bitext(removed, path("removed.src"), path("removed.tgt"));
        write_json_file(path("filter_report.json"), report.to_json());
        open_output(path("filter_report.tsv")) << report.to_tsv();
        std::cout << "kept " << report.kept_segments << " / removed " << report.removed_segments
                  << " of " << report.input_segments << " segments\n";
    });

    // ---- partition ----
    auto* part = app.add_subcommand("partition", "deterministic train/dev split");
    CorpusInput part_in;
    part_in.attach(part);
    std::string part_pair = "SPA-ENG";
    PartitionSpec part_spec;
    std::string part_unit = "segment";
    std::string part_out = ".";
    part->add_option("--pair", part_pair)->capture_default_str();
    part->add_option("--dev-size", part_spec.dev_size, "units drawn into dev")->required();
    part->add_option("--seed", part_spec.seed)->capture_default_str();
    part->add_option("--unit", part_unit, "segment or document")->capture_default_str();
    part->add_option("--out-dir", part_out)->capture_default_str();
    part->callback([&] {
        const auto pair = parse_lang_pair(part_pair);
        part_spec.unit = parse_partition_unit(part_unit);
        auto segments = part_in.read(pair, "partition-input");
        auto split = partition(segments, part_spec);
        fs::create_directories(part_out);
        auto path = [&](const char* name) { return (fs::path(part_out) / name).string(); };
        write_bitext(split.train, path("train.src"), path("train.tgt"));
        write_bitext(split.dev, path("dev.src"), path("dev.tgt"));
        write_json_file(path("partition_report.json"),
                        {{"seed", part_spec.seed},
                         {"unit", to_string(part_spec.unit)},
                         {"train_segments", split.train.size()},
                         {"dev_segments", split.dev.size()}});
        std::cout << "seed=" << part_spec.seed << " train=" << split.train.size()
                  << " dev=" << split.dev.size() << "\n";
    });

    // ---- stats ----
    auto* stats = app.add_subcommand("stats", "per-corpus counts and exact totals");
    std::vector<std::string> stats_manifests;
    std::string stats_reference;
    std::string stats_json;
    std::string stats_tsv;
    bool stats_no_validate = false;
    stats->add_option("--manifest", stats_manifests, "manifest JSON (repeatable)")->required();
    stats->add_option("--reference", stats_reference, "reference tables JSON to compare against");
    stats->add_option("--json", stats_json, "also write the table as JSON here");
    stats->add_option("--tsv", stats_tsv, "also write the table as TSV here");
    stats->add_flag("--no-validate", stats_no_validate, "skip re-parsing the referenced files");
    stats->callback([&] {
        std::vector<CorpusManifest> manifests;
        for (const auto& path : stats_manifests) {
            auto m = load_manifest(path);
            if (!stats_no_validate) {
                auto base = fs::path(path).parent_path();
                auto report = validate_manifest(m, base.empty() ? "." : base.string());
                if (!report.ok()) {
                    std::cerr << report.to_tsv();
                    throw ValidationError("manifest failed validation: " + path);
                }
            }
            manifests.push_back(std::move(m));
        }
        auto table = corpus_stats(manifests);
        std::cout << table.render();
        if (!stats_json.empty()) write_json_file(stats_json, table.to_json());
        if (!stats_tsv.empty()) open_output(stats_tsv) << table.to_tsv();
        if (!stats_reference.empty()) {
            std::cout << "\n" << render_reference_tables(load_reference_tables(stats_reference));
        }
    });

    // ---- train-baseline ----
    auto* train = app.add_subcommand("train-baseline", "word-alignment EM + bigram LM");
    CorpusInput train_in;
    train_in.attach(train);
    std::string train_pair = "SPA-ENG";
    int train_iterations = 10;
    bool train_null = false;
    double train_k = 1.0;
    std::string train_out = ".";
    train->add_option("--pair", train_pair)->capture_default_str();
    train->add_option("--iterations", train_iterations)->capture_default_str();
    train->add_flag("--use-null", train_null, "include the empty source word");
    train->add_option("--lm-k", train_k, "add-k smoothing constant")->capture_default_str();
    train->add_option("--out-dir", train_out)->capture_default_str();
    train->callback([&] {
        const auto pair = parse_lang_pair(train_pair);
        auto bitext = train_in.read(pair, "train");
        auto result = train_ibm1(bitext, train_iterations, train_null);
        std::vector<Tokens> targets;
        targets.reserve(bitext.size());
        for (const auto& p : bitext) targets.push_back(tokenize_eval(p.target_text));
        auto lm = train_bigram_lm(targets, train_k);
        fs::create_directories(train_out);
        const auto table_path = (fs::path(train_out) / "ttable.tsv").string();
        const auto lm_path = (fs::path(train_out) / "lm.tsv").string();
        {
            auto out = open_output(table_path);
            save_translation_table(out, result.table);
        }
        {
            auto out = open_output(lm_path);
            save_language_model(out, lm);
        }
        for (std::size_t i = 0; i < result.log_likelihood.size(); ++i) {
            std::cout << "iteration " << (i + 1) << " log-likelihood "
                      << result.log_likelihood[i] << "\n";
        }
        std::cout << "wrote " << table_path << " and " << lm_path << "\n";
    });

    // ---- translate ----
    auto* translate = app.add_subcommand("translate", "decode plain text, one sentence per line");
    std::string tr_table;
    std::string tr_lm;
    std::string tr_input;
    std::string tr_output;
    DecoderWeights tr_weights;
    int tr_threads = 1;
    translate->add_option("--table", tr_table, "translation table TSV")->required();
    translate->add_option("--lm", tr_lm, "language model TSV")->required();
    translate->add_option("--input", tr_input, "source text file")->required();
    translate->add_option("--output", tr_output, "write hypotheses here (default stdout)");
    translate->add_option("--beam", tr_weights.beam_width)->capture_default_str();
    translate->add_option("--lambda-tm", tr_weights.lambda_tm)->capture_default_str();
    translate->add_option("--lambda-lm", tr_weights.lambda_lm)->capture_default_str();
    translate->add_option("--threads", tr_threads)->capture_default_str();
    translate->callback([&] {
        validate_weights(tr_weights);
        auto table_in = open_input(tr_table);
        auto table = load_translation_table(table_in);
        auto lm_in = open_input(tr_lm);
        auto lm = load_language_model(lm_in);
        auto lines = read_lines(tr_input);
        std::vector<Tokens> outputs(lines.size());
        const int n_threads =
            std::max(1, std::min<int>(tr_threads, static_cast<int>(lines.size())));
        {
            // fixed index striping: output is identical for any thread count
            std::vector<std::thread> workers;
            for (int w = 0; w < n_threads; ++w) {
                workers.emplace_back([&, w]() {
                    for (std::size_t i = static_cast<std::size_t>(w); i < lines.size();
                         i += static_cast<std::size_t>(n_threads)) {
                        outputs[i] = decode(tokenize_eval(lines[i]), table, lm, tr_weights);
                    }
                });
            }
            for (auto& worker : workers) worker.join();
        }
        std::ostringstream buffer;
        for (const auto& tokens : outputs) {
            for (std::size_t i = 0; i < tokens.size(); ++i) {
                if (i > 0) buffer << ' ';
                buffer << tokens[i];
            }
            buffer << '\n';
        }
        if (tr_output.empty()) {
            std::cout << buffer.str();
        } else {
            open_output(tr_output) << buffer.str();
        }
    });

    // ---- evaluate ----
    auto* eval = app.add_subcommand("evaluate", "decode a test bitext and score it");
    CorpusInput eval_in;
    eval_in.attach(eval);
    std::string eval_pair = "SPA-ENG";
    std::string eval_table;
    std::string eval_lm;
    DecoderWeights eval_weights;
    int eval_threads = 1;
    eval->add_option("--pair", eval_pair)->capture_default_str();
    eval->add_option("--table", eval_table)->required();
    eval->add_option("--lm", eval_lm)->required();
    eval->add_option("--beam", eval_weights.beam_width)->capture_default_str();
    eval->add_option("--lambda-tm", eval_weights.lambda_tm)->capture_default_str();
    eval->add_option("--lambda-lm", eval_weights.lambda_lm)->capture_default_str();
    eval->add_option("--threads", eval_threads)->capture_default_str();
    eval->callback([&] {
        const auto pair = parse_lang_pair(eval_pair);
        auto bitext = eval_in.read(pair, "test");
        auto table_in = open_input(eval_table);
        auto table = load_translation_table(table_in);
        auto lm_in = open_input(eval_lm);
        auto lm = load_language_model(lm_in);
        print_bleu(evaluate_baseline(bitext, table, lm, eval_weights, eval_threads));
    });

    // ---- bleu ----
    auto* bleu_cmd = app.add_subcommand("bleu", "corpus BLEU of a hypothesis file");
    std::string bleu_hyp;
    std::string bleu_ref;
    bool bleu_lower = false;
    int bleu_max_n = 4;
    std::string bleu_smoothing = "none";
    bleu_cmd->add_option("--hyp", bleu_hyp, "hypothesis file, one sentence per line")->required();
    bleu_cmd->add_option("--ref", bleu_ref, "reference file, aligned by line")->required();
    bleu_cmd->add_flag("--lowercase", bleu_lower, "case-insensitive scoring");
    bleu_cmd->add_option("--max-n", bleu_max_n)->capture_default_str();
    bleu_cmd->add_option("--smoothing", bleu_smoothing, "none or add_one_from_order_2")
        ->capture_default_str();
    bleu_cmd->callback([&] {
        auto hyp_lines = read_lines(bleu_hyp);
        auto ref_lines = read_lines(bleu_ref);
        if (hyp_lines.size() != ref_lines.size()) {
            throw PairCountMismatch(hyp_lines.size(), ref_lines.size());
        }
        std::vector<Tokens> hyps;
        std::vector<Tokens> refs;
        for (const auto& l : hyp_lines) hyps.push_back(tokenize_eval(l, bleu_lower));
        for (const auto& l : ref_lines) refs.push_back(tokenize_eval(l, bleu_lower));
        print_bleu(corpus_bleu(hyps, refs, bleu_max_n, parse_smoothing(bleu_smoothing)));
    });

    // ---- report ----
    auto* report_cmd = app.add_subcommand("report", "shipped reference tables and official scores");
    std::string report_fixtures = "fixtures";
    std::string report_direction;
    bool report_reference = false;
    report_cmd->add_option("--fixtures", report_fixtures, "fixture directory")
        ->capture_default_str();
    report_cmd->add_option("--direction", report_direction, "narrow to one direction, e.g. PT/EN");
    report_cmd->add_flag("--reference", report_reference,
                         "also print corpus/concept/split reference tables");
    report_cmd->callback([&] {
        auto scores =
            load_official_scores((fs::path(report_fixtures) / "official_scores.tsv").string());
        std::cout << "Official shared-task BLEU scores\n"
                  << render_official_scores(scores, report_direction);
        if (report_reference) {
            auto tables = load_reference_tables(
                (fs::path(report_fixtures) / "reference_tables.json").string());
            std::cout << "\n" << render_reference_tables(tables);
        }
    });

    // ---- emit-nmt-config ----
    auto* emit = app.add_subcommand("emit-nmt-config", "write the captured seq2seq settings");
    std::string emit_out;
    NmtConfigCapture emit_cfg;
    emit->add_option("--out", emit_out, "output JSON path")->required();
    emit->add_option("--word-vector-size", emit_cfg.word_vector_size)->capture_default_str();
    emit->add_option("--layers", emit_cfg.layers)->capture_default_str();
    emit->add_option("--rnn-size", emit_cfg.rnn_size)->capture_default_str();
    emit->add_option("--batch-size", emit_cfg.batch_size)->capture_default_str();
    emit->add_option("--vocabulary-size", emit_cfg.vocabulary_size)->capture_default_str();
    emit->callback([&] {
        validate_nmt_config(emit_cfg);
        write_json_file(emit_out, nmt_config_to_json(emit_cfg));
        std::cout << "wrote " << emit_out << "\n";
    });

    // ---- run ----
    auto* run = app.add_subcommand("run", "execute a full pipeline from a config file");
    std::string run_config;
    bool run_no_terms = false;
    run->add_option("--config", run_config, "pipeline config JSON")->required();
    run->add_flag("--no-append-terms", run_no_terms, "skip terminology appending stages");
    run->callback([&] {
        auto config = load_pipeline_config(run_config);
        std::cout << "seed=" << config.seed << " config_hash=" << config.config_hash << "\n";
        RunOptions options;
        options.append_terms = !run_no_terms;
        auto summary = run_pipeline(config, options);
        for (const auto& stage : summary.stage_reports) {
            std::cout << "stage " << stage.value("stage", "?") << " done\n";
        }
        std::cout << "train=" << summary.train_segments << " dev=" << summary.dev_segments
                  << " -> " << config.output_dir << "\n";
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // fold CLI11's internal codes into the documented contract:
        // 0 success (e.g. --help), 1 validation failure
        return app.exit(e) == 0 ? 0 : 1;
    } catch (const ToolkitError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}

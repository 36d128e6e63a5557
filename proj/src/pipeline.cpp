#include "biomt/pipeline.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "biomt/text.hpp"

namespace biomt {

std::string normalize_title(std::string_view raw) {
    return text::strip_punct_collapse_ws(text::compat_fold(raw));
}

ExclusionIndex build_exclusion_index(const std::vector<DocMeta>& docs) {
    ExclusionIndex index;
    for (const auto& doc : docs) {
        const std::uint64_t id = index.record_count++;
        if (doc.pii.has_value() && !doc.pii->empty()) {
            auto [it, inserted] = index.by_pii.emplace(*doc.pii, id);
            if (!inserted) ++index.pii_collisions;
        }
        std::string key = normalize_title(doc.title);
        if (!key.empty()) {
            auto [it, inserted] = index.by_title_key.emplace(std::move(key), id);
            if (!inserted) ++index.title_collisions;
        }
    }
    return index;
}

nlohmann::json FilterReport::to_json() const {
    return {{"input_segments", input_segments},
            {"kept_segments", kept_segments},
            {"removed_segments", removed_segments},
            {"matched_by_pii", matched_by_pii},
            {"matched_by_title", matched_by_title},
            {"missing_title_warnings", missing_title_warnings}};
}

std::string FilterReport::to_tsv() const {
    const nlohmann::json j = to_json();
    std::string out;
    for (const auto& [key, value] : j.items()) {
        out += key;
        out += '\t';
        out += std::to_string(value.get<std::uint64_t>());
        out += '\n';
    }
    return out;
}

OverlapFilter::OverlapFilter(const ExclusionIndex& index, const TitleMap& titles_by_doc)
    : index_(index), titles_(titles_by_doc) {}

bool OverlapFilter::keep(const SegmentPair& segment) {
    ++report_.input_segments;
    bool kept = true;
    if (segment.doc_id.has_value()) {
        const std::string& doc = *segment.doc_id;
        DocFate fate;
        auto cached = doc_fate_.find(doc);
        if (cached != doc_fate_.end()) {
            fate = cached->second;
        } else {
            if (index_.by_pii.count(doc) > 0) {
                fate = DocFate::removed_pii;
                ++report_.matched_by_pii;
            } else {
                auto title = titles_.find(doc);
                if (title == titles_.end()) {
                    fate = DocFate::kept_missing_title;
                } else if (index_.by_title_key.count(normalize_title(title->second)) > 0) {
                    fate = DocFate::removed_title;
                    ++report_.matched_by_title;
                } else {
                    fate = DocFate::kept;
                }
            }
            doc_fate_.emplace(doc, fate);
        }
        if (fate == DocFate::kept_missing_title) ++report_.missing_title_warnings;
        kept = fate == DocFate::kept || fate == DocFate::kept_missing_title;
    }
    if (kept) {
        ++report_.kept_segments;
    } else {
        ++report_.removed_segments;
    }
    return kept;
}

FilterReport filter_overlap(const std::vector<SegmentPair>& segments, const TitleMap& titles_by_doc,
                            const ExclusionIndex& index, const SegmentSink& kept,
                            const SegmentSink& removed) {
    OverlapFilter filter(index, titles_by_doc);
    for (const auto& segment : segments) {
        SegmentPair copy = segment;
        if (filter.keep(segment)) {
            kept(std::move(copy));
        } else {
            removed(std::move(copy));
        }
    }
    return filter.report();
}

TitleMap read_title_map(std::istream& input) {
    TitleMap titles;
    std::string line;
    if (!std::getline(input, line)) throw MissingColumn("doc_id");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto headers = text::split(line, '\t');
    int doc_col = -1, title_col = -1;
    for (std::size_t i = 0; i < headers.size(); ++i) {
        auto h = text::trim(headers[i]);
        if (h == "doc_id") doc_col = static_cast<int>(i);
        else if (h == "title") title_col = static_cast<int>(i);
    }
    if (doc_col < 0) throw MissingColumn("doc_id");
    if (title_col < 0) throw MissingColumn("title");
    while (std::getline(input, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (text::is_blank(line)) continue;
        auto cols = text::split(line, '\t');
        auto max_col = static_cast<std::size_t>(std::max(doc_col, title_col));
        if (cols.size() <= max_col) continue;
        auto doc = text::trim(cols[static_cast<std::size_t>(doc_col)]);
        if (doc.empty()) continue;
        titles.emplace(std::string(doc),
                       std::string(text::trim(cols[static_cast<std::size_t>(title_col)])));
    }
    return titles;
}

bool Deduplicator::is_new(const SegmentPair& segment) {
    // Texts never contain newlines, so '\n' is a safe field separator.
    std::string key(text::trim(segment.source_text));
    key += '\n';
    key += text::trim(segment.target_text);
    if (seen_.insert(std::move(key)).second) return true;
    ++duplicates_;
    return false;
}

std::uint64_t dedup(const std::vector<SegmentPair>& segments, const SegmentSink& unique) {
    Deduplicator dd;
    for (const auto& segment : segments) {
        if (dd.is_new(segment)) {
            unique(SegmentPair{segment});
        }
    }
    return dd.duplicates();
}

std::string to_string(PartitionUnit unit) {
    return unit == PartitionUnit::segment ? "segment" : "document";
}

PartitionUnit parse_partition_unit(std::string_view name) {
    if (name == "segment") return PartitionUnit::segment;
    if (name == "document") return PartitionUnit::document;
    throw ValidationError("unknown partition unit: " + std::string(name));
}

namespace {

// std::uniform_int_distribution is implementation-defined, so splits would
// not be portable across standard libraries. mt19937_64 itself is fully
// specified; rejection sampling on top of it keeps the draw reproducible
// everywhere.
std::uint64_t bounded_draw(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t value;
    do {
        value = rng();
    } while (value >= limit);
    return value % bound;
}

void fisher_yates(std::vector<std::uint64_t>& items, std::mt19937_64& rng) {
    for (std::uint64_t i = items.size(); i > 1; --i) {
        std::swap(items[i - 1], items[bounded_draw(rng, i)]);
    }
}

} // namespace

PartitionResult partition(const std::vector<SegmentPair>& segments, const PartitionSpec& spec) {
    // Unit ids in first-appearance order; for segment mode that is just the index.
    std::vector<std::uint64_t> unit_of_segment(segments.size());
    std::uint64_t unit_count = 0;
    if (spec.unit == PartitionUnit::segment) {
        unit_count = segments.size();
        for (std::size_t i = 0; i < segments.size(); ++i) unit_of_segment[i] = i;
    } else {
        std::unordered_map<std::string, std::uint64_t> doc_unit;
        for (std::size_t i = 0; i < segments.size(); ++i) {
            if (segments[i].doc_id.has_value()) {
                auto [it, inserted] = doc_unit.emplace(*segments[i].doc_id, unit_count);
                if (inserted) ++unit_count;
                unit_of_segment[i] = it->second;
            } else {
                unit_of_segment[i] = unit_count++;
            }
        }
    }

    if (spec.dev_size >= unit_count) {
        throw InvalidSpec("dev_size " + std::to_string(spec.dev_size) +
                          " must be smaller than the unit count " + std::to_string(unit_count));
    }

    std::vector<std::uint64_t> units(unit_count);
    for (std::uint64_t i = 0; i < unit_count; ++i) units[i] = i;
    std::mt19937_64 rng(spec.seed);
    fisher_yates(units, rng);

    std::vector<bool> in_dev(unit_count, false);
    for (std::uint64_t i = 0; i < spec.dev_size; ++i) in_dev[units[i]] = true;

    PartitionResult result;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        (in_dev[unit_of_segment[i]] ? result.dev : result.train).push_back(segments[i]);
    }
    return result;
}

std::string StatsTable::render() const {
    std::vector<std::size_t> widths;
    std::size_t name_width = std::string("Total").size();
    for (const auto& row : rows) name_width = std::max(name_width, row.corpus.size());
    name_width = std::max(name_width, std::string("Corpus").size());

    auto fmt_count = [](std::uint64_t v) {
        std::string digits = std::to_string(v);
        std::string out;
        int c = 0;
        for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
            if (c > 0 && c % 3 == 0) out.push_back(',');
            out.push_back(*it);
            ++c;
        }
        std::reverse(out.begin(), out.end());
        return out;
    };

    for (const auto& label : pair_labels) {
        std::size_t w = label.size();
        for (const auto& row : rows) {
            auto it = row.counts.find(label);
            if (it != row.counts.end()) w = std::max(w, fmt_count(it->second).size());
        }
        auto t = totals.find(label);
        if (t != totals.end()) w = std::max(w, fmt_count(t->second).size());
        widths.push_back(w);
    }

    std::ostringstream out;
    auto pad = [&out](const std::string& s, std::size_t w) {
        out << s << std::string(w > s.size() ? w - s.size() : 0, ' ');
    };
    pad("Corpus", name_width);
    for (std::size_t i = 0; i < pair_labels.size(); ++i) {
        out << "  ";
        pad(pair_labels[i], widths[i]);
    }
    out << '\n';
    for (const auto& row : rows) {
        pad(row.corpus, name_width);
        for (std::size_t i = 0; i < pair_labels.size(); ++i) {
            out << "  ";
            auto it = row.counts.find(pair_labels[i]);
            pad(it == row.counts.end() ? "-" : fmt_count(it->second), widths[i]);
        }
        out << '\n';
    }
    pad("Total", name_width);
    for (std::size_t i = 0; i < pair_labels.size(); ++i) {
        out << "  ";
        auto it = totals.find(pair_labels[i]);
        pad(it == totals.end() ? "-" : fmt_count(it->second), widths[i]);
    }
    out << '\n';
    return out.str();
}

std::string StatsTable::to_tsv() const {
    std::string out = "corpus";
    for (const auto& label : pair_labels) {
        out += '\t';
        out += label;
    }
    out += '\n';
    auto append_row = [this, &out](const std::string& name,
                                   const std::map<std::string, std::uint64_t>& counts) {
        out += name;
        for (const auto& label : pair_labels) {
            out += '\t';
            auto it = counts.find(label);
            out += it == counts.end() ? "-" : std::to_string(it->second);
        }
        out += '\n';
    };
    for (const auto& row : rows) append_row(row.corpus, row.counts);
    append_row("Total", totals);
    return out;
}

nlohmann::json StatsTable::to_json() const {
    nlohmann::json rows_json = nlohmann::json::array();
    for (const auto& row : rows) {
        nlohmann::json counts;
        for (const auto& [label, count] : row.counts) counts[label] = count;
        rows_json.push_back({{"corpus", row.corpus}, {"counts", counts}});
    }
    nlohmann::json totals_json;
    for (const auto& [label, count] : totals) totals_json[label] = count;
    return {{"pairs", pair_labels}, {"rows", rows_json}, {"totals", totals_json}};
}

StatsTable corpus_stats(const std::vector<CorpusManifest>& manifests) {
    StatsTable table;
    std::unordered_set<std::string> seen;
    for (const auto& m : manifests) {
        const std::string label = m.pair.label();
        if (!seen.insert(m.name + "\n" + label).second) {
            throw ValidationError("duplicate manifest for corpus '" + m.name + "' pair " + label);
        }
        if (std::find(table.pair_labels.begin(), table.pair_labels.end(), label) ==
            table.pair_labels.end()) {
            table.pair_labels.push_back(label);
        }
        auto row = std::find_if(table.rows.begin(), table.rows.end(),
                                [&m](const StatsTable::Row& r) { return r.corpus == m.name; });
        if (row == table.rows.end()) {
            table.rows.push_back({m.name, {}});
            row = std::prev(table.rows.end());
        }
        row->counts[label] = m.segment_count;
        table.totals[label] += m.segment_count;
    }
    return table;
}

} // namespace biomt

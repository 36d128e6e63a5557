#include "biomt/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "biomt/errors.hpp"
#include "biomt/text.hpp"

namespace biomt {

std::vector<OfficialScore> load_official_scores(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FixtureError(Errc::io, "cannot read score fixture: " + path);
    std::string line;
    if (!std::getline(in, line)) {
        throw FixtureError(Errc::validation, "empty score fixture: " + path);
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "team\tdirection\tscore") {
        throw FixtureError(Errc::validation, "bad score fixture header: " + path);
    }
    std::vector<OfficialScore> scores;
    std::uint64_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (text::is_blank(line)) continue;
        auto cols = text::split(line, '\t');
        if (cols.size() != 3) {
            throw FixtureError(Errc::validation, "score fixture line " + std::to_string(line_no) +
                                                     ": expected 3 columns");
        }
        char* end = nullptr;
        const double score = std::strtod(cols[2].c_str(), &end);
        if (end == cols[2].c_str() || score < 0.0 || score > 100.0) {
            throw FixtureError(Errc::validation, "score fixture line " + std::to_string(line_no) +
                                                     ": bad score '" + cols[2] + "'");
        }
        scores.push_back({cols[0], cols[1], score});
    }
    if (scores.empty()) {
        throw FixtureError(Errc::validation, "score fixture has no rows: " + path);
    }
    return scores;
}

std::string render_official_scores(const std::vector<OfficialScore>& scores,
                                   const std::string& direction_filter) {
    std::vector<std::string> directions;
    std::vector<std::string> teams;
    for (const auto& s : scores) {
        if (std::find(directions.begin(), directions.end(), s.direction) == directions.end()) {
            directions.push_back(s.direction);
        }
        if (std::find(teams.begin(), teams.end(), s.team) == teams.end()) {
            teams.push_back(s.team);
        }
    }
    if (!direction_filter.empty()) {
        if (std::find(directions.begin(), directions.end(), direction_filter) ==
            directions.end()) {
            throw ValidationError("unknown direction: " + direction_filter);
        }
        directions = {direction_filter};
    }

    std::map<std::string, std::map<std::string, double>> cell; // team -> direction -> score
    std::map<std::string, double> best;
    for (const auto& s : scores) {
        cell[s.team][s.direction] = s.score;
        auto [it, inserted] = best.emplace(s.direction, s.score);
        if (!inserted) it->second = std::max(it->second, s.score);
    }

    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.2f", v);
        return std::string(buf);
    };

    std::size_t team_width = std::string("Team").size();
    for (const auto& t : teams) team_width = std::max(team_width, t.size());
    std::vector<std::size_t> widths;
    for (const auto& d : directions) {
        std::size_t w = d.size();
        for (const auto& t : teams) {
            auto it = cell[t].find(d);
            if (it != cell[t].end()) {
                w = std::max(w, fmt(it->second).size() + 1); // room for the star
            }
        }
        widths.push_back(w);
    }

    std::ostringstream out;
    auto pad = [&out](const std::string& s, std::size_t w) {
        out << s << std::string(w > s.size() ? w - s.size() : 0, ' ');
    };
    pad("Team", team_width);
    for (std::size_t i = 0; i < directions.size(); ++i) {
        out << "  ";
        pad(directions[i], widths[i]);
    }
    out << '\n';
    for (const auto& t : teams) {
        pad(t, team_width);
        for (std::size_t i = 0; i < directions.size(); ++i) {
            out << "  ";
            auto it = cell[t].find(directions[i]);
            if (it == cell[t].end()) {
                pad("-", widths[i]);
            } else {
                std::string s = fmt(it->second);
                if (it->second == best[directions[i]]) s += "*";
                pad(s, widths[i]);
            }
        }
        out << '\n';
    }
    out << "(* best score per direction)\n";
    return out.str();
}

ReferenceNumber parse_reference_number(std::string_view printed) {
    ReferenceNumber n;
    n.printed = std::string(text::trim(printed));
    if (n.printed.empty()) throw ValidationError("empty reference number");
    std::string digits = n.printed;
    bool millions = false;
    if (digits.back() == 'M') {
        millions = true;
        digits.pop_back();
    }
    digits.erase(std::remove(digits.begin(), digits.end(), ','), digits.end());
    if (millions) {
        auto dot = digits.find('.');
        const std::size_t decimals = dot == std::string::npos ? 0 : digits.size() - dot - 1;
        if (decimals > 6) throw ValidationError("over-precise reference number: " + n.printed);
        char* end = nullptr;
        const double v = std::strtod(digits.c_str(), &end);
        if (end != digits.c_str() + digits.size() || v < 0.0) {
            throw ValidationError("bad reference number: " + n.printed);
        }
        n.value = static_cast<std::uint64_t>(std::llround(v * 1e6));
        n.slack = 0.5 * std::pow(10.0, 6.0 - static_cast<double>(decimals));
    } else {
        char* end = nullptr;
        const auto v = std::strtoull(digits.c_str(), &end, 10);
        if (end != digits.c_str() + digits.size()) {
            throw ValidationError("bad reference number: " + n.printed);
        }
        n.value = v;
        n.slack = 0.0;
    }
    return n;
}

nlohmann::json load_reference_tables(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FixtureError(Errc::io, "cannot read reference tables: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FixtureError(Errc::validation,
                           "reference tables are not valid JSON: " + path + ": " + e.what());
    }
    if (!j.contains("corpus_rows") || !j.contains("printed_totals")) {
        throw FixtureError(Errc::validation, "reference tables missing required keys: " + path);
    }
    return j;
}

std::vector<TotalCheck> check_reference_totals(const nlohmann::json& tables) {
    std::vector<TotalCheck> checks;
    for (const auto& [pair_label, printed] : tables.at("printed_totals").items()) {
        TotalCheck check;
        check.pair_label = pair_label;
        check.printed_total = parse_reference_number(printed.get<std::string>());
        for (const auto& row : tables.at("corpus_rows")) {
            if (!row.contains(pair_label)) continue;
            auto n = parse_reference_number(row.at(pair_label).get<std::string>());
            check.exact_sum += n.value;
            check.row_slack += n.slack;
        }
        const double diff = check.exact_sum >= check.printed_total.value
                                ? static_cast<double>(check.exact_sum - check.printed_total.value)
                                : static_cast<double>(check.printed_total.value - check.exact_sum);
        check.discrepancy = diff > check.printed_total.slack + check.row_slack;
        checks.push_back(std::move(check));
    }
    return checks;
}

namespace {

std::string with_thousands(std::uint64_t v) {
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
}

} // namespace

std::string render_reference_tables(const nlohmann::json& tables) {
    std::ostringstream out;
    std::vector<std::string> pairs;
    for (const auto& [pair_label, _] : tables.at("printed_totals").items()) {
        pairs.push_back(pair_label);
    }

    out << "Reference corpus sizes (sentences)\n";
    std::size_t name_width = std::string("printed total").size();
    for (const auto& row : tables.at("corpus_rows")) {
        name_width = std::max(name_width, row.at("corpus").get<std::string>().size());
    }
    auto pad = [&out](const std::string& s, std::size_t w) {
        out << s << std::string(w > s.size() ? w - s.size() : 0, ' ');
    };
    pad("Corpus", name_width);
    for (const auto& p : pairs) out << "  " << p;
    out << '\n';
    for (const auto& row : tables.at("corpus_rows")) {
        pad(row.at("corpus").get<std::string>(), name_width);
        for (const auto& p : pairs) {
            out << "  ";
            pad(row.contains(p) ? row.at(p).get<std::string>() : "-", p.size());
        }
        out << '\n';
    }

    auto checks = check_reference_totals(tables);
    pad("computed total", name_width);
    for (const auto& p : pairs) {
        out << "  ";
        auto it = std::find_if(checks.begin(), checks.end(),
                               [&p](const TotalCheck& c) { return c.pair_label == p; });
        pad(it == checks.end() ? "-" : with_thousands(it->exact_sum), p.size());
    }
    out << '\n';
    pad("printed total", name_width);
    for (const auto& p : pairs) {
        out << "  ";
        auto it = std::find_if(checks.begin(), checks.end(),
                               [&p](const TotalCheck& c) { return c.pair_label == p; });
        pad(it == checks.end() ? "-" : it->printed_total.printed, p.size());
    }
    out << '\n';
    for (const auto& check : checks) {
        if (check.discrepancy) {
            out << "WARNING: " << check.pair_label << " rows sum to "
                << with_thousands(check.exact_sum) << ", but the printed total is "
                << check.printed_total.printed
                << "; the difference exceeds printing precision\n";
        }
    }

    if (tables.contains("umls_concepts")) {
        out << "\nReference parallel concept counts\n";
        for (const auto& [pair_label, count] : tables.at("umls_concepts").items()) {
            out << pair_label << "  " << with_thousands(count.get<std::uint64_t>()) << '\n';
        }
    }
    if (tables.contains("final_partition")) {
        out << "\nReference final corpus sizes (train / dev)\n";
        for (const auto& [pair_label, sizes] : tables.at("final_partition").items()) {
            out << pair_label << "  " << sizes.at("train").get<std::string>() << " / "
                << sizes.at("dev").get<std::string>() << '\n';
        }
    }
    return out.str();
}

} // namespace biomt

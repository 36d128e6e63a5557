#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "biomt/errors.hpp"

namespace biomt {

struct OfficialScore {
    std::string team;
    std::string direction; // e.g. "ES/EN"
    double score{0.0};
};

// TSV fixture with header: team, direction, score. Missing file raises
// FixtureError(io); malformed content raises FixtureError(validation).
std::vector<OfficialScore> load_official_scores(const std::string& path);

// Teams x directions table in fixture order; absent cells print "-" and the
// best score per direction (ties included) is starred. `direction_filter`
// narrows the table to one column.
std::string render_official_scores(const std::vector<OfficialScore>& scores,
                                   const std::string& direction_filter = "");

// A number as printed in a reference table: either exact ("93,471") or
// rounded to millions ("2.37M"). `slack` is half the unit of the last
// printed digit, i.e. the largest rounding error the printed form hides.
struct ReferenceNumber {
    std::uint64_t value{0};
    double slack{0.0};
    std::string printed;
};

ReferenceNumber parse_reference_number(std::string_view printed);

struct TotalCheck {
    std::string pair_label;
    std::uint64_t exact_sum{0};
    double row_slack{0.0}; // accumulated rounding slack of the summed rows
    ReferenceNumber printed_total;
    bool discrepancy{false}; // |sum - printed| exceeds all rounding slack
};

// Reference table JSON: corpus rows with printed per-pair counts plus
// printed totals; optionally concept counts and final split sizes.
nlohmann::json load_reference_tables(const std::string& path);

// Recomputes each pair's total from the rows and compares against the
// printed total, honoring rounding slack on both sides.
std::vector<TotalCheck> check_reference_totals(const nlohmann::json& tables);

// Full text block: corpus table with computed vs printed totals and
// discrepancy warnings, then concept counts and final split sizes when
// present.
std::string render_reference_tables(const nlohmann::json& tables);

} // namespace biomt

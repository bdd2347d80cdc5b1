#pragma once

// JSON-lines wire format for preference records. One JSON object per line:
//   id (string), features_1, features_2 (number arrays, equal length),
//   and exactly one of: oracle (number), score_1 + score_2 (numbers), or
//   neither. A label field may also be present.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ordfb/core_types.hpp"

namespace ordfb {

struct PreferenceRecord {
    std::string id;
    std::vector<double> features1;
    std::vector<double> features2;
    std::optional<double> score1;
    std::optional<double> score2;
    std::optional<double> oracle;
    std::optional<double> label;
};

// Throws MalformedRecord naming the 1-based line on parse errors, missing or
// mistyped fields, the score/oracle exclusivity rule, or a feature-length
// mismatch against the first record.
std::vector<PreferenceRecord> read_jsonl(std::istream& in);
std::vector<PreferenceRecord> read_jsonl_file(const std::string& path);

// Shortest round-trip number formatting (nlohmann dump); one record per line.
void write_jsonl(std::ostream& out, const std::vector<PreferenceRecord>& records);
void write_jsonl_file(const std::string& path,
                      const std::vector<PreferenceRecord>& records);

// Oracle of a record: the explicit value, or sigmoid((score1-score2)/T).
// MissingOracle when the record has neither.
double record_oracle(const PreferenceRecord& rec, double temperature);

PreferenceItem to_item(const PreferenceRecord& rec,
                       std::optional<double> temperature = std::nullopt);

}  // namespace ordfb

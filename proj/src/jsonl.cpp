#include "ordfb/jsonl.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ordfb/losses.hpp"

namespace ordfb {

namespace {

using nlohmann::json;

[[noreturn]] void bad_record(std::size_t line, const std::string& why) {
    std::ostringstream os;
    os << "line " << line << ": " << why;
    raise(Errc::MalformedRecord, os.str());
}

std::vector<double> number_array(const json& j, const char* key, std::size_t line) {
    if (!j.contains(key)) bad_record(line, std::string("missing field ") + key);
    const json& arr = j.at(key);
    if (!arr.is_array() || arr.empty())
        bad_record(line, std::string(key) + " must be a non-empty array");
    std::vector<double> out;
    out.reserve(arr.size());
    for (const auto& v : arr) {
        if (!v.is_number())
            bad_record(line, std::string(key) + " must contain numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

std::optional<double> opt_number(const json& j, const char* key, std::size_t line) {
    if (!j.contains(key)) return std::nullopt;
    if (!j.at(key).is_number())
        bad_record(line, std::string(key) + " must be a number");
    return j.at(key).get<double>();
}

}  // namespace

std::vector<PreferenceRecord> read_jsonl(std::istream& in) {
    std::vector<PreferenceRecord> out;
    std::string line;
    std::size_t lineno = 0;
    std::size_t feature_dim = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            bad_record(lineno, e.what());
        }
        if (!j.is_object()) bad_record(lineno, "record is not an object");
        PreferenceRecord rec;
        if (!j.contains("id") || !j.at("id").is_string())
            bad_record(lineno, "missing string field id");
        rec.id = j.at("id").get<std::string>();
        rec.features1 = number_array(j, "features_1", lineno);
        rec.features2 = number_array(j, "features_2", lineno);
        if (rec.features1.size() != rec.features2.size())
            bad_record(lineno, "features_1 and features_2 differ in length");
        if (feature_dim == 0) feature_dim = rec.features1.size();
        if (rec.features1.size() != feature_dim)
            bad_record(lineno, "feature length differs from earlier records");
        rec.score1 = opt_number(j, "score_1", lineno);
        rec.score2 = opt_number(j, "score_2", lineno);
        rec.oracle = opt_number(j, "oracle", lineno);
        rec.label = opt_number(j, "label", lineno);

        bool has_scores = rec.score1.has_value() || rec.score2.has_value();
        bool both_scores = rec.score1.has_value() && rec.score2.has_value();
        if (has_scores && !both_scores)
            bad_record(lineno, "score_1 and score_2 must appear together");
        if (rec.oracle && both_scores)
            bad_record(lineno, "oracle and scores are mutually exclusive");
        if (rec.oracle && !(*rec.oracle >= 0.0 && *rec.oracle <= 1.0))
            bad_record(lineno, "oracle outside [0,1]");
        out.push_back(std::move(rec));
    }
    return out;
}

std::vector<PreferenceRecord> read_jsonl_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(Errc::MalformedRecord, "cannot open " + path);
    return read_jsonl(in);
}

void write_jsonl(std::ostream& out, const std::vector<PreferenceRecord>& records) {
    for (const auto& rec : records) {
        json j;
        j["id"] = rec.id;
        j["features_1"] = rec.features1;
        j["features_2"] = rec.features2;
        if (rec.score1) j["score_1"] = *rec.score1;
        if (rec.score2) j["score_2"] = *rec.score2;
        if (rec.oracle) j["oracle"] = *rec.oracle;
        if (rec.label) j["label"] = *rec.label;
        out << j.dump() << "\n";
    }
}

void write_jsonl_file(const std::string& path,
                      const std::vector<PreferenceRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(Errc::MalformedRecord, "cannot open " + path + " for writing");
    write_jsonl(out, records);
}

double record_oracle(const PreferenceRecord& rec, double temperature) {
    if (rec.oracle) return *rec.oracle;
    if (rec.score1 && rec.score2) {
        if (!(temperature > 0.0)) raise(Errc::ConfigError, "temperature");
        return sigmoid((*rec.score1 - *rec.score2) / temperature);
    }
    raise(Errc::MissingOracle, "record " + rec.id + " has neither oracle nor scores");
}

PreferenceItem to_item(const PreferenceRecord& rec,
                       std::optional<double> temperature) {
    PreferenceItem item;
    item.id = rec.id;
    item.features1 = rec.features1;
    item.features2 = rec.features2;
    if (rec.oracle)
        item.oracle = *rec.oracle;
    else if (rec.score1 && rec.score2 && temperature)
        item.oracle = record_oracle(rec, *temperature);
    item.label = rec.label;
    validate_item(item);
    return item;
}

}  // namespace ordfb

// Command-line front end: label JSONL preference records on an ordinal
// scale, run the desk-scale training experiments from a TOML config, run the
// verification suites, and render experiment curves as SVG charts.
//
// Exit codes: 0 success, 1 verification failure, 2 bad input or config.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ordfb/core_types.hpp"
#include "ordfb/feedback.hpp"
#include "ordfb/jsonl.hpp"
#include "ordfb/svg.hpp"
#include "ordfb/toml.hpp"
#include "ordfb/trainer.hpp"
#include "ordfb/verify.hpp"

namespace {

using namespace ordfb;

// Shortest round-trip decimal form, identical across runs (std::to_chars).
std::string num_str(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

OrdinalScale scale_by_name(const std::string& name) {
    if (name == "binary") return scale_preset(ScalePreset::Binary);
    if (name == "three_level") return scale_preset(ScalePreset::ThreeLevel);
    if (name == "five_level") return scale_preset(ScalePreset::FiveLevel);
    raise(Errc::ConfigError,
          "scale '" + name + "' (expected binary|three_level|five_level)");
}

// ---------------------------------------------------------------------------
// label subcommand

int run_label(const std::string& in_path, const std::string& out_path,
              const std::string& scale_name, std::uint64_t seed,
              double temperature) {
    auto records = read_jsonl_file(in_path);
    OrdinalScale scale = scale_by_name(scale_name);

    Rng rng(RngSeed{seed});
    std::map<std::string, std::size_t> histogram;
    for (auto& rec : records) {
        double oracle = record_oracle(rec, temperature);
        DiscreteMeasure m = smallest_interval_measure(scale, oracle);
        rec.label = sample_label(m, rng);
        std::size_t idx = *scale.index_of(*rec.label);
        std::string key = scale.labels().empty()
                              ? num_str(scale.level(idx))
                              : scale.labels()[idx];
        ++histogram[key];
    }
    write_jsonl_file(out_path, records);

    std::cout << "labeled " << records.size() << " records on scale "
              << scale_name << " (seed " << seed << ")\n";
    for (std::size_t i = 0; i < scale.size(); ++i) {
        std::string key = scale.labels().empty() ? num_str(scale.level(i))
                                                 : scale.labels()[i];
        std::size_t count = histogram.count(key) ? histogram[key] : 0;
        double frac = records.empty()
                          ? 0.0
                          : static_cast<double>(count) / records.size();
        std::cout << "  " << key << " (" << num_str(scale.level(i))
                  << "): " << count << "  " << num_str(frac) << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// experiment subcommand

struct ExperimentOutput {
    std::string csv;
    std::string summary_json;
    std::vector<ChartSeries> ce_series;  // mean oracle-ce per key over epochs
};

TrainConfig train_config_from(const TomlTable& cfg) {
    TrainConfig tc;
    std::string loss = cfg.get_string_or("train.loss", "ce");
    if (loss == "ce") tc.loss = LossKind::Ce;
    else if (loss == "hinge") tc.loss = LossKind::Hinge;
    else raise(Errc::ConfigError, "train.loss (expected ce|hinge)");
    tc.learning_rate = cfg.get_number_or("train.learning_rate", 0.1);
    tc.epochs = static_cast<std::size_t>(cfg.get_integer_or("train.epochs", 200));
    tc.batch_size =
        static_cast<std::size_t>(cfg.get_integer_or("train.batch_size", 0));
    tc.l2 = cfg.get_number_or("train.l2", 0.0);
    tc.momentum = cfg.get_number_or("train.momentum", 0.0);
    tc.hinge_margin = cfg.get_number_or("train.hinge_margin", 2.0);
    tc.eval_every =
        static_cast<std::size_t>(cfg.get_integer_or("train.eval_every", 10));
    tc.seed = RngSeed{static_cast<std::uint64_t>(
        cfg.get_integer_or("train.shuffle_seed", 17))};
    if (tc.learning_rate <= 0.0)
        raise(Errc::ConfigError, "train.learning_rate (must be positive)");
    return tc;
}

ExperimentOutput run_experiment_config(const TomlTable& cfg,
                                       std::optional<std::uint64_t> seed_override) {
    const std::string kind = cfg.get_string("experiment.kind");
    if (kind != "granularity" && kind != "tied_ratio")
        raise(Errc::ConfigError,
              "experiment.kind (expected granularity|tied_ratio)");

    SyntheticWorld world = make_world(
        static_cast<std::size_t>(cfg.get_integer_or("world.dim", 16)),
        RngSeed{static_cast<std::uint64_t>(cfg.get_integer_or("world.seed", 7))});
    if (cfg.has("world.temperature"))
        world.temperature = cfg.get_number("world.temperature");
    if (cfg.has("world.ood_shift")) world.ood_shift = cfg.get_number("world.ood_shift");
    if (cfg.has("world.ood_scale")) world.ood_scale = cfg.get_number("world.ood_scale");

    auto n_train = static_cast<std::size_t>(cfg.get_integer_or("data.n_train", 500));
    auto n_eval = static_cast<std::size_t>(cfg.get_integer_or("data.n_eval", 2000));

    std::vector<std::uint64_t> seeds;
    if (seed_override) {
        seeds.push_back(*seed_override);
    } else if (cfg.has("data.seeds")) {
        for (double s : cfg.get_numbers("data.seeds"))
            seeds.push_back(static_cast<std::uint64_t>(s));
    } else {
        seeds = {1, 2, 3, 4, 5};
    }
    if (seeds.empty()) raise(Errc::ConfigError, "data.seeds (must be nonempty)");

    TrainConfig tc = train_config_from(cfg);

    SweepResult result;
    if (kind == "granularity") {
        std::vector<LabelSystem> systems;
        if (cfg.has("granularity.systems")) {
            auto all = standard_label_systems();
            for (const auto& name : cfg.get_strings("granularity.systems")) {
                auto it = std::find_if(all.begin(), all.end(),
                                       [&](const LabelSystem& s) {
                                           return s.name == name;
                                       });
                if (it == all.end())
                    raise(Errc::ConfigError, "granularity.systems ('" + name +
                                                 "' is not a known system)");
                systems.push_back(*it);
            }
        } else {
            systems = standard_label_systems();
        }
        result = granularity_sweep(world, n_train, n_eval, systems, seeds, tc);
    } else {
        std::vector<double> ratios = {0.0, 0.25, 0.5, 0.75, 1.0};
        if (cfg.has("tied_ratio.ratios")) ratios = cfg.get_numbers("tied_ratio.ratios");
        for (double r : ratios)
            if (r < 0.0 || r > 1.0)
                raise(Errc::ConfigError, "tied_ratio.ratios (values must be in [0,1])");
        result = tied_ratio_sweep(world, n_train, n_eval, ratios, seeds, tc);
    }

    // curve CSV: one row per (seed, key, recorded epoch)
    std::ostringstream csv;
    csv << "seed,key,epoch,oracle_ce,id_accuracy,ood_accuracy\n";
    for (const auto& cell : result.cells) {
        for (const auto& pt : cell.curve) {
            csv << cell.seed << ',' << cell.key << ',' << pt.epoch << ','
                << num_str(pt.oracle_ce) << ',' << num_str(pt.id_accuracy) << ','
                << num_str(pt.ood_accuracy) << '\n';
        }
    }

    nlohmann::json summary;
    summary["kind"] = kind;
    summary["n_train"] = n_train;
    summary["n_eval"] = n_eval;
    summary["seeds"] = seeds;
    summary["rows"] = nlohmann::json::array();
    for (const auto& row : result.summary) {
        summary["rows"].push_back({{"key", row.key},
                                   {"oracle_ce_mean", row.oracle_ce_mean},
                                   {"oracle_ce_std", row.oracle_ce_std},
                                   {"id_accuracy_mean", row.id_accuracy_mean},
                                   {"id_accuracy_std", row.id_accuracy_std},
                                   {"ood_accuracy_mean", row.ood_accuracy_mean},
                                   {"ood_accuracy_std", row.ood_accuracy_std}});
    }

    // chart series: oracle ce per epoch, averaged over seeds, one per key
    ExperimentOutput out;
    std::vector<std::string> key_order;
    std::map<std::string, std::map<std::size_t, std::pair<double, int>>> acc;
    for (const auto& cell : result.cells) {
        if (acc.find(cell.key) == acc.end()) key_order.push_back(cell.key);
        for (const auto& pt : cell.curve) {
            auto& slot = acc[cell.key][pt.epoch];
            slot.first += pt.oracle_ce;
            slot.second += 1;
        }
    }
    for (const auto& key : key_order) {
        ChartSeries s;
        s.name = key;
        for (const auto& [epoch, sum_count] : acc[key])
            s.points.emplace_back(static_cast<double>(epoch),
                                  sum_count.first / sum_count.second);
        out.ce_series.push_back(std::move(s));
    }

    out.csv = csv.str();
    out.summary_json = summary.dump(2) + "\n";
    return out;
}

int run_experiment(const std::string& config_path, const std::string& out_dir,
                   std::optional<std::uint64_t> seed_override, bool with_chart) {
    TomlTable cfg = TomlTable::parse_file(config_path);
    std::string name = cfg.get_string_or("experiment.name", "experiment");
    ExperimentOutput out = run_experiment_config(cfg, seed_override);

    auto write_text = [&](const std::string& path, const std::string& text) {
        std::ofstream f(path, std::ios::binary);
        if (!f) raise(Errc::ConfigError, "cannot open '" + path + "' for writing");
        f << text;
    };
    std::string base = out_dir.empty() ? name : out_dir + "/" + name;
    write_text(base + "_curve.csv", out.csv);
    write_text(base + "_summary.json", out.summary_json);
    std::cout << "wrote " << base << "_curve.csv and " << base
              << "_summary.json\n";
    if (with_chart) {
        ChartSpec spec;
        spec.title = name + ": oracle cross-entropy";
        spec.x_label = "epoch";
        spec.y_label = "oracle ce";
        write_text(base + "_ce.svg", line_chart_svg(spec, out.ce_series));
        std::cout << "wrote " << base << "_ce.svg\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// verify subcommand

int run_verify(const std::string& suite, std::uint64_t seed,
               const std::string& out_path) {
    auto suites = verify::run_suites(suite, RngSeed{seed});
    std::string json = verify::suites_to_json(suites);
    if (out_path.empty()) {
        std::cout << json;
    } else {
        std::ofstream f(out_path, std::ios::binary);
        if (!f)
            raise(Errc::ConfigError, "cannot open '" + out_path + "' for writing");
        f << json;
    }
    for (const auto& s : suites)
        if (!s.pass) return 1;
    return 0;
}

// ---------------------------------------------------------------------------
// chart subcommand (replay a curve CSV as an SVG)

int run_chart(const std::string& csv_path, const std::string& out_path,
              const std::string& metric, const std::string& title) {
    std::ifstream f(csv_path);
    if (!f) raise(Errc::ConfigError, "cannot open '" + csv_path + "'");
    std::string line;
    if (!std::getline(f, line))
        raise(Errc::MalformedRecord, "line 1: empty csv");

    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::string cur;
        for (char c : s) {
            if (c == ',') {
                out.push_back(cur);
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        out.push_back(cur);
        return out;
    };
    auto header = split(line);
    auto col_of = [&](const std::string& name) -> std::size_t {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        raise(Errc::MalformedRecord, "column '" + name + "' not in csv header");
    };
    std::size_t key_col = col_of("key");
    std::size_t epoch_col = col_of("epoch");
    std::size_t metric_col = col_of(metric);

    std::vector<std::string> key_order;
    std::map<std::string, std::map<double, std::pair<double, int>>> acc;
    std::size_t line_no = 1;
    while (std::getline(f, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto cells = split(line);
        if (cells.size() != header.size())
            raise(Errc::MalformedRecord,
                  "line " + std::to_string(line_no) + ": wrong column count");
        try {
            double epoch = std::stod(cells[epoch_col]);
            double value = std::stod(cells[metric_col]);
            const std::string& key = cells[key_col];
            if (acc.find(key) == acc.end()) key_order.push_back(key);
            auto& slot = acc[key][epoch];
            slot.first += value;
            slot.second += 1;
        } catch (const std::exception&) {
            raise(Errc::MalformedRecord,
                  "line " + std::to_string(line_no) + ": non-numeric cell");
        }
    }

    std::vector<ChartSeries> series;
    for (const auto& key : key_order) {
        ChartSeries s;
        s.name = key;
        for (const auto& [epoch, sum_count] : acc[key])
            s.points.emplace_back(epoch, sum_count.first / sum_count.second);
        series.push_back(std::move(s));
    }
    ChartSpec spec;
    spec.title = title.empty() ? metric + " by epoch" : title;
    spec.x_label = "epoch";
    spec.y_label = metric;
    std::ofstream out(out_path, std::ios::binary);
    if (!out) raise(Errc::ConfigError, "cannot open '" + out_path + "' for writing");
    out << line_chart_svg(spec, series);
    std::cout << "wrote " << out_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ordinal-feedback preference learning toolkit"};
    app.require_subcommand(1);

    // label
    auto* label = app.add_subcommand(
        "label", "sample ordinal labels for JSONL preference records");
    std::string label_in, label_out, label_scale = "three_level";
    std::uint64_t label_seed = 0;
    double label_temp = 1.0;
    label->add_option("--in", label_in, "input JSONL path")->required();
    label->add_option("--out", label_out, "output JSONL path")->required();
    label->add_option("--scale", label_scale, "binary|three_level|five_level");
    label->add_option("--seed", label_seed, "rng seed");
    label->add_option("--temperature", label_temp,
                      "logistic temperature for score-only records");

    // experiment
    auto* experiment =
        app.add_subcommand("experiment", "run a training sweep from a TOML config");
    std::string exp_config, exp_out_dir;
    std::uint64_t exp_seed = 0;
    bool exp_seed_set = false, exp_chart = false;
    experiment->add_option("--config", exp_config, "TOML config path")->required();
    experiment->add_option("--out-dir", exp_out_dir,
                           "output directory (default: current)");
    experiment->add_option("--seed", exp_seed, "replace the config seed list")
        ->each([&](const std::string&) { exp_seed_set = true; });
    experiment->add_flag("--chart", exp_chart, "also write an SVG of the ce curve");

    // verify
    auto* verify_cmd =
        app.add_subcommand("verify", "run property suites and print a JSON verdict");
    std::string verify_suite = "all", verify_out;
    std::uint64_t verify_seed = 2026;
    verify_cmd->add_option("--suite", verify_suite,
                           "affinity|unbiasedness|coupling|rademacher|all");
    verify_cmd->add_option("--seed", verify_seed, "rng seed");
    verify_cmd->add_option("--out", verify_out, "write the JSON report here");

    // chart
    auto* chart = app.add_subcommand("chart", "render a curve CSV as an SVG chart");
    std::string chart_csv, chart_out, chart_metric = "oracle_ce", chart_title;
    chart->add_option("--csv", chart_csv, "curve CSV from `experiment`")->required();
    chart->add_option("--out", chart_out, "output SVG path")->required();
    chart->add_option("--metric", chart_metric,
                      "oracle_ce|id_accuracy|ood_accuracy");
    chart->add_option("--title", chart_title, "chart title");

    CLI11_PARSE(app, argc, argv);

    try {
        if (label->parsed())
            return run_label(label_in, label_out, label_scale, label_seed,
                             label_temp);
        if (experiment->parsed())
            return run_experiment(exp_config, exp_out_dir,
                                  exp_seed_set
                                      ? std::optional<std::uint64_t>(exp_seed)
                                      : std::nullopt,
                                  exp_chart);
        if (verify_cmd->parsed())
            return run_verify(verify_suite, verify_seed, verify_out);
        if (chart->parsed())
            return run_chart(chart_csv, chart_out, chart_metric, chart_title);
    } catch (const ordfb::Error& e) {
        std::cerr << "error [" << ordfb::errc_name(e.code()) << "]: " << e.what()
                  << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

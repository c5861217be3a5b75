// uec: command-line driver for the error-corrector protocol.
//
// Exit codes: 0 success, 2 config error, 3 data error, 4 numeric failure,
// 1 anything else.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "uec/checkpoint.hpp"
#include "uec/error.hpp"
#include "uec/evaluation.hpp"
#include "uec/forecast_exchange.hpp"
#include "uec/protocol.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Common {
    std::string config;
    std::string out = "uec_out";
    int threads = 0;
    std::vector<std::size_t> horizons;
    int kernel_size = 0;
    long long seed = -1;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config, "Run configuration (JSON); defaults apply when omitted");
    cmd->add_option("--out", c.out, "Output directory");
    cmd->add_option("--threads", c.threads, "OpenMP thread cap (0 = runtime default)");
    cmd->add_option("--horizons", c.horizons, "Evaluation horizons, overrides the config");
    cmd->add_option("--kernel-size", c.kernel_size, "Moving-average kernel size, overrides the config");
    cmd->add_option("--seed", c.seed, "Base seed for init/train/calibration, overrides the config");
}

uec::RunConfig resolve(const Common& c) {
    uec::RunConfig cfg = c.config.empty() ? uec::run_config_from_json(json::object()) : uec::load_run_config(c.config);
    if (!c.horizons.empty()) cfg.horizons = c.horizons;
    if (c.kernel_size != 0) cfg.decomp.kernel_size = c.kernel_size;
    if (c.seed >= 0) {
        const auto s = static_cast<std::uint64_t>(c.seed);
        cfg.init_seed = s;
        cfg.train_seed = s + 1;
        cfg.calibration_seed = s + 2;
        cfg.train.seed = cfg.train_seed;
    }
    cfg.validate();
    uec::set_thread_cap(c.threads);
    fs::create_directories(c.out);
    return cfg;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw uec::DataError("cannot write " + path.string());
    out << text;
}

void write_json(const fs::path& path, const json& doc) { write_text(path, doc.dump(2) + "\n"); }

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw uec::DataError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw uec::SchemaError(path.string() + ": " + e.what());
    }
}

/// Refuses artifacts produced under a different configuration.
void check_hash(const json& meta, const std::string& expected, const fs::path& path, bool force) {
    const std::string got = meta.value("config_hash", "");
    if (got == expected) return;
    if (force) {
        std::cerr << "warning: " << path.string() << " was produced with config " << got << ", current is " << expected
                  << " (continuing because of --force)\n";
        return;
    }
    throw uec::ConfigError(path.string() + " was produced with config " + got + " but the current config hashes to " +
                           expected + "; rerun the upstream step or pass --force");
}

json train_summary_json(const uec::protocol::TrainSummary& s) {
    return {{"train_samples", s.train_samples}, {"holdout_samples", s.holdout_samples}, {"steps_run", s.steps_run},
            {"best_step", s.best_step},         {"best_holdout", s.best_holdout},       {"initial_holdout", s.initial_holdout},
            {"early_stopped", s.early_stopped}};
}

json selection_json(const uec::calibration::BetaSelection& sel) {
    json scores = json::array();
    for (const auto& s : sel.scores) scores.push_back({{"beta", s.beta}, {"mse", s.mse}, {"mae", s.mae}});
    return {{"beta_mse", sel.beta_mse}, {"beta_mae", sel.beta_mae}, {"scores", scores}};
}

int cmd_ingest(const Common& c) {
    const auto cfg = resolve(c);
    const auto data = uec::protocol::prepare(cfg);
    uec::data::write_csv(fs::path(c.out) / "normalized.csv", data.normalized);
    json segs = json::array();
    for (const auto& b : data.bounds) segs.push_back({{"name", b.name}, {"begin", b.begin}, {"end", b.end}});
    write_json(fs::path(c.out) / "ingest.json",
               {{"config_hash", uec::config_hash(cfg)},
                {"length", data.raw.length()},
                {"channels", data.raw.channels()},
                {"channel_names", data.raw.channel_names},
                {"segments", segs},
                {"normalizer", {{"mean", data.normalizer.mean()}, {"std", data.normalizer.stdev()}}}});
    std::cout << "T=" << data.raw.length() << " D=" << data.raw.channels() << "\n";
    for (const auto& b : data.bounds) std::cout << b.name << " [" << b.begin << ", " << b.end << ")\n";
    return 0;
}

int cmd_rollout(const Common& c, std::size_t origin, std::size_t horizon, bool teacher_forced) {
    const auto cfg = resolve(c);
    const auto data = uec::protocol::prepare(cfg);
    const auto f = uec::protocol::make_backbone(cfg, data);
    const std::size_t w = cfg.history;
    if (origin + 1 < w || origin + horizon >= data.normalized.length())
        throw uec::TooShort("origin " + std::to_string(origin) + " leaves no room for W=" + std::to_string(w) +
                            " and horizon " + std::to_string(horizon));
    const auto history = data.normalized.values.slice_rows(origin + 1 - w, w);
    const auto truth = data.normalized.values.slice_rows(origin + 1, horizon);
    uec::backbone::RolloutOptions ro;
    ro.overlap = cfg.overlap;
    ro.series_id = cfg.series_id;
    ro.origin = static_cast<std::ptrdiff_t>(origin);
    ro.teacher_forced = teacher_forced;
    ro.truth = &truth;
    const auto trace = uec::backbone::ar_rollout_traced(*f, history, horizon, ro);
    uec::data::SeriesFrame out{trace.output, data.normalized.channel_names, uec::data::Origin::normalized};
    uec::data::write_csv(fs::path(c.out) / "rollout.csv", out);
    std::cout << "chunks=" << trace.chunks.size() << " mse=" << uec::eval::mse(trace.output, truth) << "\n";
    return 0;
}

int cmd_diagnose(const Common& c) {
    const auto cfg = resolve(c);
    const auto data = uec::protocol::prepare(cfg);
    const auto f = uec::protocol::make_backbone(cfg, data);
    const auto& tb = data.bound("test");
    const auto pts = uec::eval::accumulation_diagnostic(*f, data.normalized, tb.begin, tb.end, cfg.horizons,
                                                        cfg.stride, cfg.series_id);
    json rows = json::array();
    for (const auto& p : pts) {
        rows.push_back({{"horizon", p.horizon},
                        {"windows", p.windows},
                        {"ar_mse", p.ar_mse},
                        {"tf_mse", p.tf_mse},
                        {"increase_pct", p.increase_pct}});
        std::printf("H=%zu  AR=%.6g  TF=%.6g  increase=%.4f%%\n", p.horizon, p.ar_mse, p.tf_mse, p.increase_pct);
    }
    write_json(fs::path(c.out) / "diagnose.json", {{"config_hash", uec::config_hash(cfg)}, {"horizons", rows}});
    return 0;
}

int cmd_build_samples(const Common& c) {
    const auto cfg = resolve(c);
    const auto data = uec::protocol::prepare(cfg);
    const auto f = uec::protocol::make_backbone(cfg, data);
    const auto samples = uec::protocol::make_samples(cfg, data, *f);
    write_json(fs::path(c.out) / "samples.json", {{"config_hash", uec::config_hash(cfg)},
                                                 {"train", samples.train.size()},
                                                 {"holdout", samples.holdout.size()},
                                                 {"train_horizon", cfg.train_horizon == 0 ? 2 * cfg.output_width
                                                                                          : cfg.train_horizon}});
    std::cout << "train=" << samples.train.size() << " holdout=" << samples.holdout.size() << "\n";
    return 0;
}

int cmd_train(const Common& c) {
    const auto cfg = resolve(c);
    const auto data = uec::protocol::prepare(cfg);
    const auto f = uec::protocol::make_backbone(cfg, data);
    const auto samples = uec::protocol::make_samples(cfg, data, *f);
    const auto result = uec::protocol::train(cfg, data, samples);
    const auto summary = uec::protocol::summarize(result, samples);
    uec::corrector::save_checkpoint(fs::path(c.out) / "checkpoint.json", result.model,
                                    {{"config_hash", uec::config_hash(cfg)}, {"train", train_summary_json(summary)}});
    std::printf("holdout %.6g -> %.6g (best step %zu)%s\n", summary.initial_holdout, summary.best_holdout,
                summary.best_step, summary.early_stopped ? ", early stopped" : "");
    return 0;
}

int cmd_select_beta(const Common& c, const std::string& metric, const std::string& checkpoint, bool force) {
    if (metric != "mse" && metric != "mae") throw uec::ConfigError("--metric must be mse or mae");
    const auto cfg = resolve(c);
    const std::string hash = uec::config_hash(cfg);
    const fs::path ck = checkpoint.empty() ? fs::path(c.out) / "checkpoint.json" : fs::path(checkpoint);
    auto loaded = uec::corrector::load_checkpoint(ck);
    check_hash(loaded.metadata, hash, ck, force);
    const auto data = uec::protocol::prepare(cfg);
    const auto f = uec::protocol::make_backbone(cfg, data);
    const auto sel = uec::protocol::calibrate(cfg, data, *f, loaded.model);
    const double beta = metric == "mse" ? sel.beta_mse : sel.beta_mae;
    auto doc = selection_json(sel);
    doc["config_hash"] = hash;
    doc["metric"] = metric;
    doc["beta"] = beta;
    write_json(fs::path(c.out) / ("beta_" + metric + ".json"), doc);
    loaded.metadata["beta_" + metric] = beta;
    uec::corrector::save_checkpoint(ck, loaded.model, loaded.metadata);
    std::cout << "beta_" << metric << "=" << beta << "\n";
    return 0;
}

int cmd_evaluate(const Common& c, const std::string& checkpoint, bool force) {
    const auto cfg = resolve(c);
    const std::string hash = uec::config_hash(cfg);
    const fs::path out(c.out);
    const fs::path ck = checkpoint.empty() ? out / "checkpoint.json" : fs::path(checkpoint);

    uec::protocol::EvalReport rep;
    rep.config_hash = hash;
    const auto data = uec::protocol::prepare(cfg);
    rep.channels = data.normalized.channels();
    const auto f = uec::protocol::make_backbone(cfg, data);

    uec::corrector::UecStdModel model;
    if (fs::exists(ck)) {
        auto loaded = uec::corrector::load_checkpoint(ck);
        check_hash(loaded.metadata, hash, ck, force);
        model = std::move(loaded.model);
        if (loaded.metadata.contains("train")) {
            const auto& t = loaded.metadata["train"];
            rep.train = {t.value("train_samples", std::size_t{0}), t.value("holdout_samples", std::size_t{0}),
                         t.value("steps_run", std::size_t{0}),     t.value("best_step", std::size_t{0}),
                         t.value("best_holdout", 0.0),             t.value("initial_holdout", 0.0),
                         t.value("early_stopped", false)};
        }
    } else {
        const auto samples = uec::protocol::make_samples(cfg, data, *f);
        auto result = uec::protocol::train(cfg, data, samples);
        rep.train = uec::protocol::summarize(result, samples);
        model = std::move(result.model);
    }

    // Reuse selected betas when both records exist and match; otherwise select here.
    const fs::path bm = out / "beta_mse.json", ba = out / "beta_mae.json";
    if (fs::exists(bm) && fs::exists(ba)) {
        const auto jm = read_json(bm), ja = read_json(ba);
        check_hash(jm, hash, bm, force);
        check_hash(ja, hash, ba, force);
        rep.selection.beta_mse = jm.at("beta").get<double>();
        rep.selection.beta_mae = ja.at("beta").get<double>();
        for (const auto& s : jm.at("scores"))
            rep.selection.scores.push_back({s.at("beta").get<double>(), s.at("mse").get<double>(), s.at("mae").get<double>()});
    } else {
        rep.selection = uec::protocol::calibrate(cfg, data, *f, model);
    }
    rep.horizons = uec::protocol::evaluate_test(cfg, data, *f, model, rep.selection.beta_mse, rep.selection.beta_mae);

    write_json(out / "report.json", rep.to_json());
    write_text(out / "report.csv", rep.to_csv());
    for (const auto& h : rep.horizons)
        std::printf("H=%zu  MSE %.6g -> %.6g (%+.2f%%)  MAE %.6g -> %.6g (%+.2f%%)\n", h.horizon, h.baseline_mse,
                    h.corrected_mse, h.mse_reduction_pct, h.baseline_mae, h.corrected_mae, h.mae_reduction_pct);
    return 0;
}

int cmd_export(const Common& c) {
    const auto cfg = resolve(c);
    if (cfg.backbone != "toy") throw uec::ConfigError("export-forecasts needs a toy backbone to record from");
    const auto data = uec::protocol::prepare(cfg);
    const auto inner = uec::protocol::make_backbone(cfg, data);
    uec::backbone::RecordingForecaster rec(*inner);
    // Exercise every rollout the protocol makes: sample building, calibration and test
    // scoring, both uncorrected and teacher-forced for the diagnostic.
    const auto samples = uec::protocol::make_samples(cfg, data, rec);
    (void)samples;
    const auto model = uec::corrector::UecStdModel::zeros(cfg.model_shape(data.normalized.channels()));
    uec::protocol::calibrate(cfg, data, rec, model);
    uec::protocol::evaluate_test(cfg, data, rec, model, 0.0, 0.0);
    const auto& tb = data.bound("test");
    uec::eval::accumulation_diagnostic(rec, data.normalized, tb.begin, tb.end, cfg.horizons, cfg.stride, cfg.series_id);
    const auto records = rec.records();
    uec::backbone::write_forecast_exchange(fs::path(c.out) / "forecasts.jsonl", cfg.history, records);
    std::cout << "records=" << records.size() << "\n";
    return 0;
}

int exit_code(const uec::Error& e) {
    switch (e.error_class()) {
    case uec::ErrorClass::config: return 2;
    case uec::ErrorClass::data: return 3;
    case uec::ErrorClass::numeric: return 4;
    default: return 1;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Decomposition-based error corrector for autoregressive forecasting"};
    app.require_subcommand(1);
    Common common;

    auto* ingest = app.add_subcommand("ingest", "Load, split and normalize the series");
    auto* rollout = app.add_subcommand("rollout", "Chunked autoregressive rollout of the backbone from one origin");
    auto* diagnose = app.add_subcommand("diagnose", "Autoregressive versus teacher-forced error on the test segment");
    auto* samples = app.add_subcommand("build-samples", "Build corrector training samples from the validation segment");
    auto* train = app.add_subcommand("train-uec", "Train the corrector and write a checkpoint");
    auto* select = app.add_subcommand("select-beta", "Select the correction strength on the balanced set");
    auto* evaluate = app.add_subcommand("evaluate", "Score baseline and corrected rollouts on the test segment");
    auto* exportf = app.add_subcommand("export-forecasts", "Record every backbone call into a forecast-exchange file");
    for (auto* cmd : {ingest, rollout, diagnose, samples, train, select, evaluate, exportf}) add_common(cmd, common);

    std::size_t origin = 0, horizon = 0;
    bool teacher_forced = false;
    rollout->add_option("--origin", origin, "Index of the last history row")->required();
    rollout->add_option("--horizon", horizon, "Rollout length")->required();
    rollout->add_flag("--teacher-forced", teacher_forced, "Feed true values instead of predictions");

    std::string metric = "mse", checkpoint;
    bool force = false;
    select->add_option("--metric", metric, "mse or mae");
    select->add_option("--checkpoint", checkpoint, "Checkpoint path (default <out>/checkpoint.json)");
    select->add_flag("--force", force, "Accept artifacts from a different config");
    evaluate->add_option("--checkpoint", checkpoint, "Checkpoint path (default <out>/checkpoint.json)");
    evaluate->add_flag("--force", force, "Accept artifacts from a different config");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*ingest) return cmd_ingest(common);
        if (*rollout) return cmd_rollout(common, origin, horizon, teacher_forced);
        if (*diagnose) return cmd_diagnose(common);
        if (*samples) return cmd_build_samples(common);
        if (*train) return cmd_train(common);
        if (*select) return cmd_select_beta(common, metric, checkpoint, force);
        if (*evaluate) return cmd_evaluate(common, checkpoint, force);
        if (*exportf) return cmd_export(common);
    } catch (const uec::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

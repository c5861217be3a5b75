#include "uec/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "uec/error.hpp"
#include "uec/forecast_exchange.hpp"
#include "uec/synthetic.hpp"

namespace uec::protocol {

const data::SegmentBounds& PreparedData::bound(const std::string& name) const {
    for (const auto& b : bounds)
        if (b.name == name) return b;
    throw ConfigError("no segment named '" + name + "'");
}

data::SeriesFrame PreparedData::segment(const std::string& name) const {
    const auto& b = bound(name);
    return normalized.segment(b.begin, b.end);
}

std::vector<std::string> PreparedData::training_segments() const {
    std::vector<std::string> out;
    for (const auto& b : bounds)
        if (b.name.rfind("train", 0) == 0) out.push_back(b.name);
    return out;
}

data::SeriesFrame load_frame(const RunConfig& cfg) {
    if (cfg.source == "csv") return data::load_csv(cfg.csv_path, cfg.timestamp_column);
    return data::make_synthetic(cfg.synthetic);
}

PreparedData prepare(const RunConfig& cfg) { return prepare(cfg, load_frame(cfg)); }

PreparedData prepare(const RunConfig& cfg, data::SeriesFrame raw) {
    PreparedData p;
    p.bounds = data::split_bounds(raw.length(), cfg.split);
    std::vector<data::SeriesFrame> train_raw;
    for (const auto& b : p.bounds)
        if (b.name.rfind("train", 0) == 0) train_raw.push_back(raw.segment(b.begin, b.end));
    std::vector<const data::SeriesFrame*> ptrs;
    for (const auto& f : train_raw) ptrs.push_back(&f);
    p.normalizer = data::Normalizer::fit(ptrs);
    p.normalized = p.normalizer.apply(raw);
    p.raw = std::move(raw);
    return p;
}

std::unique_ptr<backbone::Forecaster> make_backbone(const RunConfig& cfg, const PreparedData& data) {
    if (cfg.backbone == "replay") {
        auto replay = backbone::load_replay(cfg.replay_path);
        if (replay.input_width() != cfg.history || replay.output_width() != cfg.output_width) {
            throw SchemaError("replay file has W=" + std::to_string(replay.input_width()) + ", L=" +
                              std::to_string(replay.output_width()) + " but the config asks for W=" +
                              std::to_string(cfg.history) + ", L=" + std::to_string(cfg.output_width));
        }
        if (replay.channels() != data.normalized.channels()) throw SchemaError("replay file channel count differs from data");
        return std::make_unique<backbone::ReplayForecaster>(std::move(replay));
    }
    std::vector<data::SeriesFrame> frames;
    for (const auto& name : data.training_segments()) frames.push_back(data.segment(name));
    std::vector<const data::SeriesFrame*> ptrs;
    for (const auto& f : frames) ptrs.push_back(&f);
    return backbone::make_toy(cfg.toy, ptrs, cfg.history, cfg.output_width);
}

pipeline::SampleSet make_samples(const RunConfig& cfg, const PreparedData& data, const backbone::Forecaster& f,
                                 Exec exec) {
    pipeline::SampleOptions o;
    o.train_horizon = cfg.train_horizon;
    o.stride = cfg.stride;
    o.train_fraction = cfg.train.train_fraction;
    o.overlap = cfg.overlap;
    o.series_id = cfg.series_id;
    o.absolute_offset = static_cast<std::ptrdiff_t>(data.bound("val").begin);
    return pipeline::build_samples(f, data.segment("val"), o, exec);
}

pipeline::TrainResult train(const RunConfig& cfg, const PreparedData& data, const pipeline::SampleSet& samples,
                            Exec exec) {
    nn::Rng init(cfg.init_seed);
    corrector::UecStdModel model(cfg.model_shape(data.normalized.channels()), init);
    auto tc = cfg.train;
    tc.seed = cfg.train_seed;
    return pipeline::train_uec(std::move(model), samples, tc, exec);
}

calibration::BalancedSet balanced_set(const RunConfig& cfg, const PreparedData& data) {
    const std::size_t horizon = cfg.eval_selection_horizon();
    const auto& vb = data.bound("val");
    if (vb.length() < cfg.history + horizon) {
        throw TooShort("validation segment has " + std::to_string(vb.length()) +
                       " rows; the selection horizon needs W+T_eval=" + std::to_string(cfg.history + horizon) +
                       ". Lower calibration.selection_horizon or enlarge the validation split.");
    }
    auto val_windows = calibration::frame_windows(data.segment("val"), cfg.history, horizon, cfg.stride,
                                                  static_cast<std::ptrdiff_t>(vb.begin),
                                                  calibration::EvalWindow::Source::validation);
    const std::size_t total = val_windows.size();
    auto n_unseen = static_cast<std::size_t>(std::ceil(cfg.unseen_fraction * static_cast<double>(total) - 1e-9));
    n_unseen = std::clamp<std::size_t>(n_unseen, 1, total);
    std::vector<calibration::EvalWindow> unseen(std::make_move_iterator(val_windows.end() - static_cast<std::ptrdiff_t>(n_unseen)),
                                                std::make_move_iterator(val_windows.end()));

    // Training windows come from the training segment closest to the test data.
    const auto train_names = data.training_segments();
    const auto& tb = data.bound(train_names.back());
    nn::Rng rng(cfg.calibration_seed);
    return calibration::build_balanced_set(std::move(unseen), data.segment(train_names.back()), total, cfg.history,
                                           horizon, rng, static_cast<std::ptrdiff_t>(tb.begin));
}

calibration::BetaSelection calibrate(const RunConfig& cfg, const PreparedData& data, const backbone::Forecaster& f,
                                     const corrector::Corrector& c, Exec exec) {
    const auto set = balanced_set(cfg, data);
    calibration::SelectOptions o;
    o.horizon = cfg.eval_selection_horizon();
    o.series_id = cfg.series_id;
    o.overlap = cfg.overlap;
    return calibration::select_betas(f, c, set, cfg.beta_grid, o, exec);
}

std::vector<HorizonResult> evaluate_test(const RunConfig& cfg, const PreparedData& data,
                                         const backbone::Forecaster& f, const corrector::Corrector& c,
                                         double beta_mse, double beta_mae, Exec exec) {
    const auto& tb = data.bound("test");
    std::vector<HorizonResult> out;
    for (std::size_t h : cfg.horizons) {
        const auto windows = eval::segment_windows(data.normalized, tb.begin, tb.end, cfg.history, h, cfg.stride);
        const std::size_t n = windows.size();
        std::vector<Matrix> base(n), at_mse(n), at_mae(n), truth(n);
        for_each_index(exec, n, [&](std::size_t i) {
            backbone::RolloutOptions ro;
            ro.overlap = cfg.overlap;
            ro.series_id = cfg.series_id;
            ro.origin = windows[i].origin;
            const auto r = pipeline::correction_trace(f, c, windows[i].history, h, ro);
            base[i] = r.uncorrected;
            at_mse[i] = r.corrected(beta_mse);
            at_mae[i] = r.corrected(beta_mae);
            truth[i] = windows[i].truth;
        });
        const auto b = eval::metric_sums(base, truth, exec);
        const auto cm = eval::metric_sums(at_mse, truth, exec);
        const auto ca = eval::metric_sums(at_mae, truth, exec);
        HorizonResult r;
        r.horizon = h;
        r.windows = n;
        r.baseline_mse = b.mse();
        r.baseline_mae = b.mae();
        r.baseline_mape = b.mape();
        r.corrected_mse = cm.mse();
        r.corrected_mae = ca.mae();
        r.corrected_mape = ca.mape();
        r.mse_reduction_pct = eval::error_reduction(r.corrected_mse, r.baseline_mse);
        r.mae_reduction_pct = eval::error_reduction(r.corrected_mae, r.baseline_mae);
        r.mape_excluded = b.mape_excluded;
        out.push_back(r);
    }
    return out;
}

TrainSummary summarize(const pipeline::TrainResult& result, const pipeline::SampleSet& samples) {
    TrainSummary s;
    s.train_samples = samples.train.size();
    s.holdout_samples = samples.holdout.size();
    s.steps_run = result.train_loss.size();
    s.best_step = result.best_step;
    s.best_holdout = result.best_holdout;
    s.initial_holdout = result.holdout.empty() ? 0.0 : result.holdout.front().loss;
    s.early_stopped = result.early_stopped;
    return s;
}

EvalReport run_protocol(const RunConfig& cfg, Exec exec) {
    const auto data = prepare(cfg);
    const auto f = make_backbone(cfg, data);
    const auto samples = make_samples(cfg, data, *f, exec);
    const auto trained = train(cfg, data, samples, exec);

    EvalReport rep;
    rep.config_hash = config_hash(cfg);
    rep.channels = data.normalized.channels();
    rep.train = summarize(trained, samples);
    rep.selection = calibrate(cfg, data, *f, trained.model, exec);
    rep.horizons = evaluate_test(cfg, data, *f, trained.model, rep.selection.beta_mse, rep.selection.beta_mae, exec);
    return rep;
}

nlohmann::json EvalReport::to_json() const {
    nlohmann::json doc;
    doc["format"] = "uec-eval-report";
    doc["version"] = 1;
    doc["config_hash"] = config_hash;
    doc["channels"] = channels;
    doc["train"] = {{"train_samples", train.train_samples},   {"holdout_samples", train.holdout_samples},
                    {"steps_run", train.steps_run},           {"best_step", train.best_step},
                    {"best_holdout", train.best_holdout},     {"initial_holdout", train.initial_holdout},
                    {"early_stopped", train.early_stopped}};
    nlohmann::json scores = nlohmann::json::array();
    for (const auto& s : selection.scores) scores.push_back({{"beta", s.beta}, {"mse", s.mse}, {"mae", s.mae}});
    doc["calibration"] = {{"beta_mse", selection.beta_mse}, {"beta_mae", selection.beta_mae}, {"scores", scores}};
    nlohmann::json hs = nlohmann::json::array();
    for (const auto& h : horizons) {
        hs.push_back({{"horizon", h.horizon},
                      {"windows", h.windows},
                      {"baseline", {{"mse", h.baseline_mse}, {"mae", h.baseline_mae}, {"mape", h.baseline_mape}}},
                      {"corrected", {{"mse", h.corrected_mse}, {"mae", h.corrected_mae}, {"mape", h.corrected_mape}}},
                      {"mse_reduction_pct", h.mse_reduction_pct},
                      {"mae_reduction_pct", h.mae_reduction_pct},
                      {"mape_excluded_cells", h.mape_excluded}});
    }
    doc["horizons"] = hs;
    return doc;
}

std::string EvalReport::to_csv() const {
    std::ostringstream out;
    out << "horizon,windows,beta_mse,beta_mae,baseline_mse,corrected_mse,mse_reduction_pct,baseline_mae,"
           "corrected_mae,mae_reduction_pct,baseline_mape,corrected_mape,mape_excluded_cells\n";
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.10g", v);
        return std::string(buf);
    };
    for (const auto& h : horizons) {
        out << h.horizon << ',' << h.windows << ',' << num(selection.beta_mse) << ',' << num(selection.beta_mae) << ','
            << num(h.baseline_mse) << ',' << num(h.corrected_mse) << ',' << num(h.mse_reduction_pct) << ','
            << num(h.baseline_mae) << ',' << num(h.corrected_mae) << ',' << num(h.mae_reduction_pct) << ','
            << num(h.baseline_mape) << ',' << num(h.corrected_mape) << ',' << h.mape_excluded << '\n';
    }
    return out.str();
}

} // namespace uec::protocol

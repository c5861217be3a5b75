#include "uec/run_config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>

#include "uec/error.hpp"

namespace uec {

using nlohmann::json;

namespace {

class Section {
public:
    Section(const json& doc, const char* name, std::set<std::string> keys) : name_(name) {
        if (!doc.contains(name)) return;
        node_ = &doc.at(name);
        if (!node_->is_object()) throw ConfigError(std::string("section '") + name + "' must be an object");
        for (const auto& [k, v] : node_->items()) {
            if (!keys.count(k)) throw ConfigError("unknown key '" + std::string(name) + "." + k + "'");
        }
    }

    template <class T>
    void read(const char* key, T& out) const {
        if (!node_ || !node_->contains(key)) return;
        try {
            out = node_->at(key).get<T>();
        } catch (const json::exception& e) {
            throw ConfigError(name_ + "." + key + ": " + e.what());
        }
    }

    bool has(const char* key) const { return node_ && node_->contains(key); }

private:
    std::string name_;
    const json* node_ = nullptr;
};

void check_top_level(const json& doc) {
    static const std::set<std::string> sections = {"data",      "split", "window", "horizons",    "backbone",
                                                   "rollout",   "corrector", "train", "calibration", "seeds"};
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [k, v] : doc.items())
        if (!sections.count(k)) throw ConfigError("unknown config section '" + k + "'");
}

} // namespace

corrector::ModelShape RunConfig::model_shape(std::size_t channels) const {
    corrector::ModelShape s;
    s.history = history;
    s.horizon = output_width;
    s.channels = channels;
    s.hidden = hidden;
    s.dropout = dropout;
    s.decomp = decomp;
    s.ablation = ablation;
    return s;
}

std::size_t RunConfig::eval_selection_horizon() const {
    if (selection_horizon != 0) return selection_horizon;
    return horizons.empty() ? output_width : *std::max_element(horizons.begin(), horizons.end());
}

void RunConfig::validate() const {
    if (source != "synthetic" && source != "csv") throw ConfigError("data.source must be 'synthetic' or 'csv'");
    if (source == "csv" && csv_path.empty()) throw ConfigError("data.path is required for csv input");
    if (source == "synthetic" && (synthetic.length == 0 || synthetic.channels == 0))
        throw ConfigError("synthetic length and channels must be positive");
    split.validate();
    if (history == 0 || output_width == 0) throw ConfigError("window.history and window.output_width must be positive");
    if (stride == 0) throw ConfigError("window.stride must be positive");
    if (horizons.empty()) throw ConfigError("horizons must not be empty");
    for (auto h : horizons)
        if (h == 0) throw ConfigError("horizons must be positive");
    if (backbone != "toy" && backbone != "replay") throw ConfigError("backbone.kind must be 'toy' or 'replay'");
    if (backbone == "replay" && replay_path.empty()) throw ConfigError("backbone.replay_path is required for replay");
    toy.validate();
    if (hidden == 0) throw ConfigError("corrector.hidden must be positive");
    if (dropout < 0.0 || dropout >= 1.0) throw ConfigError("corrector.dropout must lie in [0, 1)");
    decomp.validate();
    train.validate();
    beta_grid.validate();
    if (unseen_fraction <= 0.0 || unseen_fraction > 1.0) throw ConfigError("calibration.unseen_fraction must lie in (0, 1]");
}

RunConfig run_config_from_json(const json& doc) {
    check_top_level(doc);
    RunConfig c;

    Section data(doc, "data", {"source", "path", "timestamp_column", "series_id", "length", "channels", "noise_std",
                               "trend_per_1000", "periods", "amplitudes", "seed"});
    data.read("source", c.source);
    std::string path;
    data.read("path", path);
    c.csv_path = path;
    if (data.has("timestamp_column")) {
        std::string ts;
        data.read("timestamp_column", ts);
        c.timestamp_column = ts;
    }
    data.read("series_id", c.series_id);
    data.read("length", c.synthetic.length);
    data.read("channels", c.synthetic.channels);
    data.read("noise_std", c.synthetic.noise_std);
    data.read("trend_per_1000", c.synthetic.trend_per_1000);
    data.read("periods", c.synthetic.periods);
    data.read("amplitudes", c.synthetic.amplitudes);
    data.read("seed", c.synthetic.seed);

    Section split(doc, "split", {"mode", "ratios"});
    if (split.has("mode")) {
        std::string mode;
        split.read("mode", mode);
        if (mode == "standard") c.split = data::SplitSpec::standard();
        else if (mode == "staggered") c.split = data::SplitSpec::staggered();
        else throw ConfigError("split.mode must be 'standard' or 'staggered'");
    }
    split.read("ratios", c.split.ratios);

    Section window(doc, "window", {"history", "output_width", "stride"});
    window.read("history", c.history);
    window.read("output_width", c.output_width);
    window.read("stride", c.stride);

    if (doc.contains("horizons")) {
        try {
            c.horizons = doc.at("horizons").get<std::vector<std::size_t>>();
        } catch (const json::exception& e) {
            throw ConfigError(std::string("horizons: ") + e.what());
        }
    }

    Section bb(doc, "backbone", {"kind", "toy", "period", "ridge_lambda", "rho", "replay_path"});
    bb.read("kind", c.backbone);
    if (bb.has("toy")) {
        std::string kind;
        bb.read("toy", kind);
        c.toy.kind = backbone::toy_kind_from_string(kind);
    }
    bb.read("period", c.toy.period);
    bb.read("ridge_lambda", c.toy.ridge_lambda);
    bb.read("rho", c.toy.rho);
    std::string replay;
    bb.read("replay_path", replay);
    c.replay_path = replay;

    Section ro(doc, "rollout", {"overlap", "train_horizon"});
    if (ro.has("overlap")) {
        std::string o;
        ro.read("overlap", o);
        c.overlap = backbone::overlap_from_string(o);
    }
    ro.read("train_horizon", c.train_horizon);

    Section co(doc, "corrector",
               {"hidden", "dropout", "kernel_size", "pad_mode", "use_decomposed_input", "output_mode"});
    co.read("hidden", c.hidden);
    co.read("dropout", c.dropout);
    co.read("kernel_size", c.decomp.kernel_size);
    if (co.has("pad_mode")) {
        std::string p;
        co.read("pad_mode", p);
        c.decomp.pad_mode = decomp::pad_mode_from_string(p);
    }
    co.read("use_decomposed_input", c.ablation.use_decomposed_input);
    if (co.has("output_mode")) {
        std::string m;
        co.read("output_mode", m);
        c.ablation.output_mode = corrector::output_mode_from_string(m);
    }

    Section tr(doc, "train", {"steps", "batch", "loss", "huber_delta", "lr", "train_fraction", "eval_every",
                              "patience", "lambda_trend", "lambda_seasonal"});
    tr.read("steps", c.train.steps);
    tr.read("batch", c.train.batch);
    double delta = c.train.loss.delta;
    tr.read("huber_delta", delta);
    std::string loss = c.train.loss.name();
    tr.read("loss", loss);
    c.train.loss = nn::LossKind::from_string(loss, delta);
    tr.read("lr", c.train.lr);
    tr.read("train_fraction", c.train.train_fraction);
    tr.read("eval_every", c.train.eval_every);
    tr.read("patience", c.train.patience);
    tr.read("lambda_trend", c.train.weights.trend);
    tr.read("lambda_seasonal", c.train.weights.seasonal);

    Section cal(doc, "calibration", {"beta_grid", "selection_horizon", "unseen_fraction"});
    cal.read("beta_grid", c.beta_grid.values);
    cal.read("selection_horizon", c.selection_horizon);
    cal.read("unseen_fraction", c.unseen_fraction);

    Section seeds(doc, "seeds", {"init", "train", "calibration"});
    seeds.read("init", c.init_seed);
    seeds.read("train", c.train_seed);
    seeds.read("calibration", c.calibration_seed);
    c.train.seed = c.train_seed;

    c.validate();
    return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
    }
    return run_config_from_json(doc);
}

json to_json(const RunConfig& c) {
    json doc;
    doc["data"] = {{"source", c.source}, {"series_id", c.series_id}};
    if (c.source == "csv") {
        doc["data"]["path"] = c.csv_path.string();
        if (c.timestamp_column) doc["data"]["timestamp_column"] = *c.timestamp_column;
    } else {
        doc["data"]["length"] = c.synthetic.length;
        doc["data"]["channels"] = c.synthetic.channels;
        doc["data"]["noise_std"] = c.synthetic.noise_std;
        doc["data"]["trend_per_1000"] = c.synthetic.trend_per_1000;
        doc["data"]["periods"] = c.synthetic.periods;
        doc["data"]["amplitudes"] = c.synthetic.amplitudes;
        doc["data"]["seed"] = c.synthetic.seed;
    }
    doc["split"] = {{"mode", c.split.mode == data::SplitMode::staggered ? "staggered" : "standard"},
                    {"ratios", c.split.ratios}};
    doc["window"] = {{"history", c.history}, {"output_width", c.output_width}, {"stride", c.stride}};
    doc["horizons"] = c.horizons;
    doc["backbone"] = {{"kind", c.backbone}};
    if (c.backbone == "toy") {
        doc["backbone"]["toy"] = backbone::to_string(c.toy.kind);
        doc["backbone"]["period"] = c.toy.period;
        doc["backbone"]["ridge_lambda"] = c.toy.ridge_lambda;
        doc["backbone"]["rho"] = c.toy.rho;
    } else {
        doc["backbone"]["replay_path"] = c.replay_path.string();
    }
    doc["rollout"] = {{"overlap", backbone::to_string(c.overlap)}, {"train_horizon", c.train_horizon}};
    doc["corrector"] = {{"hidden", c.hidden},
                        {"dropout", c.dropout},
                        {"kernel_size", c.decomp.kernel_size},
                        {"pad_mode", decomp::to_string(c.decomp.pad_mode)},
                        {"use_decomposed_input", c.ablation.use_decomposed_input},
                        {"output_mode", corrector::to_string(c.ablation.output_mode)}};
    doc["train"] = {{"steps", c.train.steps},
                    {"batch", c.train.batch},
                    {"loss", c.train.loss.name()},
                    {"huber_delta", c.train.loss.delta},
                    {"lr", c.train.lr},
                    {"train_fraction", c.train.train_fraction},
                    {"eval_every", c.train.eval_every},
                    {"patience", c.train.patience},
                    {"lambda_trend", c.train.weights.trend},
                    {"lambda_seasonal", c.train.weights.seasonal}};
    doc["calibration"] = {{"beta_grid", c.beta_grid.values},
                          {"selection_horizon", c.selection_horizon},
                          {"unseen_fraction", c.unseen_fraction}};
    doc["seeds"] = {{"init", c.init_seed}, {"train", c.train_seed}, {"calibration", c.calibration_seed}};
    return doc;
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string config_hash(const RunConfig& cfg) { return fnv1a_hex(to_json(cfg).dump()); }

} // namespace uec

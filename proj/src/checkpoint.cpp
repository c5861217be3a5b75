#include "uec/checkpoint.hpp"

#include <fstream>

#include "uec/error.hpp"

namespace uec::corrector {

using nlohmann::json;

namespace {

constexpr const char* kLayerNames[] = {"temporal_in", "temporal_out", "channel_in", "channel_out"};

} // namespace

json shape_to_json(const ModelShape& s) {
    return json{{"history", s.history},
                {"horizon", s.horizon},
                {"channels", s.channels},
                {"hidden", s.hidden},
                {"dropout", s.dropout},
                {"decomp", {{"kernel_size", s.decomp.kernel_size}, {"pad_mode", decomp::to_string(s.decomp.pad_mode)}}},
                {"ablation",
                 {{"use_decomposed_input", s.ablation.use_decomposed_input},
                  {"output_mode", to_string(s.ablation.output_mode)}}}};
}

ModelShape shape_from_json(const json& doc) {
    ModelShape s;
    s.history = doc.at("history").get<std::size_t>();
    s.horizon = doc.at("horizon").get<std::size_t>();
    s.channels = doc.at("channels").get<std::size_t>();
    s.hidden = doc.at("hidden").get<std::size_t>();
    s.dropout = doc.at("dropout").get<double>();
    s.decomp.kernel_size = doc.at("decomp").at("kernel_size").get<int>();
    s.decomp.pad_mode = decomp::pad_mode_from_string(doc.at("decomp").at("pad_mode").get<std::string>());
    s.ablation.use_decomposed_input = doc.at("ablation").at("use_decomposed_input").get<bool>();
    s.ablation.output_mode = output_mode_from_string(doc.at("ablation").at("output_mode").get<std::string>());
    return s;
}

json model_to_json(const UecStdModel& model) {
    json layers = json::object();
    for (int i = 0; i < 4; ++i) {
        const auto& l = model.layer(static_cast<UecStdModel::Layer>(i));
        layers[kLayerNames[i]] = json{{"shape", {l.in(), l.out()}}, {"weight", l.weight.storage()}, {"bias", l.bias}};
    }
    return json{{"format", "uec-std-checkpoint"}, {"version", 1}, {"hyperparameters", shape_to_json(model.shape())},
                {"layers", layers}};
}

UecStdModel model_from_json(const json& doc) {
    try {
        if (doc.value("format", "") != "uec-std-checkpoint") throw SchemaError("not a corrector checkpoint");
        UecStdModel model = UecStdModel::zeros(shape_from_json(doc.at("hyperparameters")));
        for (int i = 0; i < 4; ++i) {
            auto& l = model.layer(static_cast<UecStdModel::Layer>(i));
            const json& src = doc.at("layers").at(kLayerNames[i]);
            const auto shape = src.at("shape").get<std::vector<std::size_t>>();
            if (shape.size() != 2 || shape[0] != l.in() || shape[1] != l.out()) {
                throw SchemaError(std::string("layer ") + kLayerNames[i] + " shape disagrees with hyperparameters");
            }
            auto w = src.at("weight").get<std::vector<double>>();
            auto b = src.at("bias").get<std::vector<double>>();
            if (w.size() != l.weight.size() || b.size() != l.bias.size()) {
                throw SchemaError(std::string("layer ") + kLayerNames[i] + " parameter count");
            }
            l.weight = Matrix(l.in(), l.out(), std::move(w));
            l.bias = std::move(b);
        }
        return model;
    } catch (const json::exception& e) {
        throw SchemaError(std::string("checkpoint: ") + e.what());
    }
}

void save_checkpoint(const std::filesystem::path& path, const UecStdModel& model, const json& metadata) {
    json doc = model_to_json(model);
    doc["metadata"] = metadata;
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << doc.dump(1) << '\n';
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw SchemaError(path.string() + ": " + e.what());
    }
    LoadedCheckpoint out{model_from_json(doc), doc.value("metadata", json::object())};
    return out;
}

} // namespace uec::corrector

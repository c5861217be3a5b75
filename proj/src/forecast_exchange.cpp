#include "uec/forecast_exchange.hpp"

#include <fstream>
#include <json.hpp>

#include "uec/error.hpp"

namespace uec::backbone {

using nlohmann::json;

void write_forecast_exchange(const std::filesystem::path& path, std::size_t input_width,
                             const std::map<ReplayForecaster::Key, Matrix>& records) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << json{{"format", kExchangeFormat},
                {"version", kExchangeVersion},
                {"float_repr", "shortest-roundtrip-decimal"},
                {"input_width", input_width}}
               .dump()
        << '\n';
    for (const auto& [key, m] : records) {
        out << json{{"series_id", key.series_id},
                    {"t", key.t},
                    {"origin", key.origin},
                    {"L", m.rows()},
                    {"D", m.cols()},
                    {"values", m.storage()}}
                   .dump()
            << '\n';
    }
}

ReplayForecaster load_replay(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw SchemaError(path.string() + " is empty");

    std::size_t w = 0, l = 0, d = 0;
    std::map<ReplayForecaster::Key, Matrix> records;
    try {
        const json header = json::parse(line);
        if (header.value("format", "") != kExchangeFormat) throw SchemaError("missing forecast-exchange header");
        if (header.value("version", 0) != kExchangeVersion) throw SchemaError("unsupported version");
        w = header.at("input_width").get<std::size_t>();

        std::size_t line_no = 1;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            const json rec = json::parse(line);
            const std::size_t rl = rec.at("L").get<std::size_t>(), rd = rec.at("D").get<std::size_t>();
            if (records.empty()) {
                l = rl;
                d = rd;
            } else if (rl != l || rd != d) {
                throw SchemaError("line " + std::to_string(line_no) + ": L/D differ from earlier records");
            }
            std::vector<double> values;
            const json& v = rec.at("values");
            if (!v.is_array()) throw SchemaError("line " + std::to_string(line_no) + ": values must be an array");
            for (const json& e : v) {
                if (e.is_array()) {
                    for (const json& x : e) values.push_back(x.get<double>());
                } else {
                    values.push_back(e.get<double>());
                }
            }
            if (values.size() != l * d) throw SchemaError("line " + std::to_string(line_no) + ": expected L*D values");
            const auto t = rec.at("t").get<std::ptrdiff_t>();
            const auto origin = rec.contains("origin") ? rec.at("origin").get<std::ptrdiff_t>() : t;
            ReplayForecaster::Key key{rec.at("series_id").get<std::string>(), origin, t};
            if (!records.emplace(std::move(key), Matrix(l, d, std::move(values))).second) {
                throw SchemaError("line " + std::to_string(line_no) + ": duplicate key");
            }
        }
    } catch (const json::exception& e) {
        throw SchemaError(path.string() + ": " + e.what());
    }
    if (records.empty()) throw SchemaError(path.string() + " has no records");
    return ReplayForecaster(w, l, d, std::move(records));
}

} // namespace uec::backbone

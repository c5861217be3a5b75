#pragma once

#include <filesystem>
#include <map>

#include "uec/backbone.hpp"

namespace uec::backbone {

/// Forecast-exchange file: JSON Lines. The first line is a header object
///   {"format":"uec-forecast-exchange","version":1,"float_repr":"shortest-roundtrip-decimal",
///    "input_width":W}
/// and every following line is one record
///   {"series_id":s,"t":t,"origin":o,"L":L,"D":D,"values":[L*D numbers, row-major]}.
/// "origin" is optional and defaults to t (a forecast made from true history).
/// Numbers are written as the shortest decimal that parses back to the same
/// double, so replay is bit-exact.
inline constexpr const char* kExchangeFormat = "uec-forecast-exchange";
inline constexpr int kExchangeVersion = 1;

void write_forecast_exchange(const std::filesystem::path& path, std::size_t input_width,
                             const std::map<ReplayForecaster::Key, Matrix>& records);

/// Throws SchemaError for malformed files.
ReplayForecaster load_replay(const std::filesystem::path& path);

} // namespace uec::backbone

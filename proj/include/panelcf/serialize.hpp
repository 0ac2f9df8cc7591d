#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>

#include "panelcf/analysis.hpp"
#include "panelcf/panel.hpp"

namespace panelcf {

nlohmann::json to_json(const ATTEstimate& e);
nlohmann::json to_json(const GapSeries& g);
nlohmann::json to_json(const WeightVector& w);
nlohmann::json to_json(const CVReport& r);
nlohmann::json to_json(const ShrinkageRegimes& r);
nlohmann::json to_json(const PlaceboResult& r);
nlohmann::json to_json(const DescriptiveStats& s);

GapSeries gap_series_from_json(const nlohmann::json& j);
ATTEstimate att_from_json(const nlohmann::json& j);

// FNV-1a over a file's bytes, hex-encoded; used to pin inputs in manifests.
std::string file_hash_hex(const std::string& path);

extern const char* const kToolkitVersion;

}  // namespace panelcf

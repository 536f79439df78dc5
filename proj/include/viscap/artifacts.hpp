#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "viscap/types.hpp"

namespace viscap {

// All artifact writers are deterministic: fixed column order, %.17g floats,
// '\n' line ends, no timestamps. Non-finite values are a bug and throw.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

nlohmann::ordered_json cplx_to_json(cplx z);  // {"re":.., "im":..}

void write_json(const std::string& path, const nlohmann::ordered_json& j);

void write_text(const std::string& path, const std::string& body);

}  // namespace viscap

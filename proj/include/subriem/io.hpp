#pragma once

#include <json.hpp>
#include <string>

#include "subriem/geometry.hpp"
#include "subriem/montecarlo.hpp"

namespace subriem::io {

using json = nlohmann::ordered_json;

// Shortest round-trip decimal form of a double (used for CSV cells so text
// outputs are exactly reproducible).
std::string fmt(double v);

json to_json(const Vec& v);

json to_json(const montecarlo::EstimatorReport& rep);
json to_json(const montecarlo::ConvergenceTable& table);
json to_json(const montecarlo::SdeMomentReport& rep);

// "# subriem <version>" + "# config <compact json>" comment lines placed at
// the top of every CSV output.
std::string csv_preamble(const json& config);

std::string to_csv(const montecarlo::EstimatorReport& rep);
std::string to_csv(const montecarlo::ConvergenceTable& table);
std::string to_csv(const montecarlo::SdeMomentReport& rep);

void write_file(const std::string& path, const std::string& content);

}  // namespace subriem::io

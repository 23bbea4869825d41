#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "polling/model.hpp"

namespace polling {

struct RunSpec {
  std::int64_t cycles = 10'000'000;
  std::int64_t warmup = -1;  // -1: engine picks 1% of cycles
  std::uint64_t seed = 1;
  int replications = 1;
};

struct Config {
  ModelParams model;
  RunSpec run;
  std::vector<Violation> warnings;  // non-fatal validation notes
};

// JSON text -> document. Throws Error{ParseError} with line info on bad JSON.
nlohmann::json parse_document(const std::string& text, const std::string& origin);

// Document -> validated config. The schema is strict: unknown keys anywhere
// are ParseErrors naming the offending path, and model-level violations
// surface as InvalidParams. Non-fatal notes end up in Config::warnings.
Config config_from_document(const nlohmann::json& doc, const std::string& origin);

Config load_config(const std::string& path);

// Distribution (de)serialization, shared by configs and emitted reports.
DistributionSpec dist_from_json(const nlohmann::json& j, const std::string& where);
nlohmann::json dist_to_json(const DistributionSpec& s);
nlohmann::json config_to_json(const Config& c);

}  // namespace polling

#pragma once

#include <string>

#include <json.hpp>

#include "etpa/jsa.hpp"
#include "etpa/molecule.hpp"
#include "etpa/tpa.hpp"

namespace etpa::io {

using json = nlohmann::json;

// Structured key-value document with a schema version field.
json level_system_to_json(const LevelSystem& level);
LevelSystem level_system_from_json(const json& j);
void save_level_system(const LevelSystem& level, const std::string& path);
LevelSystem load_level_system(const std::string& path);

// Complex numbers serialize as {"re": ..., "im": ...}.
json pathway_result_to_json(const PathwayResult& r);

// CSV matrix: a version line, two header rows carrying the frequency grids,
// then the complex matrix as adjacent re,im column pairs (row-major in the
// first grid).
void save_jsa_csv(const Sampled2DJsa& jsa, const std::string& path);
Sampled2DJsa load_jsa_csv(const std::string& path);

// Shortest-round-trip formatting used for all CSV numbers (byte-reproducible).
std::string format_double(double v);

}  // namespace etpa::io

#pragma once

// JSON interchange for EPGM databases and individual graphs.
//
//   { "labels":   ["Person", ...],            optional; fixes label order
//     "vertices": [{"id", "label", "properties"}],
//     "edges":    [{"id", "label", "source", "target", "index"?, "properties"}],
//     "graphs":   [{"id", "label", "properties", "vertices": [..], "edges": [..]}] }
//
// Element graph memberships are derived from the `graphs` array. An edge
// without `index` takes the next free index at its source.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "epgm/model.hpp"

namespace epgm {

nlohmann::json property_to_json(const PropertyValue& value);
PropertyValue property_from_json(const nlohmann::json& j);
nlohmann::json properties_to_json(const Properties& props);
Properties properties_from_json(const nlohmann::json& j);

EpgmDatabase database_from_json(const nlohmann::json& j);
EpgmDatabase load_database_json(const std::filesystem::path& path);
nlohmann::json database_to_json(const EpgmDatabase& db);

/// One graph with its member elements, in the database schema (single entry
/// under `graphs`).
nlohmann::json graph_to_json(const LogicalGraph& graph);
nlohmann::json collection_to_json(const GraphCollection& collection);

}  // namespace epgm

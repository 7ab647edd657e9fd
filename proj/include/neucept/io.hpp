#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "neucept/mechanism.hpp"
#include "neucept/selection.hpp"

namespace neucept {

// temp-file + rename so readers never observe a partial file
void atomic_write(const std::filesystem::path& file, const std::string& content);

std::string read_file(const std::filesystem::path& file);

nlohmann::json selection_to_json(const std::vector<SelectionResult>& results);
std::vector<SelectionResult> selection_from_json(const nlohmann::json& j);

nlohmann::json mechanism_to_json(const MechanismAssignment& m);
MechanismAssignment mechanism_from_json(const nlohmann::json& j);

// deterministic shortest-round-trip formatting for CSV cells
std::string format_double(double v);

}  // namespace neucept

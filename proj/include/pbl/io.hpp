#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "pbl/grid.hpp"

namespace pbl {

using json = nlohmann::json;

/// Write to a sibling temp file, then rename over the target.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// `<stem>.csv` with header x,y,value plus `<stem>.json` descriptor.
void write_field(const Field2D& f, const std::filesystem::path& stem);
Field2D read_field(const std::filesystem::path& stem);

/// Generic column CSV, 17 significant digits.
void write_columns(const std::filesystem::path& path, const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& columns);

std::string fmt17(double v);

}  // namespace pbl

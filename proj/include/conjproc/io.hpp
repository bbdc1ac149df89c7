#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <nlohmann/json.hpp>

namespace conjproc {

/// Opens path for writing, hands the stream to fill, and throws IoError if
/// the file cannot be created or the write fails.
void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& fill);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);

nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace conjproc

#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

namespace lab {

/// Filesystem failure while emitting results.
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Hex SHA-1 of "blob <size>\0<content>", the object id git assigns to a file.
std::string git_blob_sha1(std::string_view content);

/// Writes `content` to a sibling temporary file, then renames it over `path`,
/// so readers see either the old or the new file. Creates parent directories.
void write_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace lab

#pragma once

#include <filesystem>
#include <string>

namespace dsahs {

/// Whole-file reads and writes; failures throw Error(io). Writes create
/// missing parent directories.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace dsahs

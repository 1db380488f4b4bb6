#pragma once

#include <filesystem>
#include <string>

namespace pshoot {

/// Fixed 17-significant-digit formatting: round-trips doubles exactly and
/// keeps emitted files byte-identical across runs.
std::string fmt_g17(double x);

/// Leading comment block for every emitted CSV: tool version + config echo.
std::string csv_preamble(const std::string& config_echo);

/// Writes content to path via a temporary file in the same directory followed
/// by a rename; creates parent directories. IO failures are reported with the
/// path.
void atomic_write(const std::filesystem::path& path, const std::string& content);

}  // namespace pshoot

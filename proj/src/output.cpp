#include "pshoot/output.hpp"

#include <cstdio>
#include <fstream>
#include <system_error>

#include "pshoot/version.hpp"

namespace pshoot {

std::string fmt_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_preamble(const std::string& config_echo) {
  std::string s = "# pshoot ";
  s += kVersion;
  s += "\n# config: ";
  s += config_echo;
  s += "\n";
  return s;
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  std::error_code ec;
  const fs::path dir = path.parent_path();
  if (!dir.empty()) {
    fs::create_directories(dir, ec);
    if (ec)
      throw std::runtime_error("output: cannot create directory '" +
                               dir.string() + "': " + ec.message());
  }
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw std::runtime_error("output: cannot open '" + tmp.string() +
                               "' for writing");
    out << content;
    out.flush();
    if (!out)
      throw std::runtime_error("output: write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, path, ec);
  if (ec)
    throw std::runtime_error("output: cannot rename '" + tmp.string() +
                             "' to '" + path.string() + "': " + ec.message());
}

}  // namespace pshoot

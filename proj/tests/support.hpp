#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace violet::testing {

inline std::filesystem::path data_dir() { return VIOLET_TEST_DATA_DIR; }

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("violet_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// "token<TAB>count" lines.
inline std::vector<std::pair<std::string, std::uint64_t>> read_counts(
    const std::filesystem::path& p) {
  std::vector<std::pair<std::string, std::uint64_t>> out;
  std::ifstream in(p);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    out.emplace_back(line.substr(0, tab), std::stoull(line.substr(tab + 1)));
  }
  return out;
}

}  // namespace violet::testing

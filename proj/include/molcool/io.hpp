#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace molcool {

// fixed 12-significant-digit decimal, the formatting rule behind
// checksum-stable outputs
std::string format_number(double v);

std::uint64_t fnv1a64(std::string_view bytes);
std::string fnv1a64_hex(std::string_view bytes);
std::string file_checksum_hex(const std::filesystem::path& p);

// UTF-8 CSV with a header row; numbers go through format_number
class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& p);

  void header(const std::vector<std::string>& names);
  CsvWriter& field(std::string_view s);
  // string literals would otherwise decay to bool, not string_view
  CsvWriter& field(const char* s) { return field(std::string_view(s)); }
  CsvWriter& field(double v);
  CsvWriter& field(std::int64_t v);
  CsvWriter& field(int v) { return field(static_cast<std::int64_t>(v)); }
  CsvWriter& field(bool v) { return field(std::string_view(v ? "true" : "false")); }
  void end_row();
  void close();

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::string line_;
};

struct RunManifest {
  std::string config_hash;
  std::string constants;
  double duration_seconds = 0.0;
  std::vector<std::pair<std::string, std::string>> files;  // name -> checksum
};

void write_manifest(const std::filesystem::path& path, const RunManifest& m);

}  // namespace molcool

#include "molcool/io.hpp"

#include <cstdio>

#include <json.hpp>

#include "molcool/errors.hpp"

namespace molcool {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string fnv1a64_hex(std::string_view bytes) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

std::string file_checksum_hex(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot read " + p.string());
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  return fnv1a64_hex(bytes);
}

CsvWriter::CsvWriter(const std::filesystem::path& p) : path_(p), out_(p, std::ios::binary) {
  if (!out_) throw IoError("cannot open " + p.string() + " for writing");
}

void CsvWriter::header(const std::vector<std::string>& names) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) line_ += ',';
    line_ += names[i];
  }
  line_ += '\n';
  out_ << line_;
  line_.clear();
}

CsvWriter& CsvWriter::field(std::string_view s) {
  if (!line_.empty()) line_ += ',';
  line_ += s;
  return *this;
}

CsvWriter& CsvWriter::field(double v) { return field(std::string_view(format_number(v))); }

CsvWriter& CsvWriter::field(std::int64_t v) {
  return field(std::string_view(std::to_string(v)));
}

void CsvWriter::end_row() {
  line_ += '\n';
  out_ << line_;
  line_.clear();
}

void CsvWriter::close() {
  out_.flush();
  if (!out_) throw IoError("write failed on " + path_.string());
  out_.close();
}

void write_manifest(const std::filesystem::path& path, const RunManifest& m) {
  nlohmann::json j;
  j["config_hash"] = m.config_hash;
  j["constants"] = m.constants;
  j["duration_seconds"] = m.duration_seconds;
  nlohmann::json files = nlohmann::json::object();
  for (const auto& [name, sum] : m.files) files[name] = sum;
  j["files"] = files;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed on " + path.string());
}

}  // namespace molcool

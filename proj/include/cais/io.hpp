#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cais::io {

/// Reads a whole file; throws IoError when it cannot be opened.
std::string read_file(const std::filesystem::path& path);

/// Writes through a temporary sibling file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Lowercase hex SHA-256 of the bytes.
std::string sha256_hex(std::string_view bytes);

/// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double v);

/// Strict full-string number parse (no trailing junk).
std::optional<double> parse_double(std::string_view text);
std::optional<std::int64_t> parse_int(std::string_view text);

std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

/// One `key = value` line.
struct KvEntry {
  std::string key;
  std::string value;
  int line = 0;
};

/// The structured key-value text format shared by scenario and config files:
/// `key = value` per line, `#` comments, blank lines ignored.
class KvDocument {
 public:
  static KvDocument parse(std::string_view text, const std::string& origin = "<input>");

  const std::vector<KvEntry>& entries() const { return entries_; }
  const KvEntry* find(std::string_view key) const;
  bool contains(std::string_view key) const { return find(key) != nullptr; }

  void set(const std::string& key, const std::string& value);
  std::string to_string() const;

  const std::string& origin() const { return origin_; }

 private:
  std::vector<KvEntry> entries_;
  std::map<std::string, std::size_t, std::less<>> index_;
  std::string origin_;
};

}  // namespace cais::io

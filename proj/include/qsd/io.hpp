#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace qsd {

/// Decimal with 17 significant digits; non-finite values render as nan/inf/-inf.
[[nodiscard]] std::string format_double(double v);

/// Flat JSON object builder with insertion-ordered keys and 17-digit numbers.
class JsonWriter {
 public:
  JsonWriter& add(const std::string& key, double v);
  JsonWriter& add(const std::string& key, std::int64_t v);
  JsonWriter& add(const std::string& key, int v) { return add(key, static_cast<std::int64_t>(v)); }
  JsonWriter& add(const std::string& key, std::size_t v) {
    return add(key, static_cast<std::int64_t>(v));
  }
  JsonWriter& add(const std::string& key, bool v);
  JsonWriter& add(const std::string& key, const std::string& v);
  JsonWriter& add(const std::string& key, const char* v) { return add(key, std::string(v)); }
  JsonWriter& add(const std::string& key, std::span<const double> v);
  /// Inserts an already-serialized JSON value.
  JsonWriter& add_raw(const std::string& key, const std::string& json);

  [[nodiscard]] std::string str() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::pair<std::string, std::string>> fields_;
};

/// CSV with a header row; every column must have the same length.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns);

/// Writes text, creating parent directories. Throws Error on failure.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace qsd

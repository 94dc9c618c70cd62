#include "qsd/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "qsd/errors.hpp"

namespace qsd {

namespace {

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + '"';
}

std::string json_number(double v) {
  if (!std::isfinite(v)) return "null";
  return format_double(v);
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return {buf, res.ptr};
}

JsonWriter& JsonWriter::add(const std::string& key, double v) {
  return add_raw(key, json_number(v));
}

JsonWriter& JsonWriter::add(const std::string& key, std::int64_t v) {
  return add_raw(key, std::to_string(v));
}

JsonWriter& JsonWriter::add(const std::string& key, bool v) {
  return add_raw(key, v ? "true" : "false");
}

JsonWriter& JsonWriter::add(const std::string& key, const std::string& v) {
  return add_raw(key, quote(v));
}

JsonWriter& JsonWriter::add(const std::string& key, std::span<const double> v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += json_number(v[i]);
  }
  return add_raw(key, s + "]");
}

JsonWriter& JsonWriter::add_raw(const std::string& key, const std::string& json) {
  fields_.emplace_back(key, json);
  return *this;
}

std::string JsonWriter::str() const {
  std::string s = "{\n";
  for (std::size_t i = 0; i < fields_.size(); ++i) {
    s += "  " + quote(fields_[i].first) + ": " + fields_[i].second;
    s += i + 1 < fields_.size() ? ",\n" : "\n";
  }
  return s + "}\n";
}

void JsonWriter::write(const std::filesystem::path& path) const { write_text(path, str()); }

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns) {
  if (header.size() != columns.size()) throw ArgumentError("csv: header/column count mismatch");
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (const auto& c : columns) {
    if (c.size() != rows) throw ArgumentError("csv: ragged columns");
  }
  std::string s;
  for (std::size_t i = 0; i < header.size(); ++i) s += (i ? "," : "") + header[i];
  s += '\n';
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (i) s += ',';
      s += format_double(columns[i][r]);
    }
    s += '\n';
  }
  write_text(path, s);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error("write failed: " + path.string());
}

}  // namespace qsd

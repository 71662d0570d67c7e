#pragma once

// JSONL readers/writers and JSON (de)serialization of the wire types.
// Line-level format errors are tolerated: bad lines are skipped with a
// diagnostic, never a hard failure.

#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mpict/anonymize.hpp"
#include "mpict/diagnostics.hpp"

namespace mpict {

using json = nlohmann::json;

// Calls `handle(record, line_number)` for each well-formed JSON object line.
inline void read_jsonl(std::istream& in, const std::string& context,
                       const std::function<void(const json&, int)>& handle,
                       Diagnostics* diags = nullptr) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json record = json::parse(line, nullptr, false);
    if (record.is_discarded() || !record.is_object()) {
      report(diags, "malformed-jsonl", "skipped unparseable line", context,
             line_no);
      continue;
    }
    handle(record, line_no);
  }
}

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open input file: " + path.string());
  return in;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot open output file: " + path.string());
  return out;
}

inline std::string read_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return text;
}

inline void write_file(const std::filesystem::path& path,
                       std::string_view contents) {
  auto out = open_output(path);
  out.write(contents.data(),
            static_cast<std::streamsize>(contents.size()));
}

inline json to_json(const AnonymizationMap& map) {
  json entries = json::array();
  for (const auto& e : map.entries)
    entries.push_back({{"original", e.original},
                       {"placeholder", e.placeholder},
                       {"category", std::string(category_prefix(e.category))}});
  return json{{"seed", map.seed}, {"entries", entries}};
}

inline AnonymizationMap anonymization_map_from_json(const json& j) {
  AnonymizationMap map;
  map.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& e : j.at("entries")) {
    AnonymizationEntry entry;
    entry.original = e.at("original").get<std::string>();
    entry.placeholder = e.at("placeholder").get<std::string>();
    entry.category = category_from_prefix(e.at("category").get<std::string>());
    map.entries.push_back(std::move(entry));
  }
  return map;
}

inline json to_json(const Diagnostic& d) {
  json j{{"code", d.code}, {"message", d.message}};
  if (!d.context.empty()) j["context"] = d.context;
  if (d.line > 0) j["line"] = d.line;
  return j;
}

}  // namespace mpict

#include "threshcal/io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>

#include "json.hpp"

namespace threshcal::io {

namespace {

std::string trimmed(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string::size_type start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    fields.push_back(trimmed(line.substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

[[noreturn]] void fail(const std::string& origin, std::size_t line, const std::string& what) {
  throw ParseError(origin + ":" + std::to_string(line) + ": " + what);
}

Real parse_real(const std::string& origin, std::size_t line, const std::string& field,
                const std::string& text) {
  if (text.empty()) fail(origin, line, "empty value for '" + field + "'");
  std::size_t used = 0;
  Real v = 0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    fail(origin, line, "cannot parse '" + text + "' as a number for '" + field + "'");
  }
  if (used != text.size())
    fail(origin, line, "trailing characters in '" + text + "' for '" + field + "'");
  if (!std::isfinite(v)) fail(origin, line, "'" + field + "' must be finite");
  return v;
}

void check_label(const std::string& origin, std::size_t line, Real y) {
  if (y != 0 && y != 1) fail(origin, line, "label y must be 0 or 1");
}

void check_weight(const std::string& origin, std::size_t line, Real w) {
  if (!(w > 0)) fail(origin, line, "weight w must be positive");
}

InputData read_csv(std::istream& in, const std::string& origin, std::string first_line,
                   std::size_t line_no) {
  InputData data;
  const std::vector<std::string> header = split_csv(first_line);
  bool has_weight = false;
  if (header.size() == 2 && header[0] == "x" && header[1] == "z") {
    data.schema = InputSchema::kRaw;
  } else if (header.size() >= 2 && header.size() <= 3 && header[0] == "x" && header[1] == "y") {
    data.schema = InputSchema::kLabeled;
    if (header.size() == 3) {
      if (header[2] != "w") fail(origin, line_no, "expected header x,y[,w] or x,z");
      has_weight = true;
    }
  } else {
    fail(origin, line_no, "expected header x,y[,w] or x,z");
  }

  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (trimmed(line).empty()) continue;
    const std::vector<std::string> fields = split_csv(line);
    const std::size_t expected = data.schema == InputSchema::kRaw ? 2 : (has_weight ? 3 : 2);
    if (fields.size() != expected)
      fail(origin, line_no,
           "expected " + std::to_string(expected) + " fields, got " +
               std::to_string(fields.size()));
    InputRecord rec;
    rec.x = parse_real(origin, line_no, "x", fields[0]);
    if (data.schema == InputSchema::kRaw) {
      rec.z = parse_real(origin, line_no, "z", fields[1]);
    } else {
      rec.y = parse_real(origin, line_no, "y", fields[1]);
      check_label(origin, line_no, rec.y);
      if (has_weight) {
        rec.w = parse_real(origin, line_no, "w", fields[2]);
        check_weight(origin, line_no, rec.w);
      }
    }
    data.records.push_back(rec);
  }
  return data;
}

InputData read_jsonl(std::istream& in, const std::string& origin, std::string first_line,
                     std::size_t line_no) {
  InputData data;
  bool schema_known = false;
  std::string line = std::move(first_line);
  for (;;) {
    const std::string body = trimmed(line);
    if (!body.empty()) {
      nlohmann::json obj;
      try {
        obj = nlohmann::json::parse(body);
      } catch (const nlohmann::json::exception& e) {
        fail(origin, line_no, std::string("invalid JSON: ") + e.what());
      }
      if (!obj.is_object() || !obj.contains("x") || !obj["x"].is_number())
        fail(origin, line_no, "each line must be an object with numeric 'x'");
      const bool raw = obj.contains("z");
      if (raw == obj.contains("y"))
        fail(origin, line_no, "each record needs exactly one of 'z' or 'y'");
      if (!schema_known) {
        data.schema = raw ? InputSchema::kRaw : InputSchema::kLabeled;
        schema_known = true;
      } else if ((data.schema == InputSchema::kRaw) != raw) {
        fail(origin, line_no, "mixed raw and labeled records");
      }
      InputRecord rec;
      rec.x = obj["x"].get<Real>();
      if (!std::isfinite(rec.x)) fail(origin, line_no, "'x' must be finite");
      if (raw) {
        if (!obj["z"].is_number()) fail(origin, line_no, "'z' must be a number");
        rec.z = obj["z"].get<Real>();
        if (!std::isfinite(rec.z)) fail(origin, line_no, "'z' must be finite");
      } else {
        if (!obj["y"].is_number()) fail(origin, line_no, "'y' must be a number");
        rec.y = obj["y"].get<Real>();
        check_label(origin, line_no, rec.y);
        if (obj.contains("w")) {
          if (!obj["w"].is_number()) fail(origin, line_no, "'w' must be a number");
          rec.w = obj["w"].get<Real>();
          if (!std::isfinite(rec.w)) fail(origin, line_no, "'w' must be finite");
          check_weight(origin, line_no, rec.w);
        }
      }
      data.records.push_back(rec);
    }
    ++line_no;
    if (!std::getline(in, line)) break;
  }
  return data;
}

}  // namespace

InputData read_records(std::istream& in, const std::string& origin) {
  std::string line;
  std::size_t line_no = 0;
  bool found = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trimmed(line).empty()) {
      found = true;
      break;
    }
  }
  if (!found) return InputData{};  // blank input: no schema, no records
  if (trimmed(line).front() == '{') return read_jsonl(in, origin, line, line_no);
  return read_csv(in, origin, std::move(line), line_no);
}

InputData read_records_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open input file");
  return read_records(in, path);
}

std::string format_number(Real v) {
  if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 1e15) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(v));
    return buf;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_endpoint(Real v) {
  if (is_low(v)) return "-inf";
  if (is_high(v)) return "inf";
  return format_number(v);
}

}  // namespace threshcal::io

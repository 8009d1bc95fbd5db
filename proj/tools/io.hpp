#pragma once

// Result records and plot-data files. Records are nlohmann::ordered_json
// (insertion order is the emission order); every double is printed with 17
// significant digits so identical runs give byte-identical files.

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "nlgs/errors.hpp"
#include "nlgs/grid.hpp"
#include "nlgs/version.hpp"

namespace nlgs::app {

using Record = nlohmann::ordered_json;

namespace detail {

inline void escape(std::ostream& os, const std::string& s) {
  os << '"';
  for (char c : s) {
    switch (c) {
      case '"': os << "\\\""; break;
      case '\\': os << "\\\\"; break;
      case '\n': os << "\\n"; break;
      case '\t': os << "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          os << buf;
        } else {
          os << c;
        }
    }
  }
  os << '"';
}

template <class J>
void emit(std::ostream& os, const J& j, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close(static_cast<std::size_t>(indent * depth), ' ');
  const char* nl = indent > 0 ? "\n" : "";
  const char* sep = indent > 0 ? ": " : ":";
  if (j.is_object()) {
    if (j.empty()) {
      os << "{}";
      return;
    }
    os << '{' << nl;
    bool first = true;
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!first) os << ',' << nl;
      first = false;
      os << pad;
      escape(os, it.key());
      os << sep;
      emit(os, it.value(), indent, depth + 1);
    }
    os << nl << close << '}';
  } else if (j.is_array()) {
    if (j.empty()) {
      os << "[]";
      return;
    }
    os << '[';
    bool first = true;
    for (const auto& v : j) {
      if (!first) os << (indent > 0 ? ", " : ",");
      first = false;
      emit(os, v, indent, depth + 1);
    }
    os << ']';
  } else if (j.is_number_float()) {
    const double v = j.template get<double>();
    if (std::isfinite(v)) os << format_double(v);
    else os << "null";
  } else if (j.is_string()) {
    escape(os, j.template get<std::string>());
  } else {
    os << j.dump();
  }
}

}  // namespace detail

template <class J>
std::string to_text(const J& j, int indent = 2) {
  std::ostringstream os;
  detail::emit(os, j, indent, 0);
  return os.str();
}

/// Provenance attached to every output: artifact version, command and the
/// canonical config echo.
struct Provenance {
  std::string command;
  nlohmann::json config;
  std::optional<long> seed;

  Record record() const {
    Record r;
    r["artifact"] = "nlgs";
    r["version"] = version;
    r["command"] = command;
    r["seed"] = seed ? Record(*seed) : Record(nullptr);
    r["config"] = config;
    return r;
  }

  /// Comment lines for CSV outputs (without the leading "# ").
  std::vector<std::string> header_lines() const {
    return {std::string("nlgs ") + version + " command=" + command +
                (seed ? " seed=" + std::to_string(*seed) : std::string()),
            "config " + to_text(config, 0)};
  }
};

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

inline void write_record(const std::filesystem::path& path, const Provenance& prov, Record body) {
  Record r;
  r["provenance"] = prov.record();
  for (auto it = body.begin(); it != body.end(); ++it) r[it.key()] = it.value();
  auto out = open_output(path);
  out << to_text(r) << '\n';
}

/// CSV with provenance comments, a column header and rows of doubles.
inline void write_table(const std::filesystem::path& path, const Provenance& prov, const std::string& header,
                        const std::vector<std::vector<double>>& rows) {
  auto out = open_output(path);
  for (const auto& line : prov.header_lines()) out << "# " << line << '\n';
  out << header << '\n';
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) out << ',';
      out << (std::isfinite(row[k]) ? format_double(row[k]) : std::string("nan"));
    }
    out << '\n';
  }
}

inline void write_field(const std::filesystem::path& path, const Provenance& prov, const Field& f) {
  auto out = open_output(path);
  const auto lines = prov.header_lines();
  write_field_csv(out, f, lines);
}

}  // namespace nlgs::app

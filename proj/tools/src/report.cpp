#include "bribery_cli/report.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "bribery/model.hpp"

namespace bribery::cli {

std::string format_btc(double btc) {
  if (btc == kSatoshi) return "1e-8";
  char buf[64];
  if (btc > 0.0 && btc < 0.005) {
    std::snprintf(buf, sizeof buf, "%.2g", btc);
  } else {
    std::snprintf(buf, sizeof buf, "%.2f", btc);
  }
  return buf;
}

std::string format_btc(const std::optional<double>& btc) {
  return btc ? format_btc(*btc) : std::string("never");
}

std::string format_prob(double p) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", p);
  return buf;
}

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

CsvWriter::CsvWriter(std::ostream& out, std::vector<std::string> header)
    : out_(out), width_(header.size()) {
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != width_) throw std::logic_error("csv row width mismatch");
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    out_ << csv_field(fields[i]);
  }
  out_ << '\n';
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace bribery::cli

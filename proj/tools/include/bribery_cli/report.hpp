#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bribery::cli {

inline constexpr int kSchemaVersion = 1;

// BTC to two decimals; one satoshi prints as "1e-8" so a nominal bribe never
// looks like no bribe.
std::string format_btc(double btc);
std::string format_btc(const std::optional<double>& btc);
// Four significant figures.
std::string format_prob(double p);

std::string csv_field(std::string_view text);

// Header-first CSV with RFC 4180 quoting and LF line endings.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::vector<std::string> header);
  void row(const std::vector<std::string>& fields);

 private:
  std::ostream& out_;
  std::size_t width_;
};

std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace bribery::cli

// Minimal RFC 4180 writer: comma separated, CRLF line ends, fields quoted when needed.
#pragma once

#include <string>
#include <vector>

namespace ptv::csv {

/// Quotes a field containing a comma, quote, CR or LF; embedded quotes are doubled.
std::string quote(const std::string& field);

/// Shortest round-trip text of a double ("%.17g" trimmed to the first exact form).
std::string number(double v);

std::string row(const std::vector<std::string>& fields);

class Table {
 public:
  explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}
  /// Throws std::invalid_argument on a column-count mismatch.
  void add(std::vector<std::string> fields);
  void add(const std::vector<double>& values);
  std::string str() const;
  void write(const std::string& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace ptv::csv

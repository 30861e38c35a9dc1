#include "anderson/csv.hpp"

#include <cmath>
#include <cstdio>

#include "anderson/errors.hpp"

namespace anderson {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

CsvWriter::CsvWriter(std::ostream& os, std::initializer_list<std::string_view> header)
    : os_(os), columns_(header.size()) {
  bool first = true;
  for (auto h : header) {
    if (!first) os_ << ',';
    os_ << h;
    first = false;
  }
  os_ << '\n';
}

CsvWriter::CsvWriter(std::ostream& os, const std::vector<std::string>& header)
    : os_(os), columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) os_ << (i ? "," : "") << header[i];
  os_ << '\n';
}

void CsvWriter::separator() {
  if (filled_ == columns_) throw Error("CsvWriter: too many columns in row");
  if (filled_ > 0) os_ << ',';
  ++filled_;
}

CsvWriter& CsvWriter::operator<<(double x) {
  separator();
  os_ << format_double(x);
  return *this;
}

CsvWriter& CsvWriter::operator<<(long long x) {
  separator();
  os_ << x;
  return *this;
}

CsvWriter& CsvWriter::operator<<(unsigned long long x) {
  separator();
  os_ << x;
  return *this;
}

CsvWriter& CsvWriter::operator<<(std::string_view s) {
  separator();
  os_ << s;
  return *this;
}

void CsvWriter::end_row() {
  if (filled_ != columns_) throw Error("CsvWriter: row has wrong number of columns");
  os_ << '\n';
  filled_ = 0;
}

}  // namespace anderson

#pragma once

#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace anderson {

/// Floats are written with 17 significant digits so they round-trip.
std::string format_double(double x);

/// Minimal CSV emitter with a fixed header.
class CsvWriter {
public:
  CsvWriter(std::ostream& os, std::initializer_list<std::string_view> header);
  CsvWriter(std::ostream& os, const std::vector<std::string>& header);

  CsvWriter& operator<<(double x);
  CsvWriter& operator<<(long long x);
  CsvWriter& operator<<(unsigned long long x);
  CsvWriter& operator<<(int x) { return *this << static_cast<long long>(x); }
  CsvWriter& operator<<(unsigned x) { return *this << static_cast<unsigned long long>(x); }
  CsvWriter& operator<<(unsigned long x) { return *this << static_cast<unsigned long long>(x); }
  CsvWriter& operator<<(long x) { return *this << static_cast<long long>(x); }
  CsvWriter& operator<<(bool x) { return *this << (x ? 1LL : 0LL); }
  CsvWriter& operator<<(std::string_view s);
  CsvWriter& operator<<(const char* s) { return *this << std::string_view(s); }
  CsvWriter& operator<<(const std::string& s) { return *this << std::string_view(s); }

  /// Terminates the current row; throws if the column count is wrong.
  void end_row();

  std::size_t columns() const noexcept { return columns_; }

private:
  void separator();

  std::ostream& os_;
  std::size_t columns_;
  std::size_t filled_ = 0;
};

}  // namespace anderson

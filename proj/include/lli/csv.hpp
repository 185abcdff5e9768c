#pragma once

#include <string>
#include <vector>

// Minimal CSV I/O for the fixed run-log schemas. All files are UTF-8 with a
// header row; numbers are written with enough digits to round-trip exactly.

namespace lli::csv {

class Writer {
 public:
  explicit Writer(const std::string& path,
                  const std::vector<std::string>& header);
  ~Writer();
  Writer(const Writer&) = delete;
  Writer& operator=(const Writer&) = delete;

  void row(const std::vector<std::string>& cells);
  void close();

  static std::string num(double v);
  static std::string num(long v);

 private:
  void* f_ = nullptr;
  std::size_t ncols_ = 0;
};

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int col(const std::string& name) const;  // -1 if absent
};

// Reads a whole CSV file. Throws std::runtime_error on I/O failure or
// ragged rows.
Table read(const std::string& path);

}  // namespace lli::csv

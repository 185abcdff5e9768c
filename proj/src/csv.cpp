#include "lli/csv.hpp"

#include <cstdio>
#include <stdexcept>

namespace lli::csv {

Writer::Writer(const std::string& path,
               const std::vector<std::string>& header)
    : ncols_(header.size()) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f_ = f;
  row(header);
}

Writer::~Writer() { close(); }

void Writer::close() {
  if (f_) {
    std::fclose(static_cast<std::FILE*>(f_));
    f_ = nullptr;
  }
}

void Writer::row(const std::vector<std::string>& cells) {
  if (!f_) throw std::runtime_error("writer already closed");
  if (cells.size() != ncols_) throw std::runtime_error("ragged CSV row");
  std::FILE* f = static_cast<std::FILE*>(f_);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) std::fputc(',', f);
    std::fputs(cells[i].c_str(), f);
  }
  std::fputc('\n', f);
}

std::string Writer::num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string Writer::num(long v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%ld", v);
  return buf;
}

int Table::col(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

Table read(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw std::runtime_error("cannot open for reading: " + path);
  std::string content;
  char buf[65536];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof(buf), f)) > 0) content.append(buf, n);
  std::fclose(f);

  Table t;
  std::vector<std::string> cells;
  std::string cur;
  bool first_line = true;
  auto flush_line = [&]() {
    cells.push_back(cur);
    cur.clear();
    if (first_line) {
      t.header = cells;
      first_line = false;
    } else {
      if (cells.size() != t.header.size())
        throw std::runtime_error("ragged CSV row in " + path);
      t.rows.push_back(cells);
    }
    cells.clear();
  };
  for (char c : content) {
    if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (c == '\n') {
      flush_line();
    } else if (c != '\r') {
      cur += c;
    }
  }
  if (!cur.empty() || !cells.empty()) flush_line();
  return t;
}

}  // namespace lli::csv

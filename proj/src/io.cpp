#include "polymerlab/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace polymerlab {

std::string g17(double v) {
  char buf[40];
  snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path) : path_(path) {}

CsvWriter::~CsvWriter() {
  try {
    close();
  } catch (...) {
  }
}

void CsvWriter::header(const std::vector<std::string>& cols) {
  ncols_ = cols.size();
  append_line(cols);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (ncols_ == 0) throw std::logic_error("CsvWriter: header first");
  if (cells.size() != ncols_) throw std::logic_error("CsvWriter: column count mismatch");
  append_line(cells);
}

void CsvWriter::append_line(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) buf_ += ',';
    buf_ += cells[i];
  }
  buf_ += '\n';
}

void CsvWriter::close() {
  if (written_) return;
  write_text_file(path_, buf_);
  written_ = true;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << content;
  if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace polymerlab

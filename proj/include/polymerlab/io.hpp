#pragma once

// CSV + manifest emission. Doubles print as %.17g so identical runs produce
// byte-identical files.

#include <cstdint>
#include <string>
#include <vector>

namespace polymerlab {

std::string g17(double v);

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);
  ~CsvWriter();
  void header(const std::vector<std::string>& cols);
  void row(const std::vector<std::string>& cells);
  void close();  // writes the file; destructor calls it if needed
  const std::string& path() const { return path_; }
  const std::string& content() const { return buf_; }

 private:
  std::string path_;
  std::string buf_;
  std::size_t ncols_ = 0;
  bool written_ = false;
  void append_line(const std::vector<std::string>& cells);
};

void write_text_file(const std::string& path, const std::string& content);

}  // namespace polymerlab

#pragma once

#include <cstdio>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ymlp {

/// CSV writer with full-precision, locale-independent number formatting so
/// repeated runs produce byte-identical files.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    f_ = std::fopen(path.c_str(), "w");
    if (!f_) throw std::runtime_error("CsvWriter: cannot open " + path);
  }
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;
  ~CsvWriter() {
    if (f_) std::fclose(f_);
  }

  void header(std::span<const std::string> names) {
    for (size_t i = 0; i < names.size(); ++i)
      std::fprintf(f_, "%s%s", names[i].c_str(), i + 1 < names.size() ? "," : "\n");
  }

  void begin_row() { first_ = true; }
  void field(double v) {
    sep();
    std::fprintf(f_, "%.17g", v);
  }
  void field(long v) {
    sep();
    std::fprintf(f_, "%ld", v);
  }
  void field(int v) {
    sep();
    std::fprintf(f_, "%d", v);
  }
  void field(const std::string& s) {
    sep();
    std::fputs(s.c_str(), f_);
  }
  void end_row() { std::fputc('\n', f_); }

 private:
  void sep() {
    if (!first_) std::fputc(',', f_);
    first_ = false;
  }
  std::FILE* f_ = nullptr;
  bool first_ = true;
};

}  // namespace ymlp

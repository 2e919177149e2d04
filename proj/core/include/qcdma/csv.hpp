#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace qcdma::csv {

/// Deterministic shortest-roundtrip formatting (%.17g trimmed); the byte
/// stability of every emitted CSV rests on this one function.
std::string format_double(double v);

class Writer {
 public:
  Writer(const std::filesystem::path& path, const std::vector<std::string>& header);
  void row(const std::vector<std::string>& cells);
  void row_values(const std::vector<double>& values);
  void close();
  const std::filesystem::path& path() const { return path_; }
  ~Writer();

 private:
  std::filesystem::path path_;
  std::string buffer_;
  std::size_t n_cols_;
  bool closed_ = false;
};

std::string sha256_hex(const std::string& bytes);
std::string sha256_file_hex(const std::filesystem::path& path);

}  // namespace qcdma::csv

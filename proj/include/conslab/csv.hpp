#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace conslab {

// In-memory table written in one go. Doubles use %.17g so output round-trips
// and is byte-identical across runs.
class Csv {
 public:
  explicit Csv(std::vector<std::string> columns);

  Csv& row();
  Csv& add(double v);
  Csv& add(int v);
  Csv& add(const std::string& v);

  size_t rows() const { return cells_.size(); }
  const std::vector<std::string>& columns() const { return columns_; }
  std::string str() const;
  // Writes to a sibling temporary and renames, so a failed run never leaves a
  // truncated file behind.
  void write(const std::filesystem::path& path) const;

  static std::string num(double v);

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> cells_;
};

}  // namespace conslab

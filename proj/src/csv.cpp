#include "conslab/csv.hpp"

#include <cstdio>
#include <fstream>

#include "conslab/error.hpp"

namespace conslab {

Csv::Csv(std::vector<std::string> columns) : columns_(std::move(columns)) {}

Csv& Csv::row() {
  if (!cells_.empty() && cells_.back().size() != columns_.size())
    throw Error("csv: previous row has " + std::to_string(cells_.back().size()) + " cells, expected " +
                std::to_string(columns_.size()));
  cells_.emplace_back();
  return *this;
}

Csv& Csv::add(const std::string& v) {
  if (cells_.empty()) throw Error("csv: add before row");
  if (cells_.back().size() >= columns_.size()) throw Error("csv: too many cells in row");
  if (v.find_first_of(",\"\n") != std::string::npos) throw Error("csv: cell needs quoting: " + v);
  cells_.back().push_back(v);
  return *this;
}

Csv& Csv::add(double v) { return add(num(v)); }
Csv& Csv::add(int v) { return add(std::to_string(v)); }

std::string Csv::num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string Csv::str() const {
  std::string s;
  auto line = [&s](const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i) s += ',';
      s += cells[i];
    }
    s += '\n';
  };
  line(columns_);
  for (const auto& r : cells_) {
    if (r.size() != columns_.size()) throw Error("csv: incomplete row");
    line(r);
  }
  return s;
}

void Csv::write(const std::filesystem::path& path) const {
  const std::string body = str();
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("csv: cannot open " + tmp.string());
    f << body;
    if (!f) throw Error("csv: write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace conslab

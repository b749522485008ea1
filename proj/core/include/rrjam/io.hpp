#ifndef RRJAM_IO_HPP
#define RRJAM_IO_HPP

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace rrjam {

// Shortest-round-trip decimal formatting ("%.17g" trimmed); all CSV output
// goes through this so runs are byte-comparable.
std::string format_double(double v);

class CsvWriter {
public:
  explicit CsvWriter(std::vector<std::string> columns);
  void add_row(const std::vector<std::string>& cells);
  void add_row(const std::vector<double>& cells);
  std::string str() const;
  void write_file(const std::string& path) const;

private:
  std::vector<std::string> columns_;
  std::vector<std::string> rows_;
};

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

}  // namespace rrjam

#endif

#include "reconfig/dataset.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "reconfig/model.hpp"

namespace reconfig {

void OperatingDataset::check() const {
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (i > 0 && r.k <= records[i - 1].k)
      throw ReconfigError("dataset: cycle index not strictly increasing at row " + std::to_string(i));
    if (r.u.size() != actuation_dim || r.disturbance.size() != actuation_dim ||
        r.coupling.size() != coupling_dim || r.y.size() != output_dim)
      throw ReconfigError("dataset: dimension mismatch at row " + std::to_string(i));
  }
}

OperatingDataset OperatingDataset::slice(std::size_t begin, std::size_t end) const {
  OperatingDataset out{actuation_dim, output_dim, coupling_dim, {}};
  end = std::min(end, records.size());
  for (std::size_t i = begin; i < end; ++i) out.records.push_back(records[i]);
  return out;
}

void write_csv(std::ostream& os, const OperatingDataset& data) {
  os << 'k';
  for (std::size_t i = 1; i <= data.actuation_dim; ++i) os << ",u" << i;
  for (std::size_t i = 1; i <= data.actuation_dim; ++i) os << ",du" << i;
  for (std::size_t i = 1; i <= data.coupling_dim; ++i) os << ",w" << i;
  for (std::size_t i = 1; i <= data.output_dim; ++i) os << ",y" << i;
  os << '\n';
  os << std::setprecision(17);
  for (const auto& r : data.records) {
    os << r.k;
    for (double v : r.u) os << ',' << v;
    for (double v : r.disturbance) os << ',' << v;
    for (double v : r.coupling) os << ',' << v;
    for (double v : r.y) os << ',' << v;
    os << '\n';
  }
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    cells.push_back(cell);
  }
  return cells;
}

double parse_double(const std::string& s, std::size_t row) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty())
    throw ReconfigError("dataset csv: bad number '" + s + "' at row " + std::to_string(row));
  return v;
}

}  // namespace

OperatingDataset read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ReconfigError("dataset csv: missing header");
  auto header = split(line);
  if (header.empty() || header[0] != "k") throw ReconfigError("dataset csv: header must start with k");

  OperatingDataset data;
  // Column groups must appear in the order u, du, w, y with 1-based suffixes.
  const char* prefixes[] = {"u", "du", "w", "y"};
  std::size_t counts[4] = {0, 0, 0, 0};
  std::size_t group = 0;
  for (std::size_t c = 1; c < header.size(); ++c) {
    const auto& h = header[c];
    bool matched = false;
    for (std::size_t g = group; g < 4 && !matched; ++g) {
      std::string expect = std::string(prefixes[g]) + std::to_string(counts[g] + 1);
      if (h == expect) {
        group = g;
        ++counts[g];
        matched = true;
      }
    }
    if (!matched) throw ReconfigError("dataset csv: unexpected column '" + h + "'");
  }
  if (counts[0] != counts[1]) throw ReconfigError("dataset csv: u and du column counts differ");
  data.actuation_dim = counts[0];
  data.coupling_dim = counts[2];
  data.output_dim = counts[3];

  std::size_t row = 0;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    auto cells = split(line);
    if (cells.size() != header.size())
      throw ReconfigError("dataset csv: row " + std::to_string(row) + " has wrong column count");
    OperatingRecord r;
    r.k = static_cast<long>(parse_double(cells[0], row));
    std::size_t c = 1;
    for (std::size_t i = 0; i < data.actuation_dim; ++i) r.u.push_back(parse_double(cells[c++], row));
    for (std::size_t i = 0; i < data.actuation_dim; ++i)
      r.disturbance.push_back(parse_double(cells[c++], row));
    for (std::size_t i = 0; i < data.coupling_dim; ++i) r.coupling.push_back(parse_double(cells[c++], row));
    for (std::size_t i = 0; i < data.output_dim; ++i) r.y.push_back(parse_double(cells[c++], row));
    data.records.push_back(std::move(r));
  }
  data.check();
  return data;
}

void save_csv(const std::filesystem::path& path, const OperatingDataset& data) {
  std::ofstream os(path);
  if (!os) throw ReconfigError("cannot write " + path.string());
  write_csv(os, data);
}

OperatingDataset load_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ReconfigError("cannot read " + path.string());
  return read_csv(is);
}

}  // namespace reconfig

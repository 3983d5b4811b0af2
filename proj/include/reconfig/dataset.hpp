#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <vector>

namespace reconfig {

/// One operating cycle of a module: commanded actuation, observed actuation
/// disturbance, coupling input from the predecessor and measured output.
struct OperatingRecord {
  long k = 0;
  std::vector<double> u;
  std::vector<double> disturbance;
  std::vector<double> coupling;
  std::vector<double> y;
  friend bool operator==(const OperatingRecord&, const OperatingRecord&) = default;
};

struct OperatingDataset {
  std::size_t actuation_dim = 0;
  std::size_t output_dim = 0;
  std::size_t coupling_dim = 0;
  std::vector<OperatingRecord> records;

  /// Throws ReconfigError if k is not strictly increasing or a record's
  /// dimensions disagree with the declared ones.
  void check() const;
  std::size_t size() const { return records.size(); }

  /// Records [begin, end).
  OperatingDataset slice(std::size_t begin, std::size_t end) const;

  friend bool operator==(const OperatingDataset&, const OperatingDataset&) = default;
};

// CSV contract: header `k,u1..uM,du1..duM,w1..wC,y1..yN`, one row per cycle.
void write_csv(std::ostream& os, const OperatingDataset& data);
OperatingDataset read_csv(std::istream& is);
void save_csv(const std::filesystem::path& path, const OperatingDataset& data);
OperatingDataset load_csv(const std::filesystem::path& path);

}  // namespace reconfig

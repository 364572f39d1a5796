#ifndef TAXIS_HARNESS_IO_HPP
#define TAXIS_HARNESS_IO_HPP

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "taxis/analysis.hpp"
#include "taxis/grid.hpp"
#include "taxis/integrator.hpp"
#include "taxis/mms.hpp"

namespace taxis::harness {

// Snapshot file layout:
//   # time = <t>
//   # grid = dim=1 n=256 length=1
//   # digest = <16 hex digits>
//   # columns = x,u,v,w
//   <rows, comma separated, 17 significant digits>
// The first population column is named z for the predator-prey model.
struct SnapshotData {
  std::map<std::string, std::string> header;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

void write_snapshot(const std::filesystem::path& path, const State<double>& s,
                    const std::string& digest, bool predprey);
SnapshotData read_snapshot(const std::filesystem::path& path);

struct ColumnDiff {
  std::string column;
  double max_abs_diff = 0.0;
  std::size_t worst_row = 0;
};

struct CompareResult {
  bool passed = true;
  double tolerance = 0.0;
  std::vector<ColumnDiff> columns;
  // Location of the largest difference among compared columns.
  std::string worst_column;
  std::size_t worst_row = 0;
  std::vector<double> worst_coords;
  double worst_diff = 0.0;
};

// Compares the data columns shared by both files (or only `only_columns`
// when given). Coordinate columns must agree; a mismatch is an
// AlignmentError.
CompareResult compare_snapshots(const SnapshotData& a, const SnapshotData& b, double tol,
                                const std::vector<std::string>& only_columns = {});

void write_diagnostics_csv(const std::filesystem::path& path,
                           const std::vector<StepDiagnostics>& diag, bool triple, bool predprey);
void write_sweep_csv(const std::filesystem::path& path, const SweepReport& rep);
void write_mms_csv(const std::filesystem::path& path, const MmsReport& rep);

// key = value lines in insertion order.
class Summary {
 public:
  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  void set(const std::string& key, int value);
  void write(const std::filesystem::path& path) const;
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

void add_invariants(Summary& s, const std::string& prefix, const InvariantReport& rep);

std::string format_value(double x);  // 17 significant digits

}  // namespace taxis::harness

#endif  // TAXIS_HARNESS_IO_HPP

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "fbpstream/fboxplot.hpp"
#include "fbpstream/stream.hpp"

namespace fbpstream {

inline constexpr int kSnapshotFormatVersion = 1;

struct SnapshotRecord {
  ClusterId id = 0;
  std::size_t n_allocated = 0;
  std::size_t last_update = 0;
  FunctionalBoxplot centroid;

  // id, counters, and the five value rows bit for bit.
  bool same_as(const SnapshotRecord& other) const noexcept;
};

struct Snapshot {
  std::size_t taken_at = 0;
  std::size_t window_size = 0;
  int format_version = kSnapshotFormatVersion;
  std::vector<SnapshotRecord> records;

  bool same_as(const Snapshot& other) const noexcept;
};

// Deep copy of the store state; call between windows.
Snapshot take_snapshot(const MicroClusterStore& store, std::size_t t_now);

// Line format:
//   FBPSNAP v1 taken_at=<int> w=<int> k=<int>
//   then per cluster:
//   cluster id=<int> n=<int> tl=<int>
//   five rows of w values (envelope_min, box_lower, median, box_upper,
//   envelope_max), space separated, 17 significant digits.
void write_snapshot(std::ostream& out, const Snapshot& snapshot);
Snapshot read_snapshot(std::istream& in);

// Rows of w values with 17 significant digits, shared with the macro
// summary export.
void write_component_rows(std::ostream& out, const FunctionalBoxplot& fbp);
std::string format_value(double value);

std::filesystem::path snapshot_file_name(std::size_t taken_at);
std::filesystem::path save_snapshot(const std::filesystem::path& dir, const Snapshot& snapshot);
Snapshot load_snapshot(const std::filesystem::path& file);

// Snapshots ordered by taken_at.
class SnapshotCatalog {
 public:
  SnapshotCatalog() = default;

  // Loads every *.fbpsnap file in `dir`.
  static SnapshotCatalog load_directory(const std::filesystem::path& dir);

  void add(Snapshot snapshot);
  bool empty() const noexcept { return snapshots_.empty(); }
  std::size_t size() const noexcept { return snapshots_.size(); }
  const std::vector<Snapshot>& snapshots() const noexcept { return snapshots_; }

 private:
  std::vector<Snapshot> snapshots_;
};

// Snapshots closest to each end of [t_lo, t_hi]; ties go to the earlier one.
// Throws QueryError for an empty catalog or when the two coincide.
std::pair<Snapshot, Snapshot> select_snapshots(const SnapshotCatalog& catalog, std::size_t t_lo,
                                               std::size_t t_hi);

struct SlotEntry {
  ClusterId cluster_id = 0;
  FunctionalBoxplot centroid;
  std::size_t weight = 0;
};

struct SlotSummary {
  std::vector<SlotEntry> entries;
  std::size_t t_lo = 0;
  std::size_t t_hi = 0;
};

// Removes the lower snapshot's contribution from the upper one. Clusters are
// matched by id; for n_u > n_l the slot centroid is
// (n_u c_u - n_l c_l) / (n_u - n_l) with weight n_u - n_l. Clusters born after
// the lower snapshot enter unchanged; idle or vanished clusters are skipped.
// Throws InconsistencyError when a matched cluster lost allocations.
SlotSummary recover_slot(const Snapshot& lower, const Snapshot& upper);

}  // namespace fbpstream

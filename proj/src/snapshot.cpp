#include "fbpstream/snapshot.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "fbpstream/errors.hpp"

namespace fbpstream {

bool SnapshotRecord::same_as(const SnapshotRecord& other) const noexcept {
  return id == other.id && n_allocated == other.n_allocated && last_update == other.last_update &&
         centroid.same_values(other.centroid);
}

bool Snapshot::same_as(const Snapshot& other) const noexcept {
  if (taken_at != other.taken_at || window_size != other.window_size ||
      format_version != other.format_version || records.size() != other.records.size()) {
    return false;
  }
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!records[i].same_as(other.records[i])) return false;
  }
  return true;
}

Snapshot take_snapshot(const MicroClusterStore& store, std::size_t t_now) {
  Snapshot snap;
  snap.taken_at = t_now;
  snap.window_size = store.window_size();
  snap.records.reserve(store.clusters().size());
  for (const auto& c : store.clusters()) {
    snap.records.push_back(SnapshotRecord{c.id, c.n_allocated, c.last_update, c.centroid});
  }
  return snap;
}

std::string format_value(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_component_rows(std::ostream& out, const FunctionalBoxplot& fbp) {
  for (Component c : kComponents) {
    const auto values = fbp.component(c).values();
    for (std::size_t t = 0; t < values.size(); ++t) {
      if (t > 0) out << ' ';
      out << format_value(values[t]);
    }
    out << '\n';
  }
}

void write_snapshot(std::ostream& out, const Snapshot& snapshot) {
  out << "FBPSNAP v" << snapshot.format_version << " taken_at=" << snapshot.taken_at
      << " w=" << snapshot.window_size << " k=" << snapshot.records.size() << '\n';
  for (const auto& r : snapshot.records) {
    out << "cluster id=" << r.id << " n=" << r.n_allocated << " tl=" << r.last_update << '\n';
    write_component_rows(out, r.centroid);
  }
}

namespace {

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  std::string next(const char* what) {
    std::string line;
    if (!std::getline(in_, line)) {
      throw DataError("snapshot truncated: expected " + std::string(what) + " at line " +
                      std::to_string(line_no_ + 1));
    }
    ++line_no_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw DataError("snapshot line " + std::to_string(line_no_) + ": " + msg);
  }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

std::size_t parse_field(LineReader& reader, const std::string& token, const std::string& key) {
  const std::string prefix = key + "=";
  if (token.rfind(prefix, 0) != 0) reader.fail("expected '" + prefix + "', got '" + token + "'");
  std::size_t value = 0;
  const char* first = token.data() + prefix.size();
  const char* last = token.data() + token.size();
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last || first == last) {
    reader.fail("bad integer in '" + token + "'");
  }
  return value;
}

std::vector<std::string> split_spaces(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) tokens.push_back(tok);
  return tokens;
}

Curve parse_row(LineReader& reader, const TimeGrid& grid) {
  const std::string line = reader.next("a component row");
  std::vector<double> values;
  values.reserve(grid.size());
  const char* p = line.data();
  const char* end = line.data() + line.size();
  while (p < end) {
    while (p < end && *p == ' ') ++p;
    if (p == end) break;
    double v = 0.0;
    const auto res = std::from_chars(p, end, v);
    if (res.ec != std::errc() || (res.ptr != end && *res.ptr != ' ')) {
      reader.fail("bad numeric value");
    }
    values.push_back(v);
    p = res.ptr;
  }
  if (values.size() != grid.size()) {
    reader.fail("expected " + std::to_string(grid.size()) + " values, got " +
                std::to_string(values.size()));
  }
  return Curve(grid, std::move(values));
}

}  // namespace

Snapshot read_snapshot(std::istream& in) {
  LineReader reader(in);
  const auto header = split_spaces(reader.next("a header"));
  if (header.size() != 5 || header[0] != "FBPSNAP") reader.fail("not a snapshot header");
  if (header[1] != "v1") reader.fail("unsupported snapshot version " + header[1]);

  Snapshot snap;
  snap.format_version = 1;
  snap.taken_at = parse_field(reader, header[2], "taken_at");
  snap.window_size = parse_field(reader, header[3], "w");
  const std::size_t k = parse_field(reader, header[4], "k");
  if (k > 0 && snap.window_size == 0) reader.fail("clusters present but w=0");

  for (std::size_t i = 0; i < k; ++i) {
    const auto fields = split_spaces(reader.next("a cluster line"));
    if (fields.size() != 4 || fields[0] != "cluster") reader.fail("expected a cluster line");
    const ClusterId id = parse_field(reader, fields[1], "id");
    const std::size_t n = parse_field(reader, fields[2], "n");
    const std::size_t tl = parse_field(reader, fields[3], "tl");
    if (n == 0) reader.fail("cluster with zero allocations");
    for (const auto& r : snap.records) {
      if (r.id == id) reader.fail("duplicate cluster id " + std::to_string(id));
    }
    const TimeGrid grid(snap.window_size);
    Curve envelope_min = parse_row(reader, grid);
    Curve box_lower = parse_row(reader, grid);
    Curve median = parse_row(reader, grid);
    Curve box_upper = parse_row(reader, grid);
    Curve envelope_max = parse_row(reader, grid);
    snap.records.push_back(SnapshotRecord{
        id, n, tl,
        FunctionalBoxplot(std::move(envelope_min), std::move(box_lower), std::move(median),
                          std::move(box_upper), std::move(envelope_max),
                          Window::at(tl, snap.window_size), 0)});
  }
  return snap;
}

std::filesystem::path snapshot_file_name(std::size_t taken_at) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "snapshot_%08zu.fbpsnap", taken_at);
  return buf;
}

std::filesystem::path save_snapshot(const std::filesystem::path& dir, const Snapshot& snapshot) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  const auto path = dir / snapshot_file_name(snapshot.taken_at);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write snapshot file " + path.string());
  write_snapshot(out, snapshot);
  out.flush();
  if (!out) throw ConfigError("failed while writing snapshot file " + path.string());
  return path;
}

Snapshot load_snapshot(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw QueryError("cannot open snapshot file " + file.string());
  try {
    return read_snapshot(in);
  } catch (const DataError& e) {
    throw DataError(file.string() + ": " + e.what());
  }
}

SnapshotCatalog SnapshotCatalog::load_directory(const std::filesystem::path& dir) {
  SnapshotCatalog catalog;
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw QueryError("snapshot directory " + dir.string() + " does not exist");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".fbpsnap") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) catalog.add(load_snapshot(f));
  return catalog;
}

void SnapshotCatalog::add(Snapshot snapshot) {
  const auto pos = std::upper_bound(
      snapshots_.begin(), snapshots_.end(), snapshot.taken_at,
      [](std::size_t t, const Snapshot& s) { return t < s.taken_at; });
  snapshots_.insert(pos, std::move(snapshot));
}

std::pair<Snapshot, Snapshot> select_snapshots(const SnapshotCatalog& catalog, std::size_t t_lo,
                                               std::size_t t_hi) {
  if (catalog.empty()) throw QueryError("snapshot catalog is empty");
  if (t_lo > t_hi) {
    throw QueryError("time slot [" + std::to_string(t_lo) + ", " + std::to_string(t_hi) +
                     "] is reversed");
  }
  const auto closest = [&](std::size_t target) -> const Snapshot& {
    const Snapshot* best = nullptr;
    std::size_t best_gap = 0;
    for (const auto& s : catalog.snapshots()) {
      const std::size_t gap = s.taken_at > target ? s.taken_at - target : target - s.taken_at;
      if (best == nullptr || gap < best_gap) {
        best = &s;
        best_gap = gap;
      }
    }
    return *best;
  };
  const Snapshot& lower = closest(t_lo);
  const Snapshot& upper = closest(t_hi);
  if (lower.taken_at >= upper.taken_at) {
    throw QueryError("time slot [" + std::to_string(t_lo) + ", " + std::to_string(t_hi) +
                     "] resolves to a single snapshot (taken at " +
                     std::to_string(lower.taken_at) + ")");
  }
  return {lower, upper};
}

SlotSummary recover_slot(const Snapshot& lower, const Snapshot& upper) {
  if (lower.taken_at >= upper.taken_at) {
    throw QueryError("lower snapshot must precede the upper snapshot");
  }
  if (!lower.records.empty() && !upper.records.empty() &&
      lower.window_size != upper.window_size) {
    throw DataError("snapshots disagree on the window size");
  }

  std::map<ClusterId, const SnapshotRecord*> before;
  for (const auto& r : lower.records) before.emplace(r.id, &r);

  SlotSummary slot;
  slot.t_lo = lower.taken_at;
  slot.t_hi = upper.taken_at;
  for (const auto& up : upper.records) {
    const auto it = before.find(up.id);
    if (it == before.end()) {
      slot.entries.push_back(SlotEntry{up.id, up.centroid, up.n_allocated});
      continue;
    }
    const SnapshotRecord& lo = *it->second;
    if (up.n_allocated < lo.n_allocated) {
      throw InconsistencyError("micro-cluster " + std::to_string(up.id) + " shrank from " +
                               std::to_string(lo.n_allocated) + " to " +
                               std::to_string(up.n_allocated) +
                               " allocations between snapshots; consult the event log");
    }
    if (up.n_allocated == lo.n_allocated) continue;

    const double n_u = static_cast<double>(up.n_allocated);
    const double n_l = static_cast<double>(lo.n_allocated);
    const double dn = n_u - n_l;
    std::array<std::vector<double>, kComponentCount> rows;
    for (std::size_t c = 0; c < kComponentCount; ++c) {
      const Curve& cu = up.centroid.component(kComponents[c]);
      const Curve& cl = lo.centroid.component(kComponents[c]);
      rows[c].resize(cu.size());
      for (std::size_t t = 0; t < cu.size(); ++t) rows[c][t] = (n_u * cu[t] - n_l * cl[t]) / dn;
    }
    const TimeGrid grid = up.centroid.grid();
    slot.entries.push_back(SlotEntry{
        up.id,
        FunctionalBoxplot(Curve(grid, std::move(rows[0])), Curve(grid, std::move(rows[1])),
                          Curve(grid, std::move(rows[2])), Curve(grid, std::move(rows[3])),
                          Curve(grid, std::move(rows[4])), up.centroid.window(),
                          up.centroid.n_source_curves()),
        up.n_allocated - lo.n_allocated});
  }
  return slot;
}

}  // namespace fbpstream

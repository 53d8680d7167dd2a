#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "fbpstream/ingest.hpp"
#include "fbpstream/macrocluster.hpp"
#include "fbpstream/stream.hpp"
#include "fbpstream/svg.hpp"

namespace fbpstream {

struct RunOptions {
  IngestConfig ingest;
  PipelineConfig pipeline;
  StoreConfig store;
  std::size_t snapshot_every = 10;
  // Receives snapshots/, events.csv and report.csv.
  std::filesystem::path out_dir = "fbpstream_out";
};

struct AllocationRow {
  ClusterId id = 0;
  std::size_t n_allocated = 0;
  std::size_t last_update = 0;
};

struct RunReport {
  std::size_t windows_processed = 0;
  std::size_t n_streams = 0;
  std::size_t dropped_samples = 0;
  std::size_t final_k = 0;
  std::vector<AllocationRow> allocation;
  std::size_t creates = 0;
  std::size_t merges = 0;
  std::size_t discards = 0;
  std::size_t discarded_weight = 0;
  std::size_t snapshots_written = 0;
  double wall_seconds = 0.0;
};

// On-line phase over the whole input. Snapshots are taken before the first
// window, after every snapshot_every windows, and after the last window.
RunReport cmd_run(const RunOptions& opts);

// Aligned text; wall time is left out so identical runs print identical text.
void print_report(std::ostream& out, const RunReport& report);
// CSV: cluster_id,n_allocated,last_update
void write_report_csv(std::ostream& out, const RunReport& report);

struct SummarizeOptions {
  std::filesystem::path snapshot_dir;
  std::size_t t_from = 0;
  std::size_t t_to = 0;
  MacroConfig macro;
  std::size_t restarts = 1;
  std::filesystem::path out_dir = "fbpstream_summary";
  SvgStyle style;
};

// Off-line phase: writes macro_<c>.fbp and macro_<c>.svg per macro-cluster
// (c from 1) plus labels.csv, and prints a summary table.
MacroSummary cmd_summarize(const SummarizeOptions& opts, std::ostream& out);

// Entry point of the fbpstream tool. Exit codes: 0 success, 2 configuration
// error, 3 data error, 4 query or inconsistency error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fbpstream

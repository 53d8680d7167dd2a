#include "fbpstream/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "fbpstream/errors.hpp"
#include "fbpstream/snapshot.hpp"

namespace fbpstream {

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
  out.flush();
  if (!out) throw ConfigError("failed while writing " + path.string());
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create directory " + dir.string() + ": " + ec.message());
}

}  // namespace

RunReport cmd_run(const RunOptions& opts) {
  if (opts.snapshot_every == 0) throw ConfigError("--snapshot-every must be positive");
  const auto started = std::chrono::steady_clock::now();

  StoreConfig store_cfg = opts.store;
  store_cfg.window_size = opts.ingest.window_size;
  MicroClusterStore store(store_cfg);
  const TimeGrid grid = canonicalize(Window::at(0, opts.ingest.window_size));
  const SplineSmoother smoother(grid, opts.pipeline.smoothing);

  const auto snapshot_dir = opts.out_dir / "snapshots";
  ensure_dir(snapshot_dir);
  RunReport report;
  std::size_t last_snapshot = 0;
  save_snapshot(snapshot_dir, take_snapshot(store, 0));
  ++report.snapshots_written;

  const bool use_stdin = opts.ingest.path.empty() || opts.ingest.path == "-";
  if (use_stdin && opts.ingest.layout != Layout::wide) {
    throw ConfigError("standard input accepts the wide layout only");
  }
  std::ifstream file;
  if (!use_stdin) {
    file.open(opts.ingest.path, std::ios::binary);
    if (!file) throw DataError("cannot open input file " + opts.ingest.path);
  }
  BatchReader reader(use_stdin ? std::cin : file, opts.ingest);
  while (auto batch = reader.next()) {
    process_window(store, *batch, opts.pipeline, smoother);
    ++report.windows_processed;
    if (report.windows_processed % opts.snapshot_every == 0) {
      save_snapshot(snapshot_dir, take_snapshot(store, report.windows_processed));
      last_snapshot = report.windows_processed;
      ++report.snapshots_written;
    }
  }
  if (last_snapshot != report.windows_processed) {
    save_snapshot(snapshot_dir, take_snapshot(store, report.windows_processed));
    ++report.snapshots_written;
  }

  report.n_streams = reader.n_streams();
  report.dropped_samples = reader.dropped_samples();
  report.final_k = store.clusters().size();
  for (const auto& c : store.clusters()) {
    report.allocation.push_back({c.id, c.n_allocated, c.last_update});
  }
  for (const auto& e : store.event_log()) {
    switch (e.kind) {
      case EventKind::create:
        ++report.creates;
        break;
      case EventKind::merge:
        ++report.merges;
        break;
      case EventKind::discard:
        ++report.discards;
        break;
    }
  }
  report.discarded_weight = store.discarded_weight();
  if (store.total_allocated() + report.discarded_weight != report.windows_processed) {
    throw InconsistencyError("allocation counts do not add up to the processed windows");
  }

  std::ostringstream events;
  store.write_event_log(events);
  write_file(opts.out_dir / "events.csv", events.str());
  std::ostringstream csv;
  write_report_csv(csv, report);
  write_file(opts.out_dir / "report.csv", csv.str());

  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

void print_report(std::ostream& out, const RunReport& report) {
  out << "windows processed   " << report.windows_processed << '\n';
  out << "streams             " << report.n_streams << '\n';
  out << "dropped samples     " << report.dropped_samples << '\n';
  out << "micro-clusters      " << report.final_k << '\n';
  out << "creates             " << report.creates << '\n';
  out << "merges              " << report.merges << '\n';
  out << "discards            " << report.discards << '\n';
  out << "discarded weight    " << report.discarded_weight << '\n';
  out << "snapshots written   " << report.snapshots_written << '\n';
  if (!report.allocation.empty()) {
    out << '\n';
    char line[96];
    std::snprintf(line, sizeof(line), "%10s %12s %12s\n", "cluster", "n_allocated", "last_update");
    out << line;
    for (const auto& row : report.allocation) {
      std::snprintf(line, sizeof(line), "%10llu %12zu %12zu\n",
                    static_cast<unsigned long long>(row.id), row.n_allocated, row.last_update);
      out << line;
    }
  }
}

void write_report_csv(std::ostream& out, const RunReport& report) {
  out << "cluster_id,n_allocated,last_update\n";
  for (const auto& row : report.allocation) {
    out << row.id << ',' << row.n_allocated << ',' << row.last_update << '\n';
  }
}

MacroSummary cmd_summarize(const SummarizeOptions& opts, std::ostream& out) {
  const SnapshotCatalog catalog = SnapshotCatalog::load_directory(opts.snapshot_dir);
  const auto [lower, upper] = select_snapshots(catalog, opts.t_from, opts.t_to);
  const MacroSummary summary =
      summarize_slot(catalog, opts.t_from, opts.t_to, opts.macro, opts.restarts);

  ensure_dir(opts.out_dir);
  out << "slot                [" << opts.t_from << ", " << opts.t_to << "]\n";
  out << "snapshots           " << lower.taken_at << " -> " << upper.taken_at << '\n';
  std::ostringstream labels;
  labels << "cluster_id,macro,weight\n";
  if (summary.centroids.empty()) {
    out << "no micro-cluster activity in the slot\n";
    write_file(opts.out_dir / "labels.csv", labels.str());
    return summary;
  }

  const SlotSummary slot = recover_slot(lower, upper);
  for (std::size_t i = 0; i < summary.labels.size(); ++i) {
    labels << summary.input_ids[i] << ',' << summary.labels[i] + 1 << ','
           << slot.entries[i].weight << '\n';
  }
  write_file(opts.out_dir / "labels.csv", labels.str());

  out << "inputs              " << summary.labels.size() << '\n';
  out << "delta               " << format_value(summary.delta) << '\n';
  out << "iterations          " << summary.iterations << '\n';
  out << '\n';
  char line[96];
  std::snprintf(line, sizeof(line), "%6s %10s %8s\n", "macro", "weight", "members");
  out << line;
  for (std::size_t c = 0; c < summary.centroids.size(); ++c) {
    std::size_t members = 0;
    for (std::size_t l : summary.labels) members += (l == c);
    const auto weight = static_cast<unsigned long long>(std::llround(summary.macro_weights[c]));
    std::snprintf(line, sizeof(line), "%6zu %10llu %8zu\n", c + 1, weight, members);
    out << line;

    std::ostringstream rows;
    rows << "FBPMACRO v1 index=" << c + 1 << " weight=" << weight << " members=" << members
         << " w=" << summary.centroids[c].grid().size() << '\n';
    write_component_rows(rows, summary.centroids[c]);
    const std::string stem = "macro_" + std::to_string(c + 1);
    write_file(opts.out_dir / (stem + ".fbp"), rows.str());

    SvgStyle style = opts.style;
    if (style.title.empty()) {
      style.title = "Macro-cluster " + std::to_string(c + 1) + " of " +
                    std::to_string(summary.centroids.size()) + ", slot [" +
                    std::to_string(opts.t_from) + ", " + std::to_string(opts.t_to) + "]";
    }
    write_file(opts.out_dir / (stem + ".svg"), render_fbp_svg(summary.centroids[c], style));
  }
  return summary;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Functional boxplot micro-clustering of multiple streaming time series"};
  app.require_subcommand(1);

  const std::map<std::string, DepthKind> depth_names = {{"mbd", DepthKind::modified_band},
                                                        {"bd", DepthKind::band}};
  const std::map<std::string, Layout> layout_names = {{"wide", Layout::wide},
                                                      {"long", Layout::long_}};

  RunOptions run;
  std::string delimiter = ",";
  bool no_smooth = false;
  bool keep_outliers = false;
  std::uint64_t run_seed = 0;
  auto* run_cmd = app.add_subcommand("run", "On-line phase: micro-cluster a stream and write snapshots");
  run_cmd->add_option("--input,-i", run.ingest.path, "Input file ('-' or omitted: stdin)");
  run_cmd->add_option("--layout", run.ingest.layout, "Input layout")
      ->transform(CLI::CheckedTransformer(layout_names, CLI::ignore_case));
  run_cmd->add_option("--delimiter", delimiter, "Field delimiter");
  run_cmd->add_flag("--header", run.ingest.header, "Skip the first input line");
  run_cmd->add_option("--window-size,-w", run.ingest.window_size, "Samples per window")
      ->capture_default_str();
  run_cmd->add_option("--k-max", run.store.k_max, "Maximum number of micro-clusters")
      ->capture_default_str();
  run_cmd->add_option("--t-star", run.store.t_star, "Staleness age in windows")
      ->capture_default_str();
  run_cmd->add_option("--snapshot-every", run.snapshot_every, "Snapshot interval in windows")
      ->capture_default_str();
  run_cmd->add_option("--depth", run.pipeline.depth, "Depth notion: mbd or bd")
      ->transform(CLI::CheckedTransformer(depth_names, CLI::ignore_case));
  run_cmd->add_option("--fence-factor", run.pipeline.fence.fence_factor,
                      "Outlier fence in box heights")
      ->capture_default_str();
  run_cmd->add_flag("--keep-outliers", keep_outliers, "Envelope over all curves");
  run_cmd->add_option("--basis-size", run.pipeline.smoothing.basis_size,
                      "Spline basis size (0: min(10, w-2))")
      ->capture_default_str();
  run_cmd->add_option("--lambda", run.pipeline.smoothing.penalty_lambda, "Roughness penalty")
      ->capture_default_str();
  run_cmd->add_flag("--no-smooth", no_smooth, "Use raw window values as curves");
  run_cmd->add_option("--seed", run_seed, "Accepted for symmetry; the on-line phase is deterministic");
  run_cmd->add_option("--out-dir,-o", run.out_dir, "Output directory")->capture_default_str();

  SummarizeOptions sum;
  auto* sum_cmd = app.add_subcommand("summarize", "Off-line phase: summarize a time slot");
  sum_cmd->add_option("--snapshot-dir,-s", sum.snapshot_dir, "Directory of snapshot files")
      ->required();
  sum_cmd->add_option("--from", sum.t_from, "Slot start (window index)")->required();
  sum_cmd->add_option("--to", sum.t_to, "Slot end (window index)")->required();
  sum_cmd->add_option("--clusters,-C", sum.macro.clusters, "Number of macro-clusters")
      ->capture_default_str();
  sum_cmd->add_option("--seed", sum.macro.seed, "Initialization seed")->capture_default_str();
  sum_cmd->add_option("--restarts", sum.restarts, "Seeded restarts, best criterion kept")
      ->capture_default_str();
  sum_cmd->add_option("--max-iter", sum.macro.max_iter, "Iteration cap")->capture_default_str();
  sum_cmd->add_option("--tol", sum.macro.tol, "Relative decrease stopping tolerance")
      ->capture_default_str();
  sum_cmd->add_option("--out-dir,-o", sum.out_dir, "Output directory")->capture_default_str();
  sum_cmd->add_option("--envelope-color", sum.style.envelope_color)->capture_default_str();
  sum_cmd->add_option("--region-color", sum.style.region_color)->capture_default_str();
  sum_cmd->add_option("--median-color", sum.style.median_color)->capture_default_str();

  std::size_t synth_streams = 77;
  std::size_t synth_length = 15120;
  std::size_t synth_window = 30;
  std::size_t synth_block = 7;
  std::uint64_t synth_seed = 0;
  std::string synth_output = "-";
  auto* synth_cmd =
      app.add_subcommand("synth", "Write a synthetic four-regime stream in wide layout");
  synth_cmd->add_option("--streams", synth_streams)->capture_default_str();
  synth_cmd->add_option("--length", synth_length, "Samples per stream")->capture_default_str();
  synth_cmd->add_option("--window-size,-w", synth_window)->capture_default_str();
  synth_cmd->add_option("--block", synth_block, "Windows per regime block")->capture_default_str();
  synth_cmd->add_option("--seed", synth_seed)->capture_default_str();
  synth_cmd->add_option("--output,-o", synth_output, "Output file ('-': stdout)")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return exit_code(ErrorKind::configuration);
  }

  try {
    if (*run_cmd) {
      if (delimiter.size() != 1) throw ConfigError("--delimiter must be a single character");
      run.ingest.delimiter = delimiter[0];
      run.pipeline.smoothing.enabled = !no_smooth;
      run.pipeline.fence.outlier_removal = !keep_outliers;
      const RunReport report = cmd_run(run);
      print_report(out, report);
      err << "elapsed " << report.wall_seconds << " s\n";
    } else if (*sum_cmd) {
      cmd_summarize(sum, out);
    } else if (*synth_cmd) {
      const SynthSpec spec =
          four_regime_spec(synth_streams, synth_length, synth_window, synth_block, synth_seed);
      if (synth_output == "-") {
        generate_synth(spec, out);
      } else {
        std::ofstream file(synth_output, std::ios::binary | std::ios::trunc);
        if (!file) throw ConfigError("cannot write " + synth_output);
        generate_synth(spec, file);
      }
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  }
  return 0;
}

}  // namespace fbpstream

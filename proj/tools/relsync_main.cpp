#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "relsync/codec_vectors.hpp"
#include "relsync/io.hpp"
#include "relsync/metrics.hpp"
#include "relsync/runlog.hpp"
#include "relsync/scenario_io.hpp"
#include "relsync/sim.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;   // bad flags, unreadable/invalid scenario
constexpr int kExitRuntime = 3;  // failures during simulation or reporting

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct RunArgs {
  std::string scenario_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<double> warmup;
  bool dump_events = false;
};

int cmd_run(const RunArgs& args) {
  relsync::Scenario sc;
  try {
    sc = relsync::parse_scenario(read_file(args.scenario_path));
  } catch (const relsync::ScenarioParseError& e) {
    std::cerr << args.scenario_path << ": " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitConfig;
  }
  if (args.seed) sc.seed = *args.seed;
  if (args.warmup) sc.warmup = *args.warmup;

  try {
    const relsync::RunLog log = relsync::run_simulation(sc);
    const std::filesystem::path out(args.out_dir);
    std::filesystem::create_directories(out);
    relsync::atomic_write_file(out / "runlog.csv", relsync::runlog_csv(log));
    relsync::atomic_write_file(out / "truth.csv", relsync::truth_csv(log));
    relsync::atomic_write_file(out / "ranges.csv", relsync::ranges_csv(log));
    if (args.dump_events)
      relsync::atomic_write_file(out / "events.csv", relsync::events_csv(log));

    std::string csv, table;
    try {
      const relsync::MetricsReport rep = relsync::compute_metrics(log, sc.warmup);
      csv = relsync::metrics_csv(rep);
      table = relsync::metrics_table(rep);
    } catch (const std::runtime_error&) {
      // nothing converged inside the run window; still a completed run
      csv = "agent,is_parent,samples,offset_rmse,offset_std,skew_rmse,skew_std,"
            "pos_rmse,pos_std,pos_max\n";
      table = "no valid records after warmup\n";
    }
    relsync::atomic_write_file(out / "metrics.csv", csv);
    relsync::atomic_write_file(out / "metrics.txt", table);
    std::cout << table;
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "run failed: " << e.what() << "\n";
    return kExitRuntime;
  }
}

struct MetricsArgs {
  std::string runlog_path;
  std::string truth_path;
  std::string ranges_path;
  std::string out_dir;
  double warmup = 5.0;
};

int cmd_metrics(const MetricsArgs& args) {
  try {
    const std::string runlog_text = read_file(args.runlog_path);
    const std::string truth_text = read_file(args.truth_path);
    const std::string ranges_text =
        args.ranges_path.empty() ? std::string() : read_file(args.ranges_path);
    const relsync::RunLog log =
        relsync::parse_runlog_files(runlog_text, truth_text, ranges_text);
    const relsync::MetricsReport rep = relsync::compute_metrics(log, args.warmup);
    const std::string table = relsync::metrics_table(rep);
    std::cout << table;
    if (!args.out_dir.empty()) {
      const std::filesystem::path out(args.out_dir);
      std::filesystem::create_directories(out);
      relsync::atomic_write_file(out / "metrics.csv", relsync::metrics_csv(rep));
      relsync::atomic_write_file(out / "metrics.txt", table);
    }
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "metrics failed: " << e.what() << "\n";
    return kExitRuntime;
  }
}

int cmd_gen_scenario(const std::string& tmpl, const std::string& out_path) {
  const auto sc = relsync::scenario_template(tmpl);
  if (!sc) {
    std::cerr << "unknown template '" << tmpl << "'; available:";
    for (const std::string& n : relsync::scenario_template_names()) std::cerr << " " << n;
    std::cerr << "\n";
    return kExitConfig;
  }
  try {
    relsync::atomic_write_file(out_path, relsync::scenario_text(*sc));
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitRuntime;
  }
}

int cmd_codec_vectors(const std::string& out_path) {
  try {
    relsync::atomic_write_file(out_path, relsync::codec_vectors_text());
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"broadcast relative localization and clock sync simulator"};
  app.require_subcommand(1);

  RunArgs run_args;
  CLI::App* run = app.add_subcommand("run", "simulate a scenario and write CSV logs");
  run->add_option("--scenario", run_args.scenario_path, "scenario file")->required();
  run->add_option("--out", run_args.out_dir, "output directory")->required();
  std::uint64_t seed_val = 0;
  double warmup_val = 0.0;
  CLI::Option* seed_opt = run->add_option("--seed", seed_val, "override the scenario seed");
  CLI::Option* warm_opt =
      run->add_option("--warmup", warmup_val, "override the metrics warmup, seconds");
  run->add_flag("--dump-events", run_args.dump_events, "also write events.csv");

  MetricsArgs m_args;
  CLI::App* met = app.add_subcommand("metrics", "recompute metrics from exported CSV logs");
  met->add_option("--runlog", m_args.runlog_path, "runlog.csv path")->required();
  met->add_option("--truth", m_args.truth_path, "truth.csv path")->required();
  met->add_option("--ranges", m_args.ranges_path, "ranges.csv path");
  met->add_option("--warmup", m_args.warmup, "warmup seconds to discard");
  met->add_option("--out", m_args.out_dir, "directory for metrics.csv / metrics.txt");

  std::string tmpl, gen_out;
  CLI::App* gen = app.add_subcommand("gen-scenario", "write a bundled scenario template");
  gen->add_option("--template", tmpl, "template name")->required();
  gen->add_option("--out", gen_out, "output scenario path")->required();

  std::string vec_out;
  CLI::App* vec = app.add_subcommand("codec-vectors", "write wire-format conformance vectors");
  vec->add_option("--out", vec_out, "output text path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  if (run->parsed()) {
    if (*seed_opt) run_args.seed = seed_val;
    if (*warm_opt) run_args.warmup = warmup_val;
    return cmd_run(run_args);
  }
  if (met->parsed()) return cmd_metrics(m_args);
  if (gen->parsed()) return cmd_gen_scenario(tmpl, gen_out);
  if (vec->parsed()) return cmd_codec_vectors(vec_out);
  return kExitConfig;
}

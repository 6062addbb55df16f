#include "handover/cli.hpp"

#include "handover/harness.hpp"

#include <CLI11.hpp>

#include <glob.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

namespace handover::cli {

namespace fs = std::filesystem;
using harness::AblationMode;
using harness::HandoverReport;
using harness::Scene;

namespace {

/// Configuration or usage problem; maps to exit code 1.
struct UsageError : Error {
  using Error::Error;
};

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path.string());
  out << content;
  if (!out) throw UsageError("cannot write " + path.string());
}

fs::path prepare_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw UsageError("cannot create output directory " + dir);
  const fs::path probe = fs::path(dir) / ".write_probe";
  {
    std::ofstream p(probe);
    if (!p) throw UsageError("output directory " + dir + " is not writable");
  }
  fs::remove(probe, ec);
  return dir;
}

Scene load_with_overrides(const std::string& path, const std::vector<std::string>& overrides) {
  Scene scene;
  try {
    scene = harness::load_scene(path);
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos || eq == 0) throw Error("--set expects key=value, got '" + kv + "'");
      scene.params.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    scene.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  return scene;
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string summary_line(const HandoverReport& r) {
  return "mode=" + harness::to_string(r.mode) + " seed=" + std::to_string(r.seed) +
         " vis=" + fixed6(r.visibility_median) + " reach=" + fixed6(r.reachability_median) +
         " success=" + (r.success ? "true" : "false");
}

std::vector<std::uint64_t> parse_seeds(const std::vector<std::string>& tokens) {
  std::vector<std::uint64_t> seeds;
  for (const auto& tok : tokens) {
    const auto dash = tok.find('-');
    try {
      if (dash == std::string::npos) {
        seeds.push_back(std::stoull(tok));
      } else {
        const auto lo = std::stoull(tok.substr(0, dash));
        const auto hi = std::stoull(tok.substr(dash + 1));
        if (hi < lo) throw UsageError("empty seed range '" + tok + "'");
        for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
      }
    } catch (const std::logic_error&) {
      throw UsageError("bad seed '" + tok + "'");
    }
  }
  if (seeds.empty()) throw UsageError("no seeds given");
  return seeds;
}

std::vector<std::string> expand_globs(const std::vector<std::string>& patterns) {
  std::vector<std::string> paths;
  for (const auto& pattern : patterns) {
    glob_t g{};
    if (::glob(pattern.c_str(), 0, nullptr, &g) == 0)
      for (std::size_t i = 0; i < g.gl_pathc; ++i) paths.emplace_back(g.gl_pathv[i]);
    ::globfree(&g);
  }
  std::sort(paths.begin(), paths.end());
  paths.erase(std::unique(paths.begin(), paths.end()), paths.end());
  return paths;
}

HandoverReport timed_run(const Scene& scene, AblationMode mode, std::uint64_t seed, bool timing,
                         harness::PipelineResult* detail = nullptr) {
  const auto t0 = std::chrono::steady_clock::now();
  auto result = harness::run_pipeline_detailed(scene, mode, seed);
  if (timing)
    result.report.duration_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  if (detail) *detail = result;
  return result.report;
}

void emit_diagnostics(const fs::path& out_dir, const harness::PipelineResult& result) {
  const auto& r = result.report;
  const fs::path dir = out_dir / ("diagnostics_" + r.object + "_" + harness::to_string(r.mode) + "_" +
                                  std::to_string(r.seed));
  fs::create_directories(dir);
  write_file(dir / "grasps.json", harness::grasps_to_json(result.ranked).dump(2) + "\n");
  if (result.position_plan) {
    std::ostringstream csv;
    harness::write_ergonomics_csv(csv, *result.position_plan);
    write_file(dir / "ergonomics.csv", csv.str());
  }
  if (result.handover)
    write_file(dir / "orientations.json", harness::orientation_diagnostics(*result.handover).dump(2) + "\n");
}

// ---------------------------------------------------------------------------

struct VoxelizeArgs {
  std::string mesh;
  std::string out;
  std::vector<int> dims{64};
  double padding = 0.05;
};

int cmd_voxelize(const VoxelizeArgs& a, std::ostream& out) {
  Index3 dims;
  if (a.dims.size() == 1) dims = {a.dims[0], a.dims[0], a.dims[0]};
  else if (a.dims.size() == 3) dims = {a.dims[0], a.dims[1], a.dims[2]};
  else throw UsageError("--dims takes one or three values");
  voxelgeom::VoxelGrid grid;
  try {
    grid = voxelgeom::voxelize_mesh(voxelgeom::load_obj(a.mesh), dims, a.padding);
    voxelgeom::save_vgrid(a.out, grid);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  out << "wrote " << a.out << " dims=" << dims.x << 'x' << dims.y << 'x' << dims.z
      << " voxel_size=" << voxelgeom::format_double(grid.voxel_size()) << " occupied=" << grid.occupied_count()
      << '\n';
  return kExitOk;
}

struct PlanArgs {
  std::string scene;
  std::string mode = "FULL";
  std::uint64_t seed = 0;
  std::string out = ".";
  std::vector<std::string> overrides;
  bool diagnostics = false;
  bool timing = false;
};

int cmd_plan(const PlanArgs& a, std::ostream& out, std::ostream& err) {
  AblationMode mode;
  try {
    mode = harness::parse_mode(a.mode);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  const Scene scene = load_with_overrides(a.scene, a.overrides);
  const fs::path dir = prepare_out_dir(a.out);

  harness::PipelineResult detail;
  const auto report = timed_run(scene, mode, a.seed, a.timing, &detail);
  write_file(dir / harness::report_file_name(report), harness::report_to_json(report).dump(2) + "\n");
  if (a.diagnostics) emit_diagnostics(dir, detail);
  out << summary_line(report) << '\n';
  if (!report.failure_stage.empty()) {
    err << "stage " << report.failure_stage << " failed: " << report.failure_reason << '\n';
    return kExitStage;
  }
  return kExitOk;
}

struct BenchArgs {
  std::vector<std::string> scenes;
  std::vector<std::string> modes;
  std::vector<std::string> seeds{"0-4"};
  std::string out = "bench_out";
  std::vector<std::string> overrides;
  unsigned jobs = 1;
  bool timing = false;
};

int cmd_bench(const BenchArgs& a, std::ostream& out, std::ostream& err) {
  const auto paths = expand_globs(a.scenes);
  if (paths.empty()) throw UsageError("no scenes matched");

  std::vector<AblationMode> modes;
  try {
    for (const auto& m : a.modes) modes.push_back(harness::parse_mode(m));
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  if (modes.empty()) modes = harness::all_modes();
  std::sort(modes.begin(), modes.end());
  modes.erase(std::unique(modes.begin(), modes.end()), modes.end());
  auto seeds = parse_seeds(a.seeds);
  std::sort(seeds.begin(), seeds.end());
  seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());

  std::vector<Scene> scenes;
  for (const auto& p : paths) scenes.push_back(load_with_overrides(p, a.overrides));
  std::stable_sort(scenes.begin(), scenes.end(), [](const Scene& x, const Scene& y) { return x.name < y.name; });
  for (std::size_t i = 1; i < scenes.size(); ++i)
    if (scenes[i].name == scenes[i - 1].name) throw UsageError("duplicate scene name " + scenes[i].name);
  const fs::path dir = prepare_out_dir(a.out);

  struct Job {
    const Scene* scene;
    AblationMode mode;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const auto& s : scenes)
    for (auto m : modes)
      for (auto seed : seeds) jobs.push_back({&s, m, seed});

  std::vector<HandoverReport> reports(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++)
      reports[i] = timed_run(*jobs[i].scene, jobs[i].mode, jobs[i].seed, a.timing);
  };
  const unsigned n_threads = std::max(1u, std::min<unsigned>(a.jobs, static_cast<unsigned>(jobs.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::size_t failed = 0;
  for (const auto& r : reports) {
    write_file(dir / harness::report_file_name(r), harness::report_to_json(r).dump(2) + "\n");
    if (!r.failure_stage.empty()) {
      ++failed;
      err << "warning: " << r.object << ' ' << harness::to_string(r.mode) << " seed " << r.seed << ": stage "
          << r.failure_stage << " failed: " << r.failure_reason << '\n';
    }
  }

  const auto summary = harness::aggregate(reports);
  std::ostringstream csv;
  harness::write_summary_csv(csv, summary);
  write_file(dir / "summary.csv", csv.str());
  write_file(dir / "summary.json", harness::summary_to_json(summary).dump(2) + "\n");

  char line[256];
  std::snprintf(line, sizeof line, "%-5s %10s %10s %10s %10s %8s %8s\n", "mode", "vis_mean", "vis_med", "reach_mean",
                "reach_med", "success", "obj_succ");
  out << line;
  for (const auto& m : summary.modes) {
    std::snprintf(line, sizeof line, "%-5s %10.4f %10.4f %10.4f %10.4f %8.4f %8.4f\n",
                  harness::to_string(m.mode).c_str(), m.visibility, m.visibility_median, m.reachability,
                  m.reachability_median, m.success_rate, m.object_success_rate);
    out << line;
  }
  out << reports.size() << " runs, " << failed << " stage failures, written to " << dir.string() << '\n';
  return kExitOk;
}

int cmd_suite(const std::string& out_dir, std::ostream& out) {
  prepare_out_dir(out_dir);
  for (const auto& name : harness::suite_object_names()) {
    harness::save_scene(harness::make_suite_scene(name), out_dir);
    out << "wrote " << (fs::path(out_dir) / (name + ".json")).string() << '\n';
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Human-aware robot-to-human handover planner"};
  app.name("handover");
  app.require_subcommand(1);

  VoxelizeArgs vox;
  auto* voxelize = app.add_subcommand("voxelize", "Voxelize an OBJ mesh into a VGRID file");
  voxelize->add_option("--mesh", vox.mesh, "Input OBJ mesh")->required();
  voxelize->add_option("--out", vox.out, "Output VGRID path")->required();
  voxelize->add_option("--dims", vox.dims, "Grid resolution: one value or three")->expected(1, 3);
  voxelize->add_option("--padding", vox.padding, "Relative padding around the mesh bounds");

  PlanArgs plan;
  auto* plan_cmd = app.add_subcommand("plan", "Run one handover and write its report");
  plan_cmd->add_option("--scene", plan.scene, "Scene JSON")->required();
  plan_cmd->add_option("--mode", plan.mode, "FULL, A1, A2, A3 or A4");
  plan_cmd->add_option("--seed", plan.seed, "Random seed");
  plan_cmd->add_option("--out", plan.out, "Output directory");
  plan_cmd->add_option("--set", plan.overrides, "Parameter override key=value (repeatable)");
  plan_cmd->add_flag("--emit-diagnostics", plan.diagnostics, "Dump grasp, ergonomics and orientation tables");
  plan_cmd->add_flag("--timing", plan.timing, "Record wall-clock duration in the report");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Run scenes x modes x seeds and aggregate");
  bench_cmd->add_option("--scene", bench.scenes, "Scene JSON glob (repeatable)")->required();
  bench_cmd->add_option("--modes", bench.modes, "Modes to run (default: all)")->delimiter(',');
  bench_cmd->add_option("--seeds", bench.seeds, "Seeds, e.g. 0-4 or 0,3,7")->delimiter(',');
  bench_cmd->add_option("--out", bench.out, "Output directory");
  bench_cmd->add_option("--set", bench.overrides, "Parameter override key=value (repeatable)");
  bench_cmd->add_option("--jobs", bench.jobs, "Concurrent runs")->check(CLI::PositiveNumber);
  bench_cmd->add_flag("--timing", bench.timing, "Record wall-clock durations in the reports");

  std::string suite_out = "data/suite";
  auto* suite = app.add_subcommand("suite", "Write the bundled synthetic scenes");
  suite->add_option("--out", suite_out, "Output directory");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return kExitUsage;
  }

  try {
    if (*voxelize) return cmd_voxelize(vox, out);
    if (*plan_cmd) return cmd_plan(plan, out, err);
    if (*bench_cmd) return cmd_bench(bench, out, err);
    if (*suite) return cmd_suite(suite_out, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace handover::cli

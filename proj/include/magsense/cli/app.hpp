#pragma once

// Command-line front end:
//   magnon-sense <task> --config <path> [--out <dir>] [--seed <u64>] [--format csv|json]
//   magnon-sense figure-data <fig-id> [--out <dir>] [--seed <u64>] [--format csv|json]
// Exit codes: 0 ok, 2 schema/usage error, 3 physics-domain error, 4 I/O error.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "magsense/cli/figures.hpp"
#include "magsense/cli/tasks.hpp"
#include "magsense/errors.hpp"
#include "magsense/io/config.hpp"
#include "magsense/io/envelope.hpp"

namespace magsense::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kSchema = 2,
  kDomain = 3,
  kIo = 4,
};

inline void write_artifacts(const std::vector<Artifact>& arts, const std::filesystem::path& dir,
                            const io::RunInfo& run, io::OutputFormat fmt) {
  for (const auto& a : arts) {
    const bool json = fmt == io::OutputFormat::json;
    const auto path = dir / (a.name + (json ? ".json" : ".csv"));
    io::write_atomic(path, json ? io::render_json(run, a.table) : io::render_csv(run, a.table));
  }
}

inline std::vector<Artifact> run_task(io::Task task, const io::ScenarioConfig& cfg,
                                      const RunOptions& opt) {
  switch (task) {
    case io::Task::steady_spectrum: return steady_spectrum_task(cfg);
    case io::Task::transient_spectrum: return transient_spectrum_task(cfg, opt);
    case io::Task::noise_ratio: return noise_ratio_task(cfg);
    case io::Task::snr: return snr_task(cfg);
    case io::Task::nsphere: return nsphere_task(cfg);
    case io::Task::reconstruct: return reconstruct_task(cfg, opt);
    case io::Task::sweep: return sweep_task(cfg);
    case io::Task::figure_data: break;
  }
  throw io::SchemaError("task", 0, "figure-data takes a figure id, not a config");
}

/// Runs one invocation; diagnostics go to `err`, summaries to `out`.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"Cavity-magnon magnetometry spectra, SNR and field reconstruction",
               "magnon-sense"};
  app.set_version_flag("--version", std::string(io::kToolVersion));
  std::string task_name;
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::string format;
  app.add_option("task", task_name,
                 "steady-spectrum | transient-spectrum | noise-ratio | snr | nsphere | "
                 "reconstruct | sweep | figure-data")
      ->required();
  std::string fig_id;
  app.add_option("figure", fig_id, "figure id for figure-data: fig2 | fig3 | fig4 | fig5");
  app.add_option("--config,-c", config_path, "scenario file (TOML)");
  app.add_option("--out,-o", out_dir, "output directory");
  app.add_option("--seed", seed, "random seed for Monte-Carlo work");
  app.add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kSchema;
  }

  const auto task = io::parse_task(task_name);
  if (!task) {
    err << "error: unknown task '" << task_name << "'\n";
    return kSchema;
  }

  try {
    RunOptions opt;
    opt.seed = seed;
    io::RunInfo run;
    run.task = std::string(io::to_string(*task));
    run.timestamp = io::utc_timestamp();
    io::OutputFormat fmt = io::OutputFormat::csv;
    std::vector<Artifact> arts;
    std::filesystem::path dir = out_dir.empty() ? "." : out_dir;

    if (*task == io::Task::figure_data) {
      if (!config_path.empty()) {
        err << "error: figure-data does not take --config\n";
        return kSchema;
      }
      if (fig_id.empty()) {
        err << "error: figure-data needs a figure id (fig2, fig3, fig4, fig5)\n";
        return kSchema;
      }
      run.seed = seed.value_or(0);
      run.config_hash = io::hex64(io::fnv1a("figure-data:" + fig_id));
      auto result = figure_data(fig_id, run.seed);
      if (!result) {
        err << "error: unknown figure id '" << fig_id << "' (expected fig2, fig3, fig4, fig5)\n";
        return kSchema;
      }
      arts = std::move(*result);
      for (auto& a : arts) a.table.meta("figure", fig_id);
    } else {
      if (!fig_id.empty()) {
        err << "error: unexpected argument '" << fig_id << "'\n";
        return kSchema;
      }
      if (config_path.empty()) {
        err << "error: --config is required for task '" << task_name << "'\n";
        return kSchema;
      }
      io::ScenarioConfig cfg;
      try {
        cfg = io::load_scenario(config_path);
      } catch (const std::ios_base::failure& e) {
        err << "error: " << e.what() << "\n";
        return kIo;
      }
      if (cfg.task && *cfg.task != *task) {
        err << "error: task: config declares '" << io::to_string(*cfg.task)
            << "' but the command line asks for '" << task_name << "'\n";
        return kSchema;
      }
      fmt = cfg.output.format;
      if (out_dir.empty()) {
        dir = cfg.output.dir;
        if (dir.is_relative()) dir = std::filesystem::path(config_path).parent_path() / dir;
      }
      run.seed = effective_seed(cfg, opt);
      run.config_hash = io::hex64(io::fnv1a(cfg.source_text));
      arts = run_task(*task, cfg, opt);
    }
    if (format == "csv") fmt = io::OutputFormat::csv;
    if (format == "json") fmt = io::OutputFormat::json;
    write_artifacts(arts, dir, run, fmt);
    std::size_t rows = 0;
    for (const auto& a : arts) rows += a.table.rows.size();
    out << run.task << (fig_id.empty() ? "" : " " + fig_id) << ": wrote " << arts.size()
        << " artifact(s), " << rows << " row(s) to " << dir.string() << "\n";
    return kOk;
  } catch (const io::SchemaError& e) {
    err << "schema error: " << e.what() << "\n";
    return kSchema;
  } catch (const io::UnitError& e) {
    err << "schema error: " << e.what() << "\n";
    return kSchema;
  } catch (const PlanError& e) {
    err << "schema error: " << e.what() << "\n";
    return kSchema;
  } catch (const EstimationError& e) {
    err << "estimation error: " << e.what() << "\n";
    return kDomain;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << "\n";
    return kDomain;
  } catch (const io::IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace magsense::cli

#include "taxis/harness/runner.hpp"

#include <cstdio>
#include <iostream>
#include <sstream>

#include "taxis/harness/io.hpp"

namespace taxis::harness {

int exit_code_for(const Error& e) {
  const std::string c = e.category();
  if (c == "config") return kExitConfig;
  if (c == "blowup") return kExitBlowup;
  if (c == "io") return kExitIo;
  return kExitSolver;
}

namespace {

std::filesystem::path output_dir(const RunConfig& cfg, const RunOptions& opts) {
  return opts.out_dir ? *opts.out_dir : std::filesystem::path(cfg.output_dir);
}

std::ostream& log_stream(const RunOptions& opts) { return opts.log ? *opts.log : std::cerr; }

void prepare_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw IoError("cannot create output directory '" + dir.string() + "'");
}

std::string snapshot_name(std::size_t k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snap_%05zu.csv", k);
  return buf;
}

Summary base_summary(const RunConfig& cfg, const char* command) {
  Summary s;
  s.set("command", command);
  s.set("model", to_string(cfg.model));
  s.set("variant", to_string(cfg.variant));
  s.set("digest", config_digest(cfg));
  s.set("grid", cfg.grid.describe());
  s.set("t_end", cfg.time.t_end);
  return s;
}

template <typename Fn>
RunOutcome guarded(const std::filesystem::path& dir, Fn&& fn) {
  RunOutcome out;
  out.dir = dir;
  try {
    fn(out);
  } catch (const Error& e) {
    out.exit_code = exit_code_for(e);
    out.status = e.category();
    out.message = e.what();
  }
  return out;
}

}  // namespace

InitialData<double> initial_data_from(const RunConfig& cfg) {
  return build_initial_data<double>(cfg.ic, cfg.grid, cfg.params, cfg.compatibility, cfg.w0);
}

Trajectory<double> solve_from_config(const RunConfig& cfg) {
  const Variant v = cfg.variant == RunVariant::Limit ? Variant::Limit : Variant::Indirect;
  return solve(initial_data_from(cfg), cfg.params, cfg.time, v);
}

SweepReport sweep_from_config(const RunConfig& cfg) {
  SweepSpec spec{cfg.params, cfg.time, cfg.eps_list, cfg.threads};
  return epsilon_sweep(initial_data_from(cfg), spec);
}

MmsReport mms_from_config(const RunConfig& cfg) {
  const Variant v = cfg.variant == RunVariant::Limit ? Variant::Limit : Variant::Indirect;
  const double dt0 = cfg.time.fixed_dt ? *cfg.time.fixed_dt : cfg.time.dt_max;
  return mms_study<double>(cfg.grid, dt0, cfg.mms.levels, cfg.time.t_end, cfg.params, v);
}

RunOutcome run(const RunConfig& cfg, const RunOptions& opts) {
  if (cfg.variant == RunVariant::Sweep) return run_sweep(cfg, opts);
  if (cfg.mms.enabled) return run_mms(cfg, opts);
  const auto dir = output_dir(cfg, opts);
  return guarded(dir, [&](RunOutcome& out) {
    prepare_dir(dir);
    const bool predprey = cfg.model == ModelKind::PredPrey;
    const std::string digest = config_digest(cfg);
    if (!opts.quiet)
      log_stream(opts) << "run: " << to_string(cfg.model) << "/" << to_string(cfg.variant) << " on "
                       << cfg.grid.describe() << " to t=" << cfg.time.t_end << "\n";
    const Trajectory<double> traj = solve_from_config(cfg);
    for (std::size_t k = 0; k < traj.snapshots.size(); ++k)
      write_snapshot(dir / "snapshots" / snapshot_name(k), traj.snapshots[k], digest, predprey);
    write_diagnostics_csv(dir / "diagnostics.csv", traj.diagnostics, traj.snapshots.front().is_triple(),
                          predprey);
    const InvariantReport inv = monitor_invariants(traj, cfg.params);
    Summary s = base_summary(cfg, "run");
    s.set("status", inv.passed() ? "ok" : "violations");
    s.set("steps", static_cast<int>(traj.diagnostics.size()) - 1);
    s.set("snapshots", static_cast<int>(traj.snapshots.size()));
    s.set("final_time", traj.final_state().time);
    add_invariants(s, "", inv);
    s.write(dir / "summary.txt");
    out.status = inv.passed() ? "ok" : "violations";
    if (!opts.quiet)
      log_stream(opts) << "run: " << traj.diagnostics.size() - 1 << " steps, status " << out.status << "\n";
  });
}

RunOutcome run_sweep(const RunConfig& cfg, const RunOptions& opts) {
  const auto dir = output_dir(cfg, opts);
  return guarded(dir, [&](RunOutcome& out) {
    RunConfig c = cfg;
    c.variant = RunVariant::Sweep;
    validate_eps_list(c.eps_list);
    prepare_dir(dir);
    if (!opts.quiet)
      log_stream(opts) << "sweep: " << to_string(c.model) << ", " << c.eps_list.size() << " eps values on "
                       << c.grid.describe() << "\n";
    const SweepReport rep = sweep_from_config(c);
    write_sweep_csv(dir / "sweep_report.csv", rep);

    Summary fits;
    fits.set("digest", config_digest(c));
    fits.set("dt", rep.dt);
    fits.set("steps", rep.steps);
    for (const auto& f : rep.fits) {
      fits.set("order." + f.channel, f.order ? format_value(*f.order) : std::string("below_floor"));
      fits.set("order_status." + f.channel, f.status);
    }
    fits.write(dir / "sweep_summary.txt");

    Summary s = base_summary(c, "sweep");
    const bool ok = rep.invariants_passed();
    s.set("status", ok ? "ok" : "violations");
    s.set("runs", static_cast<int>(rep.rows.size()) + 1);
    s.set("dt", rep.dt);
    s.set("steps", rep.steps);
    for (const auto& f : rep.fits)
      s.set("order." + f.channel, f.order ? format_value(*f.order) : std::string("below_floor"));
    add_invariants(s, "limit.", rep.limit_invariants);
    for (const auto& r : rep.rows) add_invariants(s, "eps=" + format_number(r.eps) + ".", r.invariants);
    s.write(dir / "summary.txt");
    out.status = ok ? "ok" : "violations";
    if (!opts.quiet) {
      auto& log = log_stream(opts);
      for (const auto& f : rep.fits)
        log << "  order " << f.channel << " = " << (f.order ? format_value(*f.order) : "below floor") << " ("
            << f.status << ")\n";
    }
  });
}

RunOutcome run_mms(const RunConfig& cfg, const RunOptions& opts) {
  const auto dir = output_dir(cfg, opts);
  return guarded(dir, [&](RunOutcome& out) {
    prepare_dir(dir);
    if (!opts.quiet) log_stream(opts) << "mms: " << cfg.mms.levels << " refinement levels\n";
    const MmsReport rep = mms_from_config(cfg);
    write_mms_csv(dir / "mms_report.csv", rep);
    Summary s = base_summary(cfg, "mms");
    s.set("status", "ok");
    s.set("levels", static_cast<int>(rep.levels.size()));
    for (std::size_t k = 0; k < rep.levels.size(); ++k)
      s.set("linf_error." + std::to_string(rep.levels[k].n), rep.levels[k].linf_error);
    s.set("order", rep.order);
    s.write(dir / "summary.txt");
    out.status = "ok";
    if (!opts.quiet) log_stream(opts) << "mms: observed order " << format_value(rep.order) << "\n";
  });
}

}  // namespace taxis::harness

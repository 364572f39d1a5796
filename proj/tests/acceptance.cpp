// Acceptance checks. One PASS/FAIL line per criterion; exit status is the
// number of failed criteria (capped at 1).
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "taxis/harness/config.hpp"
#include "taxis/harness/runner.hpp"
#include "taxis/integrator.hpp"
#include "taxis/operators.hpp"

using namespace taxis;
using namespace taxis::harness;
namespace fs = std::filesystem;
using std::numbers::pi;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(double x, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", prec, x);
  return buf;
}

RunConfig load(const char* name) { return load_config((fs::path(TAXIS_SOURCE_DIR) / "configs" / name).string()); }

double order_of(const SweepReport& rep, const char* ch) {
  const FitResult* f = rep.fit(ch);
  return f && f->order ? *f->order : std::nan("");
}

bool in_band(double x) { return x >= 0.75 && x <= 1.25; }

double min_field(const SweepReport& rep) {
  double m = 1e300;
  auto take = [&](const InvariantReport& r) {
    for (int k = 0; k < r.fields; ++k) m = std::min(m, r.min_values[k]);
  };
  take(rep.limit_invariants);
  for (const auto& row : rep.rows) take(row.invariants);
  return m;
}

double max_vinf(const SweepReport& rep) {
  double m = 0.0;
  auto take = [&](const InvariantReport& r) {
    if (const auto* c = r.find("Linf(v)")) m = std::max(m, c->observed);
  };
  take(rep.limit_invariants);
  for (const auto& row : rep.rows) take(row.invariants);
  return m;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main() {
  try {
    // 1. competition sweep
    const RunConfig comp = load("competition_sweep.toml");
    auto t0 = std::chrono::steady_clock::now();
    const SweepReport cs = sweep_from_config(comp);
    const double comp_secs = seconds_since(t0);
    const double pp1 = order_of(cs, "sup_t_L2_u"), pp2 = order_of(cs, "sup_t_H1_v"),
                 pp3 = order_of(cs, "sup_t_L2_grad_v_minus_grad_w");
    report(1, in_band(pp1) && in_band(pp2) && in_band(pp3) && comp_secs <= 120.0,
           "orders sup_t_L2_u=" + fmt(pp1) + " sup_t_H1_v=" + fmt(pp2) + " sup_t_L2_grad_v_minus_grad_w=" + fmt(pp3) +
               " (band [0.75,1.25]), runtime " + fmt(comp_secs, 3) + " s");

    // 2. predator-prey sweep
    const RunConfig pred = load("predprey_sweep.toml");
    t0 = std::chrono::steady_clock::now();
    const SweepReport ps = sweep_from_config(pred);
    const double pred_secs = seconds_since(t0);
    const double pz = order_of(ps, "sup_t_L2_u");
    report(2, in_band(pz) && pred_secs <= 120.0,
           "order sup_t_L2_z=" + fmt(pz) + " (band [0.75,1.25]), runtime " + fmt(pred_secs, 3) + " s");

    // 3. chi = 0 decoupling, same IC and step sequence
    {
      double worst = 0.0;
      for (const RunConfig* base : {&comp, &pred}) {
        for (double eps : base->eps_list) {
          RunConfig c = *base;
          std::visit([&](auto& p) { p.chi = 0.0; p.eps = eps; }, c.params);
          c.time.fixed_dt = cs.dt;
          c.time.snapshot_stride = 1 << 30;
          c.variant = RunVariant::Indirect;
          const auto a = solve_from_config(c);
          c.variant = RunVariant::Limit;
          const auto b = solve_from_config(c);
          worst = std::max(worst, norm_lp(a.final_state().u - b.final_state().u, Norm::Linf));
          worst = std::max(worst, norm_lp(a.final_state().v - b.final_state().v, Norm::Linf));
        }
      }
      report(3, worst <= 1e-7, "max final Linf gap over both models and all eps = " + fmt(worst) + " (tol 1e-7)");
    }

    // 4. logistic bound on v, relaxation bound on w
    {
      const double vinf = std::max(max_vinf(cs), max_vinf(ps));
      const GridSpec g = GridSpec::line(16);
      bool relax_ok = true;
      double worst_excess = -1e300;
      for (double eps : {1e-1, 1e-2, 1e-3}) {
        CompetitionParams p;
        p.eps = eps;
        const InitialData<double> ic{Field<double>::constant(g, 0.0), Field<double>::constant(g, 1.0),
                                     Field<double>::constant(g, 0.0), false};
        for (double dt : {1e-2, 1e-3}) {
          TimeSpec ts;
          ts.t_end = 0.5;
          ts.fixed_dt = dt;
          const auto traj = solve(ic, ModelParams{p}, ts, Variant::Indirect);
          // v stays at 1; w relaxes towards it, the bound is 1 - exp(-t/eps) + C dt
          for (const auto& d : traj.diagnostics) {
            const double bound = 1.0 + (0.0 - 1.0) * std::exp(-d.t / eps);
            worst_excess = std::max(worst_excess, (d.max[2] - bound) / dt);
          }
          relax_ok = relax_ok && monitor_invariants(traj, ModelParams{p}).passed();
        }
      }
      relax_ok = relax_ok && worst_excess <= 1.0;
      report(4, vinf <= 1.0 + 1e-8 && relax_ok,
             "sup ||v||_inf = " + fmt(vinf, 12) + " (bound 1+1e-8), relaxation excess/dt = " + fmt(worst_excess) +
                 (relax_ok ? " within bound" : " exceeds bound"));
    }

    // 5. final gradient gap decay within the competition sweep
    {
      bool monotone = true;
      for (std::size_t k = 1; k < cs.rows.size(); ++k)
        monotone = monotone && cs.rows[k].final_grad_gap_sq < cs.rows[k - 1].final_grad_gap_sq;
      const double o = order_of(cs, "final_grad_gap_sq");
      report(5, monotone && o >= 0.75,
             std::string(monotone ? "monotone" : "not monotone") + " in eps, order " + fmt(o) + " (need >= 0.75)");
    }

    // 6. positivity and discrete conservation
    {
      const double mn = std::min(min_field(cs), min_field(ps));
      std::mt19937_64 rng(6);
      std::uniform_real_distribution<double> dist(0.0, 1.0);
      double worst_ratio = 0.0;
      for (int k = 0; k < 1000; ++k) {
        const GridSpec g = k % 2 ? GridSpec::line(128) : GridSpec::rect(20, 14, 1.0, 1.5);
        Eigen::VectorXd fv(g.size()), wv(g.size());
        for (auto& x : fv) x = dist(rng);
        for (auto& x : wv) x = dist(rng);
        const Field<double> f(g, fv), w(g, wv);
        const double scale = norm_lp(f, Norm::L2);
        worst_ratio = std::max(worst_ratio, std::abs(integrate(laplacian_neumann(f))) / scale);
        worst_ratio = std::max(worst_ratio, std::abs(integrate(taxis_divergence(f, w, 1.0, k % 3 ? 1 : -1))) / scale);
      }
      report(6, mn >= -1e-10 && worst_ratio <= 1e-12,
             "min field value " + fmt(mn) + " (>= -1e-10), max |integral|/||f|| " + fmt(worst_ratio) + " (<= 1e-12)");
    }

    // 7. manufactured solution order and heat kernel decay
    {
      RunConfig m = load("mms_competition.toml");
      const MmsReport mr = mms_from_config(m);
      const GridSpec g = GridSpec::line(256);
      CompetitionParams p;
      p.chi = 0.0;
      const auto u0 = Field<double>::sample(g, [](double x) { return std::cos(pi * x); });
      State<double> s(u0, Field<double>::constant(g, 0.0), std::nullopt, 0.0);
      ImexStepper<double> stepper(g, ModelParams{p}, {}, false);
      for (int k = 0; k < 1000; ++k) s = stepper.step(s, 1e-4);
      const double decay = std::exp(-pi * pi * 0.1);
      const double rel = norm_lp(s.u - decay * u0, Norm::Linf) / decay;
      report(7, mr.order >= 1.0 && rel <= 0.01,
             "MMS order " + fmt(mr.order) + " (need >= 1), heat decay relative error " + fmt(rel) + " (<= 1%)");
    }

    // 8. determinism of the criterion 1 reports
    {
      const fs::path root = fs::temp_directory_path() / "taxis_acceptance";
      fs::remove_all(root);
      bool same = true;
      RunOptions oa{root / "a", true, nullptr}, ob{root / "b", true, nullptr};
      const auto ra = run_sweep(comp, oa), rb = run_sweep(comp, ob);
      same = ra.exit_code == kExitOk && rb.exit_code == kExitOk;
      for (const char* f : {"sweep_report.csv", "sweep_summary.txt", "summary.txt"}) {
        const std::string a = slurp(root / "a" / f);
        same = same && !a.empty() && a == slurp(root / "b" / f);
      }
      report(8, same, same ? "repeated sweep reports are byte identical" : "repeated sweep reports differ");
    }
  } catch (const std::exception& e) {
    std::printf("[FAIL] acceptance aborted: %s\n", e.what());
    return 1;
  }
  std::printf("%d criteria failed\n", failures);
  return failures ? 1 : 0;
}

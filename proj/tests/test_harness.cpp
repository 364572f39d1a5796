#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "taxis/harness/config.hpp"
#include "taxis/harness/io.hpp"
#include "taxis/harness/runner.hpp"

using namespace taxis;
using namespace taxis::harness;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "taxis_tests" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

const char* kSmall = R"(
[model]
type = competition
variant = indirect
[grid]
n = 32
[time]
t_end = 0.05
snapshot_stride = 2
)";

}  // namespace

TEST_CASE("minimal config gets documented defaults") {
  const RunConfig c = parse_config("[grid]\nn = 128\n[time]\nt_end = 1\n");
  CHECK(c.model == ModelKind::Competition);
  CHECK(c.variant == RunVariant::Indirect);
  CHECK(c.grid == GridSpec::line(128));
  CHECK(c.time.cfl_adv == 0.5);
  CHECK(c.time.snapshot_stride == 10);
  CHECK(c.compatibility);
  const auto& p = std::get<CompetitionParams>(c.params);
  CHECK(p.mu1 == 1.0);
  CHECK(p.a1 == 0.5);
  CHECK(p.chi == 1.0);
  CHECK(p.eps == 0.01);
}

TEST_CASE("config errors name the line and key") {
  const std::string e = config_error("[grid]\nn = 64\n\n[params]\neps = 2\n");
  CHECK(e.find("line 5") != std::string::npos);
  CHECK(e.find("eps") != std::string::npos);
  CHECK(config_error("[grid]\nbogus = 1\n").find("unknown key 'bogus'") != std::string::npos);
  CHECK(config_error("[grid]\nn = 1\nn = 2\n").find("duplicate") != std::string::npos);
  CHECK(config_error("[grid]\nn = abc\n").find("line 2") != std::string::npos);
  CHECK(config_error("[nosuch]\n").size() > 0);
  CHECK(config_error("[params]\nresponse = holling3\n").size() > 0);  // not a predprey key here
  CHECK(config_error("[model]\ntype = predprey\n[params]\nresponse = holling3\nm = 0\n").size() > 0);
  CHECK(config_error("[sweep]\neps = [1e-2, 1e-1, 1e-3]\n").size() > 0);
  CHECK(config_error("[time]\ncfl_adv = 1.5\n").size() > 0);
  CHECK(config_error("[ic]\nfamily = gaussian_bump\nfloor = 0\namplitude = -1\n").size() > 0);
}

TEST_CASE("sweep section implies sweep variant") {
  const RunConfig c = parse_config("[sweep]\neps = [1e-1, 1e-2, 1e-3]\n");
  CHECK(c.variant == RunVariant::Sweep);
  CHECK(c.eps_list.size() == 3);
  CHECK(c.eps_list[2] == 1e-3);
}

TEST_CASE("config round trip") {
  RunConfig a = parse_config(kSmall);
  CHECK(parse_config(serialize_config(a)) == a);

  const RunConfig b = parse_config(R"(
# 2D predator prey
[model]
type = predprey
variant = limit
[grid]
dim = 2
n = [24, 12]
length = [2, 1.5]
[time]
t_end = 0.3
dt_max = 1e-3
fixed_dt = 7e-4
[params]
mu1 = -0.35
response = holling3
c = 0.7
m = 2.5
eps = 0.1
[ic]
family = gaussian_bump
center = [1, 0.5]
width = 0.2
amplitude = 0.8
floor = 0.05
compatibility = false
w0 = 0.3
[sweep]
threads = 2
[output]
dir = out/pp2d
[mms]
enabled = true
levels = 5
)");
  CHECK(parse_config(serialize_config(b)) == b);
  CHECK(serialize_config(parse_config(serialize_config(b))) == serialize_config(b));
  CHECK(std::get<PredPreyParams>(b.params).response.kind == ResponseKind::Holling3);
}

TEST_CASE("config digest") {
  RunConfig a = parse_config(kSmall);
  RunConfig b = a;
  b.output_dir = "elsewhere";
  CHECK(config_digest(a) == config_digest(b));
  CHECK(config_digest(a).size() == 16);
  b.time.t_end = 0.06;
  CHECK(config_digest(a) != config_digest(b));
}

TEST_CASE("format_number round trips") {
  for (double x : {0.1, 1e-300, 3.0, -2.5e-7, 1.0 / 3.0}) CHECK(std::stod(format_number(x)) == x);
  CHECK(format_number(0.01) == "0.01");
}

TEST_CASE("snapshot write, read and compare") {
  const fs::path dir = scratch("snap");
  const GridSpec g = GridSpec::rect(5, 4);
  const auto u = Field<double>::sample(g, [](double x, double y) { return x + 1.0 / 3.0 * y; });
  const State<double> s(u, 2.0 * u, u, 0.125);
  write_snapshot(dir / "a.csv", s, "0123456789abcdef", false);
  const auto a = read_snapshot(dir / "a.csv");
  CHECK(a.columns == std::vector<std::string>{"x", "y", "u", "v", "w"});
  CHECK(a.header.at("time") == "0.125");
  CHECK(a.header.at("digest") == "0123456789abcdef");
  REQUIRE(a.rows.size() == 20);
  CHECK(a.rows[7][2] == u[7]);  // bit-exact

  const auto self = compare_snapshots(a, a, 0.0);
  CHECK(self.passed);
  CHECK(self.worst_diff == 0.0);

  Eigen::VectorXd bumped = u.values();
  bumped[13] += 1e-3;
  write_snapshot(dir / "b.csv", State<double>(Field<double>(g, bumped), 2.0 * u, u, 0.125), "x", false);
  const auto cmp = compare_snapshots(a, read_snapshot(dir / "b.csv"), 1e-6);
  CHECK_FALSE(cmp.passed);
  CHECK(cmp.worst_column == "u");
  CHECK(cmp.worst_row == 13);
  CHECK(cmp.worst_diff == doctest::Approx(1e-3));
  REQUIRE(cmp.worst_coords.size() == 2);
  CHECK(cmp.worst_coords[0] == doctest::Approx(g.center(0, 3)));
  CHECK(cmp.worst_coords[1] == doctest::Approx(g.center(1, 2)));
  CHECK(compare_snapshots(a, read_snapshot(dir / "b.csv"), 1e-6, {"v", "w"}).passed);

  write_snapshot(dir / "c.csv", State<double>(Field<double>::constant(GridSpec::line(20), 1.0),
                                              Field<double>::constant(GridSpec::line(20), 1.0), std::nullopt, 0.0),
                 "x", true);
  const auto c = read_snapshot(dir / "c.csv");
  CHECK(c.columns == std::vector<std::string>{"x", "z", "v"});
  CHECK_THROWS_AS(compare_snapshots(a, c, 1.0), AlignmentError);
  CHECK_THROWS_AS(read_snapshot(dir / "missing.csv"), IoError);
  std::ofstream(dir / "junk.csv") << "# columns = x,u\n0.1,abc\n";
  CHECK_THROWS_AS(read_snapshot(dir / "junk.csv"), IoError);
}

TEST_CASE("run writes snapshots, diagnostics and summary") {
  const fs::path dir = scratch("run");
  RunConfig cfg = parse_config(kSmall);
  RunOptions opts;
  opts.out_dir = dir;
  opts.quiet = true;
  const RunOutcome out = run(cfg, opts);
  CHECK(out.exit_code == kExitOk);
  CHECK(out.status == "ok");
  CHECK(fs::exists(dir / "diagnostics.csv"));
  CHECK(fs::exists(dir / "snapshots" / "snap_00000.csv"));
  const std::string summary = slurp(dir / "summary.txt");
  CHECK(summary.find("status = ok") != std::string::npos);
  CHECK(summary.find("invariants = pass") != std::string::npos);
  CHECK(summary.find("digest = " + config_digest(cfg)) != std::string::npos);
}

TEST_CASE("run with t_end = 0 writes the initial data") {
  const fs::path dir = scratch("t0");
  RunConfig cfg = parse_config(kSmall);
  cfg.time.t_end = 0.0;
  RunOptions opts{dir, true, nullptr};
  REQUIRE(run(cfg, opts).exit_code == kExitOk);
  int files = 0;
  for (const auto& e : fs::directory_iterator(dir / "snapshots")) files += e.is_regular_file();
  CHECK(files == 1);
  const auto snap = read_snapshot(dir / "snapshots" / "snap_00000.csv");
  const auto ic = initial_data_from(cfg);
  for (std::size_t k = 0; k < ic.u0.size(); ++k) {
    CHECK(snap.rows[k][1] == ic.u0[k]);
    CHECK(snap.rows[k][2] == ic.v0[k]);
    CHECK(snap.rows[k][3] == ic.w0[k]);
  }
}

TEST_CASE("repeated runs are byte identical") {
  RunConfig cfg = parse_config(kSmall);
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  run(cfg, {a, true, nullptr});
  run(cfg, {b, true, nullptr});
  for (const char* f : {"diagnostics.csv", "summary.txt", "snapshots/snap_00002.csv"}) {
    CAPTURE(f);
    CHECK(slurp(a / f) == slurp(b / f));
    CHECK_FALSE(slurp(a / f).empty());
  }
}

TEST_CASE("chi = 0 indirect and limit runs agree through compare") {
  RunConfig cfg = parse_config(kSmall);
  std::get<CompetitionParams>(cfg.params).chi = 0.0;
  cfg.time.snapshot_stride = 1000;
  const fs::path a = scratch("dec_a"), b = scratch("dec_b");
  run(cfg, {a, true, nullptr});
  cfg.variant = RunVariant::Limit;
  run(cfg, {b, true, nullptr});
  const auto fa = read_snapshot(a / "snapshots" / "snap_00001.csv");
  const auto fb = read_snapshot(b / "snapshots" / "snap_00001.csv");
  CHECK(compare_snapshots(fa, fb, 1e-7, {"u", "v"}).passed);
  CHECK(compare_snapshots(fa, fb, 1e-7).passed);  // shared columns only
}

TEST_CASE("sweep and mms runs write their reports") {
  RunConfig cfg = parse_config(std::string(kSmall) + "[sweep]\neps = [0.1, 0.03, 0.01]\n");
  cfg.variant = RunVariant::Sweep;
  const fs::path dir = scratch("sweep");
  REQUIRE(run(cfg, {dir, true, nullptr}).exit_code == kExitOk);
  std::ifstream in(dir / "sweep_report.csv");
  int lines = 0;
  for (std::string l; std::getline(in, l);) ++lines;
  CHECK(lines == 4);
  const std::string summary = slurp(dir / "summary.txt");
  CHECK(summary.find("order.sup_t_L2_u = ") != std::string::npos);
  CHECK(summary.find("order.sup_t_H1_v = ") != std::string::npos);
  CHECK(summary.find("eps=0.03.invariants = pass") != std::string::npos);

  RunConfig m = parse_config(kSmall);
  m.mms.enabled = true;
  m.mms.levels = 3;
  m.time.fixed_dt = 4e-3;
  const fs::path md = scratch("mms");
  REQUIRE(run(m, {md, true, nullptr}).exit_code == kExitOk);
  CHECK(slurp(md / "mms_report.csv").rfind("n,h,dt,linf_error", 0) == 0);
  CHECK(slurp(md / "summary.txt").find("order = ") != std::string::npos);
}

TEST_CASE("run failures map to exit codes") {
  const fs::path dir = scratch("fail");
  std::ofstream(dir / "occupied") << "x";
  RunConfig cfg = parse_config(kSmall);
  const RunOutcome io = run(cfg, {dir / "occupied", true, nullptr});
  CHECK(io.exit_code == kExitIo);
  CHECK(io.status == "io");

  cfg.variant = RunVariant::Sweep;
  cfg.eps_list = {0.1};
  const RunOutcome fit = run(cfg, {dir / "sweep", true, nullptr});
  CHECK(fit.exit_code == kExitSolver);

  CHECK(exit_code_for(ConfigError("x")) == kExitConfig);
  CHECK(exit_code_for(BlowupError("x")) == kExitBlowup);
  CHECK(exit_code_for(AlignmentError("x")) == kExitSolver);
  CHECK_THROWS_AS(load_config((dir / "nope.toml").string()), IoError);
}

#include "taxis/harness/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace taxis::harness {

std::string format_value(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

void close_checked(std::ofstream& out, const std::filesystem::path& path) {
  out.close();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    out.push_back(trim(item));
  }
  return out;
}

bool is_coordinate(const std::string& c) { return c == "x" || c == "y"; }

}  // namespace

void write_snapshot(const std::filesystem::path& path, const State<double>& s, const std::string& digest,
                    bool predprey) {
  std::ofstream out = open_out(path);
  const GridSpec& g = s.grid();
  out << "# time = " << format_value(s.time) << "\n";
  out << "# grid = " << g.describe() << "\n";
  out << "# digest = " << digest << "\n";
  out << "# columns = x" << (g.dim() == 2 ? ",y" : "") << (predprey ? ",z" : ",u") << ",v"
      << (s.w ? ",w" : "") << "\n";
  for (int j = 0; j < g.n(1); ++j)
    for (int i = 0; i < g.n(0); ++i) {
      const std::size_t k = g.index(i, j);
      out << format_value(g.center(0, i));
      if (g.dim() == 2) out << ',' << format_value(g.center(1, j));
      out << ',' << format_value(s.u[k]) << ',' << format_value(s.v[k]);
      if (s.w) out << ',' << format_value((*s.w)[k]);
      out << '\n';
    }
  close_checked(out, path);
}

SnapshotData read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read snapshot '" + path.string() + "'");
  SnapshotData data;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      const std::string k = trim(line.substr(1, eq - 1));
      const std::string v = trim(line.substr(eq + 1));
      data.header[k] = v;
      if (k == "columns") data.columns = split(v, ',');
      continue;
    }
    if (data.columns.empty()) throw IoError(path.string() + ": data before '# columns' header");
    std::vector<double> row;
    for (const auto& cell : split(line, ',')) {
      double x = 0.0;
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), x);
      if (ec != std::errc() || ptr != cell.data() + cell.size())
        throw IoError(path.string() + ":" + std::to_string(line_no) + ": bad number '" + cell + "'");
      row.push_back(x);
    }
    if (row.size() != data.columns.size())
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": wrong column count");
    data.rows.push_back(std::move(row));
  }
  if (data.columns.empty()) throw IoError(path.string() + ": missing '# columns' header");
  return data;
}

CompareResult compare_snapshots(const SnapshotData& a, const SnapshotData& b, double tol,
                                const std::vector<std::string>& only_columns) {
  if (a.rows.size() != b.rows.size()) throw AlignmentError("snapshot grids differ in cell count");
  auto col_index = [](const SnapshotData& d, const std::string& name) -> std::ptrdiff_t {
    for (std::size_t k = 0; k < d.columns.size(); ++k)
      if (d.columns[k] == name) return static_cast<std::ptrdiff_t>(k);
    return -1;
  };
  std::vector<std::size_t> coords_a;
  for (std::size_t k = 0; k < a.columns.size(); ++k) {
    if (!is_coordinate(a.columns[k])) continue;
    const auto kb = col_index(b, a.columns[k]);
    if (kb < 0) throw AlignmentError("snapshot grids differ in dimension");
    for (std::size_t r = 0; r < a.rows.size(); ++r)
      if (std::abs(a.rows[r][k] - b.rows[r][static_cast<std::size_t>(kb)]) > 1e-12)
        throw AlignmentError("snapshot cell centers differ");
    coords_a.push_back(k);
  }

  CompareResult res;
  res.tolerance = tol;
  res.worst_diff = -1.0;
  std::vector<std::string> names = only_columns;
  if (names.empty())
    for (const auto& c : a.columns)
      if (!is_coordinate(c) && col_index(b, c) >= 0) names.push_back(c);
  for (const auto& name : names) {
    const auto ka = col_index(a, name), kb = col_index(b, name);
    if (ka < 0 || kb < 0) throw AlignmentError("column '" + name + "' missing from a snapshot");
    ColumnDiff d{name, 0.0, 0};
    for (std::size_t r = 0; r < a.rows.size(); ++r) {
      const double diff = std::abs(a.rows[r][static_cast<std::size_t>(ka)] - b.rows[r][static_cast<std::size_t>(kb)]);
      if (diff > d.max_abs_diff || !(diff == diff)) {
        d.max_abs_diff = diff;
        d.worst_row = r;
      }
    }
    if (d.max_abs_diff > res.worst_diff) {
      res.worst_diff = d.max_abs_diff;
      res.worst_column = name;
      res.worst_row = d.worst_row;
    }
    if (!(d.max_abs_diff <= tol)) res.passed = false;
    res.columns.push_back(d);
  }
  if (res.columns.empty()) throw AlignmentError("snapshots share no data columns");
  for (std::size_t k : coords_a) res.worst_coords.push_back(a.rows[res.worst_row][k]);
  return res;
}

void write_diagnostics_csv(const std::filesystem::path& path, const std::vector<StepDiagnostics>& diag,
                           bool triple, bool predprey) {
  std::ofstream out = open_out(path);
  const char* first = predprey ? "z" : "u";
  std::vector<std::string> fields{first, "v"};
  if (triple) fields.push_back("w");
  out << "step,t,dt,max_velocity";
  for (const auto& f : fields) out << ",min_" << f << ",max_" << f << ",mass_" << f << ",l2sq_" << f;
  out << ",grad_v_sq";
  if (triple) out << ",grad_w_minus_v";
  out << ",cfl_exceeded\n";
  for (const auto& d : diag) {
    out << d.step << ',' << format_value(d.t) << ',' << format_value(d.dt) << ',' << format_value(d.max_velocity);
    for (std::size_t f = 0; f < fields.size(); ++f)
      out << ',' << format_value(d.min[f]) << ',' << format_value(d.max[f]) << ',' << format_value(d.mass[f])
          << ',' << format_value(d.l2_sq[f]);
    out << ',' << format_value(d.grad_v_sq);
    if (triple) out << ',' << format_value(d.grad_gap);
    out << ',' << (d.cfl_exceeded ? 1 : 0) << '\n';
  }
  close_checked(out, path);
}

void write_sweep_csv(const std::filesystem::path& path, const SweepReport& rep) {
  std::ofstream out = open_out(path);
  out << "eps,sup_t_L2_u,L2T_H1_u,sup_t_H1_v,sup_t_L2_grad_v_minus_grad_w,final_grad_gap_sq,violations\n";
  for (const auto& r : rep.rows) {
    out << format_value(r.eps) << ',' << format_value(r.norms.sup_t_L2_u) << ','
        << format_value(r.norms.L2T_H1_u) << ',' << format_value(r.norms.sup_t_H1_v) << ','
        << format_value(r.norms.sup_t_L2_grad_v_minus_grad_w) << ',' << format_value(r.final_grad_gap_sq)
        << ',' << r.invariants.violations.size() << '\n';
  }
  close_checked(out, path);
}

void write_mms_csv(const std::filesystem::path& path, const MmsReport& rep) {
  std::ofstream out = open_out(path);
  out << "n,h,dt,linf_error,cfl_exceeded_steps\n";
  for (const auto& l : rep.levels)
    out << l.n << ',' << format_value(l.h) << ',' << format_value(l.dt) << ',' << format_value(l.linf_error)
        << ',' << l.cfl_exceeded_steps << '\n';
  close_checked(out, path);
}

void Summary::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : entries_)
    if (k == key) {
      v = value;
      return;
    }
  entries_.emplace_back(key, value);
}
void Summary::set(const std::string& key, double value) { set(key, format_value(value)); }
void Summary::set(const std::string& key, int value) { set(key, std::to_string(value)); }

void Summary::write(const std::filesystem::path& path) const {
  std::ofstream out = open_out(path);
  for (const auto& [k, v] : entries_) out << k << " = " << v << '\n';
  close_checked(out, path);
}

void add_invariants(Summary& s, const std::string& prefix, const InvariantReport& rep) {
  s.set(prefix + "invariants", rep.passed() ? "pass" : "fail");
  s.set(prefix + "violations", static_cast<int>(rep.violations.size()));
  const char* names[3] = {"u", "v", "w"};
  for (int f = 0; f < rep.fields; ++f) s.set(prefix + "min_" + names[f], rep.min_values[f]);
  for (const auto& c : rep.checks) {
    if (!c.checked) continue;
    s.set(prefix + "check." + c.name + ".bound", c.bound);
    s.set(prefix + "check." + c.name + ".observed", c.observed);
  }
  if (!rep.grad_gap_curve.empty()) s.set(prefix + "final_grad_w_minus_v", rep.grad_gap_curve.back().second);
  s.set(prefix + "cfl_exceeded_steps", rep.cfl_exceeded_steps);
  for (std::size_t k = 0; k < rep.violations.size() && k < 20; ++k) {
    const auto& v = rep.violations[k];
    s.set(prefix + "violation." + std::to_string(k),
          v.check + " t=" + format_value(v.t) + " bound=" + format_value(v.bound) +
              " observed=" + format_value(v.observed));
  }
  for (std::size_t k = 0; k < rep.stand_ins.size(); ++k)
    s.set(prefix + "stand_in." + std::to_string(k), rep.stand_ins[k]);
}

}  // namespace taxis::harness

#include "taxis/harness/config.hpp"

#include "taxis/analysis.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace taxis::harness {

const char* to_string(ModelKind m) {
  return m == ModelKind::Competition ? "competition" : "predprey";
}

const char* to_string(RunVariant v) {
  switch (v) {
    case RunVariant::Indirect: return "indirect";
    case RunVariant::Limit: return "limit";
    case RunVariant::Sweep: return "sweep";
  }
  return "?";
}

std::string format_number(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

struct Entry {
  std::string key;
  std::string value;
  int line = 0;
  bool used = false;
};

using Sections = std::map<std::string, std::vector<Entry>>;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void fail(int line, const std::string& what) {
  throw ConfigError("config line " + std::to_string(line) + ": " + what);
}

const std::set<std::string>& known_sections() {
  static const std::set<std::string> s{"model", "grid", "time", "params", "ic", "sweep", "output", "mms"};
  return s;
}

Sections tokenize(std::string_view text) {
  Sections out;
  std::string current;
  int line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty() || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(line_no, "malformed section header");
      current = trim(std::string_view(line).substr(1, line.size() - 2));
      if (!known_sections().count(current)) fail(line_no, "unknown section [" + current + "]");
      out[current];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(line_no, "expected key = value");
    if (current.empty()) fail(line_no, "key outside of any section");
    Entry e{trim(std::string_view(line).substr(0, eq)), trim(std::string_view(line).substr(eq + 1)), line_no};
    if (e.key.empty()) fail(line_no, "empty key");
    for (const auto& prev : out[current])
      if (prev.key == e.key) fail(line_no, "duplicate key '" + e.key + "'");
    out[current].push_back(std::move(e));
  }
  return out;
}

double to_double(const Entry& e) {
  double x = 0.0;
  const char* b = e.value.data();
  const char* end = b + e.value.size();
  if (b != end && *b == '+') ++b;
  auto [ptr, ec] = std::from_chars(b, end, x);
  if (ec != std::errc() || ptr != end || !std::isfinite(x))
    fail(e.line, "'" + e.key + "' expects a number, got '" + e.value + "'");
  return x;
}

int to_int(const Entry& e) {
  int x = 0;
  auto [ptr, ec] = std::from_chars(e.value.data(), e.value.data() + e.value.size(), x);
  if (ec != std::errc() || ptr != e.value.data() + e.value.size())
    fail(e.line, "'" + e.key + "' expects an integer, got '" + e.value + "'");
  return x;
}

bool to_bool(const Entry& e) {
  if (e.value == "true") return true;
  if (e.value == "false") return false;
  fail(e.line, "'" + e.key + "' expects true or false, got '" + e.value + "'");
}

std::vector<double> to_list(const Entry& e) {
  std::string v = e.value;
  if (v.empty()) fail(e.line, "'" + e.key + "' is empty");
  if (v.front() != '[') {
    return {to_double(e)};
  }
  if (v.back() != ']') fail(e.line, "'" + e.key + "' has an unterminated list");
  std::vector<double> out;
  std::string body = v.substr(1, v.size() - 2);
  std::istringstream in(body);
  std::string item;
  while (std::getline(in, item, ',')) {
    Entry tmp{e.key, trim(item), e.line};
    if (tmp.value.empty()) fail(e.line, "'" + e.key + "' has an empty list item");
    out.push_back(to_double(tmp));
  }
  if (out.empty()) fail(e.line, "'" + e.key + "' is an empty list");
  return out;
}

// Gives each section's entries by key and flags keys nobody asked for.
class SectionReader {
 public:
  SectionReader(Sections& s, const std::string& name) : entries_(&s[name]), name_(name) {}

  Entry* get(const std::string& key) {
    for (auto& e : *entries_)
      if (e.key == key) {
        e.used = true;
        return &e;
      }
    return nullptr;
  }
  void number(const std::string& key, double& out) {
    if (auto* e = get(key)) out = to_double(*e);
  }
  void integer(const std::string& key, int& out) {
    if (auto* e = get(key)) out = to_int(*e);
  }
  void boolean(const std::string& key, bool& out) {
    if (auto* e = get(key)) out = to_bool(*e);
  }
  void finish() const {
    for (const auto& e : *entries_)
      if (!e.used) fail(e.line, "unknown key '" + e.key + "' in [" + name_ + "]");
  }

 private:
  std::vector<Entry>* entries_;
  std::string name_;
};

template <typename Fn>
void rethrow_as_config(int line, Fn&& fn) {
  try {
    fn();
  } catch (const ConfigError& e) {
    fail(line, e.what());
  } catch (const DomainError& e) {
    fail(line, e.what());
  } catch (const FitError& e) {
    fail(line, e.what());
  }
}

int section_line(Sections& s, const std::string& name) {
  auto it = s.find(name);
  if (it == s.end() || it->second.empty()) return 0;
  return it->second.front().line;
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  Sections sections = tokenize(text);
  RunConfig cfg;

  {
    SectionReader r(sections, "model");
    if (auto* e = r.get("type")) {
      if (e->value == "competition") cfg.model = ModelKind::Competition;
      else if (e->value == "predprey") cfg.model = ModelKind::PredPrey;
      else fail(e->line, "model type must be competition or predprey");
    }
    bool variant_set = false;
    if (auto* e = r.get("variant")) {
      variant_set = true;
      if (e->value == "indirect") cfg.variant = RunVariant::Indirect;
      else if (e->value == "limit") cfg.variant = RunVariant::Limit;
      else if (e->value == "sweep") cfg.variant = RunVariant::Sweep;
      else fail(e->line, "variant must be indirect, limit or sweep");
    }
    r.finish();
    SectionReader sw(sections, "sweep");
    if (auto* e = sw.get("eps")) {
      cfg.eps_list = to_list(*e);
      if (!variant_set) cfg.variant = RunVariant::Sweep;
    }
    sw.integer("threads", cfg.threads);
    sw.finish();
    if (cfg.threads < 1) fail(section_line(sections, "sweep"), "threads must be >= 1");
    if (cfg.variant == RunVariant::Sweep)
      rethrow_as_config(section_line(sections, "sweep"), [&] { validate_eps_list(cfg.eps_list); });
  }

  {
    SectionReader r(sections, "grid");
    int dim = 1;
    std::vector<double> n{128}, length{1.0};
    r.integer("dim", dim);
    int line = section_line(sections, "grid");
    if (auto* e = r.get("n")) n = to_list(*e), line = e->line;
    if (auto* e = r.get("length")) length = to_list(*e);
    r.finish();
    if (dim != 1 && dim != 2) fail(line, "grid dim must be 1 or 2");
    auto pick = [&](const std::vector<double>& xs, int axis) {
      if (xs.size() != 1 && xs.size() != static_cast<std::size_t>(dim))
        fail(line, "grid lists must have one entry per axis");
      return xs.size() == 1 ? xs[0] : xs[axis];
    };
    std::array<int, 2> nn{1, 1};
    std::array<double, 2> ll{1.0, 1.0};
    for (int a = 0; a < dim; ++a) {
      const double na = pick(n, a);
      if (na != std::floor(na) || na > 1e7) fail(line, "grid n must be an integer");
      nn[a] = static_cast<int>(na);
      ll[a] = pick(length, a);
    }
    rethrow_as_config(line, [&] { cfg.grid = GridSpec(dim, nn, ll); });
  }

  {
    SectionReader r(sections, "time");
    r.number("t_end", cfg.time.t_end);
    r.number("dt_max", cfg.time.dt_max);
    r.number("cfl_adv", cfg.time.cfl_adv);
    r.integer("snapshot_stride", cfg.time.snapshot_stride);
    if (auto* e = r.get("fixed_dt")) cfg.time.fixed_dt = to_double(*e);
    r.finish();
    rethrow_as_config(section_line(sections, "time"), [&] { cfg.time.validate(); });
  }

  {
    SectionReader r(sections, "params");
    if (cfg.model == ModelKind::Competition) {
      CompetitionParams p;
      r.number("d_u", p.d_u);
      r.number("d_v", p.d_v);
      r.number("chi", p.chi);
      r.number("mu1", p.mu1);
      r.number("mu2", p.mu2);
      r.number("a1", p.a1);
      r.number("a2", p.a2);
      r.number("eps", p.eps);
      cfg.params = p;
    } else {
      PredPreyParams p;
      r.number("d_z", p.d_z);
      r.number("d_v", p.d_v);
      r.number("chi", p.chi);
      r.number("mu1", p.mu1);
      r.number("mu1_prime", p.mu1_prime);
      r.number("mu2", p.mu2);
      r.number("b", p.b);
      if (auto* e = r.get("response")) {
        if (e->value == "holling1") p.response.kind = ResponseKind::Holling1;
        else if (e->value == "holling2") p.response.kind = ResponseKind::Holling2;
        else if (e->value == "holling3") p.response.kind = ResponseKind::Holling3;
        else fail(e->line, "response must be holling1, holling2 or holling3");
      }
      r.number("c", p.response.c);
      r.number("m", p.response.m);
      r.number("eps", p.eps);
      cfg.params = p;
    }
    r.finish();
    rethrow_as_config(section_line(sections, "params"), [&] { validate(cfg.params); });
  }

  {
    SectionReader r(sections, "ic");
    if (auto* e = r.get("family")) {
      if (e->value == "constant") cfg.ic.kind = IcFamily::Kind::Constant;
      else if (e->value == "gaussian_bump") cfg.ic.kind = IcFamily::Kind::GaussianBump;
      else if (e->value == "cosine_perturbed_equilibrium") cfg.ic.kind = IcFamily::Kind::CosinePerturbedEquilibrium;
      else fail(e->line, "unknown ic family '" + e->value + "'");
    }
    r.number("value", cfg.ic.value);
    if (auto* e = r.get("center")) {
      const auto c = to_list(*e);
      if (c.size() > 2) fail(e->line, "center takes at most two coordinates");
      cfg.ic.center_x = c[0];
      cfg.ic.center_y = c.size() == 2 ? c[1] : c[0];
    }
    r.number("width", cfg.ic.width);
    r.number("amplitude", cfg.ic.amplitude);
    r.number("floor", cfg.ic.floor);
    r.integer("mode", cfg.ic.mode);
    r.boolean("compatibility", cfg.compatibility);
    r.number("w0", cfg.w0);
    r.finish();
    // Building the data once validates family/parameter combinations.
    rethrow_as_config(section_line(sections, "ic"), [&] {
      (void)build_initial_data<double>(cfg.ic, cfg.grid, cfg.params, cfg.compatibility, cfg.w0);
    });
  }

  {
    SectionReader r(sections, "output");
    if (auto* e = r.get("dir")) {
      if (e->value.empty()) fail(e->line, "output dir is empty");
      cfg.output_dir = e->value;
    }
    r.finish();
  }

  {
    SectionReader r(sections, "mms");
    r.boolean("enabled", cfg.mms.enabled);
    r.integer("levels", cfg.mms.levels);
    r.finish();
    if (cfg.mms.levels < 3) fail(section_line(sections, "mms"), "mms levels must be >= 3");
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream os;
  auto num = [](double x) { return format_number(x); };
  auto list = [&](const std::vector<double>& xs) {
    std::string s = "[";
    for (std::size_t k = 0; k < xs.size(); ++k) s += (k ? ", " : "") + num(xs[k]);
    return s + "]";
  };
  os << "[model]\n"
     << "type = " << to_string(cfg.model) << "\n"
     << "variant = " << to_string(cfg.variant) << "\n\n";
  const GridSpec& g = cfg.grid;
  os << "[grid]\n"
     << "dim = " << g.dim() << "\n";
  if (g.dim() == 1) {
    os << "n = " << g.n(0) << "\nlength = " << num(g.length(0)) << "\n\n";
  } else {
    os << "n = [" << g.n(0) << ", " << g.n(1) << "]\nlength = [" << num(g.length(0)) << ", "
       << num(g.length(1)) << "]\n\n";
  }
  os << "[time]\n"
     << "t_end = " << num(cfg.time.t_end) << "\n"
     << "dt_max = " << num(cfg.time.dt_max) << "\n"
     << "cfl_adv = " << num(cfg.time.cfl_adv) << "\n"
     << "snapshot_stride = " << cfg.time.snapshot_stride << "\n";
  if (cfg.time.fixed_dt) os << "fixed_dt = " << num(*cfg.time.fixed_dt) << "\n";
  os << "\n[params]\n";
  if (const auto* p = std::get_if<CompetitionParams>(&cfg.params)) {
    os << "d_u = " << num(p->d_u) << "\nd_v = " << num(p->d_v) << "\nchi = " << num(p->chi)
       << "\nmu1 = " << num(p->mu1) << "\nmu2 = " << num(p->mu2) << "\na1 = " << num(p->a1)
       << "\na2 = " << num(p->a2) << "\neps = " << num(p->eps) << "\n\n";
  } else {
    const auto& q = std::get<PredPreyParams>(cfg.params);
    os << "d_z = " << num(q.d_z) << "\nd_v = " << num(q.d_v) << "\nchi = " << num(q.chi)
       << "\nmu1 = " << num(q.mu1) << "\nmu1_prime = " << num(q.mu1_prime) << "\nmu2 = " << num(q.mu2)
       << "\nb = " << num(q.b) << "\nresponse = " << to_string(q.response.kind)
       << "\nc = " << num(q.response.c) << "\nm = " << num(q.response.m) << "\neps = " << num(q.eps)
       << "\n\n";
  }
  os << "[ic]\n"
     << "family = " << to_string(cfg.ic.kind) << "\n"
     << "value = " << num(cfg.ic.value) << "\n"
     << "center = [" << num(cfg.ic.center_x) << ", " << num(cfg.ic.center_y) << "]\n"
     << "width = " << num(cfg.ic.width) << "\n"
     << "amplitude = " << num(cfg.ic.amplitude) << "\n"
     << "floor = " << num(cfg.ic.floor) << "\n"
     << "mode = " << cfg.ic.mode << "\n"
     << "compatibility = " << (cfg.compatibility ? "true" : "false") << "\n"
     << "w0 = " << num(cfg.w0) << "\n\n";
  os << "[sweep]\n";
  if (!cfg.eps_list.empty()) os << "eps = " << list(cfg.eps_list) << "\n";
  os << "threads = " << cfg.threads << "\n\n";
  os << "[output]\ndir = " << cfg.output_dir << "\n\n";
  os << "[mms]\nenabled = " << (cfg.mms.enabled ? "true" : "false") << "\nlevels = " << cfg.mms.levels
     << "\n";
  return os.str();
}

std::string config_digest(const RunConfig& cfg) {
  // FNV-1a over the canonical text, excluding the output location so that
  // identical science in different directories shares a digest.
  RunConfig c = cfg;
  c.output_dir = "-";
  const std::string text = serialize_config(c);
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace taxis::harness

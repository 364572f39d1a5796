#ifndef TAXIS_HARNESS_CONFIG_HPP
#define TAXIS_HARNESS_CONFIG_HPP

#include <string>
#include <string_view>
#include <vector>

#include "taxis/grid.hpp"
#include "taxis/integrator.hpp"
#include "taxis/models.hpp"
#include "taxis/params.hpp"

namespace taxis::harness {

enum class ModelKind { Competition, PredPrey };
enum class RunVariant { Indirect, Limit, Sweep };

const char* to_string(ModelKind m);
const char* to_string(RunVariant v);

struct MmsSpec {
  bool enabled = false;
  int levels = 4;
  bool operator==(const MmsSpec&) const = default;
};

// Fully validated description of one invocation.
struct RunConfig {
  ModelKind model = ModelKind::Competition;
  RunVariant variant = RunVariant::Indirect;
  GridSpec grid = GridSpec::line(128);
  TimeSpec time{};
  ModelParams params = CompetitionParams{};
  IcFamily ic{};
  bool compatibility = true;
  double w0 = 0.0;  // constant w(0) when compatibility is off
  std::vector<double> eps_list;
  int threads = 1;
  std::string output_dir = "out";
  MmsSpec mms{};

  bool operator==(const RunConfig&) const = default;
};

// Parses the line-oriented `key = value` grammar with [section] headers.
// Throws ConfigError naming the line and key on any problem.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

// Canonical text form; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& cfg);

// 16 hex digits identifying the canonical config text.
std::string config_digest(const RunConfig& cfg);

// Shortest decimal text that reads back to exactly the same double.
std::string format_number(double x);

}  // namespace taxis::harness

#endif  // TAXIS_HARNESS_CONFIG_HPP

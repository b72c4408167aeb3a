#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "weldfcs/characters.hpp"
#include "weldfcs/fcs.hpp"
#include "weldfcs/profile.hpp"

namespace weldfcs::cli {

using json = nlohmann::json;

inline constexpr const char* kConfigSchema = "1";
inline constexpr const char* kResultSchema = "weldfcs-result/1";

struct IoConfig {
  std::string output_dir = "weldfcs_out";
  std::string cache_dir;  // empty: no cache unless --cache-dir or WELDFCS_CACHE
  bool write_json = true;
  bool write_csv = true;
};

struct RunConfig {
  std::string schema_version;
  TemperatureProfile profile;
  double v = 1.0;
  double L = 0.0;  // 0 means infinite volume only
  Theory theory;
  FcsNumerics numerics;
  double cumulant_step = 0.03;  // lambda step of the cumulant extrapolation
  json experiment = json::object();
  IoConfig io;
};

// Throws ConfigError naming the offending key (dotted path).
RunConfig parse_config(const json& j);
RunConfig load_config(const std::string& path);
// Every field, defaults included, as it was used for the run.
json effective_config(const RunConfig& cfg);

struct RunOptions {
  int threads = 1;
  std::string cache_dir;  // overrides io.cache_dir; WELDFCS_CACHE is the fallback
  bool json_stdout = false;
};

struct CsvTable {
  std::string name;  // file stem
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
std::string to_csv(const CsvTable& t);
std::string fmt(double x);

struct CommandOutput {
  json result = json::object();
  std::vector<CsvTable> tables;
  std::string summary;  // human-readable lines
  bool ok = true;       // selftest only
};

// Disk-backed NodeCache: one small text file per node, values in hex floats
// so cached and cold runs agree bit for bit.
class FileCache {
 public:
  explicit FileCache(std::string dir);
  const NodeCache& node_cache() const { return cache_; }

 private:
  std::string dir_;
  NodeCache cache_;
};

CommandOutput cmd_weld_torus(const RunConfig& cfg, const RunOptions& opt);
CommandOutput cmd_weld_cylinder(const RunConfig& cfg, const RunOptions& opt);
CommandOutput cmd_fcs(const RunConfig& cfg, const RunOptions& opt);
CommandOutput cmd_moments(const RunConfig& cfg, const RunOptions& opt);
CommandOutput cmd_ldf(const RunConfig& cfg, const RunOptions& opt);
CommandOutput cmd_converge(const RunConfig& cfg, const RunOptions& opt);
CommandOutput cmd_selftest(const RunOptions& opt);

const std::vector<std::string>& command_names();

// Loads the config, runs the command, writes files and prints the summary.
// Returns 0 on success, 2 for configuration errors, 3 for numerical failures
// (and for failed self-test checks).
int run(const std::string& command, const std::string& config_path, const RunOptions& opt, std::ostream& out,
        std::ostream& err);

}  // namespace weldfcs::cli

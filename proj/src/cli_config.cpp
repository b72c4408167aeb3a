#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <boost/uuid/name_generator_sha1.hpp>
#include <boost/uuid/uuid_io.hpp>

#include "weldfcs/cli.hpp"
#include "weldfcs/errors.hpp"

namespace weldfcs::cli {

namespace fs = std::filesystem;

namespace {

// Reads one JSON object, remembering which keys were consumed so that typos
// surface as errors instead of silently falling back to defaults.
class Block {
 public:
  Block(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }
  std::string key(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }
  bool has(const std::string& k) const { return j_.contains(k) && !j_.at(k).is_null(); }
  // null when absent
  const json& raw(const std::string& k) {
    static const json null_value;
    seen_.insert(k);
    return j_.contains(k) ? j_.at(k) : null_value;
  }

  double num(const std::string& k, double def) {
    seen_.insert(k);
    if (!has(k)) return def;
    const json& v = j_.at(k);
    if (!v.is_number()) throw ConfigError(key(k), "expected a number");
    return v.get<double>();
  }
  double positive(const std::string& k, double def) {
    const double x = num(k, def);
    if (!(x > 0.0) || !std::isfinite(x)) throw ConfigError(key(k), "must be positive");
    return x;
  }
  double nonneg(const std::string& k, double def) {
    const double x = num(k, def);
    if (!(x >= 0.0) || !std::isfinite(x)) throw ConfigError(key(k), "must be non-negative");
    return x;
  }
  int integer(const std::string& k, int def, int min) {
    seen_.insert(k);
    if (!has(k)) return def;
    const json& v = j_.at(k);
    if (!v.is_number_integer()) throw ConfigError(key(k), "expected an integer");
    const int x = v.get<int>();
    if (x < min) throw ConfigError(key(k), "must be at least " + std::to_string(min));
    return x;
  }
  std::string str(const std::string& k, const std::string& def) {
    seen_.insert(k);
    if (!has(k)) return def;
    if (!j_.at(k).is_string()) throw ConfigError(key(k), "expected a string");
    return j_.at(k).get<std::string>();
  }
  bool flag(const std::string& k, bool def) {
    seen_.insert(k);
    if (!has(k)) return def;
    if (!j_.at(k).is_boolean()) throw ConfigError(key(k), "expected true or false");
    return j_.at(k).get<bool>();
  }
  Block sub(const std::string& k) {
    seen_.insert(k);
    static const json empty = json::object();
    return Block(has(k) ? j_.at(k) : empty, key(k));
  }
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(key(it.key()), "unknown key");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

}  // namespace

RunConfig parse_config(const json& j) {
  RunConfig cfg;
  Block root(j, "");
  if (!root.has("schema_version")) throw ConfigError("schema_version", "missing");
  cfg.schema_version = root.str("schema_version", "");
  if (cfg.schema_version != kConfigSchema)
    throw ConfigError("schema_version", "unsupported version '" + cfg.schema_version + "' (expected " +
                                            kConfigSchema + ")");

  {
    Block b = root.sub("profile");
    auto& p = cfg.profile;
    p.beta_left = b.positive("beta_left", p.beta_left);
    p.beta_right = b.positive("beta_right", p.beta_right);
    p.center = b.num("center", p.center);
    p.half_width = b.positive("half_width", p.half_width);
    p.shape = parse_shape(b.str("shape", shape_name(p.shape)));
    cfg.v = b.positive("v", cfg.v);
    cfg.L = b.nonneg("L", 0.0);
    b.finish();
    if (cfg.L > 0.0) {
      if (p.half_width > 0.25 * cfg.L) throw ConfigError("profile.half_width", "kink half width exceeds L/4");
      if (std::abs(p.center) + p.half_width > 0.25 * cfg.L)
        throw ConfigError("profile.center", "kink support leaves [-L/4, L/4]");
    }
  }
  {
    Block b = root.sub("theory");
    cfg.theory.model = parse_model(b.str("model", model_name(cfg.theory.model)));
    cfg.theory.c = b.positive("c", cfg.theory.c);
    cfg.theory.radius = b.positive("radius", cfg.theory.radius);
    b.finish();
    cfg.theory.validate();
  }
  {
    Block b = root.sub("numerics");
    auto& t = cfg.numerics.torus;
    t.N = b.integer("N", t.N, 2);
    t.M = b.integer("M", t.M, 0);
    t.Kin = b.integer("Kin", t.Kin, 0);
    t.tail_tol = b.positive("torus_tail_tol", t.tail_tol);
    t.solve_tol = b.positive("torus_solve_tol", t.solve_tol);
    t.solver = b.str("torus_solver", t.solver);
    auto& c = cfg.numerics.cylinder;
    c.P_max = b.nonneg("P_max", c.P_max);
    c.panel = b.nonneg("dp", c.panel);
    c.gl_order = b.integer("gl_order", c.gl_order, 8);
    if (c.gl_order != 8 && c.gl_order != 16 && c.gl_order != 20 && c.gl_order != 30)
      throw ConfigError("numerics.gl_order", "must be 8, 16, 20 or 30");
    c.dx = b.nonneg("dx", c.dx);
    c.pad = b.nonneg("pad", c.pad);
    c.out_dx = b.nonneg("out_dx", c.out_dx);
    c.solve_tol = b.positive("cylinder_solve_tol", c.solve_tol);
    c.solver = b.str("cylinder_solver", c.solver);
    for (const auto& [k, s] : {std::pair{"torus_solver", t.solver}, {"cylinder_solver", c.solver}})
      if (s != "auto" && s != "dense" && s != "gmres")
        throw ConfigError(std::string("numerics.") + k, "must be auto, dense or gmres");
    cfg.numerics.flow.abs_tol = b.positive("flow_abs_tol", cfg.numerics.flow.abs_tol);
    cfg.numerics.flow.rel_tol = b.positive("flow_rel_tol", cfg.numerics.flow.rel_tol);
    cfg.numerics.s_panels = b.integer("s_panels", cfg.numerics.s_panels, 1);
    cfg.cumulant_step = b.positive("cumulant_step", cfg.cumulant_step);
    b.finish();
  }
  if (const json& e = root.raw("experiment"); !e.is_null()) {
    if (!e.is_object()) throw ConfigError("experiment", "expected an object");
    cfg.experiment = e;
  }
  {
    Block b = root.sub("io");
    cfg.io.output_dir = b.str("output_dir", cfg.io.output_dir);
    cfg.io.cache_dir = b.str("cache_dir", cfg.io.cache_dir);
    if (const json& formats = b.raw("formats"); !formats.is_null()) {
      if (!formats.is_array()) throw ConfigError("io.formats", "expected a list of \"json\" and/or \"csv\"");
      cfg.io.write_json = cfg.io.write_csv = false;
      for (const auto& f : formats) {
        if (f == "json") cfg.io.write_json = true;
        else if (f == "csv") cfg.io.write_csv = true;
        else throw ConfigError("io.formats", "unknown format " + f.dump());
      }
    }
    b.finish();
  }
  root.finish();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("--config", std::string("not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

json effective_config(const RunConfig& cfg) {
  const auto& p = cfg.profile;
  const auto& t = cfg.numerics.torus;
  const auto& c = cfg.numerics.cylinder;
  json j;
  j["schema_version"] = cfg.schema_version;
  j["profile"] = {{"beta_left", p.beta_left}, {"beta_right", p.beta_right}, {"center", p.center},
                  {"half_width", p.half_width}, {"shape", shape_name(p.shape)}, {"v", cfg.v}, {"L", cfg.L}};
  j["theory"] = {{"model", model_name(cfg.theory.model)}, {"c", cfg.theory.c}, {"radius", cfg.theory.radius}};
  j["numerics"] = {{"N", t.N},
                   {"M", t.M},
                   {"Kin", t.Kin},
                   {"torus_tail_tol", t.tail_tol},
                   {"torus_solve_tol", t.solve_tol},
                   {"torus_solver", t.solver},
                   {"P_max", c.P_max},
                   {"dp", c.panel},
                   {"gl_order", c.gl_order},
                   {"dx", c.dx},
                   {"pad", c.pad},
                   {"out_dx", c.out_dx},
                   {"cylinder_solve_tol", c.solve_tol},
                   {"cylinder_solver", c.solver},
                   {"flow_abs_tol", cfg.numerics.flow.abs_tol},
                   {"flow_rel_tol", cfg.numerics.flow.rel_tol},
                   {"s_panels", cfg.numerics.s_panels},
                   {"cumulant_step", cfg.cumulant_step}};
  // zero entries above mean "automatic"; record what they resolve to
  const CylinderNumerics r = cylinder_defaults(Volume::infinite(cfg.profile, cfg.v), c);
  const double gamma = cfg.v * cfg.profile.beta0();
  j["numerics"]["resolved"] = {{"P_max", r.P_max > 0.0 ? r.P_max : 80.0 / r.kink_scale},
                               {"kink_scale", r.kink_scale},
                               {"pad", r.pad > 0.0 ? r.pad : 12.0 * gamma},
                               {"out_dx", r.out_dx > 0.0 ? r.out_dx : gamma / 16.0}};
  j["experiment"] = cfg.experiment;
  json formats = json::array();
  if (cfg.io.write_json) formats.push_back("json");
  if (cfg.io.write_csv) formats.push_back("csv");
  j["io"] = {{"output_dir", cfg.io.output_dir}, {"formats", formats}};
  return j;
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string to_csv(const CsvTable& t) {
  auto quote = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
  };
  std::ostringstream os;
  for (std::size_t i = 0; i < t.header.size(); ++i) os << (i ? "," : "") << quote(t.header[i]);
  os << "\r\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << quote(row[i]);
    os << "\r\n";
  }
  return os.str();
}

FileCache::FileCache(std::string dir) : dir_(std::move(dir)) {
  fs::create_directories(dir_);
  auto path = [this](const std::string& key) {
    static const boost::uuids::name_generator_sha1 gen(boost::uuids::ns::oid());
    return fs::path(dir_) / (boost::uuids::to_string(gen(key)) + ".node");
  };
  cache_.get = [path](const std::string& key) -> std::optional<cplx> {
    std::ifstream in(path(key));
    if (!in) return std::nullopt;
    std::string stored, re, im;
    if (!std::getline(in, stored) || stored != key || !(in >> re >> im)) return std::nullopt;
    return cplx(std::strtod(re.c_str(), nullptr), std::strtod(im.c_str(), nullptr));
  };
  cache_.put = [path](const std::string& key, cplx v) {
    const fs::path p = path(key);
    const fs::path tmp = p.string() + ".tmp" + std::to_string(std::hash<std::string>{}(key) & 0xffff);
    {
      std::ofstream out(tmp);
      char buf[96];
      std::snprintf(buf, sizeof buf, "%a %a\n", v.real(), v.imag());
      out << key << "\n" << buf;
    }
    std::error_code ec;
    fs::rename(tmp, p, ec);
  };
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"weld_torus", "weld_cylinder", "fcs", "moments",
                                              "ldf", "converge", "selftest"};
  return names;
}

namespace {

CommandOutput dispatch(const std::string& command, const RunConfig& cfg, const RunOptions& opt) {
  if (command == "weld_torus") return cmd_weld_torus(cfg, opt);
  if (command == "weld_cylinder") return cmd_weld_cylinder(cfg, opt);
  if (command == "fcs") return cmd_fcs(cfg, opt);
  if (command == "moments") return cmd_moments(cfg, opt);
  if (command == "ldf") return cmd_ldf(cfg, opt);
  if (command == "converge") return cmd_converge(cfg, opt);
  throw ConfigError("command", "unknown command '" + command + "'");
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
  if (!out) throw Error(ErrorCode::ConfigInvalid, "cannot write " + p.string());
}

}  // namespace

int run(const std::string& command, const std::string& config_path, const RunOptions& opt_in, std::ostream& out,
        std::ostream& err) {
  RunOptions opt = opt_in;
  std::string output_dir;
  try {
    CommandOutput res;
    json meta_config;
    bool write_json = true, write_csv = true;
    if (command == "selftest") {
      res = cmd_selftest(opt);
      if (!config_path.empty()) output_dir = load_config(config_path).io.output_dir;
    } else {
      if (config_path.empty()) throw ConfigError("--config", "required for " + command);
      const RunConfig cfg = load_config(config_path);
      output_dir = cfg.io.output_dir;
      write_json = cfg.io.write_json;
      write_csv = cfg.io.write_csv;
      if (opt.cache_dir.empty()) opt.cache_dir = cfg.io.cache_dir;
      if (opt.cache_dir.empty())
        if (const char* env = std::getenv("WELDFCS_CACHE")) opt.cache_dir = env;
      meta_config = effective_config(cfg);
      res = dispatch(command, cfg, opt);
    }
    json doc;
    doc["schema_version"] = kResultSchema;
    doc["command"] = command;
    if (!meta_config.is_null()) doc["config"] = meta_config;
    doc["result"] = res.result;
    if (!output_dir.empty()) {
      fs::create_directories(output_dir);
      if (write_json) write_file(fs::path(output_dir) / (command + ".json"), doc.dump(2) + "\n");
      if (write_csv)
        for (const auto& t : res.tables) write_file(fs::path(output_dir) / (t.name + ".csv"), to_csv(t));
    }
    if (opt.json_stdout) out << doc.dump(2) << "\n";
    else out << res.summary;
    return res.ok ? 0 : 3;
  } catch (const ConfigError& e) {
    err << "weldfcs: configuration error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "weldfcs: numerical failure: " << e.what() << "\n";
    if (!output_dir.empty()) {
      std::error_code ec;
      fs::create_directories(output_dir, ec);
      json dump = {{"schema_version", kResultSchema}, {"command", command},
                   {"error", {{"code", error_name(e.code())}, {"message", e.what()}}}};
      std::ofstream f(fs::path(output_dir) / (command + ".failure.json"));
      f << dump.dump(2) << "\n";
    }
    return 3;
  } catch (const std::exception& e) {
    err << "weldfcs: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace weldfcs::cli

#include "ghostsim/config.hpp"

#include <cctype>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include "ghostsim/array_io.hpp"

namespace ghostsim {
namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Parser {
  const std::string& name;
  int lineno = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError(name + ":" + std::to_string(lineno) + ": " + msg);
  }

  double number(const std::string& v) const {
    errno = 0;
    char* end = nullptr;
    double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0' || errno == ERANGE)
      fail("'" + v + "' is not a number");
    return x;
  }

  std::uint64_t unsigned_int(const std::string& v) const {
    errno = 0;
    char* end = nullptr;
    unsigned long long x = std::strtoull(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0' || errno == ERANGE || v[0] == '-')
      fail("'" + v + "' is not a non-negative integer");
    return x;
  }

  int positive_int(const std::string& v) const {
    std::uint64_t x = unsigned_int(v);
    if (x == 0 || x > 1u << 30) fail("'" + v + "' is out of range");
    return static_cast<int>(x);
  }

  bool boolean(const std::string& v) const {
    if (v == "true") return true;
    if (v == "false") return false;
    fail("'" + v + "' is not a boolean (use true or false)");
  }
};

}  // namespace

SetupGeometry RunConfig::geometry() const {
  SetupGeometry g;
  g.wavelength = wavelength;
  g.d0 = d0;
  g.d1 = d1;
  g.d2 = d2;
  g.d_ref = resolved_d_ref();
  return g;
}

Grid RunConfig::grid() const { return Grid(dims, n, pitch); }

CorrelatorModes RunConfig::modes() const {
  CorrelatorModes m;
  m.fixed_point = estimator != EstimatorChoice::shift_averaged;
  m.shift_averaged = estimator != EstimatorChoice::fixed_point;
  m.diagnostics = diagnostics;
  return m;
}

void RunConfig::validate() const {
  try {
    geometry().validate();
    Grid g = grid();
    if (object == ObjectKind::crossed_double_slit && dims != 2)
      throw std::invalid_argument("crossed_double_slit needs a 2D grid");
    if (object != ObjectKind::crossed_double_slit && object != ObjectKind::identity &&
        object != ObjectKind::from_file && dims != 1)
      throw std::invalid_argument("this object type needs a 1D grid");
    if (object == ObjectKind::from_file && object_path.empty())
      throw std::invalid_argument("from_file object needs a path");
    if (pad_factor < 1 || pad_factor > 16)
      throw std::invalid_argument("pad_factor must be between 1 and 16");
    if (workers < 0 || workers > 64)
      throw std::invalid_argument("workers must be between 0 and 64");
    if (realizations == 0) throw std::invalid_argument("realizations must be positive");
    if (std::abs(test_point) > g.span() / 2)
      throw std::invalid_argument("test_point_m falls outside the grid");
    if (pattern_halfwidth < 0)
      throw std::invalid_argument("pattern_halfwidth_m must be non-negative");
    if (has_retrieval) {
      if (retrieval_iterations < 1) throw std::invalid_argument("iterations must be positive");
      if (retrieval_beta <= 0 || retrieval_beta > 1)
        throw std::invalid_argument("beta must be in (0, 1]");
      if (retrieval_restarts < 1) throw std::invalid_argument("restarts must be positive");
      if (retrieval_n < 16 || retrieval_n % 2 != 0)
        throw std::invalid_argument("retrieval grid_n must be even and at least 16");
      if (retrieval_pitch <= 0) throw std::invalid_argument("retrieval grid_pitch_m must be positive");
      if (support_halfwidth <= 0)
        throw std::invalid_argument("support_halfwidth_m must be positive");
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

RunConfig parse_run_config_text(const std::string& text, const std::string& name) {
  RunConfig cfg;
  Parser p{name};
  std::istringstream is(text);
  std::string line, section;
  bool skip_section = false;
  while (std::getline(is, line)) {
    ++p.lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[') {
      if (t.back() != ']') p.fail("unterminated section header");
      section = t.substr(1, t.size() - 2);
      skip_section = (section == "run");  // report-only echo in metadata files
      if (!skip_section && section != "geometry" && section != "grid" && section != "object" &&
          section != "ensemble" && section != "retrieval" && section != "output")
        p.fail("unknown section [" + section + "]");
      if (section == "retrieval") cfg.has_retrieval = true;
      continue;
    }
    if (skip_section) continue;
    std::size_t eq = t.find('=');
    if (eq == std::string::npos) p.fail("expected key = value");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty()) p.fail("empty key");
    if (value.empty()) p.fail("empty value for '" + key + "'");
    if (section.empty()) p.fail("key '" + key + "' before any section header");

    if (section == "geometry") {
      if (key == "wavelength_m") cfg.wavelength = p.number(value);
      else if (key == "d0_m") cfg.d0 = p.number(value);
      else if (key == "d1_m") cfg.d1 = p.number(value);
      else if (key == "d2_m") cfg.d2 = p.number(value);
      else if (key == "dref_m") cfg.d_ref = p.number(value);
      else if (key == "source_profile") {
        if (value == "hard") cfg.profile = SourceProfile::hard;
        else if (value == "gaussian") cfg.profile = SourceProfile::gaussian;
        else p.fail("source_profile must be hard or gaussian");
      } else p.fail("unknown key '" + key + "' in [geometry]");
    } else if (section == "grid") {
      if (key == "dims") {
        cfg.dims = p.positive_int(value);
        if (cfg.dims != 1 && cfg.dims != 2) p.fail("dims must be 1 or 2");
      }
      else if (key == "n") cfg.n = p.positive_int(value);
      else if (key == "pitch_m") cfg.pitch = p.number(value);
      else if (key == "pad_factor") cfg.pad_factor = p.positive_int(value);
      else p.fail("unknown key '" + key + "' in [grid]");
    } else if (section == "object") {
      if (key == "type") {
        if (value == "double_slit") cfg.object = ObjectKind::double_slit;
        else if (value == "phase_grooves") cfg.object = ObjectKind::phase_grooves;
        else if (value == "crossed_double_slit") cfg.object = ObjectKind::crossed_double_slit;
        else if (value == "identity") cfg.object = ObjectKind::identity;
        else if (value == "from_file") cfg.object = ObjectKind::from_file;
        else p.fail("unknown object type '" + value + "'");
      }
      else if (key == "width_m") cfg.width = p.number(value);
      else if (key == "separation_m" || key == "separation_x_m") cfg.separation = p.number(value);
      else if (key == "separation_y_m") cfg.separation_y = p.number(value);
      else if (key == "depth_m") cfg.depth = p.number(value);
      else if (key == "refractive_index") cfg.refractive_index = p.number(value);
      else if (key == "aperture_m") cfg.aperture = p.number(value);
      else if (key == "path") cfg.object_path = value;
      else p.fail("unknown key '" + key + "' in [object]");
    } else if (section == "ensemble") {
      if (key == "realizations") cfg.realizations = p.unsigned_int(value);
      else if (key == "master_seed") cfg.master_seed = p.unsigned_int(value);
      else if (key == "estimator") {
        if (value == "fixed_point") cfg.estimator = EstimatorChoice::fixed_point;
        else if (value == "shift_averaged") cfg.estimator = EstimatorChoice::shift_averaged;
        else if (value == "both") cfg.estimator = EstimatorChoice::both;
        else p.fail("estimator must be fixed_point, shift_averaged, or both");
      }
      else if (key == "diagnostics") cfg.diagnostics = p.boolean(value);
      else if (key == "test_point_m") cfg.test_point = p.number(value);
      else if (key == "workers") cfg.workers = static_cast<int>(p.unsigned_int(value));
      else if (key == "independent_arms") cfg.independent_arms = p.boolean(value);
      else if (key == "checkpoint_every") cfg.checkpoint_every = p.unsigned_int(value);
      else p.fail("unknown key '" + key + "' in [ensemble]");
    } else if (section == "retrieval") {
      if (key == "method") {
        if (value == "hio") cfg.retrieval_hio = true;
        else if (value == "error_reduction") cfg.retrieval_hio = false;
        else p.fail("method must be hio or error_reduction");
      }
      else if (key == "iterations") cfg.retrieval_iterations = p.positive_int(value);
      else if (key == "beta") cfg.retrieval_beta = p.number(value);
      else if (key == "restarts") cfg.retrieval_restarts = p.positive_int(value);
      else if (key == "support_halfwidth_m") cfg.support_halfwidth = p.number(value);
      else if (key == "grid_n") cfg.retrieval_n = p.positive_int(value);
      else if (key == "grid_pitch_m") cfg.retrieval_pitch = p.number(value);
      else if (key == "init_seed") cfg.retrieval_seed = p.unsigned_int(value);
      else p.fail("unknown key '" + key + "' in [retrieval]");
    } else {  // output
      if (key == "directory") cfg.out_dir = value;
      else if (key == "pattern_halfwidth_m") cfg.pattern_halfwidth = p.number(value);
      else if (key == "write_csv") cfg.write_csv = p.boolean(value);
      else if (key == "write_binary") cfg.write_binary = p.boolean(value);
      else if (key == "write_pgm") cfg.write_pgm = p.boolean(value);
      else p.fail("unknown key '" + key + "' in [output]");
    }
  }
  cfg.validate();
  return cfg;
}

RunConfig parse_run_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError(path + ": cannot open config file");
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_run_config_text(buf.str(), path);
}

std::string serialize_run_config(const RunConfig& c) {
  std::ostringstream os;
  os << "[geometry]\n";
  os << "wavelength_m = " << fmt17(c.wavelength) << "\n";
  os << "d0_m = " << fmt17(c.d0) << "\n";
  os << "d1_m = " << fmt17(c.d1) << "\n";
  os << "d2_m = " << fmt17(c.d2) << "\n";
  if (c.d_ref > 0) os << "dref_m = " << fmt17(c.d_ref) << "\n";
  os << "source_profile = " << (c.profile == SourceProfile::hard ? "hard" : "gaussian") << "\n";
  os << "\n[grid]\n";
  os << "dims = " << c.dims << "\n";
  os << "n = " << c.n << "\n";
  os << "pitch_m = " << fmt17(c.pitch) << "\n";
  os << "pad_factor = " << c.pad_factor << "\n";
  os << "\n[object]\n";
  switch (c.object) {
    case ObjectKind::double_slit:
      os << "type = double_slit\n";
      os << "width_m = " << fmt17(c.width) << "\n";
      os << "separation_m = " << fmt17(c.separation) << "\n";
      break;
    case ObjectKind::phase_grooves:
      os << "type = phase_grooves\n";
      os << "width_m = " << fmt17(c.width) << "\n";
      os << "separation_m = " << fmt17(c.separation) << "\n";
      os << "depth_m = " << fmt17(c.depth) << "\n";
      os << "refractive_index = " << fmt17(c.refractive_index) << "\n";
      os << "aperture_m = " << fmt17(c.aperture) << "\n";
      break;
    case ObjectKind::crossed_double_slit:
      os << "type = crossed_double_slit\n";
      os << "width_m = " << fmt17(c.width) << "\n";
      os << "separation_x_m = " << fmt17(c.separation) << "\n";
      os << "separation_y_m = " << fmt17(c.separation_y) << "\n";
      os << "aperture_m = " << fmt17(c.aperture) << "\n";
      break;
    case ObjectKind::identity:
      os << "type = identity\n";
      break;
    case ObjectKind::from_file:
      os << "type = from_file\n";
      os << "path = " << c.object_path << "\n";
      break;
  }
  os << "\n[ensemble]\n";
  os << "realizations = " << c.realizations << "\n";
  os << "master_seed = " << c.master_seed << "\n";
  const char* est = c.estimator == EstimatorChoice::both
                        ? "both"
                        : (c.estimator == EstimatorChoice::fixed_point ? "fixed_point"
                                                                       : "shift_averaged");
  os << "estimator = " << est << "\n";
  os << "diagnostics = " << (c.diagnostics ? "true" : "false") << "\n";
  os << "test_point_m = " << fmt17(c.test_point) << "\n";
  os << "workers = " << c.workers << "\n";
  os << "independent_arms = " << (c.independent_arms ? "true" : "false") << "\n";
  os << "checkpoint_every = " << c.checkpoint_every << "\n";
  if (c.has_retrieval) {
    os << "\n[retrieval]\n";
    os << "method = " << (c.retrieval_hio ? "hio" : "error_reduction") << "\n";
    os << "iterations = " << c.retrieval_iterations << "\n";
    os << "beta = " << fmt17(c.retrieval_beta) << "\n";
    os << "restarts = " << c.retrieval_restarts << "\n";
    os << "support_halfwidth_m = " << fmt17(c.support_halfwidth) << "\n";
    os << "grid_n = " << c.retrieval_n << "\n";
    os << "grid_pitch_m = " << fmt17(c.retrieval_pitch) << "\n";
    os << "init_seed = " << c.retrieval_seed << "\n";
  }
  os << "\n[output]\n";
  os << "directory = " << c.out_dir << "\n";
  os << "pattern_halfwidth_m = " << fmt17(c.pattern_halfwidth) << "\n";
  os << "write_csv = " << (c.write_csv ? "true" : "false") << "\n";
  os << "write_binary = " << (c.write_binary ? "true" : "false") << "\n";
  os << "write_pgm = " << (c.write_pgm ? "true" : "false") << "\n";
  return os.str();
}

std::uint64_t config_stream_hash(const RunConfig& c) {
  // The realization stream and accumulator layout depend on these and only
  // these; resuming may change anything else.
  std::ostringstream os;
  os << fmt17(c.wavelength) << '|' << fmt17(c.d0) << '|' << fmt17(c.d1) << '|' << fmt17(c.d2)
     << '|' << fmt17(c.resolved_d_ref()) << '|' << static_cast<int>(c.profile) << '|' << c.dims
     << '|' << c.n << '|' << fmt17(c.pitch) << '|' << c.pad_factor << '|'
     << static_cast<int>(c.object) << '|' << fmt17(c.width) << '|' << fmt17(c.separation) << '|'
     << fmt17(c.separation_y) << '|' << fmt17(c.depth) << '|' << fmt17(c.refractive_index) << '|'
     << fmt17(c.aperture) << '|' << c.object_path << '|' << c.master_seed << '|'
     << static_cast<int>(c.estimator) << '|' << c.diagnostics << '|' << fmt17(c.test_point) << '|'
     << c.independent_arms;
  return fnv1a(os.str());
}

}  // namespace ghostsim

#include "rotrap/config.hpp"

#include "rotrap/resonance.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>

#ifndef ROTRAP_PRESET_DIR
#define ROTRAP_PRESET_DIR "presets"
#endif

namespace rotrap {
namespace {

using nlohmann::json;

[[noreturn]] void reject(const std::string& field, const std::string& what) {
  throw ConfigError("config field '" + field + "': " + what);
}

void allow_only(const json& obj, const std::string& where,
                std::initializer_list<const char*> keys) {
  if (!obj.is_object()) reject(where, "expected an object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* k : keys) known = known || item.key() == k;
    if (!known) reject(where.empty() ? item.key() : where + "." + item.key(), "unknown key");
  }
}

double number(const json& v, const std::string& field) {
  if (!v.is_number()) reject(field, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) reject(field, "must be finite");
  return x;
}

double positive(const json& v, const std::string& field) {
  const double x = number(v, field);
  if (!(x > 0.0)) reject(field, "must be > 0");
  return x;
}

Vec3 vec3(const json& v, const std::string& field) {
  if (!v.is_array() || v.size() != 3) reject(field, "expected an array of 3 numbers");
  return {number(v[0], field + "[0]"), number(v[1], field + "[1]"), number(v[2], field + "[2]")};
}

bool boolean(const json& v, const std::string& field) {
  if (!v.is_boolean()) reject(field, "expected true or false");
  return v.get<bool>();
}

double omega_value(const json& obj, const std::string& where, const char* plain,
                   const char* hz, Units units, bool& found) {
  found = false;
  if (obj.contains(hz)) {
    if (units == Units::Dimensionless) reject(where + "." + hz, "Hz values need units \"hz\"");
    if (obj.contains(plain)) reject(where, std::string("give either ") + plain + " or " + hz);
    found = true;
    return kTwoPi * number(obj[hz], where + "." + hz);
  }
  if (obj.contains(plain)) {
    found = true;
    return number(obj[plain], where + "." + plain);
  }
  return 0.0;
}

Mat3 parse_trap(const json& t, Units units) {
  allow_only(t, "trap", {"frequencies_hz", "frequencies", "potential_diagonal", "potential"});
  if (t.size() != 1) reject("trap", "give exactly one of frequencies_hz, frequencies, potential_diagonal, potential");
  if (t.contains("frequencies_hz")) {
    if (units == Units::Dimensionless) reject("trap.frequencies_hz", "Hz values need units \"hz\"");
    const Vec3 f = vec3(t["frequencies_hz"], "trap.frequencies_hz");
    const Vec3 w = kTwoPi * f;
    return w.cwiseProduct(w).asDiagonal().toDenseMatrix();
  }
  if (t.contains("frequencies")) {
    const Vec3 f = vec3(t["frequencies"], "trap.frequencies");
    return f.cwiseProduct(f).asDiagonal().toDenseMatrix();
  }
  if (t.contains("potential_diagonal")) {
    return vec3(t["potential_diagonal"], "trap.potential_diagonal").asDiagonal().toDenseMatrix();
  }
  const json& rows = t["potential"];
  if (!rows.is_array() || rows.size() != 3) reject("trap.potential", "expected a 3x3 array");
  Mat3 v;
  for (int i = 0; i < 3; ++i) {
    v.row(i) = vec3(rows[static_cast<std::size_t>(i)], "trap.potential[" + std::to_string(i) + "]").transpose();
  }
  return v;
}

}  // namespace

std::string preset_directory() {
  if (const char* env = std::getenv("ROTRAP_PRESET_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  return ROTRAP_PRESET_DIR;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

json load_preset(const std::string& name) {
  const auto path = std::filesystem::path(preset_directory()) / (name + ".json");
  if (!std::filesystem::exists(path)) throw ConfigError("unknown preset '" + name + "'");
  return load_json_file(path.string());
}

RunConfig parse_run_config(const json& doc) {
  allow_only(doc, "", {"name", "description", "command", "units", "trap", "rotation", "scan",
                       "mass", "gravity", "initial", "integration", "output"});
  RunConfig cfg;
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) reject("name", "expected a string");
    cfg.name = doc["name"].get<std::string>();
  }
  if (doc.contains("command")) {
    if (!doc["command"].is_string()) reject("command", "expected a string");
    cfg.command = doc["command"].get<std::string>();
  }
  if (doc.contains("units")) {
    const json& u = doc["units"];
    if (u == "hz") {
      cfg.units = Units::Hz;
    } else if (u == "dimensionless") {
      cfg.units = Units::Dimensionless;
    } else {
      reject("units", "expected \"hz\" or \"dimensionless\"");
    }
  }

  if (!doc.contains("trap")) reject("trap", "missing");
  cfg.potential = parse_trap(doc["trap"], cfg.units);
  try {
    TrapPotential check(cfg.potential);
  } catch (const ContractViolation& e) {
    reject("trap", e.what());
  }

  if (!doc.contains("rotation")) reject("rotation", "missing");
  {
    const json& r = doc["rotation"];
    allow_only(r, "rotation", {"axis", "omega", "omega_hz", "resonance", "snap"});
    if (!r.contains("axis")) reject("rotation.axis", "missing");
    const Vec3 dir = vec3(r["axis"], "rotation.axis");
    if (!(dir.norm() > 0.0)) reject("rotation.axis", "must be nonzero");
    cfg.axis = dir.normalized();
    bool found = false;
    const double w = omega_value(r, "rotation", "omega", "omega_hz", cfg.units, found);
    if (found) {
      if (w < 0.0) reject("rotation.omega", "must be >= 0");
      cfg.omega = w;
    }
    if (r.contains("resonance")) {
      if (r["resonance"] == "minus") {
        cfg.resonance = ResonanceBranch::Minus;
      } else if (r["resonance"] == "plus") {
        cfg.resonance = ResonanceBranch::Plus;
      } else {
        reject("rotation.resonance", "expected \"minus\" or \"plus\"");
      }
    }
    if (r.contains("snap")) cfg.snap_to_resonance = boolean(r["snap"], "rotation.snap");
  }

  if (doc.contains("scan")) {
    const json& s = doc["scan"];
    allow_only(s, "scan", {"omega_min", "omega_max", "omega_min_hz", "omega_max_hz", "steps"});
    bool found = false;
    const double lo = omega_value(s, "scan", "omega_min", "omega_min_hz", cfg.units, found);
    if (found) cfg.scan_min = lo;
    const double hi = omega_value(s, "scan", "omega_max", "omega_max_hz", cfg.units, found);
    if (found) cfg.scan_max = hi;
    if (s.contains("steps")) {
      if (!s["steps"].is_number_integer()) reject("scan.steps", "expected an integer");
      cfg.scan_steps = s["steps"].get<int>();
      if (cfg.scan_steps < 2) reject("scan.steps", "must be >= 2");
    }
  }

  if (doc.contains("mass")) cfg.mass = positive(doc["mass"], "mass");

  if (doc.contains("gravity")) {
    const json& g = doc["gravity"];
    allow_only(g, "gravity", {"magnitude", "direction", "vector"});
    if (g.contains("vector")) {
      if (g.contains("magnitude") || g.contains("direction")) {
        reject("gravity", "give either vector or magnitude/direction");
      }
      cfg.gravity = vec3(g["vector"], "gravity.vector");
    } else {
      const double mag = g.contains("magnitude") ? number(g["magnitude"], "gravity.magnitude") : 9.81;
      if (mag < 0.0) reject("gravity.magnitude", "must be >= 0");
      Vec3 dir(0.0, 0.0, -1.0);
      if (g.contains("direction")) {
        dir = vec3(g["direction"], "gravity.direction");
        if (!(dir.norm() > 0.0)) reject("gravity.direction", "must be nonzero");
      }
      cfg.gravity = mag * dir.normalized();
    }
  }

  if (doc.contains("initial")) {
    const json& i = doc["initial"];
    allow_only(i, "initial", {"position", "velocity", "momentum"});
    if (i.contains("position")) cfg.initial_position = vec3(i["position"], "initial.position");
    if (i.contains("velocity") && i.contains("momentum")) {
      reject("initial", "give either velocity or momentum");
    }
    if (i.contains("velocity")) cfg.initial_velocity = vec3(i["velocity"], "initial.velocity");
    if (i.contains("momentum")) cfg.initial_momentum = vec3(i["momentum"], "initial.momentum");
  }

  if (doc.contains("integration")) {
    const json& it = doc["integration"];
    allow_only(it, "integration", {"duration", "dt", "stride", "compare_modes", "fit_start_periods"});
    if (it.contains("duration")) cfg.duration = positive(it["duration"], "integration.duration");
    if (it.contains("dt") && !it["dt"].is_null()) cfg.dt = positive(it["dt"], "integration.dt");
    if (it.contains("stride")) {
      if (!it["stride"].is_number_integer() || it["stride"].get<long long>() < 1) {
        reject("integration.stride", "expected an integer >= 1");
      }
      cfg.stride = it["stride"].get<std::size_t>();
    }
    if (it.contains("compare_modes")) {
      cfg.compare_modes = boolean(it["compare_modes"], "integration.compare_modes");
    }
    if (it.contains("fit_start_periods")) {
      cfg.fit_start_periods = number(it["fit_start_periods"], "integration.fit_start_periods");
      if (cfg.fit_start_periods < 0.0) reject("integration.fit_start_periods", "must be >= 0");
    }
  }

  if (doc.contains("output")) {
    const json& o = doc["output"];
    allow_only(o, "output", {"dir"});
    if (o.contains("dir")) {
      if (!o["dir"].is_string()) reject("output.dir", "expected a string");
      cfg.out_dir = o["dir"].get<std::string>();
    }
  }
  return cfg;
}

json to_json(const RunConfig& c) {
  auto arr = [](const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); };
  json j;
  j["name"] = c.name;
  j["units"] = c.units == Units::Hz ? "SI (rad/s, rad^2/s^2)" : "dimensionless";
  j["potential"] = json::array({arr(c.potential.row(0)), arr(c.potential.row(1)), arr(c.potential.row(2))});
  j["axis"] = arr(c.axis);
  j["omega"] = c.omega ? json(*c.omega) : json(nullptr);
  j["resonance"] = !c.resonance ? json(nullptr)
                                : json(*c.resonance == ResonanceBranch::Minus ? "minus" : "plus");
  j["snap_to_resonance"] = c.snap_to_resonance;
  j["scan"] = {{"omega_min", c.scan_min ? json(*c.scan_min) : json(nullptr)},
               {"omega_max", c.scan_max ? json(*c.scan_max) : json(nullptr)},
               {"steps", c.scan_steps}};
  j["mass"] = c.mass;
  j["gravity"] = arr(c.gravity);
  j["initial"] = {{"position", arr(c.initial_position)},
                  {"velocity", arr(c.initial_velocity)},
                  {"momentum", c.initial_momentum ? arr(*c.initial_momentum) : json(nullptr)}};
  j["integration"] = {{"duration", c.duration},
                      {"dt", c.dt ? json(*c.dt) : json(nullptr)},
                      {"stride", c.stride},
                      {"compare_modes", c.compare_modes},
                      {"fit_start_periods", c.fit_start_periods}};
  return j;
}

TrapPotential make_potential(const RunConfig& config) { return TrapPotential(config.potential); }

TrapConfig make_trap_config(const RunConfig& config, double omega) {
  return TrapConfig(make_potential(config), RotationSpec(config.axis, omega),
                    GravitySpec{config.gravity}, config.mass);
}

PhaseState make_initial_state(const RunConfig& config, const TrapConfig& trap) {
  PhaseState s;
  s.r = config.initial_position;
  if (config.initial_momentum) {
    s.p = *config.initial_momentum;
  } else {
    // p = m (dr/dt + Omega x r)
    s.p = trap.mass * (config.initial_velocity + trap.rotation.angular_velocity().cross(s.r));
  }
  return s;
}

double requested_omega(const RunConfig& config) {
  if (config.resonance) {
    const ResonanceReport rep = resonant_omegas(make_potential(config), config.axis);
    return *config.resonance == ResonanceBranch::Minus ? rep.omega_minus : rep.omega_plus;
  }
  if (config.omega) return *config.omega;
  throw ConfigError("config field 'rotation': need omega, omega_hz or resonance");
}

std::optional<double> to_hz(const RunConfig& config, double omega) {
  if (config.units == Units::Dimensionless) return std::nullopt;
  return omega / kTwoPi;
}

}  // namespace rotrap

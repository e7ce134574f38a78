#include "rotrap/commands.hpp"
#include "rotrap/config.hpp"

#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace rotrap;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kOut = ROTRAP_TEST_OUT;

int run_cli(const std::string& args) {
  const std::string cmd = std::string(ROTRAP_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

fs::path write_config(const std::string& name, const json& doc) {
  fs::create_directories(kOut);
  const fs::path p = kOut / (name + ".json");
  std::ofstream(p) << doc.dump(2);
  return p;
}

json lab_doc() {
  return json::parse(R"({
    "units": "hz",
    "trap": {"frequencies_hz": [10, 15, 20]},
    "rotation": {"axis": [1, 1, 1], "omega_hz": 6.49421}
  })");
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("config parsing") {
  const RunConfig cfg = parse_run_config(lab_doc());
  CHECK(cfg.axis.norm() == doctest::Approx(1.0));
  CHECK(*cfg.omega == doctest::Approx(kTwoPi * 6.49421));
  CHECK(cfg.potential(1, 1) == doctest::Approx(std::pow(kTwoPi * 15.0, 2)));
  CHECK(cfg.gravity.z() == doctest::Approx(-9.81));
  CHECK(*to_hz(cfg, kTwoPi * 3.0) == doctest::Approx(3.0));

  json bad = lab_doc();
  bad["rotation"]["axes"] = json::array({1, 0, 0});
  CHECK_THROWS_WITH_AS(parse_run_config(bad), doctest::Contains("rotation.axes"), ConfigError);

  bad = lab_doc();
  bad["trap"]["frequencies_hz"] = json::array({10, 15});
  CHECK_THROWS_WITH_AS(parse_run_config(bad), doctest::Contains("trap.frequencies_hz"), ConfigError);

  bad = lab_doc();
  bad["units"] = "dimensionless";
  CHECK_THROWS_AS(parse_run_config(bad), ConfigError);

  bad = lab_doc();
  bad["mass"] = -1.0;
  CHECK_THROWS_WITH_AS(parse_run_config(bad), doctest::Contains("mass"), ConfigError);

  bad = lab_doc();
  bad["trap"] = {{"potential_diagonal", {1.0, -1.0, 2.0}}};
  CHECK_THROWS_AS(parse_run_config(bad), ConfigError);
}

TEST_CASE("initial momentum includes the frame velocity") {
  json doc = lab_doc();
  doc["initial"] = {{"position", {0.01, 0.0, 0.0}}, {"velocity", {0.0, 0.0, 0.0}}};
  doc["mass"] = 2.0;
  const RunConfig cfg = parse_run_config(doc);
  const TrapConfig trap = make_trap_config(cfg, *cfg.omega);
  const PhaseState s = make_initial_state(cfg, trap);
  CHECK((s.p - 2.0 * trap.rotation.angular_velocity().cross(s.r)).norm() < 1e-15);
}

TEST_CASE("every preset runs") {
  for (int k = 1; k <= 12; ++k) {
    const std::string name = "fig" + std::to_string(k);
    CHECK_MESSAGE(run_cli("run --preset " + name + " --out " + (kOut / name).string()) == 0, name);
  }
}

TEST_CASE("preset output is deterministic") {
  REQUIRE(run_cli("stability --preset fig1 --out " + (kOut / "det_a").string()) == 0);
  REQUIRE(run_cli("stability --preset fig1 --out " + (kOut / "det_b").string()) == 0);
  CHECK(slurp(kOut / "det_a" / "stability.csv") == slurp(kOut / "det_b" / "stability.csv"));
  CHECK(slurp(kOut / "det_a" / "stability.json") == slurp(kOut / "det_b" / "stability.json"));
  REQUIRE(run_cli("simulate --preset fig9 --duration 1 --out " + (kOut / "det_c").string()) == 0);
  REQUIRE(run_cli("simulate --preset fig9 --duration 1 --out " + (kOut / "det_d").string()) == 0);
  CHECK(slurp(kOut / "det_c" / "trajectory.csv") == slurp(kOut / "det_d" / "trajectory.csv"));
}

TEST_CASE("stability output") {
  REQUIRE(run_cli("stability --preset fig2 --out " + (kOut / "st2").string()) == 0);
  const json doc = read_json(kOut / "st2" / "stability.json");
  CHECK(doc["instability_windows"] == 1);
  CHECK(doc["boundaries"][0]["omega"].get<double>() == doctest::Approx(1.0));
  CHECK(doc["config"]["units"] == "dimensionless");
  const std::string csv = slurp(kOut / "st2" / "stability.csv");
  CHECK(csv.rfind("omega,chi1_re,chi1_im,chi2_re,chi2_im,chi3_re,chi3_im,classification\n", 0) == 0);
  CHECK(csv.find('\r') == std::string::npos);

  REQUIRE(run_cli("stability --preset fig1 --out " + (kOut / "st1").string()) == 0);
  CHECK(read_json(kOut / "st1" / "stability.json")["instability_windows"] == 2);
}

TEST_CASE("resonance output") {
  REQUIRE(run_cli("resonance --config " + write_config("lab", lab_doc()).string() + " --out " +
                  (kOut / "res").string()) == 0);
  const json doc = read_json(kOut / "res" / "resonance.json");
  CHECK(doc["omega_minus_hz"].get<double>() == doctest::Approx(6.49421).epsilon(1e-6));
  CHECK(doc["degenerate"] == false);

  REQUIRE(run_cli("resonance --preset fig7 --out " + (kOut / "res7").string()) == 0);
  const json f7 = read_json(kOut / "res7" / "resonance.json");
  CHECK(f7["degenerate"] == true);
  CHECK(f7["omega_minus_hz"].is_null());

  json dimless = json::parse(R"({"units": "dimensionless", "trap": {"potential_diagonal": [1, 2, 3]},
                                 "rotation": {"axis": [1, 1, 1]}})");
  REQUIRE(run_cli("resonance --config " + write_config("dimless", dimless).string() + " --out " +
                  (kOut / "res123").string()) == 0);
  CHECK(read_json(kOut / "res123" / "resonance.json")["omega_minus"].get<double>() ==
        doctest::Approx(0.628923).epsilon(1e-6));
}

TEST_CASE("simulate and analytic agree at resonance") {
  REQUIRE(run_cli("run --preset fig8 --out " + (kOut / "g8").string()) == 0);
  REQUIRE(run_cli("run --preset fig12 --out " + (kOut / "g12").string()) == 0);
  const json sim = read_json(kOut / "g8" / "simulate.json");
  const json ana = read_json(kOut / "g12" / "analytic.json");
  const double s_num = sim["growth"]["slope"].get<double>();
  const double s_ana = ana["growth"]["slope"].get<double>();
  CHECK(std::abs(s_num - s_ana) < 0.05 * s_ana);
  for (const auto& r : ana["residuals"]) CHECK(r.get<double>() < 1e-8);
  CHECK(std::abs(ana["snap_distance"].get<double>()) < 1e-4);
  CHECK(sim["overflow"] == false);
  const std::string header = slurp(kOut / "g8" / "trajectory.csv").substr(0, 17);
  CHECK(header == "t,x,y,z,px,py,pz\n");
}

TEST_CASE("off-resonance presets stay bounded") {
  REQUIRE(run_cli("run --preset fig8 --out " + (kOut / "g8").string()) == 0);
  REQUIRE(run_cli("run --preset fig9 --out " + (kOut / "g9").string()) == 0);
  REQUIRE(run_cli("run --preset fig11 --out " + (kOut / "g11").string()) == 0);
  const double r8 = read_json(kOut / "g8" / "simulate.json")["max_radius"].get<double>();
  CHECK(read_json(kOut / "g9" / "simulate.json")["max_radius"].get<double>() < 0.1 * r8);
  CHECK(read_json(kOut / "g11" / "simulate.json")["max_radius"].get<double>() < 0.01 * r8);
}

TEST_CASE("mode comparison file") {
  REQUIRE(run_cli("simulate --preset fig9 --duration 1 --compare-modes --out " + (kOut / "cmp").string()) == 0);
  CHECK(fs::exists(kOut / "cmp" / "modes.csv"));
  CHECK(read_json(kOut / "cmp" / "simulate.json")["modes"]["max_position_difference"].get<double>() < 1e-8);
}

TEST_CASE("exit codes") {
  json empty = json::parse(R"({"units": "dimensionless", "trap": {"potential_diagonal": [1, 2, 3]},
                               "rotation": {"axis": [0, 0, 1]}, "scan": {"omega_min": 2, "omega_max": 2}})");
  CHECK(run_cli("stability --config " + write_config("empty", empty).string()) == 2);
  CHECK(run_cli("stability --preset nosuchpreset") == 2);
  CHECK(run_cli("stability") == 2);

  json unknown = lab_doc();
  unknown["colour"] = "blue";
  CHECK(run_cli("resonance --config " + write_config("unknown", unknown).string()) == 2);

  json vertical = lab_doc();
  vertical["rotation"] = {{"axis", {0, 0, 1}}, {"resonance", "minus"}};
  CHECK(run_cli("analytic --config " + write_config("vertical", vertical).string() + " --out " +
                (kOut / "vert").string()) == 3);

  CHECK(run_cli("resonance --preset fig7 --out /proc/rotrap_no_such_dir") == 4);
}

TEST_CASE("run_command maps failures") {
  std::ostringstream log;
  std::ostringstream err;
  RunConfig cfg = parse_run_config(lab_doc());
  cfg.out_dir = (kOut / "rc").string();
  CHECK(run_command("bogus", cfg, log, err) == ExitCode::ConfigError);
  CHECK(run_command("stability", cfg, log, err) == ExitCode::ConfigError);
  cfg.omega = kTwoPi * 5.0;
  CHECK(run_command("analytic", cfg, log, err) == ExitCode::NumericalFailure);
  cfg.snap_to_resonance = true;
  CHECK(run_command("analytic", cfg, log, err) == ExitCode::Ok);
}

}

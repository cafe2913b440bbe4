#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "thinspec/errors.hpp"
#include "thinspec/scenario.hpp"

using namespace thinspec;

namespace {

std::string error_of(std::string_view manifest) {
  try {
    parse_manifest(manifest, "test");
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::filesystem::path scratch(const std::string& leaf) {
  const auto dir = std::filesystem::temp_directory_path() / ("thinspec_test_" + leaf);
  std::filesystem::remove_all(dir);
  return dir;
}

constexpr std::string_view kSmall = R"(
# two cheap scenarios
[scenario]
name = op
model = order-parameter
state = squeezed
alpha = 4
zeta = 0, 0.5, -0.25+0.1i
t_max = 1.5
n_points = 151

[scenario]
name = thin
model = thin-two-state
delta = 0.2
beta = 2
t_max = 40
n_points = 81
)";

}  // namespace

TEST_CASE("built-in scenarios cover every figure") {
  for (int k = 1; k <= 10; ++k) CHECK(find_builtin("figure" + std::to_string(k)) != nullptr);
  CHECK(find_builtin("figure11") == nullptr);
  const Scenario* f1 = find_builtin("figure1");
  REQUIRE(f1);
  CHECK(f1->model == ModelKind::OrderParameter);
  CHECK(f1->zeta.size() == 3);
  CHECK(f1->zeta_labels[0] == "coherent");
  CHECK(f1->zeta_labels[1] == "zeta05");
  CHECK(f1->zeta_labels[2] == "zeta09");
}

TEST_CASE("the shipped manifest is the built-in table") {
  std::ifstream in(std::string(THINSPEC_SOURCE_DIR) + "/manifests/paper-figures.manifest", std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  CHECK(s.str() == builtin_manifest_text());
}

TEST_CASE("complex values and echo round trip") {
  const auto all = parse_manifest(kSmall);
  REQUIRE(all.size() == 2);
  const Scenario& op = all[0];
  CHECK(op.zeta[2] == Complex{-0.25, 0.1});
  CHECK(op.zeta_labels[2] == "zetam025p01i");
  bool found = false;
  for (const auto& [key, value] : op.echo) {
    if (key == "zeta") {
      CHECK(value == "0, 0.5, -0.25+0.1i");
      found = true;
    }
  }
  CHECK(found);
  const auto csv = compute_scenario(op).csv;
  CHECK(csv.find("# zeta = 0, 0.5, -0.25+0.1i\n") != std::string::npos);
  CHECK(csv.find("# t_max = 1.5\n") != std::string::npos);
  CHECK(csv.find("tau,abs_a_coherent,abs_a_zeta05,abs_a_zetam025p01i\n") != std::string::npos);
}

TEST_CASE("manifest errors name the key and line") {
  const std::string unknown = error_of("[scenario]\nname = a\nmodel = thin-two-state\nfrobnicate = 3\n");
  CHECK(unknown.find("line 4") != std::string::npos);
  CHECK(unknown.find("frobnicate") != std::string::npos);

  const std::string bad_number = error_of("[scenario]\nname = a\nmodel = thin-two-state\ndelta = 0.1x\n");
  CHECK(bad_number.find("line 4") != std::string::npos);
  CHECK(bad_number.find("delta") != std::string::npos);

  const std::string dup = error_of(
      "[scenario]\nname = a\nmodel = thin-two-state\ndelta = 0.1\nbeta = 1\nt_max = 1\nn_points = 2\n"
      "[scenario]\nname = a\nmodel = thin-two-state\ndelta = 0.1\nbeta = 1\nt_max = 1\nn_points = 2\n");
  CHECK(dup.find("duplicate scenario name 'a'") != std::string::npos);

  CHECK(error_of("name = a\n").find("outside") != std::string::npos);
  CHECK(error_of("[figure]\n").find("unknown section") != std::string::npos);
  CHECK(error_of("[scenario]\nname = a\nname = b\n").find("duplicate key") != std::string::npos);
}

TEST_CASE("validation names the offending field") {
  const std::string empty_window =
      error_of("[scenario]\nname = a\nmodel = thin-two-state\ndelta = 0.1\nbeta = 1\nt_max = 0\nn_points = 10\n");
  CHECK(empty_window.find("'t_max'") != std::string::npos);
  const std::string no_points =
      error_of("[scenario]\nname = a\nmodel = thin-two-state\ndelta = 0.1\nbeta = 1\nt_max = 1\n");
  CHECK(no_points.find("'n_points'") != std::string::npos);
  const std::string zeta = error_of(
      "[scenario]\nname = a\nmodel = order-parameter\nstate = squeezed\nalpha = 1\nzeta = 1.2\nt_max = 1\nn_points = 5\n");
  CHECK(zeta.find("'zeta'") != std::string::npos);
  const std::string trap = error_of(
      "[scenario]\nname = a\nmodel = quasiparticle\noccupation = thermal\nbeta = 1\nN = 100\nt_max = 1\nn_points = 5\n");
  CHECK(trap.find("a_s, a_ho, rho, N, omega_tr") != std::string::npos);
}

TEST_CASE("one-scenario manifest equals run_scenario") {
  const auto all = parse_manifest(kSmall);
  const auto a = scratch("single_a");
  const auto b = scratch("single_b");
  std::ostringstream out_a;
  run_scenario(all[1], a.string(), out_a);
  std::ostringstream out_b;
  std::ostringstream err;
  CHECK(run_manifest({all[1]}, RunOptions{1, b.string()}, out_b, err) == 0);
  CHECK(out_a.str() == out_b.str());
  CHECK(slurp(a / "thin.csv") == slurp(b / "thin.csv"));
  CHECK(slurp(a / "thin.gp") == slurp(b / "thin.gp"));
  CHECK(out_a.str().rfind("thin half-power collapse=", 0) == 0);
}

TEST_CASE("parallel runs are byte identical to serial runs") {
  const auto all = parse_manifest(kSmall);
  const auto serial = scratch("serial");
  const auto parallel = scratch("parallel");
  std::ostringstream o1, o2, e1, e2;
  CHECK(run_manifest(all, RunOptions{1, serial.string()}, o1, e1) == 0);
  CHECK(run_manifest(all, RunOptions{4, parallel.string()}, o2, e2) == 0);
  CHECK(o1.str() == o2.str());
  for (const char* f : {"op.csv", "op.gp", "thin.csv", "thin.gp"}) CHECK(slurp(serial / f) == slurp(parallel / f));
}

TEST_CASE("failures are aggregated") {
  auto all = parse_manifest(kSmall);
  all[0].n_points = 0;  // invalid after parsing
  std::ostringstream out, err;
  CHECK(run_manifest(all, RunOptions{2, scratch("fail").string()}, out, err) == 1);
  CHECK(err.str().find("scenario 'op'") != std::string::npos);
  CHECK(err.str().find("'n_points'") != std::string::npos);
  CHECK(out.str().find("thin ") != std::string::npos);
}

TEST_CASE("I/O errors report the path") {
  const auto all = parse_manifest(kSmall);
  const auto blocker = scratch("blocker");
  { std::ofstream(blocker.string()) << "file"; }
  std::ostringstream out;
  try {
    run_scenario(all[1], (blocker / "sub").string(), out);
    FAIL("expected Io");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::Io);
    CHECK(std::string(e.what()).find(blocker.string()) != std::string::npos);
  }
  std::filesystem::remove(blocker);
  CHECK_THROWS_AS(load_manifest("/nonexistent/thinspec.manifest"), Error);
}

TEST_CASE("output directory resolution") {
  ::setenv("THINSPEC_OUT", "/from/env", 1);
  CHECK(resolve_output_dir(std::nullopt) == "/from/env");
  CHECK(resolve_output_dir(std::string("cli")) == "cli");
  ::unsetenv("THINSPEC_OUT");
  CHECK(resolve_output_dir(std::nullopt) == ".");
}

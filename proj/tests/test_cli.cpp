#include <filesystem>
#include <fstream>
#include <string>

#include <doctest.h>
#include <json.hpp>

#include "support/run_cli.hpp"
#include "support/schema_lite.hpp"

using nlohmann::json;
using test_support::CliResult;
using test_support::run_cli;

namespace {

json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  return json::parse(in);
}

json load_schema(const char* name) {
  const std::filesystem::path path =
      std::filesystem::path(SUBRIEM_SOURCE_DIR) / "schemas" / name;
  return load_json_file(path);
}

void check_schema(const char* schema_name, const json& value) {
  std::string error;
  const bool ok = test_support::validate_schema(load_schema(schema_name), value, error);
  INFO("schema violation: " << error);
  CHECK(ok);
}

std::filesystem::path tmp_path(const char* name) {
  return test_support::cli_tmp_dir() / name;
}

}  // namespace

TEST_CASE("cli: version and usage errors") {
  CHECK(run_cli("--version").exit_code == 0);
  CHECK(run_cli("--version").out.find("subriem") != std::string::npos);

  CHECK(run_cli("").exit_code == 2);                 // subcommand required
  CHECK(run_cli("frobnicate").exit_code == 2);       // unknown subcommand
  CHECK(run_cli("verify --frobnicate").exit_code == 2);
  CHECK(run_cli("verify --model nope").exit_code == 2);
  CHECK(run_cli("verify").exit_code == 2);           // model required
  CHECK(run_cli("laplacian --model heisenberg --point 0,0,0").exit_code == 2);
  CHECK(run_cli("laplacian --model heisenberg --f x2 --f-expr x1 --point 0,0,0")
            .exit_code == 2);
  CHECK(run_cli("laplacian --model heisenberg --f x2 --point 0,0").exit_code == 2);
  CHECK(run_cli("laplacian --model heisenberg --f-expr \"x9 + 1\" --point 0,0,0")
            .exit_code == 2);
  CHECK(run_cli("laplacian --model heisenberg --f nope --point 0,0,0").exit_code == 2);
  CHECK(run_cli("walk --model heisenberg --integrator warp").exit_code == 2);
  CHECK(run_cli("walk --model heisenberg --epsilon 0").exit_code == 2);
}

TEST_CASE("cli: verify passes on the built-ins and writes a schema-valid report") {
  const auto out = tmp_path("verify.json");
  CliResult r = run_cli("verify --model heisenberg --lambda 2 --n-points 25 --out " +
                        out.string());
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("[PASS]") != std::string::npos);
  CHECK(r.out.find("[FAIL]") == std::string::npos);
  CHECK(r.out.find("all checks passed") != std::string::npos);

  const json doc = load_json_file(out);
  check_schema("verify_report.schema.json", doc);
  CHECK(doc.at("pass").get<bool>());
  CHECK(doc.at("kind") == "verify_report");

  CHECK(run_cli("verify --model euclidean --dim 4 --n-points 10").exit_code == 0);

  // CSV output carries the config preamble.
  const auto csv_out = tmp_path("verify.csv");
  CHECK(run_cli("verify --model heisenberg --n-points 5 --format csv --out " +
                csv_out.string())
            .exit_code == 0);
  const std::string csv = test_support::read_text_file(csv_out);
  CHECK(csv.rfind("# subriem ", 0) == 0);
  CHECK(csv.find("# config {") != std::string::npos);
  CHECK(csv.find("check,max_value,tolerance,pass") != std::string::npos);
}

TEST_CASE("cli: verify accepts a model file and uses its samples") {
  const auto model_path = test_support::write_temp_file(
      "flat2.model",
      "name flat2\ndim 2\nrank 2\nbeta 1 1 = 1\nbeta 2 2 = 1\n"
      "g 1 1 = 1\ng 2 2 = 1\nsample 0 0\nsample 1 2\n");
  CliResult r = run_cli("verify --model-file " + model_path.string());
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("all checks passed") != std::string::npos);
}

TEST_CASE("cli: laplacian on a quadratic field is exact") {
  const auto out = tmp_path("laplacian.json");
  CliResult r = run_cli(
      "laplacian --model heisenberg --f x2 --point 0.3,-0.4,0.2 "
      "--n-samples 4000 --seed 1 --out " + out.string());
  CHECK(r.exit_code == 0);
  const json doc = load_json_file(out);
  check_schema("laplacian_report.schema.json", doc);
  CHECK(doc.at("local").get<double>() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(doc.at("sigma_distance").get<double>() < 6.0);
  CHECK(doc.at("config").at("field") == "x2");

  // Inline expressions work too (finite-difference derivatives).
  CliResult re = run_cli(
      "laplacian --model heisenberg --f-expr x1^2+x2^2 --point 0,0,0 "
      "--n-samples 2000 --seed 2");
  CHECK(re.exit_code == 0);
  CHECK(re.out.find("local formula") != std::string::npos);
}

TEST_CASE("cli: flow compares against the closed form and writes a trace") {
  const auto out = tmp_path("flow.csv");
  CliResult r = run_cli(
      "flow --model heisenberg --point 0,0,0 --momentum 1,0,6.283185307179586 "
      "--t 1 --step 0.001 --compare-exact --out " + out.string());
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("energy drift") != std::string::npos);
  CHECK(r.out.find("sup |q_rk4 - q_exact| over trace") != std::string::npos);

  const std::string csv = test_support::read_text_file(out);
  CHECK(csv.rfind("# subriem ", 0) == 0);
  CHECK(csv.find("t,q1,q2,q3,p1,p2,p3,energy") != std::string::npos);

  // compare-exact on a model without a closed form is a runtime error.
  const auto model_path = test_support::write_temp_file(
      "flat1.model",
      "name flat1\ndim 1\nrank 1\nbeta 1 1 = 1\ng 1 1 = 1\nsample 0\n");
  CliResult bad = run_cli("flow --model-file " + model_path.string() +
                          " --point 0 --momentum 1 --compare-exact");
  CHECK(bad.exit_code == 2);  // invalid_argument: no exact flow

  // Defaults adapt to the model dimension: origin start, e1 momentum
  // (straight line along x1; RK4 roundoff keeps q1 near 0.5).
  CliResult def = run_cli("flow --model euclidean --dim 4 --t 0.5");
  CHECK(def.exit_code == 0);
  CHECK(def.out.find("final q: 0.5") != std::string::npos);
  CHECK(def.out.find(",0,0,0\nfinal p: 1,0,0,0") != std::string::npos);
}

TEST_CASE("cli: walk emits per-leg rows and final states") {
  const auto out = tmp_path("walk.csv");
  CliResult r = run_cli(
      "walk --model heisenberg --epsilon 0.2 --horizon 5 --n-paths 2 --seed 3 "
      "--out " + out.string());
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("integrator = exact") != std::string::npos);
  CHECK(r.out.find("path 0:") != std::string::npos);
  CHECK(r.out.find("path 1:") != std::string::npos);

  const std::string csv = test_support::read_text_file(out);
  CHECK(csv.find("path,leg,tau,q1,q2,q3,p1,p2,p3") != std::string::npos);
  CHECK(csv.find(",final,") != std::string::npos);

  // Same seed, same file bytes.
  const auto out2 = tmp_path("walk2.csv");
  CHECK(run_cli("walk --model heisenberg --epsilon 0.2 --horizon 5 --n-paths 2 "
                "--seed 3 --out " + out2.string())
            .exit_code == 0);
  CHECK(test_support::read_text_file(out) == test_support::read_text_file(out2));
}

TEST_CASE("cli: converge writes schema-valid, worker-independent output") {
  const auto out1 = tmp_path("conv1.json");
  const auto out2 = tmp_path("conv2.json");
  const std::string base =
      "converge --model euclidean --dim 2 --f x2 --point 0,0 --t 0.5 "
      "--eps-list 0.5,0.25 --n-paths 400 --seed 7 ";
  CliResult r1 = run_cli(base + "--workers 1 --out " + out1.string());
  CliResult r2 = run_cli(base + "--workers 2 --out " + out2.string());
  CHECK(r1.exit_code == 0);
  CHECK(r2.exit_code == 0);
  CHECK(r1.out.find("reference: 0.5 (analytic)") != std::string::npos);

  const json d1 = load_json_file(out1);
  json d2 = load_json_file(out2);
  check_schema("convergence_table.schema.json", d1);
  CHECK(d1.at("rows").size() == 2);
  CHECK(d1.at("reference").at("provenance") == "analytic");

  // Only the recorded worker count may differ.
  d2["config"]["workers"] = d1["config"]["workers"];
  CHECK(d1.dump() == d2.dump());

  // Identical invocations produce identical bytes (CSV form).
  const auto c1 = tmp_path("conv1.csv");
  const auto c2 = tmp_path("conv2.csv");
  CHECK(run_cli(base + "--format csv --out " + c1.string()).exit_code == 0);
  CHECK(run_cli(base + "--format csv --out " + c2.string()).exit_code == 0);
  const std::string csv = test_support::read_text_file(c1);
  CHECK(csv == test_support::read_text_file(c2));
  CHECK(csv.find("epsilon,estimate,stderr,n_paths,failed_paths,reference,"
                 "reference_stderr,reference_provenance") != std::string::npos);

  // A user reference overrides the analytic one.
  CliResult ru = run_cli(base + "--reference 0.75");
  CHECK(ru.exit_code == 0);
  CHECK(ru.out.find("reference: 0.75 (user)") != std::string::npos);

  // Omitting --point defaults to the origin in the model's dimension.
  const auto c3 = tmp_path("conv3.csv");
  CHECK(run_cli("converge --model euclidean --dim 2 --f x2 --t 0.5 "
                "--eps-list 0.5,0.25 --n-paths 400 --seed 7 --format csv --out " +
                c3.string())
            .exit_code == 0);
  CHECK(test_support::read_text_file(c3) == csv);
}

TEST_CASE("cli: oracle reports SDE moments") {
  const auto out = tmp_path("oracle.json");
  CliResult r = run_cli(
      "oracle --t 0.5 --dt 0.01 --n-paths 2000 --seed 1 --out " + out.string());
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("heisenberg SDE oracle") != std::string::npos);
  const json doc = load_json_file(out);
  check_schema("sde_moment_report.schema.json", doc);
  CHECK(doc.at("moments").at("ex2").at("value").get<double>() ==
        doctest::Approx(0.5).epsilon(0.15));
}

TEST_CASE("cli: model file errors map to exit codes 2 and 3") {
  // Unparseable spec: usage-class error (2).
  const auto broken = test_support::write_temp_file(
      "broken.model", "dim 2\nrank 1\nbeta 2 1 = 1\nsample 0 0\n");
  CHECK(run_cli("verify --model-file " + broken.string()).exit_code == 2);

  // Parseable but invalid at its sample: runtime/model error (3).
  const auto invalid = test_support::write_temp_file(
      "invalid.model",
      "dim 2\nrank 1\nbeta 1 1 = 1\ng 1 1 = 2\ng 2 2 = 1\nsample 0 0\n");
  CHECK(run_cli("verify --model-file " + invalid.string()).exit_code == 3);

  // Valid file, but the requested point degenerates: runtime error (3).
  const auto degen = test_support::write_temp_file(
      "degen.model",
      "name degen\ndim 1\nrank 1\nbeta 1 1 = x1^2\ng 1 1 = x1^-2\nsample 1\n");
  CHECK(run_cli("laplacian --model-file " + degen.string() +
                " --f-expr x1^2 --point 0 --n-samples 100")
            .exit_code == 3);

  // Missing file: runtime error (3).
  CHECK(run_cli("verify --model-file /nonexistent/nowhere.model").exit_code == 3);
}

TEST_CASE("cli: verification failures exit with code 1") {
  // The loader accepts compatibility residuals up to 1e-8, but verify checks
  // at 1e-9; a 5e-9 metric perturbation loads fine and then fails verify.
  const auto marginal = test_support::write_temp_file(
      "marginal.model",
      "name marginal\ndim 1\nrank 1\nbeta 1 1 = 1\ng 1 1 = 1.000000005\n"
      "sample 0\n");
  CliResult r = run_cli("verify --model-file " + marginal.string());
  CHECK(r.exit_code == 1);
  CHECK(r.out.find("[FAIL]") != std::string::npos);
  CHECK(r.out.find("verify: FAILURES") != std::string::npos);
}

#include "subriem/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "subriem/version.hpp"

namespace subriem::io {

std::string fmt(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

json to_json(const Vec& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

namespace {

json estimator_config(const montecarlo::EstimatorReport& rep) {
  json c;
  c["model"] = rep.model;
  c["field"] = rep.field;
  c["x0"] = to_json(rep.x0);
  c["epsilon"] = rep.epsilon;
  c["t"] = rep.t;
  c["horizon"] = rep.horizon;
  c["n_paths"] = rep.n_paths;
  c["seed"] = rep.seed;
  c["workers"] = rep.workers;
  c["step"] = rep.step;
  c["integrator"] = rep.integrator;
  return c;
}

json table_config(const montecarlo::ConvergenceTable& t) {
  json c;
  c["model"] = t.model;
  c["field"] = t.field;
  c["x0"] = to_json(t.x0);
  c["t"] = t.t;
  c["n_paths"] = t.n_paths;
  c["seed"] = t.seed;
  c["workers"] = t.workers;
  c["step"] = t.step;
  c["integrator"] = t.integrator;
  return c;
}

json oracle_config(const montecarlo::SdeMomentReport& rep) {
  json c;
  c["t"] = rep.t;
  c["dt"] = rep.dt;
  c["n_paths"] = rep.n_paths;
  c["seed"] = rep.seed;
  c["workers"] = rep.workers;
  return c;
}

json stat(const montecarlo::MomentStat& s) {
  return json{{"value", s.value}, {"stderr", s.stderr_}};
}

}  // namespace

json to_json(const montecarlo::EstimatorReport& rep) {
  json j;
  j["kind"] = "estimator_report";
  j["version"] = kVersion;
  j["config"] = estimator_config(rep);
  j["estimate"] = rep.estimate;
  j["stderr"] = rep.stderr_;
  j["failed_paths"] = rep.failed_paths;
  if (rep.failed_paths > 0) j["first_error"] = rep.first_error;
  j["elapsed_seconds"] = rep.elapsed_seconds;
  return j;
}

json to_json(const montecarlo::ConvergenceTable& table) {
  json j;
  j["kind"] = "convergence_table";
  j["version"] = kVersion;
  j["config"] = table_config(table);
  if (table.reference.has) {
    j["reference"] = {{"value", table.reference.value},
                      {"stderr", table.reference.stderr_},
                      {"provenance", table.reference.provenance}};
  } else {
    j["reference"] = nullptr;
  }
  json rows = json::array();
  for (const auto& r : table.rows) {
    rows.push_back(json{{"epsilon", r.epsilon},
                        {"estimate", r.estimate},
                        {"stderr", r.stderr_},
                        {"n_paths", r.n_paths},
                        {"failed_paths", r.failed_paths}});
  }
  j["rows"] = rows;
  return j;
}

json to_json(const montecarlo::SdeMomentReport& rep) {
  json j;
  j["kind"] = "sde_moment_report";
  j["version"] = kVersion;
  j["config"] = oracle_config(rep);
  j["moments"] = {{"ex", stat(rep.ex)},   {"ey", stat(rep.ey)},
                  {"ez", stat(rep.ez)},   {"ex2", stat(rep.ex2)},
                  {"ey2", stat(rep.ey2)}, {"ez2", stat(rep.ez2)},
                  {"var_z", stat(rep.var_z)}};
  j["elapsed_seconds"] = rep.elapsed_seconds;
  return j;
}

std::string csv_preamble(const json& config) {
  std::ostringstream out;
  out << "# subriem " << kVersion << "\n";
  out << "# config " << config.dump() << "\n";
  return out.str();
}

std::string to_csv(const montecarlo::EstimatorReport& rep) {
  std::ostringstream out;
  out << csv_preamble(estimator_config(rep));
  out << "model,field,epsilon,t,n_paths,failed_paths,seed,estimate,stderr\n";
  out << rep.model << ',' << rep.field << ',' << fmt(rep.epsilon) << ','
      << fmt(rep.t) << ',' << rep.n_paths << ',' << rep.failed_paths << ','
      << rep.seed << ',' << fmt(rep.estimate) << ',' << fmt(rep.stderr_)
      << "\n";
  return out.str();
}

std::string to_csv(const montecarlo::ConvergenceTable& table) {
  std::ostringstream out;
  out << csv_preamble(table_config(table));
  out << "epsilon,estimate,stderr,n_paths,failed_paths,reference,"
         "reference_stderr,reference_provenance\n";
  for (const auto& r : table.rows) {
    out << fmt(r.epsilon) << ',' << fmt(r.estimate) << ',' << fmt(r.stderr_)
        << ',' << r.n_paths << ',' << r.failed_paths << ',';
    if (table.reference.has)
      out << fmt(table.reference.value) << ',' << fmt(table.reference.stderr_)
          << ',' << table.reference.provenance;
    else
      out << ",,none";
    out << "\n";
  }
  return out.str();
}

std::string to_csv(const montecarlo::SdeMomentReport& rep) {
  std::ostringstream out;
  out << csv_preamble(oracle_config(rep));
  out << "moment,value,stderr\n";
  auto row = [&](const char* name, const montecarlo::MomentStat& s) {
    out << name << ',' << fmt(s.value) << ',' << fmt(s.stderr_) << "\n";
  };
  row("ex", rep.ex);
  row("ey", rep.ey);
  row("ez", rep.ez);
  row("ex2", rep.ex2);
  row("ey2", rep.ey2);
  row("ez2", rep.ez2);
  row("var_z", rep.var_z);
  return out.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace subriem::io

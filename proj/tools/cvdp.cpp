// Command-line front end.
//
// Exit status: 0 when the analysis ran (a failing property is a result, not
// an error), 2 for unreadable or ill-shaped input, 3 for numerical aborts.

#include "cvdp/cvdp.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace cvdp;

struct RunConfig {
  double zero_tol = kDefaultTol;
  double det_tol = kDefaultTol;
  double step = kDefaultStep;
  std::uint64_t seed = 1;
  std::size_t samples = 10000;
  std::string format;  // json, or csv for time series when unset
  std::string out = "-";
};

void emit(const std::string& path, const std::string& text) {
  if (path == "-" || path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::parse_error, "cannot write " + path);
  f << text;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& row : parse_csv_rows(s))
    out.insert(out.end(), row.begin(), row.end());
  return out;
}

std::string trajectory_csv(const Trajectory& tr, const std::vector<std::pair<std::string, std::vector<Vector>>>& cols) {
  std::ostringstream out;
  out << "t";
  for (const auto& [name, series] : cols)
    for (Eigen::Index i = 0; i < series.front().size(); ++i) out << ',' << name << i + 1;
  out << ",s_minus,s_plus,sc_minus,sc_plus\n";
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    out << format_double(tr.times[k]);
    for (const auto& [name, series] : cols)
      for (Eigen::Index i = 0; i < series[k].size(); ++i) out << ',' << format_double(series[k][i]);
    const auto& c = tr.counts[k];
    out << ',' << c.s_minus << ',' << c.s_plus << ',' << c.sc_minus << ',' << c.sc_plus << '\n';
  }
  return out.str();
}

Json trajectory_json(const Trajectory& tr) {
  Json states = Json::array(), counts = Json::array();
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    states.push_back(vector_to_json(tr.states[k]));
    counts.push_back(to_json(tr.counts[k]));
  }
  Json j = events_to_json(tr.events, tr.observed_settling_time);
  j["times"] = tr.times;
  j["states"] = states;
  j["counts"] = counts;
  return j;
}

int exit_code(ErrorCode c) { return c == ErrorCode::numerical_abort ? 3 : 2; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sign-variation, compound-matrix and cooperative-dynamics toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig cfg;
  app.add_option("--zero-tol", cfg.zero_tol, "Entries with |x| <= tol count as zero")
      ->envname("CVDP_ZERO_TOL")
      ->check(CLI::PositiveNumber);
  app.add_option("--det-tol", cfg.det_tol, "Relative tolerance for minors and singularity")
      ->envname("CVDP_DET_TOL")
      ->check(CLI::PositiveNumber);
  app.add_option("--step", cfg.step, "Integration step")->envname("CVDP_STEP")->check(CLI::PositiveNumber);
  app.add_option("--seed", cfg.seed, "Sampler seed")->envname("CVDP_SEED");
  app.add_option("--samples", cfg.samples, "Sample budget for counterexample search")
      ->envname("CVDP_SAMPLES")
      ->check(CLI::PositiveNumber);
  app.add_option("--format", cfg.format, "Output format")
      ->envname("CVDP_FORMAT")
      ->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--out", cfg.out, "Output file ('-' for stdout)");

  std::string input;
  auto* classify_cmd = app.add_subcommand("classify", "Sign regularity and structural classes of a matrix");
  classify_cmd->add_option("matrix", input, "Matrix file (.csv/.json) or '-'")->required();

  int order = 1;
  int max_dim = kMaxCompoundDim;
  bool additive = false;
  auto* compound_cmd = app.add_subcommand("compound", "Multiplicative or additive compound");
  compound_cmd->add_option("matrix", input, "Matrix file or '-'")->required();
  compound_cmd->add_option("-p,--order", order, "Compound order")->required();
  auto* add_flag = compound_cmd->add_flag("--additive", additive, "Additive compound A^[p]");
  compound_cmd->add_flag("--multiplicative", "Multiplicative compound A^(p) (default)")->excludes(add_flag);
  compound_cmd->add_option("--max-dim", max_dim, "Largest matrix dimension accepted")->check(CLI::PositiveNumber);

  std::string values;
  auto* signvar_cmd = app.add_subcommand("signvar", "Sign-variation counters of a vector");
  auto* signvar_in = signvar_cmd->add_option("vector", input, "Vector file or '-'");
  signvar_cmd->add_option("--values", values, "Comma-separated entries")->excludes(signvar_in);

  std::string property = "scvdp";
  int p_order = 0;
  auto* verify_cmd = app.add_subcommand("verify", "Variation-diminishing property of a matrix");
  verify_cmd->add_option("matrix", input, "Matrix file or '-'")->required();
  verify_cmd->add_option("--property", property, "Property to check")
      ->check(CLI::IsMember({"scvdp", "weak-cvdp", "svdp", "nonstandard", "prop-sv1"}));
  verify_cmd->add_option("-p", p_order, "Bound p for the nonstandard property");

  std::string x0_path, events_path;
  double t0 = 0.0, t1 = 1.0;
  bool t1_given = false;
  auto* simulate_cmd = app.add_subcommand("simulate", "Simulate x' = A(t) x and monitor sign counters");
  simulate_cmd->add_option("system", input, "System spec JSON")->required();
  simulate_cmd->add_option("--x0", x0_path, "Initial state file (otherwise \"x0\" in the spec)");
  simulate_cmd->add_option("--t0", t0, "Initial time (otherwise \"t0\" in the spec)");
  auto* t1_opt = simulate_cmd->add_option("--t1", t1, "Final time (otherwise \"t1\" in the spec)");
  simulate_cmd->add_option("--events", events_path, "Write the event list as JSON");

  std::string grid_text;
  bool all_orders_flag = false;
  auto* cvds_cmd = app.add_subcommand("verify-cvds", "Check positivity of odd minors of the transition matrix");
  cvds_cmd->add_option("system", input, "System spec JSON")->required();
  cvds_cmd->add_option("--grid", grid_text, "Comma-separated grid times (otherwise \"grid\" in the spec)");
  cvds_cmd->add_flag("--all-orders", all_orders_flag, "Check every order (TPDS) instead of odd orders");

  auto* rfmr_cmd = app.add_subcommand("rfmr", "Ring flow model with its variational system");
  rfmr_cmd->add_option("params", input, "JSON with lambda, x0, z0, horizon, step")->required();
  rfmr_cmd->add_option("--events", events_path, "Write the event list of z as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << error_to_json(Error(ErrorCode::parse_error, e.what())).dump() << "\n";
    return 2;
  }
  t1_given = t1_opt->count() > 0;

  try {
    if (*classify_cmd) {
      emit(cfg.out, dump(to_json(classify(load_matrix(input), cfg.det_tol))));
    } else if (*compound_cmd) {
      const Matrix a = load_matrix(input);
      const auto c = additive ? add_compound(a, order, max_dim) : mult_compound(a, order, max_dim);
      emit(cfg.out, cfg.format == "csv" ? matrix_to_csv(c.entries) : dump(to_json(c)));
    } else if (*signvar_cmd) {
      if (input.empty() && values.empty()) throw Error(ErrorCode::parse_error, "signvar needs a vector");
      const Vector v = values.empty() ? load_vector(input) : to_vector(parse_list(values));
      Json j = to_json(sign_report(v, cfg.zero_tol));
      j["schema"] = kSchemaVersion;
      emit(cfg.out, dump(j));
    } else if (*verify_cmd) {
      const Matrix a = load_matrix(input);
      VdpOptions opt{cfg.det_tol, cfg.samples, cfg.seed};
      VdpVerdict v;
      if (property == "scvdp") v = check_scvdp(a, opt);
      else if (property == "weak-cvdp") v = check_weak_cvdp(a, opt);
      else if (property == "svdp") v = check_svdp(a, opt);
      else if (property == "nonstandard") v = check_nonstandard_vdp(a, p_order, opt);
      else v = check_prop_sv1(a, opt);
      emit(cfg.out, dump(to_json(v)));
    } else if (*simulate_cmd) {
      const Json spec = parse_json_text(read_text(input));
      const auto sys = system_from_json(spec);
      Vector x0;
      if (!x0_path.empty()) x0 = load_vector(x0_path);
      else if (spec.contains("x0")) x0 = vector_from_json(spec.at("x0"));
      else throw Error(ErrorCode::parse_error, "no initial state: pass --x0 or put \"x0\" in the spec");
      if (simulate_cmd->get_option("--t0")->count() == 0) t0 = spec.value("t0", t0);
      if (!t1_given) t1 = spec.value("t1", t1);
      SimulateOptions opt;
      opt.zero_tol = cfg.zero_tol;
      const auto tr = simulate(sys, x0, t0, t1, cfg.step, opt);
      if (!events_path.empty()) emit(events_path, dump(events_to_json(tr.events, tr.observed_settling_time)));
      emit(cfg.out, cfg.format == "json" ? dump(trajectory_json(tr)) : trajectory_csv(tr, {{"x", tr.states}}));
    } else if (*cvds_cmd) {
      const Json spec = parse_json_text(read_text(input));
      const auto sys = system_from_json(spec);
      const double start = spec.value("t0", 0.0);
      std::vector<double> grid;
      if (!grid_text.empty()) grid = parse_list(grid_text);
      else if (spec.contains("grid")) grid = spec.at("grid").get<std::vector<double>>();
      else throw Error(ErrorCode::parse_error, "no grid: pass --grid or put \"grid\" in the spec");
      const auto v = all_orders_flag ? verify_tpds(sys, start, grid, cfg.step) : verify_cvds(sys, start, grid, cfg.step);
      emit(cfg.out, dump(to_json(v)));
    } else if (*rfmr_cmd) {
      const auto spec = rfmr_spec_from_json(parse_json_text(read_text(input)));
      const double step = app.get_option("--step")->count() ? cfg.step : spec.step;
      RfmrOptions opt;
      opt.zero_tol = cfg.zero_tol;
      const auto run = simulate_with_variational(spec.params, spec.x0, spec.z0, spec.horizon, step, opt);
      if (!events_path.empty()) emit(events_path, dump(events_to_json(run.z.events, run.z.observed_settling_time)));
      if (cfg.format == "json") {
        Json j = trajectory_json(run.z);
        Json xs = Json::array(), fs = Json::array();
        for (std::size_t k = 0; k < run.x.states.size(); ++k) {
          xs.push_back(vector_to_json(run.x.states[k]));
          fs.push_back(vector_to_json(run.flows[k]));
        }
        j["x"] = xs;
        j["flows"] = fs;
        j["reducible_times"] = run.reducible_times;
        j["clamps"] = run.clamps;
        emit(cfg.out, dump(j));
      } else {
        emit(cfg.out, trajectory_csv(run.z, {{"x", run.x.states}, {"z", run.z.states}, {"flow", run.flows}}));
      }
    }
  } catch (const Error& e) {
    std::cerr << error_to_json(e).dump() << "\n";
    return exit_code(e.code());
  } catch (const Json::exception& e) {
    std::cerr << error_to_json(Error(ErrorCode::parse_error, e.what())).dump() << "\n";
    return 2;
  }
  return 0;
}

// qnet: command-line front end for network Bell scenarios.
//
//   qnet analyze  scenario.json
//   qnet eval     scenario.json [--indep-set A1,A3] [--correlations]
//   qnet optimize scenario.json [--restarts N] [--seed S] ...
//   qnet certify  scenario.json [--tol T] [--probes N]
//   qnet verify   [--suite all] [--trials N] [--seed S]
//
// Exit status: 0 success, 1 a verify suite failed, 2 input error.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "qnet/error.hpp"
#include "qnet/scenario_io.hpp"
#include "qnet/verify.hpp"

namespace {

using qnet::io::Json;

struct Options {
  std::string file;
  std::string format = "json";
  std::string indep_set;
  bool correlations = false;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int restarts = 0;
  int max_iterations = 0;
  double tol = 0.0;
  double fd_step = 0.0;
  std::string cls;
  std::string constraint;
  int probes = qnet::kDefaultProbes;
  std::string suite = "all";
  int trials = 1000;
};

void emit(const Json& report, const std::string& format) {
  if (format == "table")
    std::cout << qnet::io::to_table(report);
  else
    std::cout << report.dump(2) << "\n";
}

qnet::PartySet parse_set_flag(const std::string& flag, const qnet::NetworkTopology& topo) {
  qnet::PartySet set;
  std::stringstream ss(flag);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    if (auto p = topo.party_index(item)) {
      set.push_back(*p);
    } else if (item.find_first_not_of("0123456789") == std::string::npos) {
      const int k = std::stoi(item);
      if (k < 1 || k > topo.party_count())
        throw qnet::Error(qnet::ErrorCode::UnknownParty, "--indep-set: no party " + item);
      set.push_back(k - 1);
    } else {
      throw qnet::Error(qnet::ErrorCode::UnknownParty, "--indep-set: unknown party '" + item + "'");
    }
  }
  std::sort(set.begin(), set.end());
  return set;
}

qnet::io::ParsedScenario load(const Options& o) {
  auto parsed = qnet::io::parse_scenario(o.file);
  if (!o.indep_set.empty()) {
    parsed.scenario.independent_set = parse_set_flag(o.indep_set, parsed.scenario.topology);
    qnet::validate_scenario(parsed.scenario);
  }
  return parsed;
}

int analyze(const Options& o) {
  const std::string data = [&] {
    std::ifstream in(o.file, std::ios::binary);
    if (!in) throw qnet::Error(qnet::ErrorCode::ParseError, "cannot read '" + o.file + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }();
  const auto topo = qnet::io::parse_topology(qnet::io::parse_document(data));
  Json report = qnet::io::report_header("analyze", qnet::io::input_digest(data));
  report.update(qnet::io::to_json(qnet::independence_report(topo), topo));
  emit(report, o.format);
  return 0;
}

int eval(const Options& o) {
  const auto parsed = load(o);
  const auto& sc = parsed.scenario;
  Json report = qnet::io::report_header("eval", parsed.digest);
  report.update(qnet::io::to_json(qnet::evaluate_S(sc), sc.topology));
  if (o.correlations) report["correlations"] = qnet::io::correlations_to_json(sc);
  emit(report, o.format);
  return 0;
}

int optimize(const Options& o) {
  const auto parsed = load(o);
  auto config = parsed.optimize;
  if (o.restarts) config.restarts = o.restarts;
  if (o.max_iterations) config.max_iterations = o.max_iterations;
  if (o.tol > 0.0) config.tolerance = o.tol;
  if (o.fd_step > 0.0) config.fd_step = o.fd_step;
  if (o.seed_set) config.seed = o.seed;
  Json flags;
  if (!o.cls.empty()) flags["class"] = o.cls;
  if (!o.constraint.empty()) flags["constraint"] = o.constraint;
  if (!flags.empty()) config = qnet::io::parse_optimize_config(flags, parsed.scenario.topology, config);

  const auto result = qnet::optimize_S(parsed.scenario, config);
  Json report = qnet::io::report_header("optimize", parsed.digest);
  report["config"] = {{"restarts", config.restarts},
                      {"max_iterations", config.max_iterations},
                      {"tolerance", config.tolerance},
                      {"seed", config.seed},
                      {"class", qnet::to_string(config.observable_class)},
                      {"constraint", qnet::to_string(config.constraint)},
                      {"fd_step", config.fd_step}};
  report.update(qnet::io::to_json(result, parsed.scenario.topology));
  emit(report, o.format);
  return 0;
}

int certify(const Options& o) {
  const auto parsed = load(o);
  const double tol = o.tol > 0.0 ? o.tol : parsed.scenario.tol.algebraic;
  const auto cert = qnet::max_violation_certificate(parsed.scenario, o.probes, o.seed, tol);
  Json report = qnet::io::report_header("certify", parsed.digest);
  report.update(qnet::io::to_json(cert, parsed.scenario.topology));
  emit(report, o.format);
  return 0;
}

int verify(const Options& o) {
  const auto v = qnet::run_verify(o.suite, o.trials, o.seed);
  Json report = qnet::io::report_header("verify", "");
  report["suite"] = v.suite;
  report["trials"] = v.trials;
  report["seed"] = v.seed;
  Json suites = Json::array();
  for (const auto& s : v.suites) {
    suites.push_back({{"name", s.name},
                      {"bound", s.bound},
                      {"trials", s.trials},
                      {"passed", s.passed},
                      {"worst_residual", qnet::io::round9(s.worst_residual)},
                      {"tolerance", s.tolerance},
                      {"pass", s.pass}});
  }
  report["suites"] = std::move(suites);
  report["pass"] = v.pass;
  emit(report, o.format);
  return v.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Network Bell scenario toolkit"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub, bool file) {
    if (file) sub->add_option("scenario", o.file, "Scenario JSON file")->required();
    sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "table"}));
  };
  auto add_set = [&](CLI::App* sub) {
    sub->add_option("--indep-set", o.indep_set, "Independent set: party names or 1-based indices");
  };

  auto* analyze_cmd = app.add_subcommand("analyze", "Independence structure of the network");
  add_common(analyze_cmd, true);

  auto* eval_cmd = app.add_subcommand("eval", "Evaluate I, J and S");
  add_common(eval_cmd, true);
  add_set(eval_cmd);
  eval_cmd->add_flag("--correlations", o.correlations, "Include p(a|x) tables");

  auto* opt_cmd = app.add_subcommand("optimize", "Maximise S over the observables");
  add_common(opt_cmd, true);
  add_set(opt_cmd);
  opt_cmd->add_option("--restarts", o.restarts)->check(CLI::PositiveNumber);
  opt_cmd->add_option("--max-iterations", o.max_iterations)->check(CLI::PositiveNumber);
  opt_cmd->add_option("--tol", o.tol, "Convergence tolerance on S")->check(CLI::PositiveNumber);
  opt_cmd->add_option("--fd-step", o.fd_step)->check(CLI::PositiveNumber);
  opt_cmd->add_option("--class", o.cls)->check(CLI::IsMember({"dichotomic", "contraction"}));
  opt_cmd->add_option("--constraint", o.constraint)
      ->check(CLI::IsMember({"none", "abelian_pairs", "fixed_state"}));
  opt_cmd->add_option("--seed", o.seed)->each([&](const std::string&) { o.seed_set = true; });

  auto* cert_cmd = app.add_subcommand("certify", "Maximal-violation certificate");
  add_common(cert_cmd, true);
  add_set(cert_cmd);
  cert_cmd->add_option("--tol", o.tol, "Residual tolerance")->check(CLI::PositiveNumber);
  cert_cmd->add_option("--probes", o.probes)->check(CLI::NonNegativeNumber);
  cert_cmd->add_option("--seed", o.seed);

  auto* verify_cmd = app.add_subcommand("verify", "Randomised property suites");
  add_common(verify_cmd, false);
  std::vector<std::string> suites{"all"};
  for (const auto& s : qnet::suite_names()) suites.push_back(s);
  verify_cmd->add_option("--suite", o.suite)->check(CLI::IsMember(suites));
  verify_cmd->add_option("--trials", o.trials)->check(CLI::PositiveNumber);
  verify_cmd->add_option("--seed", o.seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*analyze_cmd) return analyze(o);
    if (*eval_cmd) return eval(o);
    if (*opt_cmd) return optimize(o);
    if (*cert_cmd) return certify(o);
    if (*verify_cmd) return verify(o);
  } catch (const qnet::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

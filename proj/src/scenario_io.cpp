#include "qnet/scenario_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "qnet/error.hpp"

namespace qnet::io {

namespace {

[[noreturn]] void parse_error(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::ParseError, path + ": " + what);
}

const Json& require(const Json& node, const char* key, const std::string& path) {
  if (!node.is_object()) parse_error(path, "expected an object");
  auto it = node.find(key);
  if (it == node.end()) parse_error(path, std::string("missing key \"") + key + "\"");
  return *it;
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string index(const std::string& path, std::size_t k) {
  return path + "[" + std::to_string(k) + "]";
}

double number(const Json& node, const std::string& path) {
  if (!node.is_number()) parse_error(path, "expected a number");
  return node.get<double>();
}

int integer(const Json& node, const std::string& path) {
  if (!node.is_number_integer()) parse_error(path, "expected an integer");
  return node.get<int>();
}

std::string text(const Json& node, const std::string& path) {
  if (!node.is_string()) parse_error(path, "expected a string");
  return node.get<std::string>();
}

const Json& array(const Json& node, const std::string& path) {
  if (!node.is_array()) parse_error(path, "expected an array");
  return node;
}

std::vector<double> numbers(const Json& node, const std::string& path) {
  std::vector<double> out;
  for (std::size_t k = 0; k < array(node, path).size(); ++k)
    out.push_back(number(node[k], index(path, k)));
  return out;
}

/// Re-raise a library error with scenario context, keeping its code.
template <class F>
auto with_context(const std::string& context, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError) throw;
    throw Error(e.code(), context + ": " + e.detail());
  }
}

int party_of(const NetworkTopology& topo, const std::string& name, const std::string& path) {
  auto p = topo.party_index(name);
  if (!p) throw Error(ErrorCode::UnknownParty, path + ": unknown party '" + name + "'");
  return *p;
}

Matrix pauli_by_name(const std::string& name, const std::string& path) {
  if (name == "X") return pauli::x();
  if (name == "Y") return pauli::y();
  if (name == "Z") return pauli::z();
  if (name == "I") return pauli::identity(2);
  if (name == "(Z+X)/sqrt2") return pauli::z_plus_x();
  if (name == "(Z-X)/sqrt2") return pauli::z_minus_x();
  parse_error(path, "unknown pauli '" + name + "'");
}

Matrix parse_observable(const Json& node, const std::string& path) {
  const std::string kind = text(require(node, "kind", path), join(path, "kind"));
  if (kind == "pauli") {
    const Json& op = node.contains("op") ? node["op"] : require(node, "pauli", path);
    Matrix m = pauli_by_name(text(op, join(path, "op")), join(path, "op"));
    int k = 1;
    if (node.contains("tensor")) {
      k = integer(node["tensor"], join(path, "tensor"));
      if (k < 1) parse_error(join(path, "tensor"), "must be >= 1");
    }
    return pauli::tensor_power(m, k);
  }
  if (kind == "bloch") {
    const double polar = number(require(node, "polar", path), join(path, "polar"));
    const double az = node.contains("azimuth") ? number(node["azimuth"], join(path, "azimuth")) : 0.0;
    return observable_from_params(ObservableParams::bloch(polar, az));
  }
  if (kind == "matrix") return parse_matrix(require(node, "matrix", path), join(path, "matrix"));
  if (kind == "params") return observable_from_params(parse_params(node, path));
  parse_error(join(path, "kind"), "unknown observable kind '" + kind + "'");
}

Matrix parse_local_state(const Json& node, int dim, const std::string& path) {
  if (!node.is_object()) parse_error(path, "expected an object");
  if (node.contains("basis")) {
    const int k = integer(node["basis"], join(path, "basis"));
    if (k < 0 || k >= dim) parse_error(join(path, "basis"), "basis index out of range");
    Matrix rho = Matrix::Zero(dim, dim);
    rho(k, k) = 1.0;
    return rho;
  }
  if (node.contains("bloch")) {
    const auto r = numbers(node["bloch"], join(path, "bloch"));
    if (r.size() != 3 || dim != 2) parse_error(join(path, "bloch"), "needs 3 components on a qubit");
    return 0.5 * (pauli::identity(2) + r[0] * pauli::x() + r[1] * pauli::y() + r[2] * pauli::z());
  }
  if (node.contains("mixed")) return Matrix::Identity(dim, dim) / static_cast<double>(dim);
  return parse_matrix(require(node, "matrix", path), join(path, "matrix"));
}

SourceKind source_kind(const std::string& kind, const std::string& path) {
  if (kind == "singlet") return SourceKind::Singlet;
  if (kind == "maximally_entangled") return SourceKind::MaximallyEntangled;
  if (kind == "werner") return SourceKind::Werner;
  if (kind == "product") return SourceKind::Product;
  if (kind == "separable_mixture") return SourceKind::SeparableMixture;
  if (kind == "explicit") return SourceKind::Explicit;
  parse_error(path, "unknown state kind '" + kind + "'");
}

SourceState parse_source_state(const Json& node, const Source& src, const std::string& path) {
  std::vector<int> dims;
  for (const auto& m : src.members) dims.push_back(m.dim);
  const std::string kind_path = join(path, "kind");
  const SourceKind kind = source_kind(text(require(node, "kind", path), kind_path), kind_path);
  SourceParams params;
  switch (kind) {
    case SourceKind::Werner:
      params.visibility = number(require(node, "visibility", path), join(path, "visibility"));
      break;
    case SourceKind::Product: {
      const std::string lp = join(path, "locals");
      const Json& locals = array(require(node, "locals", path), lp);
      if (locals.size() != dims.size()) parse_error(lp, "need one local state per site");
      for (std::size_t k = 0; k < locals.size(); ++k)
        params.locals.push_back(parse_local_state(locals[k], dims[k], index(lp, k)));
      break;
    }
    case SourceKind::SeparableMixture: {
      const std::string cp = join(path, "components");
      const Json& comps = array(require(node, "components", path), cp);
      for (std::size_t c = 0; c < comps.size(); ++c) {
        const std::string here = index(cp, c);
        SourceParams::Component comp;
        comp.weight = number(require(comps[c], "weight", here), join(here, "weight"));
        const std::string lp = join(here, "locals");
        const Json& locals = array(require(comps[c], "locals", here), lp);
        if (locals.size() != dims.size()) parse_error(lp, "need one local state per site");
        for (std::size_t k = 0; k < locals.size(); ++k)
          comp.locals.push_back(parse_local_state(locals[k], dims[k], index(lp, k)));
        params.components.push_back(std::move(comp));
      }
      break;
    }
    case SourceKind::Explicit:
      params.matrix = parse_matrix(require(node, "matrix", path), join(path, "matrix"));
      break;
    default:
      break;
  }
  return with_context("source '" + src.name + "'",
                      [&] { return make_source_state(src.name, kind, params, dims); });
}

ObservableClass observable_class(const std::string& s, const std::string& path) {
  if (s == "dichotomic") return ObservableClass::Dichotomic;
  if (s == "contraction") return ObservableClass::Contraction;
  if (s == "unbounded") return ObservableClass::Unbounded;
  parse_error(path, "unknown observable class '" + s + "'");
}

Constraint constraint(const std::string& s, const std::string& path) {
  if (s == "none") return Constraint::None;
  if (s == "abelian_pairs") return Constraint::AbelianPairs;
  if (s == "fixed_state") return Constraint::FixedState;
  parse_error(path, "unknown constraint '" + s + "'");
}

Json set_to_json(const PartySet& set) {
  Json out = Json::array();
  for (int p : set) out.push_back(p + 1);
  return out;
}

Json set_names(const PartySet& set, const NetworkTopology& topo) {
  Json out = Json::array();
  for (int p : set) out.push_back(topo.parties()[p]);
  return out;
}

PartySet set_from_json(const Json& j) {
  PartySet out;
  for (const auto& v : j) out.push_back(v.get<int>() - 1);
  return out;
}

std::optional<double> optional_number(const Json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<double>();
}

}  // namespace

std::string input_digest(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

double round9(double x) {
  if (!std::isfinite(x) || x == 0.0) return x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return std::strtod(buf, nullptr);
}

Json parse_document(const std::string& data) {
  try {
    return Json::parse(data);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError, std::string("document: ") + e.what());
  }
}

Json read_document(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_document(ss.str());
}

Matrix parse_matrix(const Json& node, const std::string& path) {
  if (!node.is_array() || node.empty()) parse_error(path, "expected a non-empty array of rows");
  const std::size_t n = node.size();
  Matrix m(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    const Json& row = node[r];
    if (!row.is_array() || row.size() != n) parse_error(path, "matrix is not square");
    for (std::size_t c = 0; c < n; ++c) {
      const Json& e = row[c];
      const std::string here = index(index(path, r), c);
      if (e.is_number()) {
        m(r, c) = e.get<double>();
      } else if (e.is_array() && e.size() == 2) {
        m(r, c) = Complex(number(e[0], here), number(e[1], here));
      } else {
        parse_error(here, "expected a number or [re, im]");
      }
    }
  }
  return m;
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

ObservableParams parse_params(const Json& node, const std::string& path) {
  ObservableParams p;
  p.dim = integer(require(node, "dim", path), join(path, "dim"));
  if (p.dim < 1) parse_error(join(path, "dim"), "must be >= 1");
  p.theta = numbers(require(node, "theta", path), join(path, "theta"));
  if (p.theta.size() != static_cast<std::size_t>(p.dim) * p.dim)
    parse_error(join(path, "theta"), "needs dim^2 entries");
  if (node.contains("eigen_angles")) {
    p.eigen_angles = numbers(node["eigen_angles"], join(path, "eigen_angles"));
    if (!p.eigen_angles.empty() && p.eigen_angles.size() != static_cast<std::size_t>(p.dim))
      parse_error(join(path, "eigen_angles"), "needs dim entries");
  }
  p.n_plus = node.contains("n_plus") ? integer(node["n_plus"], join(path, "n_plus")) : (p.dim + 1) / 2;
  p.n_minus = node.contains("n_minus") ? integer(node["n_minus"], join(path, "n_minus")) : p.dim - p.n_plus;
  if (!p.is_contraction() && (p.n_plus < 0 || p.n_minus < 0 || p.n_plus + p.n_minus != p.dim))
    parse_error(path, "signature must split dim");
  return p;
}

Json params_to_json(const ObservableParams& p) {
  Json j;
  j["kind"] = "params";
  j["dim"] = p.dim;
  j["n_plus"] = p.n_plus;
  j["n_minus"] = p.n_minus;
  j["theta"] = p.theta;
  if (p.is_contraction()) j["eigen_angles"] = p.eigen_angles;
  return j;
}

NetworkTopology parse_topology(const Json& doc) {
  if (!doc.is_object()) parse_error("document", "expected an object");
  TopologySpec spec;
  const Json& parties = array(require(doc, "parties", ""), "parties");
  for (std::size_t k = 0; k < parties.size(); ++k)
    spec.parties.push_back(text(parties[k], index("parties", k)));
  const Json& sources = array(require(doc, "sources", ""), "sources");
  for (std::size_t s = 0; s < sources.size(); ++s) {
    const std::string here = index("sources", s);
    SourceSpec src;
    src.name = sources[s].contains("name") ? text(sources[s]["name"], join(here, "name"))
                                           : "S" + std::to_string(s + 1);
    const Json& members = array(require(sources[s], "parties", here), join(here, "parties"));
    std::vector<int> dims(members.size(), 2);
    if (sources[s].contains("dims")) {
      const Json& d = array(sources[s]["dims"], join(here, "dims"));
      if (d.size() != members.size()) parse_error(join(here, "dims"), "need one dimension per party");
      for (std::size_t k = 0; k < d.size(); ++k) dims[k] = integer(d[k], index(join(here, "dims"), k));
    }
    for (std::size_t k = 0; k < members.size(); ++k)
      src.members.push_back({text(members[k], index(join(here, "parties"), k)), dims[k]});
    spec.sources.push_back(std::move(src));
  }
  return validate_topology(spec);
}

OptimizeConfig parse_optimize_config(const Json& node, const NetworkTopology& topology,
                                     OptimizeConfig c) {
  const std::string path = "optimize";
  if (!node.is_object()) parse_error(path, "expected an object");
  if (node.contains("restarts")) c.restarts = integer(node["restarts"], join(path, "restarts"));
  if (node.contains("max_iterations"))
    c.max_iterations = integer(node["max_iterations"], join(path, "max_iterations"));
  if (node.contains("tolerance")) c.tolerance = number(node["tolerance"], join(path, "tolerance"));
  if (node.contains("seed")) {
    if (!node["seed"].is_number_integer() || node["seed"].get<std::int64_t>() < 0) parse_error(join(path, "seed"), "expected a non-negative integer");
    c.seed = node["seed"].get<std::uint64_t>();
  }
  if (node.contains("class"))
    c.observable_class = observable_class(text(node["class"], join(path, "class")), join(path, "class"));
  if (node.contains("constraint"))
    c.constraint = constraint(text(node["constraint"], join(path, "constraint")), join(path, "constraint"));
  if (node.contains("fd_step")) c.fd_step = number(node["fd_step"], join(path, "fd_step"));
  if (node.contains("signatures")) {
    const std::string sp = join(path, "signatures");
    if (!node["signatures"].is_object()) parse_error(sp, "expected an object");
    for (const auto& [name, sig] : node["signatures"].items()) {
      const std::string here = join(sp, name);
      const int p = party_of(topology, name, here);
      if (!sig.is_array() || sig.size() != 2) parse_error(here, "expected [n_plus, n_minus]");
      c.signatures[p] = {integer(sig[0], index(here, 0)), integer(sig[1], index(here, 1))};
    }
  }
  if (c.restarts < 1) throw Error(ErrorCode::ValidationError, "optimize.restarts must be >= 1");
  if (c.max_iterations < 1)
    throw Error(ErrorCode::ValidationError, "optimize.max_iterations must be >= 1");
  if (!(c.tolerance > 0.0) || !(c.fd_step > 0.0))
    throw Error(ErrorCode::ValidationError, "optimize tolerances must be positive");
  return c;
}

ParsedScenario parse_scenario_json(const Json& doc, const std::string& digest) {
  const NetworkTopology topology = parse_topology(doc);
  auto layout = std::make_shared<const SubsystemLayout>(topology);

  Tolerances tol;
  if (doc.contains("tolerances")) {
    const Json& t = doc["tolerances"];
    if (!t.is_object()) parse_error("tolerances", "expected an object");
    if (t.contains("algebraic")) tol.algebraic = number(t["algebraic"], "tolerances.algebraic");
    if (t.contains("classification"))
      tol.classification = number(t["classification"], "tolerances.classification");
    if (t.contains("faithfulness"))
      tol.faithfulness = number(t["faithfulness"], "tolerances.faithfulness");
    if (t.contains("bell")) tol.bell = number(t["bell"], "tolerances.bell");
  }

  std::optional<NetworkState> state;
  if (doc.contains("global_state")) {
    const Matrix rho = parse_matrix(require(doc["global_state"], "matrix", "global_state"),
                                    "global_state.matrix");
    state = with_context("global_state",
                         [&] { return NetworkState::from_global_density(layout, rho); });
  } else {
    std::vector<SourceState> sources;
    const Json& docs = doc["sources"];
    for (int s = 0; s < topology.source_count(); ++s) {
      const std::string here = index("sources", s);
      sources.push_back(parse_source_state(require(docs[s], "state", here), topology.sources()[s],
                                           join(here, "state")));
    }
    state = assemble_network_state(std::move(sources), layout);
  }

  const Json& obs = require(doc, "observables", "");
  if (!obs.is_object()) parse_error("observables", "expected an object keyed by party");
  for (const auto& [name, _] : obs.items()) party_of(topology, name, "observables." + name);
  std::vector<ObservablePair> observables;
  for (int p = 0; p < topology.party_count(); ++p) {
    const std::string& name = topology.parties()[p];
    if (!obs.contains(name))
      throw Error(ErrorCode::ValidationError, "party '" + name + "' has no observables");
    const std::string here = "observables." + name;
    const Json& pair = obs[name];
    if (!pair.is_array() || pair.size() != 2) parse_error(here, "expected [obs_x0, obs_x1]");
    observables.push_back({parse_observable(pair[0], index(here, 0)),
                           parse_observable(pair[1], index(here, 1))});
  }

  std::optional<PartySet> set;
  if (doc.contains("independent_set") && !doc["independent_set"].is_null()) {
    const Json& names = array(doc["independent_set"], "independent_set");
    PartySet s;
    for (std::size_t k = 0; k < names.size(); ++k) {
      const std::string here = index("independent_set", k);
      s.push_back(party_of(topology, text(names[k], here), here));
    }
    std::sort(s.begin(), s.end());
    set = s;
  }

  ObservableClass cls = ObservableClass::Dichotomic;
  if (doc.contains("observable_class"))
    cls = observable_class(text(doc["observable_class"], "observable_class"), "observable_class");

  ParsedScenario out{
      Scenario{topology, layout, std::move(*state), std::move(observables), set, cls, tol},
      OptimizeConfig{}, digest};
  validate_scenario(out.scenario);
  if (doc.contains("optimize")) out.optimize = parse_optimize_config(doc["optimize"], topology);
  out.optimize.observable_class =
      doc.contains("optimize") && doc["optimize"].contains("class") ? out.optimize.observable_class
                                                                    : cls;
  return out;
}

ParsedScenario parse_scenario_text(const std::string& data) {
  return parse_scenario_json(parse_document(data), input_digest(data));
}

ParsedScenario parse_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario_text(ss.str());
}

Json report_header(const std::string& kind, const std::string& digest) {
  Json j;
  j["report"] = kind;
  j["version"] = kVersion;
  j["input_digest"] = digest;
  return j;
}

Json to_json(const IndependenceReport& r, const NetworkTopology& topology) {
  Json j;
  j["parties"] = topology.parties();
  j["h_max"] = r.h_max;
  j["no_independent_pair"] = r.no_independent_pair;
  Json levels = Json::array();
  for (const auto& level : r.levels) {
    Json l;
    l["h"] = level.h;
    l["D"] = level.degree();
    Json sets = Json::array(), names = Json::array();
    for (const auto& s : level.sets) {
      sets.push_back(set_to_json(s));
      names.push_back(set_names(s, topology));
    }
    l["sets"] = std::move(sets);
    l["set_names"] = std::move(names);
    levels.push_back(std::move(l));
  }
  j["levels"] = std::move(levels);
  return j;
}

IndependenceReport independence_from_json(const Json& j) {
  IndependenceReport r;
  r.h_max = j.at("h_max").get<int>();
  r.no_independent_pair = j.at("no_independent_pair").get<bool>();
  for (const auto& l : j.at("levels")) {
    IndependenceLevel level;
    level.h = l.at("h").get<int>();
    for (const auto& s : l.at("sets")) level.sets.push_back(set_from_json(s));
    r.levels.push_back(std::move(level));
  }
  return r;
}

Json to_json(const BellReport& r, const NetworkTopology& topology) {
  Json j;
  j["I"] = round9(r.I);
  j["J"] = round9(r.J);
  j["S"] = round9(r.S);
  j["h"] = r.h;
  j["independent_set"] = set_to_json(r.independent_set);
  j["independent_set_names"] = set_names(r.independent_set, topology);
  j["classical_bound_satisfied"] = r.classical_bound_satisfied;
  j["tsirelson_satisfied"] = r.tsirelson_satisfied;
  j["violation"] = r.violation;
  j["maximal"] = r.maximal;
  return j;
}

BellReport bell_from_json(const Json& j) {
  BellReport r;
  r.I = j.at("I").get<double>();
  r.J = j.at("J").get<double>();
  r.S = j.at("S").get<double>();
  r.h = j.at("h").get<int>();
  r.independent_set = set_from_json(j.at("independent_set"));
  r.classical_bound_satisfied = j.at("classical_bound_satisfied").get<bool>();
  r.tsirelson_satisfied = j.at("tsirelson_satisfied").get<bool>();
  r.violation = j.at("violation").get<bool>();
  r.maximal = j.at("maximal").get<bool>();
  return r;
}

Json correlations_to_json(const Scenario& scenario) {
  const int m = scenario.topology.party_count();
  Json tables = Json::array();
  for (unsigned x = 0; x < (1u << m); ++x) {
    std::vector<int> inputs(m);
    for (int i = 0; i < m; ++i) inputs[i] = (x >> (m - 1 - i)) & 1u;
    Json t;
    t["inputs"] = inputs;
    Json probs = Json::array();
    for (double p : correlation(scenario, inputs)) probs.push_back(round9(p));
    t["probabilities"] = std::move(probs);
    tables.push_back(std::move(t));
  }
  return tables;
}

Json to_json(const CertificateReport& r, const NetworkTopology& topology) {
  Json j;
  j["independent_set"] = set_to_json(r.independent_set);
  j["independent_set_names"] = set_names(r.independent_set, topology);
  Json parties = Json::array();
  for (const auto& pc : r.parties) {
    Json p;
    p["party"] = pc.party + 1;
    p["name"] = topology.parties()[pc.party];
    p["r_sq0"] = round9(pc.r_sq0);
    p["r_sq1"] = round9(pc.r_sq1);
    p["r_anti"] = round9(pc.r_anti);
    p["algebra_dim"] = pc.algebra_dim;
    p["m2_structure"] = pc.m2_structure;
    p["op_sq0"] = pc.op_sq0 ? Json(round9(*pc.op_sq0)) : Json(nullptr);
    p["op_sq1"] = pc.op_sq1 ? Json(round9(*pc.op_sq1)) : Json(nullptr);
    p["op_anti"] = pc.op_anti ? Json(round9(*pc.op_anti)) : Json(nullptr);
    parties.push_back(std::move(p));
  }
  j["parties"] = std::move(parties);
  j["r_comp0"] = round9(r.r_comp0);
  j["r_comp1"] = round9(r.r_comp1);
  j["min_eigenvalue"] = round9(r.min_eigenvalue);
  j["faithful"] = r.faithful;
  j["probes"] = r.probes;
  j["tol"] = round9(r.tol);
  j["max_residual"] = round9(r.max_residual());
  j["pass"] = r.pass;
  return j;
}

CertificateReport certificate_from_json(const Json& j) {
  CertificateReport r;
  r.independent_set = set_from_json(j.at("independent_set"));
  for (const auto& p : j.at("parties")) {
    PartyCertificate pc;
    pc.party = p.at("party").get<int>() - 1;
    pc.r_sq0 = p.at("r_sq0").get<double>();
    pc.r_sq1 = p.at("r_sq1").get<double>();
    pc.r_anti = p.at("r_anti").get<double>();
    pc.algebra_dim = p.at("algebra_dim").get<int>();
    pc.m2_structure = p.at("m2_structure").get<bool>();
    pc.op_sq0 = optional_number(p, "op_sq0");
    pc.op_sq1 = optional_number(p, "op_sq1");
    pc.op_anti = optional_number(p, "op_anti");
    r.parties.push_back(std::move(pc));
  }
  r.r_comp0 = j.at("r_comp0").get<double>();
  r.r_comp1 = j.at("r_comp1").get<double>();
  r.min_eigenvalue = j.at("min_eigenvalue").get<double>();
  r.faithful = j.at("faithful").get<bool>();
  r.probes = j.at("probes").get<int>();
  r.tol = j.at("tol").get<double>();
  r.pass = j.at("pass").get<bool>();
  return r;
}

Json observables_to_json(const std::vector<ParamsPair>& params, const NetworkTopology& topology) {
  Json j = Json::object();
  for (std::size_t p = 0; p < params.size(); ++p)
    j[topology.parties()[p]] = Json::array({params_to_json(params[p][0]), params_to_json(params[p][1])});
  return j;
}

Json to_json(const OptimizationResult& r, const NetworkTopology& topology) {
  Json j;
  j["S"] = round9(r.S);
  j["I"] = round9(r.I);
  j["J"] = round9(r.J);
  j["independent_set"] = set_to_json(r.independent_set);
  j["independent_set_names"] = set_names(r.independent_set, topology);
  j["best_restart"] = r.best_restart;
  j["converged"] = r.converged;
  j["total_iterations"] = r.total_iterations;
  j["best_search_S"] = round9(r.best_search_S);
  j["max_observed_S"] = round9(r.max_observed_S);
  j["worst_step_decrease"] = round9(r.worst_step_decrease);
  j["min_independent_anticommutator"] = round9(r.min_independent_anticommutator);
  Json restarts = Json::array();
  for (const auto& s : r.restarts)
    restarts.push_back({{"S", round9(s.S)}, {"iterations", s.iterations}, {"converged", s.converged}});
  j["restarts"] = std::move(restarts);
  j["observables"] = observables_to_json(r.params, topology);
  return j;
}

OptimizationResult optimization_from_json(const Json& j) {
  OptimizationResult r;
  r.S = j.at("S").get<double>();
  r.I = j.at("I").get<double>();
  r.J = j.at("J").get<double>();
  r.independent_set = set_from_json(j.at("independent_set"));
  r.best_restart = j.at("best_restart").get<int>();
  r.converged = j.at("converged").get<bool>();
  r.total_iterations = j.at("total_iterations").get<int>();
  r.best_search_S = j.at("best_search_S").get<double>();
  r.max_observed_S = j.at("max_observed_S").get<double>();
  r.worst_step_decrease = j.at("worst_step_decrease").get<double>();
  r.min_independent_anticommutator = j.at("min_independent_anticommutator").get<double>();
  for (const auto& s : j.at("restarts"))
    r.restarts.push_back({s.at("S").get<double>(), s.at("iterations").get<int>(),
                          s.at("converged").get<bool>()});
  for (const auto& [name, pair] : j.at("observables").items())
    r.params.push_back({parse_params(pair.at(0), "observables." + name + "[0]"),
                        parse_params(pair.at(1), "observables." + name + "[1]")});
  return r;
}

namespace {

void flatten(const Json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& rows) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, rows);
  } else if (j.is_array() && !j.empty() && (j[0].is_object() || j[0].is_array()) &&
             !(j[0].is_array() && !j[0].empty() && j[0][0].is_number())) {
    for (std::size_t k = 0; k < j.size(); ++k) flatten(j[k], prefix + "[" + std::to_string(k) + "]", rows);
  } else {
    rows.emplace_back(prefix, j.is_string() ? j.get<std::string>() : j.dump());
  }
}

}  // namespace

std::string to_table(const Json& report) {
  std::vector<std::pair<std::string, std::string>> rows;
  flatten(report, "", rows);
  std::size_t width = 0;
  for (const auto& [k, _] : rows) width = std::max(width, k.size());
  std::ostringstream os;
  for (const auto& [k, v] : rows) os << std::left << std::setw(static_cast<int>(width) + 2) << k << v << "\n";
  return os.str();
}

}  // namespace qnet::io

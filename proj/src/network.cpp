#include "qnet/network.hpp"

#include <algorithm>
#include <set>

#include "qnet/error.hpp"

namespace qnet {

std::optional<int> NetworkTopology::party_index(const std::string& name) const {
  auto it = std::find(parties_.begin(), parties_.end(), name);
  if (it == parties_.end()) return std::nullopt;
  return static_cast<int>(it - parties_.begin());
}

std::vector<int> NetworkTopology::sources_of(int p) const {
  std::vector<int> out;
  for (int s = 0; s < source_count(); ++s)
    for (const auto& m : sources_[s].members)
      if (m.party == p) out.push_back(s);
  return out;
}

bool NetworkTopology::shares_source(int a, int b) const {
  for (const auto& src : sources_) {
    bool has_a = false, has_b = false;
    for (const auto& m : src.members) {
      has_a |= m.party == a;
      has_b |= m.party == b;
    }
    if (has_a && has_b) return true;
  }
  return false;
}

NetworkTopology validate_topology(const TopologySpec& spec) {
  if (spec.parties.empty()) throw Error(ErrorCode::EmptyNetwork, "no parties declared");
  if (spec.sources.empty()) throw Error(ErrorCode::EmptyNetwork, "no sources declared");

  NetworkTopology topo;
  std::set<std::string> seen;
  for (const auto& p : spec.parties) {
    if (!seen.insert(p).second)
      throw Error(ErrorCode::ValidationError, "duplicate party '" + p + "'");
  }
  topo.parties_ = spec.parties;

  for (const auto& src : spec.sources) {
    Source out;
    out.name = src.name;
    std::set<int> members;
    for (const auto& m : src.members) {
      auto idx = topo.party_index(m.party);
      if (!idx)
        throw Error(ErrorCode::UnknownParty,
                    "source '" + src.name + "' references undeclared party '" + m.party + "'");
      if (!members.insert(*idx).second)
        throw Error(ErrorCode::DegenerateSource,
                    "source '" + src.name + "' lists party '" + m.party + "' twice");
      if (m.dim < 2)
        throw Error(ErrorCode::BadDims, "source '" + src.name + "' has local dimension < 2");
      out.members.push_back({*idx, m.dim});
    }
    if (members.size() < 2)
      throw Error(ErrorCode::DegenerateSource,
                  "source '" + src.name + "' touches fewer than 2 parties");
    topo.sources_.push_back(std::move(out));
  }
  return topo;
}

SharingGraph sharing_graph(const NetworkTopology& topology) {
  const int m = topology.party_count();
  SharingGraph g{m, std::vector<std::vector<bool>>(m, std::vector<bool>(m, false))};
  for (const auto& src : topology.sources()) {
    for (const auto& a : src.members)
      for (const auto& b : src.members)
        if (a.party != b.party) g.adjacent[a.party][b.party] = true;
  }
  return g;
}

namespace {

void extend(const SharingGraph& g, int h, int next, PartySet& current,
            std::vector<PartySet>& out) {
  if (static_cast<int>(current.size()) == h) {
    out.push_back(current);
    return;
  }
  const int needed = h - static_cast<int>(current.size());
  for (int v = next; v <= g.size - needed; ++v) {
    bool ok = true;
    for (int u : current)
      if (g.edge(u, v)) {
        ok = false;
        break;
      }
    if (!ok) continue;
    current.push_back(v);
    extend(g, h, v + 1, current, out);
    current.pop_back();
  }
}

}  // namespace

std::vector<PartySet> independent_sets(const NetworkTopology& topology, int h) {
  if (h < 2 || h > topology.party_count())
    throw Error(ErrorCode::HOutOfRange,
                "h = " + std::to_string(h) + " outside [2, " +
                    std::to_string(topology.party_count()) + "]");
  const auto g = sharing_graph(topology);
  std::vector<PartySet> out;
  PartySet current;
  extend(g, h, 0, current, out);
  return out;
}

bool is_independent_set(const NetworkTopology& topology, const PartySet& set) {
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (set[i] < 0 || set[i] >= topology.party_count()) return false;
    for (std::size_t j = i + 1; j < set.size(); ++j)
      if (set[i] == set[j] || topology.shares_source(set[i], set[j])) return false;
  }
  return true;
}

IndependenceReport independence_report(const NetworkTopology& topology) {
  IndependenceReport report;
  for (int h = 2; h <= topology.party_count(); ++h) {
    auto sets = independent_sets(topology, h);
    // Every (h-1)-subset of an independent h-set is independent, so the first
    // empty level ends the search.
    if (sets.empty()) break;
    report.levels.push_back({h, std::move(sets)});
    report.h_max = h;
  }
  report.no_independent_pair = report.levels.empty();
  return report;
}

namespace topologies {

TopologySpec chain(int parties, int dim) {
  TopologySpec spec;
  for (int i = 1; i <= parties; ++i) spec.parties.push_back("A" + std::to_string(i));
  for (int i = 1; i < parties; ++i)
    spec.sources.push_back({"S" + std::to_string(i),
                            {{spec.parties[i - 1], dim}, {spec.parties[i], dim}}});
  return spec;
}

TopologySpec star(int leaves, int dim) {
  TopologySpec spec;
  spec.parties.push_back("C");
  for (int i = 1; i <= leaves; ++i) spec.parties.push_back("L" + std::to_string(i));
  for (int i = 1; i <= leaves; ++i)
    spec.sources.push_back({"S" + std::to_string(i), {{"C", dim}, {spec.parties[i], dim}}});
  return spec;
}

TopologySpec triangle(int dim) {
  TopologySpec spec;
  spec.parties = {"A", "B", "C"};
  spec.sources = {{"SAB", {{"A", dim}, {"B", dim}}},
                  {"SBC", {{"B", dim}, {"C", dim}}},
                  {"SCA", {{"C", dim}, {"A", dim}}}};
  return spec;
}

}  // namespace topologies

}  // namespace qnet

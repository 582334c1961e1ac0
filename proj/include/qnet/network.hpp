#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace qnet {

/// Raw, unvalidated description of a network as read from a scenario file.
struct SourceSpec {
  struct Member {
    std::string party;
    int dim = 2;
  };
  std::string name;
  std::vector<Member> members;
};

struct TopologySpec {
  std::vector<std::string> parties;
  std::vector<SourceSpec> sources;
};

struct Source {
  struct Member {
    int party = 0;  // index into NetworkTopology::parties()
    int dim = 2;
  };
  std::string name;
  std::vector<Member> members;
};

/// Validated network: m parties, n sources, each source feeding >= 2 distinct
/// parties with one local subsystem per party.
class NetworkTopology {
 public:
  const std::vector<std::string>& parties() const { return parties_; }
  const std::vector<Source>& sources() const { return sources_; }
  int party_count() const { return static_cast<int>(parties_.size()); }
  int source_count() const { return static_cast<int>(sources_.size()); }

  std::optional<int> party_index(const std::string& name) const;

  /// Indices of the sources feeding party `p`, in source order.
  std::vector<int> sources_of(int p) const;

  bool shares_source(int a, int b) const;

 private:
  friend NetworkTopology validate_topology(const TopologySpec& spec);
  std::vector<std::string> parties_;
  std::vector<Source> sources_;
};

NetworkTopology validate_topology(const TopologySpec& spec);

struct SharingGraph {
  int size = 0;
  std::vector<std::vector<bool>> adjacent;

  bool edge(int a, int b) const { return adjacent[a][b]; }
};

SharingGraph sharing_graph(const NetworkTopology& topology);

using PartySet = std::vector<int>;

/// Size-h independent sets of the sharing graph, each sorted, the list sorted
/// lexicographically. Throws HOutOfRange unless 2 <= h <= m.
std::vector<PartySet> independent_sets(const NetworkTopology& topology, int h);

bool is_independent_set(const NetworkTopology& topology, const PartySet& set);

struct IndependenceLevel {
  int h = 0;
  std::vector<PartySet> sets;

  std::size_t degree() const { return sets.size(); }
};

struct IndependenceReport {
  int h_max = 1;
  bool no_independent_pair = true;
  std::vector<IndependenceLevel> levels;  // h = 2..h_max in order
};

IndependenceReport independence_report(const NetworkTopology& topology);

/// Builders for the standard topologies used throughout the tests.
namespace topologies {
/// Parties A1..Ak, sources S1..S(k-1) joining neighbours.
TopologySpec chain(int parties, int dim = 2);
/// Center C plus leaves L1..Lk, one bipartite source per leaf.
TopologySpec star(int leaves, int dim = 2);
/// Three parties, each pair sharing one bipartite source.
TopologySpec triangle(int dim = 2);
}  // namespace topologies

}  // namespace qnet

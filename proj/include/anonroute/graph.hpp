#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace anonroute {

using VertexId = std::uint32_t;

enum class GraphKind { complete, erdos_renyi, k_clique, custom };

std::string_view to_string(GraphKind kind);
GraphKind parse_graph_kind(std::string_view name);

/// Layout of a k-clique graph: vertex v lives in clique v / clique_size at
/// position v % clique_size.
struct CliqueMeta {
  std::size_t clique_count = 0;
  std::size_t clique_size = 0;

  std::size_t clique_of(VertexId v) const { return v / clique_size; }
  std::size_t position_of(VertexId v) const { return v % clique_size; }
  VertexId vertex_at(std::size_t clique, std::size_t position) const {
    return static_cast<VertexId>(clique * clique_size + position);
  }
};

/// Immutable undirected graph stored as sorted CSR neighbor lists.
///
/// Self-loops are ordinary edges: v is its own neighbor iff (v, v) is an edge,
/// and it then counts once towards |N(v)|. All generators below include
/// self-loops (always for cliques, Bernoulli(p) for Erdos-Renyi) so that the
/// complete graph has |N(v)| = n.
class Graph {
 public:
  /// Builds from per-vertex neighbor lists. Lists are sorted and deduplicated;
  /// throws Errc::invalid_argument on out-of-range ids or asymmetric input.
  static Graph from_adjacency(std::vector<std::vector<VertexId>> adjacency,
                              GraphKind kind = GraphKind::custom,
                              std::optional<CliqueMeta> clique_meta = std::nullopt);

  /// Builds from an undirected edge list; each {u, v} is inserted both ways.
  static Graph from_edges(std::size_t n, std::span<const std::pair<VertexId, VertexId>> edges,
                          bool add_self_loops = false);

  std::size_t size() const noexcept { return offsets_.size() - 1; }
  GraphKind kind() const noexcept { return kind_; }
  const std::optional<CliqueMeta>& clique_meta() const noexcept { return clique_meta_; }

  std::span<const VertexId> neighbors(VertexId v) const {
    return {targets_.data() + offsets_[v], targets_.data() + offsets_[v + 1]};
  }
  std::size_t degree(VertexId v) const { return offsets_[v + 1] - offsets_[v]; }
  bool adjacent(VertexId u, VertexId v) const;

  std::size_t max_degree() const;
  std::size_t min_degree() const;
  /// Number of undirected edges, self-loops counted once.
  std::size_t edge_count() const;
  bool connected() const;

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.offsets_ == b.offsets_ && a.targets_ == b.targets_;
  }

 private:
  Graph() = default;

  std::vector<std::size_t> offsets_{0};
  std::vector<VertexId> targets_;
  GraphKind kind_ = GraphKind::custom;
  std::optional<CliqueMeta> clique_meta_;
};

/// Edge density and concentration slack of the family F_n(p, gamma).
struct FamilyParams {
  double p = 1.0;
  double gamma = 0.0;
};

struct MembershipReport {
  bool member = false;
  bool degrees_ok = false;
  bool overlap_ok = false;
  double overlap = 0.0;
  std::size_t degree_violations = 0;
  std::size_t overlap_violations = 0;  // ordered pairs
  std::vector<VertexId> violating_vertices;  // first 10
  std::vector<std::pair<VertexId, VertexId>> violating_pairs;  // first 10, (u, v)
};

Graph make_complete(std::size_t n);

/// Each pair u != v and each self-loop is present independently with
/// probability p. Disconnected draws are resampled (up to 100 attempts).
Graph make_erdos_renyi(std::size_t n, double p, std::uint64_t seed);

Graph make_k_clique(std::size_t n, std::size_t k);

/// Smallest divisor k of n with n/k >= 2 and n/k + k - 1 <= degree_budget.
std::size_t choose_clique_count(std::size_t n, double degree_budget);

/// min over ordered pairs u != v of |N(u) ∩ N(v)| / |N(v)|.
double neighborhood_overlap_param(const Graph& g);

MembershipReport check_family_membership(const Graph& g, const FamilyParams& params);

/// min(1/2, (ln n / n)^(1/4)).
double default_gamma(std::size_t n);

/// "# n=<n> kind=<kind>[ k=<k>]" header, then one "u v" line per undirected
/// edge with u <= v; self-loops appear as "v v".
void write_edge_list(std::ostream& os, const Graph& g);
Graph read_edge_list(std::istream& is);

}  // namespace anonroute

#include "anonroute/graph.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "anonroute/error.hpp"
#include "anonroute/rng.hpp"

namespace anonroute {

namespace {

constexpr std::size_t kErAttempts = 100;
constexpr std::size_t kReportLimit = 10;

// Dense adjacency rows for the pairwise scans in the overlap checks.
class BitRows {
 public:
  explicit BitRows(const Graph& g) : words_((g.size() + 63) / 64), bits_(g.size() * words_, 0) {
    for (VertexId v = 0; v < g.size(); ++v)
      for (VertexId u : g.neighbors(v)) bits_[v * words_ + u / 64] |= std::uint64_t{1} << (u % 64);
  }

  std::size_t intersection(VertexId a, VertexId b) const {
    const std::uint64_t* ra = bits_.data() + a * words_;
    const std::uint64_t* rb = bits_.data() + b * words_;
    std::size_t count = 0;
    for (std::size_t w = 0; w < words_; ++w) count += std::popcount(ra[w] & rb[w]);
    return count;
  }

 private:
  std::size_t words_;
  std::vector<std::uint64_t> bits_;
};

}  // namespace

std::string_view to_string(GraphKind kind) {
  switch (kind) {
    case GraphKind::complete: return "complete";
    case GraphKind::erdos_renyi: return "erdos_renyi";
    case GraphKind::k_clique: return "k_clique";
    case GraphKind::custom: return "custom";
  }
  return "custom";
}

GraphKind parse_graph_kind(std::string_view name) {
  if (name == "complete") return GraphKind::complete;
  if (name == "erdos_renyi" || name == "er") return GraphKind::erdos_renyi;
  if (name == "k_clique" || name == "kclique") return GraphKind::k_clique;
  if (name == "custom") return GraphKind::custom;
  throw Error(Errc::parse, "unknown graph kind '" + std::string(name) + "'");
}

Graph Graph::from_adjacency(std::vector<std::vector<VertexId>> adjacency, GraphKind kind,
                            std::optional<CliqueMeta> clique_meta) {
  const std::size_t n = adjacency.size();
  if (n == 0) throw Error(Errc::invalid_size, "graph must have at least one vertex");

  Graph g;
  g.kind_ = kind;
  g.clique_meta_ = clique_meta;
  g.offsets_.assign(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v) {
    auto& list = adjacency[v];
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    if (!list.empty() && list.back() >= n)
      throw Error(Errc::invalid_argument,
                  "neighbor id " + std::to_string(list.back()) + " out of range at vertex " +
                      std::to_string(v));
    g.offsets_[v + 1] = g.offsets_[v] + list.size();
  }
  g.targets_.reserve(g.offsets_[n]);
  for (const auto& list : adjacency) g.targets_.insert(g.targets_.end(), list.begin(), list.end());

  for (VertexId v = 0; v < n; ++v)
    for (VertexId u : g.neighbors(v))
      if (!g.adjacent(u, v))
        throw Error(Errc::invalid_argument, "asymmetric adjacency: " + std::to_string(v) + "->" +
                                                std::to_string(u) + " has no reverse edge");
  return g;
}

Graph Graph::from_edges(std::size_t n, std::span<const std::pair<VertexId, VertexId>> edges,
                        bool add_self_loops) {
  std::vector<std::vector<VertexId>> adjacency(n);
  for (auto [u, v] : edges) {
    if (u >= n || v >= n)
      throw Error(Errc::invalid_argument,
                  "edge (" + std::to_string(u) + "," + std::to_string(v) + ") out of range");
    adjacency[u].push_back(v);
    if (u != v) adjacency[v].push_back(u);
  }
  if (add_self_loops)
    for (VertexId v = 0; v < n; ++v) adjacency[v].push_back(v);
  return from_adjacency(std::move(adjacency));
}

bool Graph::adjacent(VertexId u, VertexId v) const {
  auto nbrs = neighbors(u);
  return std::binary_search(nbrs.begin(), nbrs.end(), v);
}

std::size_t Graph::max_degree() const {
  std::size_t best = 0;
  for (VertexId v = 0; v < size(); ++v) best = std::max(best, degree(v));
  return best;
}

std::size_t Graph::min_degree() const {
  std::size_t best = std::numeric_limits<std::size_t>::max();
  for (VertexId v = 0; v < size(); ++v) best = std::min(best, degree(v));
  return best;
}

std::size_t Graph::edge_count() const {
  std::size_t loops = 0;
  for (VertexId v = 0; v < size(); ++v) loops += adjacent(v, v) ? 1 : 0;
  return (targets_.size() - loops) / 2 + loops;
}

bool Graph::connected() const {
  const std::size_t n = size();
  std::vector<char> seen(n, 0);
  std::vector<VertexId> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    VertexId v = stack.back();
    stack.pop_back();
    for (VertexId u : neighbors(v)) {
      if (seen[u]) continue;
      seen[u] = 1;
      ++reached;
      stack.push_back(u);
    }
  }
  return reached == n;
}

Graph make_complete(std::size_t n) {
  if (n < 2) throw Error(Errc::invalid_size, "complete graph needs n >= 2, got " + std::to_string(n));
  std::vector<VertexId> all(n);
  for (std::size_t v = 0; v < n; ++v) all[v] = static_cast<VertexId>(v);
  std::vector<std::vector<VertexId>> adjacency(n, all);
  return Graph::from_adjacency(std::move(adjacency), GraphKind::complete);
}

Graph make_erdos_renyi(std::size_t n, double p, std::uint64_t seed) {
  if (n < 2) throw Error(Errc::invalid_size, "Erdos-Renyi graph needs n >= 2, got " + std::to_string(n));
  if (!(p >= 0.0 && p <= 1.0))
    throw Error(Errc::invalid_argument, "edge probability must lie in [0, 1]");

  for (std::size_t attempt = 0; attempt < kErAttempts; ++attempt) {
    Rng rng = make_rng(seed, {attempt});
    std::vector<std::vector<VertexId>> adjacency(n);
    for (VertexId u = 0; u < n; ++u) {
      for (VertexId v = u; v < n; ++v) {
        if (uniform01(rng) >= p) continue;
        adjacency[u].push_back(v);
        if (u != v) adjacency[v].push_back(u);
      }
    }
    Graph g = Graph::from_adjacency(std::move(adjacency), GraphKind::erdos_renyi);
    if (g.connected()) return g;
  }
  throw Error(Errc::generation_failed,
              "Erdos-Renyi generation produced no connected graph in " +
                  std::to_string(kErAttempts) + " attempts (n=" + std::to_string(n) +
                  ", p=" + std::to_string(p) + ")");
}

Graph make_k_clique(std::size_t n, std::size_t k) {
  if (k == 0 || n % k != 0)
    throw Error(Errc::invalid_partition,
                std::to_string(k) + " cliques do not evenly partition " + std::to_string(n) + " vertices");
  const std::size_t m = n / k;
  if (m < 2)
    throw Error(Errc::invalid_partition, "clique size n/k must be at least 2");

  CliqueMeta meta{k, m};
  std::vector<std::vector<VertexId>> adjacency(n);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t l = 0; l < m; ++l) {
      auto& list = adjacency[meta.vertex_at(i, l)];
      list.reserve(m + k - 1);
      for (std::size_t l2 = 0; l2 < m; ++l2) list.push_back(meta.vertex_at(i, l2));
      for (std::size_t j = 0; j < k; ++j)
        if (j != i) list.push_back(meta.vertex_at(j, l));
    }
  }
  return Graph::from_adjacency(std::move(adjacency), GraphKind::k_clique, meta);
}

std::size_t choose_clique_count(std::size_t n, double degree_budget) {
  for (std::size_t k = 1; k <= n / 2; ++k) {
    if (n % k != 0) continue;
    if (static_cast<double>(n / k + k - 1) <= degree_budget) return k;
  }
  throw Error(Errc::infeasible_budget,
              "no clique count k | " + std::to_string(n) + " satisfies n/k + k - 1 <= " +
                  std::to_string(degree_budget));
}

double neighborhood_overlap_param(const Graph& g) {
  const BitRows rows(g);
  double best = 1.0;
  for (VertexId u = 0; u < g.size(); ++u) {
    for (VertexId v = u + 1; v < g.size(); ++v) {
      const double common = static_cast<double>(rows.intersection(u, v));
      best = std::min(best, common / static_cast<double>(g.degree(v)));
      best = std::min(best, common / static_cast<double>(g.degree(u)));
    }
  }
  return best;
}

MembershipReport check_family_membership(const Graph& g, const FamilyParams& params) {
  MembershipReport report;
  const double n = static_cast<double>(g.size());
  const double slack = 1e-12 * std::max(1.0, params.p * n);
  const double lo = params.p * n * (1.0 - params.gamma) - slack;
  const double hi = params.p * n * (1.0 + params.gamma) + slack;
  for (VertexId v = 0; v < g.size(); ++v) {
    const double d = static_cast<double>(g.degree(v));
    if (d >= lo && d <= hi) continue;
    ++report.degree_violations;
    if (report.violating_vertices.size() < kReportLimit) report.violating_vertices.push_back(v);
  }
  report.degrees_ok = report.degree_violations == 0;

  const double threshold = params.p * (1.0 - params.gamma) - 1e-12;
  const BitRows rows(g);
  double best = 1.0;
  auto record = [&](VertexId u, VertexId v, double ratio) {
    best = std::min(best, ratio);
    if (ratio >= threshold) return;
    ++report.overlap_violations;
    if (report.violating_pairs.size() < kReportLimit) report.violating_pairs.emplace_back(u, v);
  };
  for (VertexId u = 0; u < g.size(); ++u) {
    for (VertexId v = u + 1; v < g.size(); ++v) {
      const double common = static_cast<double>(rows.intersection(u, v));
      record(u, v, common / static_cast<double>(g.degree(v)));
      record(v, u, common / static_cast<double>(g.degree(u)));
    }
  }
  report.overlap = best;
  report.overlap_ok = report.overlap_violations == 0;
  report.member = report.degrees_ok && report.overlap_ok;
  return report;
}

double default_gamma(std::size_t n) {
  if (n < 2) throw Error(Errc::invalid_size, "default_gamma needs n >= 2");
  const double x = std::log(static_cast<double>(n)) / static_cast<double>(n);
  return std::min(0.5, std::pow(x, 0.25));
}

void write_edge_list(std::ostream& os, const Graph& g) {
  os << "# n=" << g.size() << " kind=" << to_string(g.kind());
  if (g.clique_meta()) os << " k=" << g.clique_meta()->clique_count;
  os << '\n';
  for (VertexId u = 0; u < g.size(); ++u)
    for (VertexId v : g.neighbors(u))
      if (u <= v) os << u << ' ' << v << '\n';
}

Graph read_edge_list(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("#", 0) != 0)
    throw Error(Errc::parse, "edge list must start with a '# n=<n> kind=<kind>' header");

  std::size_t n = 0;
  std::size_t k = 0;
  GraphKind kind = GraphKind::custom;
  std::istringstream header(line.substr(1));
  std::string token;
  while (header >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = token.substr(0, eq);
    const std::string value = token.substr(eq + 1);
    if (key == "n") n = std::stoul(value);
    else if (key == "kind") kind = parse_graph_kind(value);
    else if (key == "k") k = std::stoul(value);
  }
  if (n == 0) throw Error(Errc::parse, "edge list header is missing n=<n>");

  std::vector<std::pair<VertexId, VertexId>> edges;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    long long u = -1;
    long long v = -1;
    if (!(row >> u >> v) || u < 0 || v < 0)
      throw Error(Errc::parse, "malformed edge on line " + std::to_string(line_no));
    edges.emplace_back(static_cast<VertexId>(u), static_cast<VertexId>(v));
  }

  std::vector<std::vector<VertexId>> adjacency(n);
  for (auto [u, v] : edges) {
    if (u >= n || v >= n) throw Error(Errc::parse, "edge endpoint out of range");
    adjacency[u].push_back(v);
    if (u != v) adjacency[v].push_back(u);
  }
  std::optional<CliqueMeta> meta;
  if (kind == GraphKind::k_clique) {
    if (k == 0 || n % k != 0) throw Error(Errc::parse, "k_clique edge list needs a valid k=<k>");
    meta = CliqueMeta{k, n / k};
  }
  return Graph::from_adjacency(std::move(adjacency), kind, meta);
}

}  // namespace anonroute

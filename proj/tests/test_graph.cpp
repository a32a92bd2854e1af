#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <vector>

#include "anonroute/error.hpp"
#include "anonroute/graph.hpp"

using namespace anonroute;

namespace {

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an anonroute::Error");
  return Errc::invalid_argument;
}

bool symmetric(const Graph& g) {
  for (VertexId u = 0; u < g.size(); ++u)
    for (VertexId v : g.neighbors(u))
      if (!g.adjacent(v, u)) return false;
  return true;
}

// Independent overlap oracle: plain sets, every ordered pair.
double brute_overlap(const std::vector<std::set<int>>& adj) {
  double best = 1.0;
  for (std::size_t u = 0; u < adj.size(); ++u)
    for (std::size_t v = 0; v < adj.size(); ++v) {
      if (u == v) continue;
      std::size_t common = 0;
      for (int x : adj[u]) common += adj[v].count(x);
      best = std::min(best, static_cast<double>(common) / static_cast<double>(adj[v].size()));
    }
  return best;
}

std::vector<std::set<int>> as_sets(const Graph& g) {
  std::vector<std::set<int>> adj(g.size());
  for (VertexId v = 0; v < g.size(); ++v)
    for (VertexId u : g.neighbors(v)) adj[v].insert(static_cast<int>(u));
  return adj;
}

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

}  // namespace

TEST_CASE("complete graph has self-loops and degree n") {
  const Graph g = make_complete(3);
  for (VertexId v = 0; v < 3; ++v) {
    const auto nb = g.neighbors(v);
    CHECK(std::vector<VertexId>(nb.begin(), nb.end()) == std::vector<VertexId>{0, 1, 2});
    CHECK(g.degree(v) == 3);
  }
  const Graph big = make_complete(100);
  CHECK(big.max_degree() == 100);
  CHECK(big.min_degree() == 100);
  CHECK(code_of([] { make_complete(1); }) == Errc::invalid_size);
}

TEST_CASE("complete graphs: overlap 1, symmetric, family members") {
  for (std::size_t n : {2, 3, 5, 17, 50}) {
    const Graph g = make_complete(n);
    CHECK(symmetric(g));
    CHECK(neighborhood_overlap_param(g) == doctest::Approx(1.0));
    CHECK(g.edge_count() == n * (n + 1) / 2);
    CHECK(check_family_membership(g, {1.0, 0.0}).member);
  }
}

TEST_CASE("family membership rejects degree outside the band") {
  const MembershipReport r = check_family_membership(make_complete(50), {0.5, 0.1});
  CHECK_FALSE(r.member);
  CHECK_FALSE(r.degrees_ok);
  CHECK(r.degree_violations == 50);
}

TEST_CASE("Erdos-Renyi generation") {
  SUBCASE("p = 1 reproduces the complete graph") {
    CHECK(make_erdos_renyi(100, 1.0, 5) == make_complete(100));
  }
  SUBCASE("mean degree concentrates near np") {
    const Graph g = make_erdos_renyi(100, 0.8, 42);
    CHECK(symmetric(g));
    double total = 0;
    for (VertexId v = 0; v < g.size(); ++v) total += static_cast<double>(g.degree(v));
    CHECK(std::abs(total / 100.0 - 80.0) <= 3.0 * std::sqrt(100 * 0.8 * 0.2));
    CHECK(g.connected());
  }
  SUBCASE("same seed, same graph") {
    CHECK(make_erdos_renyi(60, 0.3, 9) == make_erdos_renyi(60, 0.3, 9));
  }
  SUBCASE("empty graphs cannot be drawn") {
    CHECK(code_of([] { make_erdos_renyi(2, 0.0, 1); }) == Errc::generation_failed);
  }
}

TEST_CASE("k-clique graphs") {
  SUBCASE("degree m + k - 1 everywhere") {
    const Graph g = make_k_clique(15, 3);
    CHECK(symmetric(g));
    for (VertexId v = 0; v < 15; ++v) CHECK(g.degree(v) == 7);
    REQUIRE(g.clique_meta());
    CHECK(g.clique_meta()->clique_count == 3);
    CHECK(g.clique_meta()->clique_size == 5);
  }
  SUBCASE("k = 1 is the complete graph") { CHECK(make_k_clique(10, 1) == make_complete(10)); }
  SUBCASE("k must divide n") {
    CHECK(code_of([] { make_k_clique(10, 3); }) == Errc::invalid_partition);
  }
  SUBCASE("dropping cross edges leaves k complete components") {
    for (auto [n, k] : {std::pair<std::size_t, std::size_t>{15, 3}, {100, 5}, {12, 4}, {8, 2}}) {
      const Graph g = make_k_clique(n, k);
      const CliqueMeta meta = *g.clique_meta();
      UnionFind uf(n);
      for (VertexId u = 0; u < n; ++u)
        for (VertexId v : g.neighbors(u)) {
          if (meta.clique_of(u) == meta.clique_of(v)) {
            uf.unite(u, v);
          } else {
            CHECK(meta.position_of(u) == meta.position_of(v));
          }
        }
      std::set<std::size_t> roots;
      for (VertexId v = 0; v < n; ++v) roots.insert(uf.find(v));
      CHECK(roots.size() == k);
      for (VertexId u = 0; u < n; ++u)
        for (VertexId v = 0; v < n; ++v)
          if (meta.clique_of(u) == meta.clique_of(v)) CHECK(g.adjacent(u, v));
    }
  }
}

TEST_CASE("choose_clique_count picks the smallest feasible divisor") {
  CHECK(choose_clique_count(100, 24) == 5);
  CHECK(choose_clique_count(100, 100) == 1);
  CHECK(code_of([] { choose_clique_count(100, 10); }) == Errc::infeasible_budget);
  // Enumeration oracle over all divisors.
  for (std::size_t n : {12, 30, 36, 100}) {
    for (double budget = 3; budget <= static_cast<double>(n); budget += 1) {
      std::size_t expect = 0;
      for (std::size_t k = 1; k <= n; ++k)
        if (n % k == 0 && n / k >= 2 && static_cast<double>(n / k + k - 1) <= budget) {
          expect = k;
          break;
        }
      if (expect == 0) {
        CHECK(code_of([&] { choose_clique_count(n, budget); }) == Errc::infeasible_budget);
      } else {
        CHECK(choose_clique_count(n, budget) == expect);
      }
    }
  }
}

TEST_CASE("neighborhood overlap matches a brute-force scan") {
  CHECK(neighborhood_overlap_param(make_complete(5)) == doctest::Approx(1.0));
  const Graph clique = make_k_clique(15, 3);
  CHECK(neighborhood_overlap_param(clique) == doctest::Approx(brute_overlap(as_sets(clique))));
  CHECK(neighborhood_overlap_param(clique) < 0.5);

  // Path 0-1-2 with self-loops: N(0)={0,1}, N(1)={0,1,2}, N(2)={1,2}. The
  // smallest ratio is |N(0) ∩ N(2)| / |N(2)| = 1/2.
  const std::pair<VertexId, VertexId> path[] = {{0, 1}, {1, 2}};
  const Graph p3 = Graph::from_edges(3, path, true);
  CHECK(neighborhood_overlap_param(p3) == doctest::Approx(0.5));
  CHECK(neighborhood_overlap_param(p3) == doctest::Approx(brute_overlap(as_sets(p3))));

  const Graph er = make_erdos_renyi(30, 0.4, 3);
  CHECK(neighborhood_overlap_param(er) == doctest::Approx(brute_overlap(as_sets(er))));
}

TEST_CASE("default_gamma") {
  CHECK(default_gamma(2) == 0.5);
  CHECK(default_gamma(1000000) == doctest::Approx(std::pow(std::log(1e6) / 1e6, 0.25)));
  CHECK(default_gamma(1000000) == doctest::Approx(0.061).epsilon(0.01));
  double prev_ratio = 0.0;
  for (double n : {1e3, 1e5, 1e7, 1e9}) {
    const double ratio = default_gamma(static_cast<std::size_t>(n)) / std::sqrt(std::log(n) / n);
    CHECK(ratio > prev_ratio);
    prev_ratio = ratio;
  }
}

TEST_CASE("from_adjacency validates input") {
  CHECK(code_of([] { Graph::from_adjacency({{1}, {}}); }) == Errc::invalid_argument);
  CHECK(code_of([] { Graph::from_adjacency({{5}, {0}}); }) == Errc::invalid_argument);
  const Graph g = Graph::from_adjacency({{1, 1, 0}, {0}});
  CHECK(g.degree(0) == 2);
}

TEST_CASE("edge list round-trip") {
  for (const Graph& g : {make_complete(4), make_k_clique(15, 3), make_erdos_renyi(20, 0.5, 8)}) {
    std::stringstream ss;
    write_edge_list(ss, g);
    const Graph back = read_edge_list(ss);
    CHECK(back == g);
    CHECK(back.kind() == g.kind());
    CHECK(back.clique_meta().has_value() == g.clique_meta().has_value());
  }
  std::stringstream header;
  write_edge_list(header, make_k_clique(6, 2));
  std::string first;
  std::getline(header, first);
  CHECK(first == "# n=6 kind=k_clique k=2");

  std::istringstream bad("# n=3 kind=custom\n0 7\n");
  CHECK(code_of([&] { read_edge_list(bad); }) == Errc::parse);
}

#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hublab/instance.hpp"

namespace hublab {

// A complete hub network: open hubs, allocation sets and the routing that
// realizes the objective. All sets are sorted ascending.
struct HubSolution {
  std::vector<int> hubs;
  std::vector<std::vector<int>> origin_sets;  // per origin i, P^o(i)
  std::vector<std::vector<int>> dest_sets;    // per destination j, P^d(j)
  std::vector<std::pair<int, int>> routing;   // per (i, j), index i*d + j
  double objective = 0.0;

  std::pair<int, int> route(int i, int j, int d) const { return routing[i * d + j]; }
};

struct AllocationLimits {
  int r = 1;
  int s = 1;
};

// Sum over (i, j) of the cheapest (k, m) in P^o(i) x P^d(j). Ties pick the
// smallest k, then the smallest m. Limits default to the instance's r and s.
HubSolution evaluate(const Instance& instance, const std::vector<int>& hubs,
                     const std::vector<std::vector<int>>& origin_sets,
                     const std::vector<std::vector<int>>& dest_sets,
                     std::optional<AllocationLimits> limits = std::nullopt);

struct OracleBudget {
  int max_od = 36;  // o * d
  int max_h = 6;
};

// Exhaustive (r,s) optimum.
HubSolution exact_rs(const Instance& instance, OracleBudget budget = {});

// (1,p) optimum: r must be 1, destinations may use every open hub.
HubSolution exact_1p(const Instance& instance);

// Single-allocation optimum with one hub per site for both roles; needs O=D=H.
HubSolution exact_sahlp(const Instance& instance, int max_sites = 9);

// Lexicographic order on (hubs, origin_sets, dest_sets).
bool lexicographically_less(const HubSolution& a, const HubSolution& b);

std::string solution_to_json(const HubSolution& solution);
HubSolution solution_from_json(const std::string& text);

}  // namespace hublab

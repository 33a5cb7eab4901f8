#include "hublab/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hublab/error.hpp"
#include "json.hpp"

namespace hublab {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Every non-empty subset of {0..h-1} with at most max_size members, in
// lexicographic order of the sorted member vectors.
std::vector<std::vector<int>> subsets_lex(int h, int max_size) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int next) -> void {
    for (int k = next; k < h; ++k) {
      cur.push_back(k);
      out.push_back(cur);
      if (static_cast<int>(cur.size()) < max_size) self(self, k + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

// Size-exact subsets of `pool` (sorted) in lexicographic order.
std::vector<std::vector<int>> combinations(const std::vector<int>& pool, int size) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, std::size_t next) -> void {
    if (static_cast<int>(cur.size()) == size) {
      out.push_back(cur);
      return;
    }
    for (std::size_t t = next; t < pool.size(); ++t) {
      cur.push_back(pool[t]);
      self(self, t + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

std::vector<int> normalized_set(const std::vector<int>& set) {
  std::vector<int> out = set;
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void check_allocation(const std::vector<std::vector<int>>& sets, int expected,
                      int limit, const std::vector<int>& hubs,
                      const char* role) {
  if (static_cast<int>(sets.size()) != expected) {
    fail(ErrorCode::InfeasibleAllocation,
         std::string(role) + " sets: expected " + std::to_string(expected) +
             " entries, got " + std::to_string(sets.size()));
  }
  for (std::size_t a = 0; a < sets.size(); ++a) {
    const auto& set = sets[a];
    if (set.empty()) {
      fail(ErrorCode::InfeasibleAllocation,
           std::string(role) + " " + std::to_string(a) + " has an empty allocation set");
    }
    if (static_cast<int>(set.size()) > limit) {
      fail(ErrorCode::InfeasibleAllocation,
           std::string(role) + " " + std::to_string(a) + " uses " +
               std::to_string(set.size()) + " hubs, limit " + std::to_string(limit));
    }
    for (int k : set) {
      if (!std::binary_search(hubs.begin(), hubs.end(), k)) {
        fail(ErrorCode::InfeasibleAllocation,
             std::string(role) + " " + std::to_string(a) + " allocated to hub " +
                 std::to_string(k) + " which is not open");
      }
    }
  }
}

}  // namespace

HubSolution evaluate(const Instance& instance, const std::vector<int>& hubs,
                     const std::vector<std::vector<int>>& origin_sets,
                     const std::vector<std::vector<int>>& dest_sets,
                     std::optional<AllocationLimits> limits) {
  const AllocationLimits lim =
      limits.value_or(AllocationLimits{instance.r(), instance.s()});
  HubSolution sol;
  sol.hubs = normalized_set(hubs);
  if (sol.hubs.empty()) fail(ErrorCode::InfeasibleAllocation, "no open hub");
  if (sol.hubs.size() != hubs.size()) {
    fail(ErrorCode::InfeasibleAllocation, "duplicate hub in hub set");
  }
  if (static_cast<int>(sol.hubs.size()) > instance.p()) {
    fail(ErrorCode::InfeasibleAllocation, "more than p hubs open");
  }
  if (sol.hubs.front() < 0 || sol.hubs.back() >= instance.h()) {
    fail(ErrorCode::InfeasibleAllocation, "hub index out of range");
  }
  sol.origin_sets.reserve(origin_sets.size());
  for (const auto& s : origin_sets) sol.origin_sets.push_back(normalized_set(s));
  sol.dest_sets.reserve(dest_sets.size());
  for (const auto& s : dest_sets) sol.dest_sets.push_back(normalized_set(s));
  check_allocation(sol.origin_sets, instance.o(), lim.r, sol.hubs, "origin");
  check_allocation(sol.dest_sets, instance.d(), lim.s, sol.hubs, "destination");

  const int o = instance.o();
  const int d = instance.d();
  sol.routing.resize(static_cast<std::size_t>(o) * d);
  double total = 0.0;
  for (int i = 0; i < o; ++i) {
    for (int j = 0; j < d; ++j) {
      double best = kInf;
      std::pair<int, int> arg{-1, -1};
      for (int k : sol.origin_sets[i]) {
        for (int m : sol.dest_sets[j]) {
          const double c = instance.cost_at(i, j, k, m);
          if (c < best) {
            best = c;
            arg = {k, m};
          }
        }
      }
      sol.routing[i * d + j] = arg;
      total += best;
    }
  }
  sol.objective = total;
  return sol;
}

bool lexicographically_less(const HubSolution& a, const HubSolution& b) {
  if (a.hubs != b.hubs) return a.hubs < b.hubs;
  if (a.origin_sets != b.origin_sets) return a.origin_sets < b.origin_sets;
  return a.dest_sets < b.dest_sets;
}

HubSolution exact_rs(const Instance& instance, OracleBudget budget) {
  const int o = instance.o();
  const int d = instance.d();
  const int h = instance.h();
  if (o * d > budget.max_od || h > budget.max_h) {
    fail(ErrorCode::BudgetExceeded,
         "exact_rs limited to o*d <= " + std::to_string(budget.max_od) +
             " and h <= " + std::to_string(budget.max_h));
  }

  struct Candidate {
    double objective = kInf;
    std::vector<int> hubs;
    std::vector<std::vector<int>> origin_sets;
    std::vector<std::vector<int>> dest_sets;
  };
  Candidate best;

  for (const auto& hubs : subsets_lex(h, instance.p())) {
    const int size = static_cast<int>(hubs.size());
    const auto origin_opts = combinations(hubs, std::min(instance.r(), size));
    const auto dest_opts = combinations(hubs, std::min(instance.s(), size));
    const int no = static_cast<int>(origin_opts.size());
    const int nd = static_cast<int>(dest_opts.size());

    // pair_min[((i*d + j)*no + a)*nd + b] = min over k in origin_opts[a],
    // m in dest_opts[b] of C_ijkm.
    std::vector<double> pair_min(static_cast<std::size_t>(o) * d * no * nd);
    for (int i = 0; i < o; ++i)
      for (int j = 0; j < d; ++j)
        for (int a = 0; a < no; ++a)
          for (int b = 0; b < nd; ++b) {
            double v = kInf;
            for (int k : origin_opts[a])
              for (int m : dest_opts[b]) v = std::min(v, instance.cost_at(i, j, k, m));
            pair_min[((static_cast<std::size_t>(i) * d + j) * no + a) * nd + b] = v;
          }
    auto pm = [&](int i, int j, int a, int b) {
      return pair_min[((static_cast<std::size_t>(i) * d + j) * no + a) * nd + b];
    };

    // Enumerate the side with fewer joint choices; for a fixed choice on one
    // side the other side separates per site.
    double log_dest = d * std::log(static_cast<double>(nd));
    double log_orig = o * std::log(static_cast<double>(no));
    const bool enumerate_dest = log_dest <= log_orig;

    std::vector<int> origin_choice(o, 0);
    std::vector<int> dest_choice(d, 0);
    const int outer_n = enumerate_dest ? d : o;
    const int outer_opts = enumerate_dest ? nd : no;
    std::vector<int> odometer(outer_n, 0);
    while (true) {
      if (enumerate_dest) {
        dest_choice = odometer;
        for (int i = 0; i < o; ++i) {
          double best_i = kInf;
          for (int a = 0; a < no; ++a) {
            double c = 0.0;
            for (int j = 0; j < d; ++j) c += pm(i, j, a, dest_choice[j]);
            if (c < best_i) {
              best_i = c;
              origin_choice[i] = a;
            }
          }
        }
      } else {
        origin_choice = odometer;
        for (int j = 0; j < d; ++j) {
          double best_j = kInf;
          for (int b = 0; b < nd; ++b) {
            double c = 0.0;
            for (int i = 0; i < o; ++i) c += pm(i, j, origin_choice[i], b);
            if (c < best_j) {
              best_j = c;
              dest_choice[j] = b;
            }
          }
        }
      }
      double total = 0.0;
      for (int i = 0; i < o; ++i)
        for (int j = 0; j < d; ++j) total += pm(i, j, origin_choice[i], dest_choice[j]);

      bool take = total < best.objective;
      if (!take && total == best.objective) {
        // Same objective: keep the lexicographically smaller (P, P^o, P^d).
        std::vector<std::vector<int>> os(o), ds(d);
        for (int i = 0; i < o; ++i) os[i] = origin_opts[origin_choice[i]];
        for (int j = 0; j < d; ++j) ds[j] = dest_opts[dest_choice[j]];
        if (hubs != best.hubs) {
          take = hubs < best.hubs;
        } else if (os != best.origin_sets) {
          take = os < best.origin_sets;
        } else {
          take = ds < best.dest_sets;
        }
      }
      if (take) {
        best.objective = total;
        best.hubs = hubs;
        best.origin_sets.assign(o, {});
        best.dest_sets.assign(d, {});
        for (int i = 0; i < o; ++i) best.origin_sets[i] = origin_opts[origin_choice[i]];
        for (int j = 0; j < d; ++j) best.dest_sets[j] = dest_opts[dest_choice[j]];
      }

      int pos = outer_n - 1;
      while (pos >= 0 && ++odometer[pos] == outer_opts) {
        odometer[pos] = 0;
        --pos;
      }
      if (pos < 0) break;
    }
  }
  return evaluate(instance, best.hubs, best.origin_sets, best.dest_sets);
}

HubSolution exact_1p(const Instance& instance) {
  if (instance.r() != 1) {
    fail(ErrorCode::RequiresSingleOriginAllocation,
         "exact_1p needs r = 1, got r = " + std::to_string(instance.r()));
  }
  if (!(instance.h() <= 22 || instance.p() <= 3)) {
    fail(ErrorCode::BudgetExceeded, "exact_1p limited to h <= 22 or p <= 3");
  }
  const int o = instance.o();
  const int d = instance.d();
  const int h = instance.h();

  double best_obj = kInf;
  std::vector<int> best_hubs;
  std::vector<int> best_assign;
  std::vector<int> assign(o);
  std::vector<double> dest_min(static_cast<std::size_t>(d) * h);
  for (const auto& hubs : subsets_lex(h, instance.p())) {
    for (int i = 0; i < o; ++i) {
      double best_i = kInf;
      for (int k : hubs) {
        double c = 0.0;
        for (int j = 0; j < d; ++j) {
          double v = kInf;
          for (int m : hubs) v = std::min(v, instance.cost_at(i, j, k, m));
          c += v;
        }
        if (c < best_i) {
          best_i = c;
          assign[i] = k;
        }
      }
    }
    double total = 0.0;
    for (int i = 0; i < o; ++i)
      for (int j = 0; j < d; ++j) {
        double v = kInf;
        for (int m : hubs) v = std::min(v, instance.cost_at(i, j, assign[i], m));
        total += v;
      }
    // Hub sets arrive in lexicographic order, so strict improvement keeps the
    // smallest tied set.
    if (total < best_obj) {
      best_obj = total;
      best_hubs = hubs;
      best_assign = assign;
    }
  }
  std::vector<std::vector<int>> origin_sets(o);
  for (int i = 0; i < o; ++i) origin_sets[i] = {best_assign[i]};
  std::vector<std::vector<int>> dest_sets(d, best_hubs);
  return evaluate(instance, best_hubs, origin_sets, dest_sets,
                  AllocationLimits{1, instance.p()});
}

HubSolution exact_sahlp(const Instance& instance, int max_sites) {
  if (!instance.identical_sets()) {
    fail(ErrorCode::RequiresIdenticalSets, "SAHLP needs O = D = H");
  }
  const int n = instance.h();
  if (n > max_sites) {
    fail(ErrorCode::BudgetExceeded,
         "exact_sahlp limited to n <= " + std::to_string(max_sites));
  }
  const auto hub_sets = subsets_lex(n, instance.p());
  double work = 0.0;
  for (const auto& hubs : hub_sets) work += std::pow(static_cast<double>(hubs.size()), n);
  if (work > 5e7) {
    fail(ErrorCode::BudgetExceeded, "exact_sahlp enumeration exceeds 5e7 assignments");
  }

  double best_obj = kInf;
  std::vector<int> best_hubs;
  std::vector<int> best_assign;
  std::vector<int> digits(n);
  std::vector<int> assign(n);
  for (const auto& hubs : hub_sets) {
    const int size = static_cast<int>(hubs.size());
    std::fill(digits.begin(), digits.end(), 0);
    while (true) {
      for (int i = 0; i < n; ++i) assign[i] = hubs[digits[i]];
      double total = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) total += instance.cost_at(i, j, assign[i], assign[j]);
      if (total < best_obj) {
        best_obj = total;
        best_hubs = hubs;
        best_assign = assign;
      }
      int pos = n - 1;
      while (pos >= 0 && ++digits[pos] == size) {
        digits[pos] = 0;
        --pos;
      }
      if (pos < 0) break;
    }
  }
  std::vector<std::vector<int>> sets(n);
  for (int i = 0; i < n; ++i) sets[i] = {best_assign[i]};
  return evaluate(instance, best_hubs, sets, sets, AllocationLimits{1, 1});
}

std::string solution_to_json(const HubSolution& solution) {
  nlohmann::json j;
  j["hubs"] = solution.hubs;
  j["origin_sets"] = solution.origin_sets;
  j["dest_sets"] = solution.dest_sets;
  nlohmann::json routing = nlohmann::json::array();
  for (const auto& [k, m] : solution.routing) routing.push_back({k, m});
  j["routing"] = std::move(routing);
  j["objective"] = solution.objective;
  return j.dump(1) + "\n";
}

HubSolution solution_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    HubSolution s;
    s.hubs = j.at("hubs").get<std::vector<int>>();
    s.origin_sets = j.at("origin_sets").get<std::vector<std::vector<int>>>();
    s.dest_sets = j.at("dest_sets").get<std::vector<std::vector<int>>>();
    for (const auto& r : j.at("routing")) {
      s.routing.emplace_back(r.at(0).get<int>(), r.at(1).get<int>());
    }
    s.objective = j.at("objective").get<double>();
    return s;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::MalformedReport, std::string("solution JSON: ") + e.what());
  }
}

}  // namespace hublab

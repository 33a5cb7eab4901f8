#pragma once

#include <vector>

namespace hublab {

// Balanced transportation data: ship supplies (rows) to demands (columns) at
// per-unit costs, row-major rows x cols.
struct TransportInstance {
  std::vector<double> supplies;
  std::vector<double> demands;
  std::vector<double> costs;

  int rows() const { return static_cast<int>(supplies.size()); }
  int cols() const { return static_cast<int>(demands.size()); }
  double cost(int k, int m) const { return costs[static_cast<std::size_t>(k) * demands.size() + m]; }
};

struct TransportDuals {
  std::vector<double> e;     // row prices
  std::vector<double> f;     // column prices
  double objective = 0.0;    // e . supplies + f . demands
  std::vector<double> flow;  // rows x cols
};

struct ReducedTransport {
  TransportInstance problem;
  std::vector<int> rows;     // reduced row -> original row
  std::vector<int> cols;     // reduced col -> original col
  std::vector<int> row_of;   // original row -> reduced row, -1 if removed
  std::vector<int> col_of;   // original col -> reduced col, -1 if removed
};

inline constexpr double kBalanceTol = 1e-9;
inline constexpr double kMassTol = 1e-12;

// Drops rows and columns carrying at most kMassTol. Throws EmptyProblem when
// nothing is left.
ReducedTransport reduce_degenerate(const TransportInstance& tp);

// Optimal flow and dual prices. Prices are feasible for every cell,
// including removed rows and columns, and normalized so that e is zero at
// the first row with positive supply. Throws Unbalanced, NegativeMass.
TransportDuals solve_transport(const TransportInstance& tp);

}  // namespace hublab

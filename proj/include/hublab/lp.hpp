#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace hublab {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Sense : std::uint8_t { LessEqual, Equal, GreaterEqual };

struct Row {
  std::vector<int> index;
  std::vector<double> value;
  Sense sense = Sense::GreaterEqual;
  double rhs = 0.0;
};

// min c'x subject to sparse rows and column bounds.
struct LinearProgram {
  std::vector<double> objective;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<Row> rows;
  std::vector<std::string> col_names;  // empty, or one per column
  std::vector<std::string> row_names;  // empty, or one per row

  int num_vars() const { return static_cast<int>(objective.size()); }
  int num_rows() const { return static_cast<int>(rows.size()); }

  int add_variable(double cost, double lb, double ub, std::string name = {});
  int add_row(Row row, std::string name = {});

  // Throws InvalidProgram on inconsistent bounds, out-of-range or duplicate
  // columns, or non-finite data.
  void validate() const;
};

enum class VarStatus : std::uint8_t { Basic, AtLower, AtUpper, AtZero };

// Status per structural column and per row logical. A basis from a smaller
// program (fewer rows) is extended with basic logicals for the new rows.
struct Basis {
  std::vector<VarStatus> structural;
  std::vector<VarStatus> logical;

  bool empty() const { return structural.empty() && logical.empty(); }
};

enum class LpStatus : std::uint8_t { Optimal, Infeasible, Unbounded, IterationLimit };

std::string to_string(LpStatus status);

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> x;
  double objective = 0.0;
  std::vector<double> duals;           // one per row
  std::vector<double> reduced_costs;   // one per structural column
  std::vector<double> row_activity;    // a_r x
  Basis basis;
  long iterations = 0;
};

struct LpOptions {
  double feasibility_tol = 1e-7;
  double optimality_tol = 1e-9;
  double pivot_tol = 1e-7;    // smallest |alpha| accepted in the ratio test
  double factor_tol = 1e-10;  // relative pivot threshold in the LU
  int refactor_interval = 50;
  int perturb_after = 50;     // degenerate pivots before bounds are perturbed
  int bland_after = 1000;
  long max_iterations = -1;  // -1: 20 * (rows + cols) + 10000
};

// Bounded-variable two-phase primal simplex with a dense LU basis
// factorization. Throws Error(NumericalBreakdown) if the basis cannot be
// repaired.
LpResult solve_lp(const LinearProgram& lp, const Basis* warm = nullptr,
                  const LpOptions& options = {});

// Fixed-layout MPS text; see docs/lp_format.md. Columns flagged in integer
// are wrapped in MARKER INTORG/INTEND blocks.
std::string write_mps(const LinearProgram& lp, const std::string& name = "HUBLAB",
                      const std::vector<std::uint8_t>* integer = nullptr);

}  // namespace hublab

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hublab/instance.hpp"
#include "hublab/lp.hpp"
#include "hublab/oracle.hpp"

namespace hublab {

enum class Formulation { F4, F3, F1P, F1PD, SAHLP_F3 };

std::string to_string(Formulation f);

// Column index per structured variable; -1 entries are absent in the
// formulation. Flattened row-major in the index order of the name.
struct VarMap {
  int o = 0, d = 0, h = 0;
  std::vector<int> y;      // [k]
  std::vector<int> x_o;    // [i][k]
  std::vector<int> x_d;    // [j][m]
  std::vector<int> x;      // [i][k]
  std::vector<int> z_o;    // [i][j][k]
  std::vector<int> z_d;    // [i][j][m]
  std::vector<int> z;      // [i][j][m]
  std::vector<int> X;      // [i][j][k][m]
  std::vector<int> mu;     // [i][j]
  std::vector<int> pi;     // [i]
  std::vector<int> delta;  // [i]

  int at_ik(const std::vector<int>& v, int i, int k) const { return v[i * h + k]; }
  int at_ijm(const std::vector<int>& v, int i, int j, int m) const {
    return v[(static_cast<std::size_t>(i) * d + j) * h + m];
  }
};

struct MipModel {
  LinearProgram lp;
  std::vector<std::uint8_t> integer;  // per column
  VarMap vars;
  Formulation form = Formulation::F4;
  int p = 0;  // hub limit the model was built with
};

// M[(i*d + j)*h + k].
struct BigM {
  int o = 0, d = 0, h = 0;
  std::vector<double> M;

  double at(int i, int j, int k) const { return M[(static_cast<std::size_t>(i) * d + j) * h + k]; }
};

enum class BigMMode { Full, TransferDistribution };

// (h-p+1)-th smallest over m of the full cost or of w_ij (alpha c_km + beta c_mj).
BigM compute_bigm(const Instance& instance, BigMMode mode);

MipModel build_f4(const Instance& instance, bool relax_X = true);
MipModel build_f3(const Instance& instance);
// The destination limit is taken as p.
MipModel build_1p_f(const Instance& instance);
// Same as build_1p_f with an explicit big-M table.
MipModel build_1p_f(const Instance& instance, const BigM& bigm);
MipModel build_1p_fd(const Instance& instance);
MipModel build_sahlp(const Instance& instance);

MipModel build_model(const Instance& instance, Formulation form);

struct Extraction {
  HubSolution solution;
  double model_objective = 0.0;
  bool mismatch = false;  // evaluate() differs from the model by more than 1e-6
};

// Decodes an integral point. Throws FractionalSolution; mismatches are
// reported, not thrown.
Extraction decode_solution(const MipModel& model, const Instance& instance,
                           const std::vector<double>& values);

// decode_solution that also throws ObjectiveMismatch.
HubSolution extract_solution(const MipModel& model, const Instance& instance,
                             const std::vector<double>& values);

// Column values encoding a hub solution, with objective-carrying variables
// (mu, pi, delta) at their smallest feasible value.
std::vector<double> solution_to_point(const MipModel& model, const Instance& instance,
                                      const HubSolution& solution);

}  // namespace hublab

#include <cstdio>
#include <string>
#include <vector>

#include "hublab/instance.hpp"
#include "hublab/lp.hpp"

namespace hublab {

namespace {

// Places text at a 1-based column, keeping at least one separating space.
void place(std::string& out, std::size_t column, const std::string& text) {
  if (text.empty()) return;
  const std::size_t at = column - 1;
  if (out.size() < at) out.append(at - out.size(), ' ');
  else if (!out.empty()) out.push_back(' ');
  out += text;
}

// Field starts (1-based): type 2, name 5, name 15, value 25, name 40.
std::string line(const std::string& type, const std::string& n1,
                 const std::string& n2 = {}, const std::string& v1 = {},
                 const std::string& n3 = {}) {
  std::string out = " " + type;
  place(out, 5, n1);
  place(out, 15, n2);
  place(out, 25, v1);
  place(out, 40, n3);
  out.push_back('\n');
  return out;
}

}  // namespace

std::string write_mps(const LinearProgram& lp, const std::string& name,
                      const std::vector<std::uint8_t>* integer) {
  lp.validate();
  const int n = lp.num_vars();
  const int m = lp.num_rows();
  auto col_name = [&](int j) {
    return lp.col_names.empty() ? "C" + std::to_string(j) : lp.col_names[j];
  };
  auto row_name = [&](int r) {
    return lp.row_names.empty() ? "R" + std::to_string(r) : lp.row_names[r];
  };

  std::string out = "NAME          " + name + "\nROWS\n";
  out += line("N", "COST");
  for (int r = 0; r < m; ++r) {
    const char* t = lp.rows[r].sense == Sense::LessEqual  ? "L"
                    : lp.rows[r].sense == Sense::Equal    ? "E"
                                                          : "G";
    out += line(t, row_name(r));
  }

  std::vector<std::vector<std::pair<int, double>>> cols(n);
  for (int r = 0; r < m; ++r) {
    const Row& row = lp.rows[r];
    for (std::size_t e = 0; e < row.index.size(); ++e) {
      if (row.value[e] != 0.0) cols[row.index[e]].emplace_back(r, row.value[e]);
    }
  }

  out += "COLUMNS\n";
  bool in_int = false;
  int marker = 0;
  for (int j = 0; j < n; ++j) {
    const bool is_int = integer != nullptr && j < static_cast<int>(integer->size()) && (*integer)[j];
    if (is_int != in_int) {
      out += line("", "MARKER" + std::to_string(marker++), "'MARKER'", "",
                  is_int ? "'INTORG'" : "'INTEND'");
      in_int = is_int;
    }
    const std::string cn = col_name(j);
    if (lp.objective[j] != 0.0) out += line("", cn, "COST", format_double(lp.objective[j]));
    for (const auto& [r, v] : cols[j]) out += line("", cn, row_name(r), format_double(v));
    if (lp.objective[j] == 0.0 && cols[j].empty()) out += line("", cn, "COST", "0");
  }
  if (in_int) {
    out += line("", "MARKER" + std::to_string(marker), "'MARKER'", "", "'INTEND'");
  }

  out += "RHS\n";
  for (int r = 0; r < m; ++r) {
    if (lp.rows[r].rhs != 0.0) out += line("", "RHS", row_name(r), format_double(lp.rows[r].rhs));
  }

  out += "BOUNDS\n";
  for (int j = 0; j < n; ++j) {
    const double lb = lp.lower[j];
    const double ub = lp.upper[j];
    const std::string cn = col_name(j);
    const bool is_int = integer != nullptr && j < static_cast<int>(integer->size()) && (*integer)[j];
    if (lb == ub) {
      out += line("FX", "BND", cn, format_double(lb));
      continue;
    }
    if (lb == -kInfinity && ub == kInfinity) {
      out += line("FR", "BND", cn);
      continue;
    }
    if (lb == -kInfinity) out += line("MI", "BND", cn);
    else if (lb != 0.0) out += line("LO", "BND", cn, format_double(lb));
    if (ub != kInfinity) out += line("UP", "BND", cn, format_double(ub));
    else if (is_int) out += line("PL", "BND", cn);
  }
  out += "ENDATA\n";
  return out;
}

}  // namespace hublab

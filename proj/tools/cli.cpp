#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "hublab/bnc.hpp"
#include "hublab/error.hpp"
#include "hublab/instance.hpp"
#include "hublab/models.hpp"
#include "hublab/oracle.hpp"
#include "hublab/report.hpp"

namespace hublab::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InstanceArgs {
  std::string path;
  std::string random;
  std::optional<std::uint64_t> seed;
  std::string cost_kind = "disaggregated";
  std::string scaling = "ap-classic";
  double distance_factor = 1.0;
  LegFactors legs;
  int p = 2;
  int r = 1;
  std::optional<int> s;
  bool relaxed = false;
};

void add_instance_options(CLI::App& cmd, InstanceArgs& a) {
  cmd.add_option("--instance", a.path, "AP text file or instance JSON");
  cmd.add_option("--random", a.random, "SEED,o,d,h (or o,d,h with --seed)");
  cmd.add_option("--seed", a.seed, "instance seed for --random");
  cmd.add_option("--cost-kind", a.cost_kind, "random cost model")
      ->check(CLI::IsMember({"general", "disaggregated"}));
  cmd.add_option("--scaling", a.scaling, "AP scaling preset")
      ->check(CLI::IsMember({"raw", "ap-classic"}));
  cmd.add_option("--distance-factor", a.distance_factor, "multiplier on AP distances");
  cmd.add_option("--alpha", a.legs.alpha, "transfer discount");
  cmd.add_option("--beta", a.legs.beta, "distribution factor");
  cmd.add_option("--gamma", a.legs.gamma, "collection factor");
  cmd.add_option("--p", a.p, "number of hubs");
  cmd.add_option("--r", a.r, "hubs per origin");
  cmd.add_option("--s", a.s, "hubs per destination (default p)");
  cmd.add_flag("--relaxed", a.relaxed, "allow p = 1 or p = h");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<long> split_longs(const std::string& text) {
  std::vector<long> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stol(tok, &used));
      if (used != tok.size()) throw UsageError("bad integer '" + tok + "'");
    } catch (const std::logic_error&) {
      throw UsageError("bad integer '" + tok + "'");
    }
  }
  return out;
}

// Instance plus the label recorded in reports.
std::pair<Instance, std::string> load_instance(const InstanceArgs& a, int p, int r, int s) {
  const ParamRange range = a.relaxed ? ParamRange::Relaxed : ParamRange::Strict;
  if (a.path.empty() == a.random.empty()) {
    throw UsageError("give exactly one of --instance and --random");
  }
  if (!a.random.empty()) {
    auto v = split_longs(a.random);
    if (v.size() == 3) {
      if (!a.seed) throw UsageError("--random o,d,h needs --seed");
      v.insert(v.begin(), static_cast<long>(*a.seed));
    }
    if (v.size() != 4 || v[0] < 0 || v[1] < 1 || v[2] < 1 || v[3] < 1) {
      throw UsageError("--random expects SEED,o,d,h");
    }
    const CostKind kind = a.cost_kind == "general" ? CostKind::General : CostKind::Disaggregated;
    auto inst = random_instance(static_cast<std::uint64_t>(v[0]), static_cast<int>(v[1]),
                                static_cast<int>(v[2]), static_cast<int>(v[3]), p, r, s, kind,
                                range);
    return {std::move(inst), "random:" + a.random};
  }
  const std::string text = read_file(a.path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    return {instance_from_json(text, range).with_parameters(p, r, s, range), a.path};
  }
  ScalingConfig scaling = a.scaling == "raw" ? ScalingConfig{} : ScalingConfig::ap_classic();
  scaling.distance_factor = a.distance_factor;
  return {build_instance(parse_ap(text), a.legs, p, r, s, scaling, range), a.path};
}

Formulation parse_form(const std::string& s) {
  for (auto f : {Formulation::F4, Formulation::F3, Formulation::F1P, Formulation::F1PD,
                 Formulation::SAHLP_F3}) {
    if (to_string(f) == s) return f;
  }
  throw UsageError("unknown formulation '" + s + "'");
}

struct RunArgs {
  std::string cuts = "both";
  std::string backend = "internal";
  double time_limit = 7200.0;
  long node_limit = -1;
  int threads = 1;
  bool tree_cuts = false;
  bool record_time = false;
  std::string out = ".";
};

void add_run_options(CLI::App& cmd, RunArgs& a) {
  cmd.add_option("--cuts", a.cuts, "cut families")
      ->check(CLI::IsMember({"none", "zy2", "cortes", "both"}));
  cmd.add_option("--cortes-backend", a.backend, "transportation dual solver")
      ->check(CLI::IsMember({"internal", "lp"}));
  cmd.add_option("--time-limit", a.time_limit, "seconds");
  cmd.add_option("--node-limit", a.node_limit, "explored nodes, -1 for none");
  cmd.add_option("--threads", a.threads, "separation threads")->check(CLI::PositiveNumber);
  cmd.add_flag("--tree-cuts", a.tree_cuts, "separate zy2 inside the tree");
  cmd.add_flag("--record-time", a.record_time, "write wall time into report files");
  cmd.add_option("--out", a.out, "output directory");
}

CutPolicy policy_of(const RunArgs& a) {
  CutPolicy pol;
  set_cut_families(pol, a.cuts);
  pol.backend = a.backend == "lp" ? CortesBackend::Lp : CortesBackend::Internal;
  pol.allow_tree_cuts = a.tree_cuts;
  pol.threads = a.threads;
  if (const char* env = std::getenv("HUBLAB_THREADS")) {
    try {
      pol.threads = std::max(1, std::stoi(env));
    } catch (const std::logic_error&) {
      throw UsageError("HUBLAB_THREADS must be a positive integer");
    }
  }
  return pol;
}

BncLimits limits_of(const RunArgs& a) {
  BncLimits lim;
  lim.time_seconds = a.time_limit;
  lim.max_nodes = a.node_limit;
  return lim;
}

RunReport solve_one(const Instance& inst, const std::string& label, Formulation form,
                    const RunArgs& a) {
  const auto t0 = std::chrono::steady_clock::now();
  auto res = branch_and_cut(build_model(inst, form), inst, policy_of(a), limits_of(a));
  RunReport rep;
  rep.instance = label;
  rep.formulation = to_string(form);
  rep.p = inst.p();
  rep.r = inst.r();
  rep.s = inst.s();
  rep.cuts = a.cuts;
  rep.cortes_backend = a.backend;
  rep.solve = res.report;
  rep.solve.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  rep.solution = std::move(res.solution);
  rep.record_time = a.record_time;
  return rep;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path.string());
  out << text;
}

std::filesystem::path out_dir(const std::string& dir) {
  std::filesystem::path p(dir);
  std::error_code ec;
  std::filesystem::create_directories(p, ec);
  if (ec) throw UsageError("cannot create " + dir);
  return p;
}

int cmd_solve(const InstanceArgs& ia, const RunArgs& ra, const std::string& formulation,
              const std::string& mps_path, std::ostream& out) {
  const Formulation form = parse_form(formulation);
  const int s = ia.s.value_or(ia.p);
  const auto [inst, label] = load_instance(ia, ia.p, ia.r, s);
  if (!mps_path.empty()) {
    const MipModel model = build_model(inst, form);
    const auto parent = std::filesystem::path(mps_path).parent_path();
    if (!parent.empty()) out_dir(parent.string());
    write_text(mps_path, write_mps(model.lp, "HUBLAB", &model.integer));
  }
  const RunReport rep = solve_one(inst, label, form, ra);
  const auto dir = out_dir(ra.out);
  write_text(dir / "report.json", report_to_json(rep));
  write_text(dir / "report.csv", reports_to_csv({rep}));
  out << human_table({rep});
  return kExitOk;
}

int cmd_compare(const InstanceArgs& ia, const RunArgs& ra, const std::string& method,
                std::ostream& out) {
  const auto [base, label] = load_instance(ia, ia.p, 1, ia.s.value_or(ia.p));
  if (!base.identical_sets()) throw UsageError("compare needs an instance with O = D = H");
  Formulation form = Formulation::F1PD;
  if (method.empty()) {
    form = base.is_disaggregated() ? Formulation::F1PD : Formulation::F1P;
  } else {
    form = parse_form(method);
    if (form != Formulation::F1P && form != Formulation::F1PD) {
      throw UsageError("--method must be 1p-f or 1p-fd");
    }
  }
  const RunReport sa = solve_one(base.with_parameters(base.p(), 1, 1, base.range()), label,
                                 Formulation::SAHLP_F3, ra);
  const RunReport op =
      solve_one(base.with_parameters(base.p(), 1, base.p(), base.range()), label, form, ra);
  if (!sa.solution || !op.solution) {
    out << "no incumbent: sahlp " << to_string(sa.solve.status) << ", 1p "
        << to_string(op.solve.status) << "\n";
    return kExitOk;
  }
  ComparisonReport cmp = compare_solutions(*sa.solution, *op.solution, base.o(), base.p());
  cmp.status_sahlp = to_string(sa.solve.status);
  cmp.status_1p = to_string(op.solve.status);
  cmp.comparable = sa.solve.status == SolveStatus::Optimal && op.solve.status == SolveStatus::Optimal;
  const auto dir = out_dir(ra.out);
  write_text(dir / "comparison.json", comparison_to_json(cmp));
  write_text(dir / "comparison.csv", comparison_csv_header() + comparison_to_csv_row(cmp));
  out << comparison_csv_header() << comparison_to_csv_row(cmp);
  return kExitOk;
}

int cmd_bench(const InstanceArgs& ia, const RunArgs& ra, const std::string& p_list,
              const std::vector<std::string>& methods, std::ostream& out, std::ostream& err) {
  std::vector<RunReport> rows;
  std::string failures;
  for (long p : split_longs(p_list)) {
    for (const auto& m : methods) {
      const auto colon = m.find(':');
      const std::string form_name = m.substr(0, colon);
      RunArgs row_args = ra;
      if (colon != std::string::npos) row_args.cuts = m.substr(colon + 1);
      const Formulation form = parse_form(form_name);
      try {
        const int pi = static_cast<int>(p);
        const int r = form == Formulation::F1P || form == Formulation::F1PD ||
                              form == Formulation::SAHLP_F3
                          ? 1
                          : ia.r;
        const int s = form == Formulation::SAHLP_F3 ? 1 : ia.s.value_or(pi);
        const auto [inst, label] = load_instance(ia, pi, r, s);
        rows.push_back(solve_one(inst, label, form, row_args));
      } catch (const Error& e) {
        const std::string line = std::to_string(p) + "," + m + "," + e.what() + "\n";
        failures += line;
        err << "bench row failed: " << line;
      }
    }
  }
  const auto dir = out_dir(ra.out);
  write_text(dir / "bench.csv", reports_to_csv(rows));
  if (!failures.empty()) write_text(dir / "bench_failures.csv", "p,method,error\n" + failures);
  out << human_table(rows);
  return kExitOk;
}

int cmd_oracle(const InstanceArgs& ia, const std::string& mode, const std::string& out_path,
               std::ostream& out) {
  const int s = mode == "sahlp" ? 1 : ia.s.value_or(ia.p);
  const int r = mode == "rs" ? ia.r : 1;
  const auto [inst, label] = load_instance(ia, ia.p, r, s);
  (void)label;
  HubSolution sol;
  if (mode == "rs") sol = exact_rs(inst);
  else if (mode == "1p") sol = exact_1p(inst);
  else sol = exact_sahlp(inst);
  const std::string text = solution_to_json(sol);
  if (out_path.empty()) {
    out << text;
  } else {
    write_text(out_path, text);
    out << "objective " << format_double(sol.objective) << "\n";
  }
  return kExitOk;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::BudgetExceeded: return kExitBudget;
    case ErrorCode::TokenCount:
    case ErrorCode::NegativeFlow:
    case ErrorCode::NonNumericToken:
    case ErrorCode::ParameterRange:
    case ErrorCode::IndexRange:
    case ErrorCode::InvalidInstance:
    case ErrorCode::RequiresSingleOriginAllocation:
    case ErrorCode::RequiresIdenticalSets:
    case ErrorCode::RequiresDisaggregatedCosts:
      return kExitUsage;
    default: return kExitInternal;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Asymmetric hub location solver"};
  app.require_subcommand(1);

  InstanceArgs ia;
  RunArgs ra;
  std::string formulation = "1p-fd";
  std::string method;
  std::string p_list = "2";
  std::vector<std::string> methods = {"1p-fd:none", "1p-fd:both"};
  std::string mode = "1p";
  std::string oracle_out;
  std::string mps_path;

  auto* solve = app.add_subcommand("solve", "solve one instance by branch and cut");
  add_instance_options(*solve, ia);
  add_run_options(*solve, ra);
  solve->add_option("--formulation", formulation, "model")
      ->check(CLI::IsMember({"f4", "f3", "1p-f", "1p-fd", "sahlp"}));
  solve->add_option("--write-mps", mps_path, "dump the model before solving");

  auto* compare = app.add_subcommand("compare", "single allocation against (1,p)");
  add_instance_options(*compare, ia);
  add_run_options(*compare, ra);
  compare->add_option("--method", method, "1p-f or 1p-fd");

  auto* bench = app.add_subcommand("bench", "p values crossed with methods");
  add_instance_options(*bench, ia);
  add_run_options(*bench, ra);
  bench->add_option("--p-list", p_list, "comma separated p values");
  bench->add_option("--methods", methods, "FORM[:CUTS] entries")->delimiter(' ');

  auto* oracle = app.add_subcommand("oracle", "exhaustive reference solution");
  add_instance_options(*oracle, ia);
  oracle->add_option("--mode", mode, "rs, 1p or sahlp")
      ->check(CLI::IsMember({"rs", "1p", "sahlp"}));
  oracle->add_option("--out", oracle_out, "solution JSON path (stdout if absent)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help(app.get_subcommands().empty() ? "" : app.get_subcommands().front()->get_name());
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*solve) return cmd_solve(ia, ra, formulation, mps_path, out);
    if (*compare) return cmd_compare(ia, ra, method, out);
    if (*bench) return cmd_bench(ia, ra, p_list, methods, out, err);
    return cmd_oracle(ia, mode, oracle_out, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    const int code = exit_code_for(e.code());
    err << (code == kExitUsage ? "usage error: " : "error: ") << e.what() << "\n";
    return code;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace hublab::cli

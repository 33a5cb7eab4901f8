#include "hublab/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>

#include <json.hpp>

#include "hublab/error.hpp"

namespace hublab {

namespace {

using nlohmann::ordered_json;

ordered_json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double read_number(const ordered_json& j) {
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "inf") return kInfinity;
    if (s == "-inf") return -kInfinity;
    if (s == "nan") return std::nan("");
    fail(ErrorCode::MalformedReport, "unexpected string '" + s + "' for a number");
  }
  return j.get<double>();
}

SolveStatus status_from_string(const std::string& s) {
  for (auto st : {SolveStatus::Optimal, SolveStatus::TimeLimit, SolveStatus::NodeLimit,
                  SolveStatus::Infeasible}) {
    if (to_string(st) == s) return st;
  }
  fail(ErrorCode::MalformedReport, "unknown status '" + s + "'");
}

ordered_json solution_json(const HubSolution& s) {
  ordered_json j;
  j["hubs"] = s.hubs;
  j["origin_sets"] = s.origin_sets;
  j["dest_sets"] = s.dest_sets;
  ordered_json routing = ordered_json::array();
  for (const auto& [k, m] : s.routing) routing.push_back({k, m});
  j["routing"] = std::move(routing);
  j["objective"] = number(s.objective);
  return j;
}

HubSolution solution_of(const ordered_json& j) {
  HubSolution s;
  s.hubs = j.at("hubs").get<std::vector<int>>();
  s.origin_sets = j.at("origin_sets").get<std::vector<std::vector<int>>>();
  s.dest_sets = j.at("dest_sets").get<std::vector<std::vector<int>>>();
  for (const auto& r : j.at("routing")) s.routing.emplace_back(r.at(0).get<int>(), r.at(1).get<int>());
  s.objective = read_number(j.at("objective"));
  return s;
}

std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return format_double(v);
}

double csv_double(const std::string& s) {
  if (s == "inf") return kInfinity;
  if (s == "-inf") return -kInfinity;
  if (s == "nan") return std::nan("");
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    fail(ErrorCode::MalformedReport, "bad number '" + s + "'");
  }
  return v;
}

long csv_long(const std::string& s) {
  long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    fail(ErrorCode::MalformedReport, "bad integer '" + s + "'");
  }
  return v;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::vector<std::string>> split_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    any = true;
    if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
      any = false;
    } else {
      field += c;
    }
  }
  if (quoted) fail(ErrorCode::MalformedReport, "unterminated quote");
  if (any) fail(ErrorCode::MalformedReport, "missing final newline");
  return rows;
}

std::string join_ints(const std::vector<int>& v) {
  std::string out;
  for (std::size_t t = 0; t < v.size(); ++t) {
    if (t) out += ' ';
    out += std::to_string(v[t]);
  }
  return out;
}

std::vector<int> split_ints(const std::string& s) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const std::size_t next = std::min(s.find(' ', pos), s.size());
    out.push_back(static_cast<int>(csv_long(s.substr(pos, next - pos))));
    pos = next + 1;
  }
  return out;
}

const std::vector<std::string> kCsvColumns = {
    "instance", "formulation", "p", "r", "s", "cuts", "cortes_backend", "status",
    "root_lp", "ilb", "flb", "fub", "gap", "nodes", "cuts_zy2", "cuts_cortes",
    "root_rounds", "lp_iterations", "objective_mismatches", "hubs"};

}  // namespace

std::string report_to_json(const RunReport& rep) {
  ordered_json j;
  j["schema"] = kReportSchema;
  j["instance"] = rep.instance;
  j["formulation"] = rep.formulation;
  j["p"] = rep.p;
  j["r"] = rep.r;
  j["s"] = rep.s;
  j["cuts"] = rep.cuts;
  j["cortes_backend"] = rep.cortes_backend;
  const SolveReport& s = rep.solve;
  ordered_json sj;
  sj["status"] = to_string(s.status);
  sj["root_lp"] = number(s.root_lp);
  sj["ilb"] = number(s.ilb);
  sj["flb"] = number(s.flb);
  sj["fub"] = number(s.fub);
  sj["gap"] = number(s.gap);
  sj["nodes"] = s.nodes;
  sj["cuts_zy2"] = s.cuts_zy2;
  sj["cuts_cortes"] = s.cuts_cortes;
  sj["root_rounds"] = s.root_rounds;
  sj["lp_iterations"] = s.lp_iterations;
  sj["objective_mismatches"] = s.objective_mismatches;
  if (rep.record_time) sj["wall_seconds"] = number(s.wall_seconds);
  j["report"] = std::move(sj);
  j["solution"] = rep.solution ? solution_json(*rep.solution) : ordered_json(nullptr);
  return j.dump(2) + "\n";
}

RunReport report_from_json(std::string_view text) {
  try {
    const auto j = ordered_json::parse(text);
    if (j.at("schema").get<int>() != kReportSchema) {
      fail(ErrorCode::MalformedReport, "unsupported schema version");
    }
    RunReport rep;
    rep.instance = j.at("instance").get<std::string>();
    rep.formulation = j.at("formulation").get<std::string>();
    rep.p = j.at("p").get<int>();
    rep.r = j.at("r").get<int>();
    rep.s = j.at("s").get<int>();
    rep.cuts = j.at("cuts").get<std::string>();
    rep.cortes_backend = j.at("cortes_backend").get<std::string>();
    const auto& sj = j.at("report");
    SolveReport& s = rep.solve;
    s.status = status_from_string(sj.at("status").get<std::string>());
    s.root_lp = read_number(sj.at("root_lp"));
    s.ilb = read_number(sj.at("ilb"));
    s.flb = read_number(sj.at("flb"));
    s.fub = read_number(sj.at("fub"));
    s.gap = read_number(sj.at("gap"));
    s.nodes = sj.at("nodes").get<long>();
    s.cuts_zy2 = sj.at("cuts_zy2").get<int>();
    s.cuts_cortes = sj.at("cuts_cortes").get<int>();
    s.root_rounds = sj.at("root_rounds").get<int>();
    s.lp_iterations = sj.at("lp_iterations").get<long>();
    s.objective_mismatches = sj.at("objective_mismatches").get<int>();
    if (sj.contains("wall_seconds")) {
      rep.record_time = true;
      s.wall_seconds = read_number(sj.at("wall_seconds"));
    }
    const auto& sol = j.at("solution");
    if (!sol.is_null()) rep.solution = solution_of(sol);
    return rep;
  } catch (const ordered_json::exception& e) {
    fail(ErrorCode::MalformedReport, std::string("report JSON: ") + e.what());
  }
}

std::string report_csv_header(bool with_time) {
  std::string out;
  for (std::size_t c = 0; c < kCsvColumns.size(); ++c) {
    if (c) out += ',';
    out += kCsvColumns[c];
  }
  if (with_time) out += ",wall_seconds";
  return out + "\n";
}

std::string report_to_csv_row(const RunReport& rep) {
  const SolveReport& s = rep.solve;
  const std::vector<std::string> fields = {
      csv_field(rep.instance),
      csv_field(rep.formulation),
      std::to_string(rep.p),
      std::to_string(rep.r),
      std::to_string(rep.s),
      csv_field(rep.cuts),
      csv_field(rep.cortes_backend),
      to_string(s.status),
      csv_number(s.root_lp),
      csv_number(s.ilb),
      csv_number(s.flb),
      csv_number(s.fub),
      csv_number(s.gap),
      std::to_string(s.nodes),
      std::to_string(s.cuts_zy2),
      std::to_string(s.cuts_cortes),
      std::to_string(s.root_rounds),
      std::to_string(s.lp_iterations),
      std::to_string(s.objective_mismatches),
      rep.solution ? join_ints(rep.solution->hubs) : std::string("-"),
  };
  std::string out;
  for (std::size_t c = 0; c < fields.size(); ++c) {
    if (c) out += ',';
    out += fields[c];
  }
  if (rep.record_time) out += "," + csv_number(s.wall_seconds);
  return out + "\n";
}

std::string reports_to_csv(const std::vector<RunReport>& reports) {
  const bool with_time = !reports.empty() && reports.front().record_time;
  for (const auto& r : reports) {
    if (r.record_time != with_time) {
      fail(ErrorCode::MalformedReport, "mixed timed and untimed reports in one table");
    }
  }
  std::string out = report_csv_header(with_time);
  for (const auto& r : reports) out += report_to_csv_row(r);
  return out;
}

std::vector<RunReport> reports_from_csv(std::string_view text) {
  const auto rows = split_csv(text);
  if (rows.empty()) fail(ErrorCode::MalformedReport, "missing CSV header");
  const auto& head = rows.front();
  const bool with_time = head.size() == kCsvColumns.size() + 1;
  if (!with_time && head.size() != kCsvColumns.size()) {
    fail(ErrorCode::MalformedReport, "unexpected column count in CSV header");
  }
  for (std::size_t c = 0; c < kCsvColumns.size(); ++c) {
    if (head[c] != kCsvColumns[c]) fail(ErrorCode::MalformedReport, "unexpected column '" + head[c] + "'");
  }
  if (with_time && head.back() != "wall_seconds") {
    fail(ErrorCode::MalformedReport, "unexpected column '" + head.back() + "'");
  }
  std::vector<RunReport> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r];
    if (f.size() != head.size()) {
      fail(ErrorCode::MalformedReport, "row " + std::to_string(r) + " has the wrong field count");
    }
    RunReport rep;
    rep.instance = f[0];
    rep.formulation = f[1];
    rep.p = static_cast<int>(csv_long(f[2]));
    rep.r = static_cast<int>(csv_long(f[3]));
    rep.s = static_cast<int>(csv_long(f[4]));
    rep.cuts = f[5];
    rep.cortes_backend = f[6];
    SolveReport& s = rep.solve;
    s.status = status_from_string(f[7]);
    s.root_lp = csv_double(f[8]);
    s.ilb = csv_double(f[9]);
    s.flb = csv_double(f[10]);
    s.fub = csv_double(f[11]);
    s.gap = csv_double(f[12]);
    s.nodes = csv_long(f[13]);
    s.cuts_zy2 = static_cast<int>(csv_long(f[14]));
    s.cuts_cortes = static_cast<int>(csv_long(f[15]));
    s.root_rounds = static_cast<int>(csv_long(f[16]));
    s.lp_iterations = csv_long(f[17]);
    s.objective_mismatches = static_cast<int>(csv_long(f[18]));
    // CSV rows only carry the hub set.
    if (f[19] != "-") {
      HubSolution sol;
      sol.hubs = split_ints(f[19]);
      sol.objective = s.fub;
      rep.solution = sol;
    }
    if (with_time) {
      rep.record_time = true;
      s.wall_seconds = csv_double(f[20]);
    }
    out.push_back(std::move(rep));
  }
  return out;
}

std::string human_table(const std::vector<RunReport>& reports) {
  auto fixed = [](double v, int prec) {
    if (!std::isfinite(v)) return std::string(v > 0 ? "inf" : v < 0 ? "-inf" : "nan");
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", prec, v);
    return std::string(buf);
  };
  std::string out;
  char line[256];
  std::snprintf(line, sizeof(line), "%3s  %-8s %12s %12s %12s %9s %8s %8s %8s %8s\n", "p", "Form",
                "ILB", "FLB", "FUB", "Time", "Gap", "#Nodes", "#cortes", "#zy2");
  out += line;
  for (const auto& r : reports) {
    const SolveReport& s = r.solve;
    std::snprintf(line, sizeof(line), "%3d  %-8s %12s %12s %12s %9s %8s %8ld %8d %8d\n", r.p,
                  r.formulation.c_str(), fixed(s.ilb, 2).c_str(), fixed(s.flb, 2).c_str(),
                  fixed(s.fub, 2).c_str(), fixed(s.wall_seconds, 2).c_str(),
                  fixed(s.gap, 2).c_str(), s.nodes, s.cuts_cortes, s.cuts_zy2);
    out += line;
  }
  return out;
}

ComparisonReport compare_solutions(const HubSolution& sahlp, const HubSolution& one_p,
                                   int n, int p) {
  ComparisonReport rep;
  rep.n = n;
  rep.p = p;
  const std::set<int> a(sahlp.hubs.begin(), sahlp.hubs.end());
  const std::set<int> b(one_p.hubs.begin(), one_p.hubs.end());
  for (int k : a) rep.hubs_diff += b.count(k) == 0;
  for (int k : b) rep.hubs_diff += a.count(k) == 0;

  const int o = static_cast<int>(one_p.origin_sets.size());
  if (static_cast<int>(sahlp.origin_sets.size()) != o) {
    fail(ErrorCode::InvalidInstance, "solutions have different origin counts");
  }
  for (int i = 0; i < o; ++i) {
    const auto& x = sahlp.origin_sets[i];
    const auto& y = one_p.origin_sets[i];
    if (x.size() != 1 || y.size() != 1) {
      fail(ErrorCode::RequiresSingleOriginAllocation, "origin " + std::to_string(i) +
                                                          " is not singly allocated");
    }
    rep.single_alloc_changes += x[0] != y[0];
  }
  const int d = static_cast<int>(one_p.dest_sets.size());
  for (int j = 0; j < d; ++j) {
    std::set<int> used;
    for (int i = 0; i < o; ++i) used.insert(one_p.route(i, j, d).second);
    rep.multi_alloc_count += used.size() >= 2;
  }
  rep.objective_sahlp = sahlp.objective;
  rep.objective_1p = one_p.objective;
  return rep;
}

std::string comparison_to_json(const ComparisonReport& c) {
  ordered_json j;
  j["schema"] = kReportSchema;
  j["n"] = c.n;
  j["p"] = c.p;
  j["hubs_diff"] = c.hubs_diff;
  j["single_alloc_changes"] = c.single_alloc_changes;
  j["multi_alloc_count"] = c.multi_alloc_count;
  j["objective_sahlp"] = number(c.objective_sahlp);
  j["objective_1p"] = number(c.objective_1p);
  j["status_sahlp"] = c.status_sahlp;
  j["status_1p"] = c.status_1p;
  j["comparable"] = c.comparable;
  return j.dump(2) + "\n";
}

ComparisonReport comparison_from_json(std::string_view text) {
  try {
    const auto j = ordered_json::parse(text);
    if (j.at("schema").get<int>() != kReportSchema) {
      fail(ErrorCode::MalformedReport, "unsupported schema version");
    }
    ComparisonReport c;
    c.n = j.at("n").get<int>();
    c.p = j.at("p").get<int>();
    c.hubs_diff = j.at("hubs_diff").get<int>();
    c.single_alloc_changes = j.at("single_alloc_changes").get<int>();
    c.multi_alloc_count = j.at("multi_alloc_count").get<int>();
    c.objective_sahlp = read_number(j.at("objective_sahlp"));
    c.objective_1p = read_number(j.at("objective_1p"));
    c.status_sahlp = j.at("status_sahlp").get<std::string>();
    c.status_1p = j.at("status_1p").get<std::string>();
    c.comparable = j.at("comparable").get<bool>();
    return c;
  } catch (const ordered_json::exception& e) {
    fail(ErrorCode::MalformedReport, std::string("comparison JSON: ") + e.what());
  }
}

std::string comparison_csv_header() {
  return "n,p,hubs_diff,single_alloc_changes,multi_alloc_count,objective_sahlp,objective_1p,"
         "status_sahlp,status_1p,comparable\n";
}

std::string comparison_to_csv_row(const ComparisonReport& c) {
  return std::to_string(c.n) + "," + std::to_string(c.p) + "," + std::to_string(c.hubs_diff) +
         "," + std::to_string(c.single_alloc_changes) + "," +
         std::to_string(c.multi_alloc_count) + "," + csv_number(c.objective_sahlp) + "," +
         csv_number(c.objective_1p) + "," + c.status_sahlp + "," + c.status_1p + "," +
         (c.comparable ? "1" : "0") + "\n";
}

}  // namespace hublab

#include "hublab/instance.hpp"

#include <charconv>
#include <cmath>
#include <random>
#include <sstream>

#include "hublab/error.hpp"
#include "json.hpp"

namespace hublab {
namespace {

using nlohmann::json;

bool is_space(char ch) {
  return ch == ' ' || ch == '\n' || ch == '\t' || ch == '\r' || ch == '\f' ||
         ch == '\v';
}

std::vector<std::string_view> tokenize(std::string_view text) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    const std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > start) tokens.push_back(text.substr(start, i - start));
  }
  return tokens;
}

double parse_number(std::string_view token, std::size_t position) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
    fail(ErrorCode::NonNumericToken, "token " + std::to_string(position) +
                                         " ('" + std::string(token) +
                                         "') is not a finite number");
  }
  return value;
}

void check_legs(const LegFactors& legs) {
  if (!(legs.alpha >= 0.0 && legs.beta >= 0.0 && legs.gamma >= 0.0)) {
    fail(ErrorCode::ParameterRange, "alpha, beta, gamma must be nonnegative");
  }
  if (legs.alpha > legs.beta || legs.alpha > legs.gamma) {
    fail(ErrorCode::ParameterRange,
         "require alpha <= beta and alpha <= gamma (alpha=" +
             format_double(legs.alpha) + ", beta=" + format_double(legs.beta) +
             ", gamma=" + format_double(legs.gamma) + ")");
  }
}

void check_nonnegative(const std::vector<double>& values, const char* what) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] >= 0.0) || !std::isfinite(values[i])) {
      fail(ErrorCode::InvalidInstance, std::string(what) + " entry " +
                                           std::to_string(i) +
                                           " is negative or not finite");
    }
  }
}

void check_map(const std::vector<int>& map, int expected, int n_sites,
               const char* what) {
  if (static_cast<int>(map.size()) != expected) {
    fail(ErrorCode::InvalidInstance, std::string(what) + " has wrong length");
  }
  for (int v : map) {
    if (v < 0 || v >= n_sites) {
      fail(ErrorCode::InvalidInstance, std::string(what) + " entry out of range");
    }
  }
}

std::vector<int> identity(int n) {
  std::vector<int> v(n);
  for (int i = 0; i < n; ++i) v[i] = i;
  return v;
}

// Uniform double in [0, 1) from the top 53 bits; portable across standard
// library implementations, unlike std::uniform_real_distribution.
double unit_draw(std::mt19937_64& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

std::vector<double> euclidean(const std::vector<Point>& pts, double factor) {
  const std::size_t n = pts.size();
  std::vector<double> c(n * n, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b) continue;
      c[a * n + b] =
          std::hypot(pts[a].x - pts[b].x, pts[a].y - pts[b].y) * factor;
    }
  }
  return c;
}

json matrix_json(const std::vector<double>& flat, int rows, int cols) {
  json out = json::array();
  for (int a = 0; a < rows; ++a) {
    json row = json::array();
    for (int b = 0; b < cols; ++b) row.push_back(flat[a * cols + b]);
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<double> matrix_from_json(const json& j, int rows, int cols,
                                     const char* what) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows) {
    fail(ErrorCode::InvalidInstance, std::string(what) + " has wrong row count");
  }
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(rows) * cols);
  for (const auto& row : j) {
    if (!row.is_array() || static_cast<int>(row.size()) != cols) {
      fail(ErrorCode::InvalidInstance,
           std::string(what) + " has wrong column count");
    }
    for (const auto& v : row) flat.push_back(v.get<double>());
  }
  return flat;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

RawSites parse_ap(std::string_view text) {
  const auto tokens = tokenize(text);
  if (tokens.empty()) fail(ErrorCode::TokenCount, "empty input");

  const double n_value = parse_number(tokens[0], 0);
  if (n_value < 1.0 || n_value != std::floor(n_value) || n_value > 1e6) {
    fail(ErrorCode::NonNumericToken,
         "token 0 ('" + std::string(tokens[0]) + "') is not a positive site count");
  }
  RawSites raw;
  raw.n = static_cast<int>(n_value);
  const std::size_t n = static_cast<std::size_t>(raw.n);
  const std::size_t needed = 1 + 2 * n + n * n;
  if (tokens.size() < needed) {
    fail(ErrorCode::TokenCount, "expected at least " + std::to_string(needed) +
                                    " tokens for n=" + std::to_string(n) +
                                    ", found " + std::to_string(tokens.size()) +
                                    " (input ends at token " +
                                    std::to_string(tokens.size()) + ")");
  }
  std::size_t pos = 1;
  raw.coords.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    raw.coords[i].x = parse_number(tokens[pos], pos);
    ++pos;
    raw.coords[i].y = parse_number(tokens[pos], pos);
    ++pos;
  }
  raw.flows.resize(n * n);
  for (std::size_t e = 0; e < n * n; ++e, ++pos) {
    const double v = parse_number(tokens[pos], pos);
    if (v < 0.0) {
      fail(ErrorCode::NegativeFlow, "token " + std::to_string(pos) + " ('" +
                                        std::string(tokens[pos]) +
                                        "') is a negative flow");
    }
    raw.flows[e] = v;
  }
  for (; pos < tokens.size(); ++pos) {
    raw.trailing_params.push_back(parse_number(tokens[pos], pos));
  }
  return raw;
}

std::string serialize_ap(const RawSites& raw) {
  std::string out = std::to_string(raw.n) + "\n";
  for (const auto& pt : raw.coords) {
    out += format_double(pt.x) + " " + format_double(pt.y) + "\n";
  }
  for (int i = 0; i < raw.n; ++i) {
    for (int j = 0; j < raw.n; ++j) {
      if (j > 0) out += ' ';
      out += format_double(raw.flow(i, j));
    }
    out += '\n';
  }
  for (std::size_t t = 0; t < raw.trailing_params.size(); ++t) {
    out += format_double(raw.trailing_params[t]);
    out += '\n';
  }
  return out;
}

Instance::Instance(int o, int d, int h, CostModel cost, int p, int r, int s,
                   ParamRange range)
    : o_(o), d_(d), h_(h), cost_(std::move(cost)), p_(p), r_(r), s_(s),
      range_(range) {
  if (o < 1 || d < 1 || h < 1) {
    fail(ErrorCode::InvalidInstance, "o, d, h must be positive");
  }
  if (range == ParamRange::Strict) {
    if (p < 2 || p > h - 1) {
      fail(ErrorCode::ParameterRange,
           "p=" + std::to_string(p) + " outside 2 <= p <= h-1 (h=" +
               std::to_string(h) + ")");
    }
  } else if (p < 1 || p > h) {
    fail(ErrorCode::ParameterRange,
         "p=" + std::to_string(p) + " outside 1 <= p <= h");
  }
  if (r < 1 || r > p) {
    fail(ErrorCode::ParameterRange, "r=" + std::to_string(r) + " outside 1 <= r <= p");
  }
  if (s < 1 || s > p) {
    fail(ErrorCode::ParameterRange, "s=" + std::to_string(s) + " outside 1 <= s <= p");
  }
  if (auto* g = std::get_if<GeneralCosts>(&cost_)) {
    const std::size_t expected =
        static_cast<std::size_t>(o) * d * h * h;
    if (g->tensor.size() != expected) {
      fail(ErrorCode::InvalidInstance, "cost tensor must have o*d*h*h entries");
    }
    check_nonnegative(g->tensor, "cost tensor");
  } else {
    auto& dc = std::get<DisaggregatedCosts>(cost_);
    check_legs(dc.legs);
    if (dc.n_sites < 1 ||
        dc.c.size() != static_cast<std::size_t>(dc.n_sites) * dc.n_sites) {
      fail(ErrorCode::InvalidInstance, "distance matrix must be n_sites^2");
    }
    if (dc.w.size() != static_cast<std::size_t>(o) * d) {
      fail(ErrorCode::InvalidInstance, "flow matrix must be o*d");
    }
    check_nonnegative(dc.c, "distance matrix");
    check_nonnegative(dc.w, "flow matrix");
    for (int a = 0; a < dc.n_sites; ++a) {
      if (dc.dist(a, a) != 0.0) {
        fail(ErrorCode::InvalidInstance, "distance matrix diagonal must be zero");
      }
    }
    check_map(dc.origin_site, o, dc.n_sites, "origin_site");
    check_map(dc.dest_site, d, dc.n_sites, "dest_site");
    check_map(dc.hub_site, h, dc.n_sites, "hub_site");
  }
}

double Instance::cost(int i, int j, int k, int m) const {
  if (i < 0 || i >= o_ || j < 0 || j >= d_ || k < 0 || k >= h_ || m < 0 ||
      m >= h_) {
    fail(ErrorCode::IndexRange, "cost index (" + std::to_string(i) + "," +
                                    std::to_string(j) + "," + std::to_string(k) +
                                    "," + std::to_string(m) + ") out of range");
  }
  return cost_at(i, j, k, m);
}

double Instance::transfer_distribution_cost(int i, int j, int k, int m) const {
  const auto* dc = disaggregated();
  if (dc == nullptr) {
    fail(ErrorCode::RequiresDisaggregatedCosts, "transfer/distribution split");
  }
  const int sj = dc->dest_site[j];
  const int sk = dc->hub_site[k];
  const int sm = dc->hub_site[m];
  return dc->w[i * d_ + j] *
         (dc->legs.alpha * dc->dist(sk, sm) + dc->legs.beta * dc->dist(sm, sj));
}

double Instance::collection_cost(int i, int j, int k) const {
  const auto* dc = disaggregated();
  if (dc == nullptr) {
    fail(ErrorCode::RequiresDisaggregatedCosts, "collection cost");
  }
  return dc->legs.gamma * dc->w[i * d_ + j] *
         dc->dist(dc->origin_site[i], dc->hub_site[k]);
}

bool Instance::identical_sets() const {
  if (o_ != d_ || d_ != h_) return false;
  const auto* dc = disaggregated();
  if (dc == nullptr) return true;
  return dc->origin_site == dc->dest_site && dc->dest_site == dc->hub_site;
}

Instance Instance::with_parameters(int p, int r, int s) const {
  return with_parameters(p, r, s, range_);
}

Instance Instance::with_parameters(int p, int r, int s, ParamRange range) const {
  return Instance(o_, d_, h_, cost_, p, r, s, range);
}

Instance Instance::expanded() const {
  GeneralCosts g;
  g.tensor.resize(static_cast<std::size_t>(o_) * d_ * h_ * h_);
  std::size_t e = 0;
  for (int i = 0; i < o_; ++i)
    for (int j = 0; j < d_; ++j)
      for (int k = 0; k < h_; ++k)
        for (int m = 0; m < h_; ++m) g.tensor[e++] = cost_at(i, j, k, m);
  return Instance(o_, d_, h_, std::move(g), p_, r_, s_, range_);
}

Instance build_instance(const RawSites& raw, const LegFactors& legs, int p,
                        int r, int s, const ScalingConfig& scaling,
                        ParamRange range) {
  check_legs(legs);
  if (!(scaling.distance_factor > 0.0) || !std::isfinite(scaling.distance_factor)) {
    fail(ErrorCode::ParameterRange, "distance_factor must be positive");
  }
  const int n = raw.n;
  if (static_cast<int>(raw.coords.size()) != n ||
      raw.flows.size() != static_cast<std::size_t>(n) * n) {
    fail(ErrorCode::InvalidInstance, "raw sites have inconsistent sizes");
  }
  DisaggregatedCosts dc;
  dc.n_sites = n;
  dc.c = euclidean(raw.coords, scaling.distance_factor);
  dc.w = raw.flows;
  if (scaling.flow_mode == FlowMode::NormalizeTotal) {
    double total = 0.0;
    for (double v : raw.flows) total += v;
    if (total > 0.0) {
      for (double& v : dc.w) v /= total;
    }
  }
  dc.origin_site = identity(n);
  dc.dest_site = identity(n);
  dc.hub_site = identity(n);
  dc.legs = legs;
  return Instance(n, n, n, std::move(dc), p, r, s, range);
}

Instance random_instance(std::uint64_t seed, int o, int d, int h, int p, int r,
                         int s, CostKind kind, ParamRange range) {
  if (o < 1 || d < 1 || h < 1) {
    fail(ErrorCode::ParameterRange, "o, d, h must be positive");
  }
  std::mt19937_64 engine(seed);
  if (kind == CostKind::General) {
    GeneralCosts g;
    g.tensor.resize(static_cast<std::size_t>(o) * d * h * h);
    for (double& v : g.tensor) v = 100.0 * unit_draw(engine);
    return Instance(o, d, h, std::move(g), p, r, s, range);
  }
  // O = D = H share sites when the cardinalities agree; otherwise origins,
  // destinations and hubs are distinct points.
  const bool shared = (o == d && d == h);
  const int n_sites = shared ? h : o + d + h;
  std::vector<Point> pts(n_sites);
  for (auto& pt : pts) {
    pt.x = 100.0 * unit_draw(engine);
    pt.y = 100.0 * unit_draw(engine);
  }
  DisaggregatedCosts dc;
  dc.n_sites = n_sites;
  dc.c = euclidean(pts, 1.0);
  dc.w.resize(static_cast<std::size_t>(o) * d);
  for (double& v : dc.w) v = unit_draw(engine);
  if (shared) {
    dc.origin_site = identity(h);
    dc.dest_site = identity(h);
    dc.hub_site = identity(h);
  } else {
    for (int i = 0; i < o; ++i) dc.origin_site.push_back(i);
    for (int j = 0; j < d; ++j) dc.dest_site.push_back(o + j);
    for (int k = 0; k < h; ++k) dc.hub_site.push_back(o + d + k);
  }
  dc.legs = LegFactors{};
  return Instance(o, d, h, std::move(dc), p, r, s, range);
}

std::string instance_to_json(const Instance& instance) {
  json j;
  j["o"] = instance.o();
  j["d"] = instance.d();
  j["h"] = instance.h();
  j["p"] = instance.p();
  j["r"] = instance.r();
  j["s"] = instance.s();
  json cost;
  if (const auto* dc = instance.disaggregated()) {
    cost["kind"] = "disaggregated";
    cost["n_sites"] = dc->n_sites;
    cost["w"] = matrix_json(dc->w, instance.o(), instance.d());
    cost["c"] = matrix_json(dc->c, dc->n_sites, dc->n_sites);
    cost["origin_site"] = dc->origin_site;
    cost["dest_site"] = dc->dest_site;
    cost["hub_site"] = dc->hub_site;
    cost["alpha"] = dc->legs.alpha;
    cost["beta"] = dc->legs.beta;
    cost["gamma"] = dc->legs.gamma;
  } else {
    cost["kind"] = "general";
    cost["tensor"] = std::get<GeneralCosts>(instance.cost_model()).tensor;
  }
  j["cost"] = std::move(cost);
  return j.dump(1) + "\n";
}

Instance instance_from_json(std::string_view text, ParamRange range) {
  json j;
  try {
    j = json::parse(text);
    const int o = j.at("o").get<int>();
    const int d = j.at("d").get<int>();
    const int h = j.at("h").get<int>();
    const int p = j.at("p").get<int>();
    const int r = j.at("r").get<int>();
    const int s = j.at("s").get<int>();
    const json& cost = j.at("cost");
    const std::string kind = cost.at("kind").get<std::string>();
    if (kind == "general") {
      GeneralCosts g;
      g.tensor = cost.at("tensor").get<std::vector<double>>();
      return Instance(o, d, h, std::move(g), p, r, s, range);
    }
    if (kind != "disaggregated") {
      fail(ErrorCode::InvalidInstance, "unknown cost kind '" + kind + "'");
    }
    DisaggregatedCosts dc;
    dc.n_sites = cost.at("n_sites").get<int>();
    if (o < 1 || d < 1 || dc.n_sites < 1) {
      fail(ErrorCode::InvalidInstance, "non-positive dimensions");
    }
    dc.w = matrix_from_json(cost.at("w"), o, d, "w");
    dc.c = matrix_from_json(cost.at("c"), dc.n_sites, dc.n_sites, "c");
    dc.origin_site = cost.at("origin_site").get<std::vector<int>>();
    dc.dest_site = cost.at("dest_site").get<std::vector<int>>();
    dc.hub_site = cost.at("hub_site").get<std::vector<int>>();
    dc.legs.alpha = cost.at("alpha").get<double>();
    dc.legs.beta = cost.at("beta").get<double>();
    dc.legs.gamma = cost.at("gamma").get<double>();
    return Instance(o, d, h, std::move(dc), p, r, s, range);
  } catch (const json::exception& e) {
    fail(ErrorCode::InvalidInstance, std::string("instance JSON: ") + e.what());
  }
}

}  // namespace hublab

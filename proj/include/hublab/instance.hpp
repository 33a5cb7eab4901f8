#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace hublab {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// Sites read from an AP-style text file: coordinates and a row-major flow
// matrix. Tokens past the flow matrix are kept verbatim as numbers.
struct RawSites {
  int n = 0;
  std::vector<Point> coords;
  std::vector<double> flows;  // n * n, row i = flows out of site i
  std::vector<double> trailing_params;

  double flow(int i, int j) const { return flows[i * n + j]; }
};

RawSites parse_ap(std::string_view text);
std::string serialize_ap(const RawSites& raw);

enum class FlowMode { Raw, NormalizeTotal };

struct ScalingConfig {
  FlowMode flow_mode = FlowMode::Raw;
  double distance_factor = 1.0;

  // Flows normalized to sum one, raw Euclidean distances.
  static ScalingConfig ap_classic() { return {FlowMode::NormalizeTotal, 1.0}; }
};

// Leg weights of the disaggregated cost w_ij (gamma c_ik + alpha c_km + beta c_mj).
struct LegFactors {
  double alpha = 0.75;  // transfer between hubs
  double beta = 2.0;    // distribution
  double gamma = 3.0;   // collection
};

struct GeneralCosts {
  std::vector<double> tensor;  // o * d * h * h, index ((i*d + j)*h + k)*h + m
};

struct DisaggregatedCosts {
  int n_sites = 0;
  std::vector<double> w;  // o * d
  std::vector<double> c;  // n_sites * n_sites, zero diagonal
  std::vector<int> origin_site;
  std::vector<int> dest_site;
  std::vector<int> hub_site;
  LegFactors legs;

  double dist(int a, int b) const { return c[a * n_sites + b]; }
};

using CostModel = std::variant<GeneralCosts, DisaggregatedCosts>;

// Strict enforces 2 <= p <= h-1; Relaxed allows 1 <= p <= h for degenerate
// test instances.
enum class ParamRange { Strict, Relaxed };

enum class CostKind { General, Disaggregated };

class Instance {
 public:
  Instance(int o, int d, int h, CostModel cost, int p, int r, int s,
           ParamRange range = ParamRange::Strict);

  int o() const { return o_; }
  int d() const { return d_; }
  int h() const { return h_; }
  int p() const { return p_; }
  int r() const { return r_; }
  int s() const { return s_; }
  ParamRange range() const { return range_; }

  const CostModel& cost_model() const { return cost_; }
  const DisaggregatedCosts* disaggregated() const {
    return std::get_if<DisaggregatedCosts>(&cost_);
  }
  bool is_disaggregated() const { return disaggregated() != nullptr; }

  // Bounds-checked; throws IndexRange.
  double cost(int i, int j, int k, int m) const;

  // Unchecked hot-path variant.
  double cost_at(int i, int j, int k, int m) const {
    if (const auto* g = std::get_if<GeneralCosts>(&cost_)) {
      return g->tensor[((static_cast<std::size_t>(i) * d_ + j) * h_ + k) * h_ + m];
    }
    const auto& dc = std::get<DisaggregatedCosts>(cost_);
    const int si = dc.origin_site[i];
    const int sj = dc.dest_site[j];
    const int sk = dc.hub_site[k];
    const int sm = dc.hub_site[m];
    return dc.w[i * d_ + j] * (dc.legs.gamma * dc.dist(si, sk) +
                               dc.legs.alpha * dc.dist(sk, sm) +
                               dc.legs.beta * dc.dist(sm, sj));
  }

  // w_ij (alpha c_km + beta c_mj); disaggregated only.
  double transfer_distribution_cost(int i, int j, int k, int m) const;
  // gamma w_ij c_ik; disaggregated only.
  double collection_cost(int i, int j, int k) const;

  // O = D = H with shared site identities.
  bool identical_sets() const;

  Instance with_parameters(int p, int r, int s) const;
  Instance with_parameters(int p, int r, int s, ParamRange range) const;

  // General-tensor copy with cost() reproduced bit-for-bit.
  Instance expanded() const;

 private:
  int o_, d_, h_;
  CostModel cost_;
  int p_, r_, s_;
  ParamRange range_;
};

Instance build_instance(const RawSites& raw, const LegFactors& legs, int p,
                        int r, int s, const ScalingConfig& scaling,
                        ParamRange range = ParamRange::Strict);

Instance random_instance(std::uint64_t seed, int o, int d, int h, int p, int r,
                         int s, CostKind kind,
                         ParamRange range = ParamRange::Strict);

// JSON with top-level fields o, d, h, p, r, s, cost{kind, ...}.
std::string instance_to_json(const Instance& instance);
Instance instance_from_json(std::string_view text,
                            ParamRange range = ParamRange::Strict);

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

}  // namespace hublab

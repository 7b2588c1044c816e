#pragma once

#include <array>
#include <string>
#include <vector>

#include "istn/channel.hpp"
#include "istn/scenario.hpp"
#include "istn/tensor.hpp"

namespace istn {

/// GU j served by TBS m on terrestrial subchannel c (x_{m,j,c} = 1).
struct TerrLink {
  int tbs;
  int gu;
  int sc;
  double power_w;
  bool operator==(const TerrLink&) const = default;
};

/// LEO satellite n serving TBS m on satellite subchannel k (b_{n,m,k} = 1).
struct SatLink {
  int sat;
  int tbs;
  int sc;
  double power_w;
  bool operator==(const SatLink&) const = default;
};

/// Sparse form of the binary tensor X with its powers, plus the GU-to-TBS
/// association (one TBS per GU).
struct AssignmentX {
  std::vector<int> association;
  std::vector<TerrLink> links;
};

/// Sparse form of the binary tensor B with its powers.
struct AssignmentB {
  std::vector<SatLink> links;
};

/// Dimensions and constants the formulas need.
struct LinkParams {
  int n_tbs = 0;
  double b_c_hz = 0.0;
  double b_ka_hz = 0.0;
  double noise_c_w = 0.0;
  double noise_ka_w = 0.0;
  double u_back_bps = 0.0;
  double p_tbs_total_w = 0.0;
  double p_geo_w = 0.0;
  int n_connect = 1;

  static LinkParams from(const Scenario& sc);
};

/// SINR of link `idx`; interference is every other active link on the same
/// subchannel, received over that transmitter's gain to this GU.
double gu_sinr(const std::vector<TerrLink>& links, const Tensor3<double>& h_terr, double noise_w, std::size_t idx);

/// B log2(1 + sinr), capped at u_back for backhaul GUs.
double gu_rate(double sinr, bool is_backhaul, double u_back_bps, double bandwidth_hz);

/// Achieved rate of every link, in link order.
std::vector<double> gu_rates(const std::vector<TerrLink>& links, const Tensor3<double>& h_terr,
                             const Matrix<char>& cached, const LinkParams& lp);

double sum_rate(const std::vector<TerrLink>& links, const Tensor3<double>& h_terr, const Matrix<char>& cached,
                const LinkParams& lp);

/// SINR of satellite link `idx`. Absent gains (non-visible pairs) count as zero.
double sat_sinr(const std::vector<SatLink>& links, const Tensor3<double>& h_sat, double noise_w, std::size_t idx);

/// Per-TBS backhaul capacity C_m = sum over its links of B_Ka log2(1 + sinr).
std::vector<double> backhaul_capacity(const std::vector<SatLink>& links, const Tensor3<double>& h_sat,
                                      const LinkParams& lp);

/// Per-TBS backhaul traffic sum_j,c x (1 - g) U_back.
std::vector<double> backhaul_load(const std::vector<TerrLink>& links, const Matrix<char>& cached,
                                  const LinkParams& lp);

struct GeoInterference {
  std::vector<double> interference_w; // I_l
  std::vector<double> cinr_db;        // p_geo h_geo,l / (I_l + sigma^2)
};

GeoInterference geo_gs_interference(const std::vector<SatLink>& links, const Matrix<double>& h_geo_gs,
                                    const std::vector<double>& h_geo_signal, const LinkParams& lp);

enum class Constraint { C1 = 0, C2, C3, C4, C5, C6, C7, C8, C9 };
inline constexpr int kConstraintCount = 9;
const char* constraint_name(Constraint c);

struct Violation {
  Constraint constraint;
  std::vector<int> indices; // offending GU / TBS / (n,k) / GS indices
  double amount = 0.0;      // excess over the bound, where meaningful
};

struct ConstraintReport {
  std::array<bool, kConstraintCount> pass{};
  std::vector<Violation> violations;

  bool passes(Constraint c) const { return pass[static_cast<int>(c)]; }
  /// All constraints pass, optionally ignoring C9.
  bool feasible(bool include_c9 = true) const;
  /// Comma-separated failing constraint names, empty when feasible.
  std::string summary() const;
};

struct CheckInputs {
  const Scenario& scenario;
  const Matrix<char>& cached;
  const ChannelState& channels;
  const std::vector<double>& interference_threshold_w;
};

/// Evaluates C1-C9. Violations are reported, never thrown.
ConstraintReport check_constraints(const AssignmentX& x, const AssignmentB& b, const CheckInputs& in);

} // namespace istn

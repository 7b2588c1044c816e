#include "istn/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "istn/caching.hpp"
#include "istn/channel.hpp"
#include "istn/constellation.hpp"
#include "istn/problem.hpp"

namespace istn {

const char* const kMetricsHeader =
    "t,algo,sum_rate_bps,backhaul_capacity_bps,geo_gs_cinr_db_min,handover_count,dual_value,converged,violations";

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

} // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

RunResult run_simulation(const Scenario& sc, const RunOptions& opt) {
  sc.validate();
  const NodePositions nodes = place_nodes(sc);
  const ConstellationState cs = generate_constellation(sc);
  Pipeline pipe = pipeline_for(opt.algo);
  pipe.ideal_backhaul = opt.ideal_backhaul;

  RunResult out;
  out.enforces_c9 = pipe.enforce_c9;
  std::vector<double> lambda;
  for (int t = 0; t < sc.n_timeslots; ++t) {
    const ChannelState ch = sample_channels(sc, nodes, cs, t);
    const CacheState cache = place_and_request(sc, t);
    const SlotProblem prob(sc, ch, cache.cached);
    if (!sc.warm_start_lambda) lambda.clear();
    const SlotSolution sol = ciim_slot(prob, pipe, lambda);

    SlotMetrics m;
    m.t = t;
    m.algo = algorithm_name(opt.algo);
    m.sum_rate_bps = sol.sum_rate;
    m.backhaul_capacity_bps = backhaul_capacity(sol.b.links, ch.h_sat, prob.lp);
    for (double c : m.backhaul_capacity_bps) m.backhaul_total_bps += c;
    const GeoInterference geo = geo_gs_interference(sol.b.links, ch.h_geo_gs, ch.h_geo_signal, prob.lp);
    m.geo_gs_cinr_db = geo.cinr_db;
    m.interference_w = geo.interference_w;
    m.geo_gs_cinr_db_min = geo.cinr_db.empty() ? 0.0 : *std::min_element(geo.cinr_db.begin(), geo.cinr_db.end());
    m.handover_count = sol.log.count();
    m.unserved_gu_count = ch.n_gu() - static_cast<int>(sol.x.links.size());
    m.dual_value = sol.dual_value;
    m.converged = sol.converged;
    m.dual_iterations = static_cast<int>(sol.dual.history.size());
    m.violations = sol.report.summary();
    m.enforced_ok = sol.feasible;
    m.imish_init_rounds = sol.max_imish_init_rounds;
    m.imish_proposal_rounds = sol.max_imish_proposal_rounds;
    m.uara_iterations = sol.max_uara_iterations;
    if (pipe.enforce_c9 && !sol.feasible) out.constraint_violation = true;
    out.handovers.insert(out.handovers.end(), sol.log.events.begin(), sol.log.events.end());
    out.slots.push_back(std::move(m));
  }
  return out;
}

std::string metrics_csv(const std::vector<SlotMetrics>& slots) {
  std::ostringstream os;
  os << kMetricsHeader << '\n';
  for (const auto& m : slots) {
    os << m.t << ',' << m.algo << ',' << format_number(m.sum_rate_bps) << ',' << format_number(m.backhaul_total_bps)
       << ',' << format_number(m.geo_gs_cinr_db_min) << ',' << m.handover_count << ','
       << format_number(m.dual_value) << ',' << (m.converged ? 1 : 0) << ',' << m.violations << '\n';
  }
  return os.str();
}

std::string handovers_csv(const std::vector<HandoverEvent>& events) {
  std::ostringstream os;
  os << "t,tbs,from_sat,to_sat,utility_db\n";
  for (const auto& e : events) {
    os << e.t << ',' << e.tbs << ',' << e.from_sat << ',' << e.to_sat << ',' << format_number(e.utility_db) << '\n';
  }
  return os.str();
}

void write_run_outputs(const std::filesystem::path& dir, const RunResult& r) {
  std::filesystem::create_directories(dir);
  write_file(dir / "metrics.csv", metrics_csv(r.slots));
  write_file(dir / "handovers.csv", handovers_csv(r.handovers));
}

void dump_channels(const Scenario& sc, const std::filesystem::path& dir, int first, int count) {
  sc.validate();
  if (first < 0 || count < 1 || first + count > sc.n_timeslots) {
    throw std::invalid_argument("dump-channels: slot range outside [0, timeslots)");
  }
  std::filesystem::create_directories(dir);
  const NodePositions nodes = place_nodes(sc);
  const ConstellationState cs = generate_constellation(sc);
  for (int t = first; t < first + count; ++t) {
    const ChannelState ch = sample_channels(sc, nodes, cs, t);
    std::ostringstream terr, sat, geo;
    terr << "m,j,c,h\n";
    for (int m = 0; m < ch.n_tbs(); ++m) {
      for (int j = 0; j < ch.n_gu(); ++j) {
        for (int c = 0; c < ch.n_sc_terr(); ++c) terr << m << ',' << j << ',' << c << ',' << format_number(ch.h_terr(m, j, c)) << '\n';
      }
    }
    sat << "n,m,k,h\n";
    for (int n = 0; n < ch.n_sats(); ++n) {
      for (int m = 0; m < ch.n_tbs(); ++m) {
        if (!ch.is_visible(n, m)) continue;
        for (int k = 0; k < ch.n_sc_sat(); ++k) sat << n << ',' << m << ',' << k << ',' << format_number(ch.h_sat(n, m, k)) << '\n';
      }
    }
    geo << "n,l,h\n";
    for (int n = 0; n < ch.n_sats(); ++n) {
      for (int l = 0; l < ch.n_geo_gs(); ++l) geo << n << ',' << l << ',' << format_number(ch.h_geo_gs(n, l)) << '\n';
    }
    const std::string tag = std::to_string(t);
    write_file(dir / ("terrestrial_t" + tag + ".csv"), terr.str());
    write_file(dir / ("satellite_t" + tag + ".csv"), sat.str());
    write_file(dir / ("geo_gs_t" + tag + ".csv"), geo.str());
  }
}

} // namespace istn

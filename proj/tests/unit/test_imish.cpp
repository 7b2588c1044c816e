#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "fixtures.hpp"
#include "istn/imish.hpp"
#include "istn/instances.hpp"
#include "istn/units.hpp"

using namespace istn;
using istn::test::Toy;

TEST_CASE("SIC preference") {
  CHECK(sic_preference(2e-11, 2e-11, 1e-11) == doctest::Approx(1.0));
  CHECK(sic_preference(1e-18, 5e-11, 3e-11) == 1e-18);
  CHECK(sic_preference(4e-11, 2e-11, 1e-11) == doctest::Approx(2.0));

  // Three candidates against a unit with own gain 2e-11 and reference 1e-11.
  const double a = sic_preference(6e-11, 2e-11, 1e-11); // 3
  const double b = sic_preference(3e-11, 2e-11, 1e-11); // 1.5
  const double c = sic_preference(5e-12, 2e-11, 1e-11); // 5e-12
  CHECK(a > b);
  CHECK(b > c);
}

TEST_CASE("handover utility") {
  Toy toy(2, 1, 1, 2, 2);
  toy.see(0, 0, 3e-11);
  toy.see(0, 1, 2e-11);
  toy.see(1, 0, 1e-11);
  const std::vector<SatLink> links{{0, 0, 0, 10.0}, {0, 1, 1, 20.0}, {1, 0, 1, 30.0}};

  toy.ch.h_geo_gs(0, 0) = 0.0;
  CHECK(handover_utility(0, links, toy.ch) == doctest::Approx(10.0 * 3e-11 + 20.0 * 2e-11).epsilon(1e-12));

  toy.ch.h_sat(1, 0, 1) = 4e-13;
  toy.ch.h_geo_gs(1, 0) = 4e-13;
  CHECK(handover_utility(1, links, toy.ch) == doctest::Approx(0.0).scale(1e-20));

  toy.ch.h_geo_gs(0, 0) = 5e-13;
  const double want = 10.0 * (3e-11 - 5e-13) + 20.0 * (2e-11 - 5e-13);
  CHECK(handover_utility(0, links, toy.ch) == doctest::Approx(want).epsilon(1e-12));
  CHECK(handover_utility_db(0, links, toy.ch, HandoverMode::RatioDb) ==
        doctest::Approx(10.0 * std::log10((10.0 * 3e-11 + 20.0 * 2e-11) / (30.0 * 5e-13))).epsilon(1e-12));
  CHECK(handover_utility_db(0, links, toy.ch, HandoverMode::Difference) == doctest::Approx(watt_to_dbm(want)));
}

TEST_CASE("single unit is matched") {
  Toy toy(1, 1, 1, 1, 1);
  toy.see(0, 0, 2e-11);
  toy.sc.interference_threshold_w = 1.0;
  const SlotProblem p(toy.sc, toy.ch, toy.cached);
  const auto r = imish_round(p, {0.0}, {});
  REQUIRE(r.matching.links.size() == 1);
  CHECK(r.matching.links[0].sat == 0);
  CHECK(r.matching.links[0].tbs == 0);
  CHECK(r.matching.links[0].sc == 0);
  CHECK(r.log.count() == 0);
}

TEST_CASE("the stronger satellite is handed over when it breaks the GEO-GS cap") {
  Toy toy(1, 1, 1, 2, 1);
  toy.sc.n_connect = 1;
  toy.see(0, 0, 5e-11);
  toy.see(1, 0, 1e-10);
  toy.ch.h_geo_gs(0, 0) = 1e-14;
  toy.ch.h_geo_gs(1, 0) = 1e-12;
  toy.sc.interference_threshold_w = 1e-11;
  // Sat 0 alone: signal/injected = 5e-11 / 1e-14, i.e. 37 dB.
  const double u0 = 10.0 * std::log10(5e-11 / 1e-14);

  SUBCASE("utility clears H") {
    toy.sc.handover_threshold_db = 3.0;
    const SlotProblem p(toy.sc, toy.ch, toy.cached);
    const auto r = imish_round(p, {0.0}, {});
    REQUIRE(r.matching.links.size() == 1);
    CHECK(r.matching.links[0].sat == 0);
    REQUIRE(r.log.count() == 1);
    CHECK(r.log.events[0].from_sat == 1);
    CHECK(r.log.events[0].to_sat == 0);
    CHECK(r.log.events[0].utility_db == doctest::Approx(u0));
  }
  SUBCASE("utility below H") {
    toy.sc.handover_threshold_db = 40.0;
    const SlotProblem p(toy.sc, toy.ch, toy.cached);
    const auto r = imish_round(p, {0.0}, {});
    CHECK(r.log.count() == 0);
    for (const auto& s : r.matching.links) CHECK(s.sat != 1);
  }
  SUBCASE("without handover the stronger satellite stays") {
    const SlotProblem p(toy.sc, toy.ch, toy.cached);
    ImishOptions opt;
    opt.handover = false;
    const auto r = imish_round(p, {0.0}, opt);
    REQUIRE(r.matching.links.size() == 1);
    CHECK(r.matching.links[0].sat == 1);
  }
}

namespace {

// Every C5/C6/C4-feasible matching with at most one link per TBS.
std::vector<SatMatching> all_single_link_matchings(const ChannelState& ch) {
  const int M = ch.n_tbs();
  const int N = ch.n_sats();
  const int K = ch.n_sc_sat();
  std::vector<SatMatching> out;
  std::vector<int> pick(M, -1); // n*K + k, or -1
  std::function<void(int)> rec = [&](int m) {
    if (m == M) {
      SatMatching s;
      for (int i = 0; i < M; ++i) {
        if (pick[i] >= 0) s.links.push_back({pick[i] / K, i, pick[i] % K, 0.0});
      }
      out.push_back(s);
      return;
    }
    pick[m] = -1;
    rec(m + 1);
    for (int u = 0; u < N * K; ++u) {
      if (!ch.is_visible(u / K, m)) continue;
      if (std::find(pick.begin(), pick.begin() + m, u) != pick.begin() + m) continue;
      pick[m] = u;
      rec(m + 1);
    }
    pick[m] = -1;
  };
  rec(0);
  return out;
}

} // namespace

TEST_CASE("IMISH reaches the best stable matching on tiny instances") {
  InstanceShape shape;
  shape.tbs = 2;
  shape.sats = 3;
  shape.sc_sat = 2;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    Instance inst = random_instance(shape, seed);
    inst.scenario.n_connect = 1;
    inst.scenario.interference_threshold_w = 1.0;
    const SlotProblem p(inst.scenario, inst.channels, inst.cached);
    const std::vector<double> lambda{0.5, 1.0};
    const auto w = sat_weights(lambda, 1e-6);
    const auto r = imish_round(p, lambda, {});
    SatRules rules;
    CHECK(sat_blocking_pairs(p, w, rules, r.matching).empty());

    double best_stable = 0.0;
    for (auto m : all_single_link_matchings(inst.channels)) {
      for (auto& s : m.links) s.power_w = inst.scenario.powers.p_leo_per_sc_w;
      if (!sat_blocking_pairs(p, w, rules, m).empty()) continue;
      best_stable = std::max(best_stable, sat_utility(m.links, p, w));
    }
    CHECK_MESSAGE(sat_utility(r.matching.links, p, w) == doctest::Approx(best_stable).epsilon(1e-9),
                  "seed " << seed);
  }
}

TEST_CASE("IMISH output is feasible, stable and within the round bound") {
  InstanceShape shape;
  shape.tbs = 3;
  shape.sats = 4;
  shape.sc_sat = 2;
  shape.visible_prob = 0.8;
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const Instance inst = random_instance(shape, seed);
    const SlotProblem p(inst.scenario, inst.channels, inst.cached);
    const std::vector<double> lambda{0.3, 0.0, 1.2};
    const auto r = imish_round(p, lambda, {});
    AssignmentX none;
    none.association = p.association;
    const auto rep = check_constraints(none, r.matching, p.check_inputs());
    CHECK_MESSAGE(rep.feasible(), "seed " << seed << " " << rep.summary());
    CHECK(r.counters.proposal_rounds <= shape.tbs);
    CHECK(sat_blocking_pairs(p, sat_weights(lambda, 1e-6), SatRules{}, r.matching).empty());
    for (const auto& ev : r.log.events) CHECK(ev.utility_db >= inst.scenario.handover_threshold_db);
    CHECK(imish_round(p, lambda, {}).matching.links == r.matching.links);
  }
}

TEST_CASE("satellite link order") {
  std::vector<SatLink> v{{2, 1, 0, 1.0}, {0, 1, 1, 1.0}, {3, 0, 1, 1.0}, {0, 1, 0, 1.0}};
  sort_links(v);
  CHECK(v[0].tbs == 0);
  CHECK(v[1].sat == 0);
  CHECK(v[1].sc == 0);
  CHECK(v[2].sat == 0);
  CHECK(v[2].sc == 1);
  CHECK(v[3].sat == 2);
}

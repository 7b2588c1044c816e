#pragma once

#include <cmath>

#include "istn/channel.hpp"
#include "istn/instances.hpp"
#include "istn/scenario.hpp"

namespace istn::test {

/// Hand-editable slot: flat terrestrial gains, no satellite visible, faint
/// GEO-GS leakage. Call index_visibility after editing `visible`.
struct Toy {
  Scenario sc;
  ChannelState ch;
  Matrix<char> cached;

  Toy(int M, int J, int C, int N, int K, int L = 1) {
    sc.n_tbs = M;
    sc.n_gu = J;
    sc.n_sc_terrestrial = C;
    sc.n_sc_leo = K;
    sc.n_geo_gs = L;
    sc.n_timeslots = 1;
    ch.h_terr = Tensor3<double>(M, J, C, 1e-10);
    ch.mean_terr = Matrix<double>(M, J, 1e-10);
    ch.h_sat = Tensor3<double>(N, M, K, std::nan(""));
    ch.visible = Matrix<char>(N, M, 0);
    ch.slant_range_m = Matrix<double>(N, M, std::nan(""));
    ch.h_geo_gs = Matrix<double>(N, L, 1e-18);
    ch.h_geo_signal.assign(L, 1e-13);
    cached = Matrix<char>(M, J, 1);
    index_visibility(ch);
  }

  void see(int n, int m, double h, double range = 600e3) {
    ch.visible(n, m) = 1;
    ch.slant_range_m(n, m) = range;
    for (int k = 0; k < ch.n_sc_sat(); ++k) ch.h_sat(n, m, k) = h;
    index_visibility(ch);
  }
};

} // namespace istn::test

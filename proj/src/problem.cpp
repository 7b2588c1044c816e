#include "istn/problem.hpp"

#include "istn/uara.hpp"

namespace istn {

SlotProblem::SlotProblem(const Scenario& s, const ChannelState& c, const Matrix<char>& g)
    : sc(s), ch(c), cached(g), i_th(interference_thresholds(s, c)), association(associate_gus(c)),
      lp(LinkParams::from(s)) {}

} // namespace istn

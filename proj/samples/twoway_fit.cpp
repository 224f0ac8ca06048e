// Solves the additive two-way ML equations from sums of squares given on the
// command line: r q n SSA SSB SSAB SSE.

#include <iostream>

#include "vcalg/vcalg.hpp"

int main(int argc, char** argv) {
  if (argc != 8) {
    std::cerr << "usage: twoway_fit r q n SSA SSB SSAB SSE\n";
    return 2;
  }
  vcalg::TwoWayStats s;
  s.r = std::stoi(argv[1]);
  s.q = std::stoi(argv[2]);
  s.n = std::stoi(argv[3]);
  s.SSA = vcalg::parse_rational(argv[4]);
  s.SSB = vcalg::parse_rational(argv[5]);
  s.SSAB = vcalg::parse_rational(argv[6]);
  s.SSE = vcalg::parse_rational(argv[7]);

  vcalg::TwoWayFitReport rep = vcalg::fit_twoway(s, vcalg::TwoWayModel::additive, vcalg::pow10(-12));
  std::cout << "eliminant: " << rep.elimination.quartic << " = 0\n";
  for (const auto& sol : rep.solutions) {
    std::cout << (sol.feasible ? "  feasible   " : "  infeasible ") << "omega " << sol.omega.approx() << ", tau1 "
              << sol.tau1.approx() << ", tau2 " << sol.tau2.approx() << "\n";
  }
  if (!rep.global) std::cout << "maximum lies on the boundary\n";
}

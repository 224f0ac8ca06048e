// Fits the unbalanced dyestuff layout and prints the stationarity polynomial
// and the certified estimates.

#include <iostream>

#include "vcalg/io.hpp"
#include "vcalg/vcalg.hpp"

int main(int argc, char** argv) {
  const std::string path = argc > 1 ? argv[1] : "fixtures/dyestuff_unbalanced.csv";
  vcalg::io::LongFormat data = vcalg::io::parse_long_csv(vcalg::io::read_file(path));
  vcalg::OneWayStats stats = vcalg::summarize(vcalg::GroupedData{data.values});

  for (vcalg::Method m : {vcalg::Method::ML, vcalg::Method::REML}) {
    vcalg::FitReport rep = m == vcalg::Method::ML ? vcalg::ml_fit(stats, vcalg::pow10(-15))
                                                  : vcalg::reml_fit(stats, vcalg::pow10(-15));
    std::cout << vcalg::to_string(m) << " equation: " << rep.equation.numerator << " = 0\n";
    std::cout << "  degree " << rep.equation.observed_degree << ", " << rep.stationary_points.size()
              << " nonnegative root(s)\n";
    const vcalg::Estimates& e = rep.global;
    std::cout << "  theta in [" << e.theta.lo << ", " << e.theta.hi << "]\n";
    std::cout << "  mu ~ " << e.mu().approx() << ", omega ~ " << e.omega.approx() << ", tau ~ " << e.tau.approx()
              << "\n";
  }
}

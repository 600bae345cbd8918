// Small tour of the library: exact sum-level measures, the grid operator at
// large n, and one asymptotic fit.

#include <cmath>
#include <iostream>

#include "farey/asymptotics.hpp"
#include "farey/preimage_engine.hpp"
#include "farey/report.hpp"
#include "farey/stern_brocot.hpp"
#include "farey/transfer_operator.hpp"

int main() {
  using namespace farey;

  std::cout << "exact lambda(C_n), three constructions\n";
  for (int n = 1; n <= 8; ++n) {
    PreimageQuery q;
    q.depth = n - 1;
    q.mode = ArithmeticMode::exact;
    std::cout << "  n=" << n << "  sb=" << sumlevel_measure_sb(n) << "  cf=" << sumlevel_measure_cf(n)
              << "  preimage=" << *preimage_measure(q).lambda_exact << "\n";
  }

  std::cout << "\ngrid lambda(C_n) against 1/log2(n)\n";
  const auto grid = sumlevel_measures_grid(0.5, 1000);
  for (int n : {10, 100, 1000}) {
    std::cout << "  n=" << n << "  lambda=" << format_real(grid[static_cast<std::size_t>(n - 1)])
              << "  1/log2(n)=" << format_real(1.0 / std::log2(static_cast<double>(n))) << "\n";
  }

  const FitReport r = partial_sum_law_fit(ExactRational(1, 2), {100, 1000});
  std::cout << "\n" << to_json(r).dump(2) << "\n";
}

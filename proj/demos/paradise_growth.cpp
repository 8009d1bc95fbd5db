// Ground state of a one-dimensional paradise and the population growth it drives.

#include <iostream>

#include "nlgs/eigensolver.hpp"
#include "nlgs/evolution.hpp"

int main() {
  using namespace nlgs;
  const SpatialGrid grid(1, 20.0, 512);
  const auto kernel = DispersalKernel::gaussian(1.0, 1);
  const auto potential = Potential::build(PotentialShape::paradise_ball(0.5), grid);

  const auto outcome = find_ground_state(kernel, potential);
  if (!found(outcome)) {
    std::cout << "no ground state\n";
    return 0;
  }
  const auto& gs = result(outcome);
  std::cout << "lambda0            " << format_double(gs.lambda0) << '\n'
            << "relative residual  " << format_double(gs.relative_residual_l2) << '\n';

  EvolutionRun run{.u0 = Field::from_function(grid, [](const Point& x) { return std::exp(-x[0] * x[0]); }),
                   .t_end = 40.0,
                   .dt = 0.05,
                   .snapshot_times = {},
                   .reference = gs.psi,
                   .local_radius = 1.0};
  const auto series = evolve(run, kernel, potential.mortality());
  std::cout << "fitted growth rate " << format_double(growth_rate(series)) << '\n'
            << "shape distance     " << format_double(series.points.back().shape_distance) << '\n';
}

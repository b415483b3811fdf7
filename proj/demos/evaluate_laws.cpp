// Prints the closed-form densities next to a small Monte-Carlo ensemble for one rate.
//
//   evaluate_laws [r]

#include <cstdio>
#include <cstdlib>

#include "arcsine_reset/analysis.hpp"
#include "arcsine_reset/laws.hpp"
#include "arcsine_reset/sampling.hpp"

using namespace arcsine_reset;

int main(int argc, char** argv) {
  const double r = argc > 1 ? std::atof(argv[1]) : 2.0;
  const ResetModel model(r);

  std::printf("r = %g\n\n   t     pdf_T     pdf_L\n", r);
  for (double t : {0.05, 0.25, 0.5, 0.75, 0.95}) {
    std::printf("%5.2f  %8.5f  %8.5f\n", t, laws::pdf_T(t, model), laws::pdf_L(t, model));
  }
  std::printf("\nE[(T-1/2)^2] = %.6f   E[L] = %.6f   Var[L] = %.6f\n", laws::central_moment_T(2, model),
              laws::mean_L(model), laws::var_L(model));

  const auto ens = run_ensemble(model, PathGrid(1e-3), 4000, 1);
  const auto t = column(ens, Functional::occupation);
  const auto l = column(ens, Functional::last_zero);
  std::printf("\n4000 paths at dt = 1e-3:\n");
  std::printf("  m_2(T) = %.6f\n", analysis::empirical_central_moment(t, 2));
  std::printf("  KS(T)  = %.4f\n", analysis::ks_statistic(t, laws::tabulated_cdf_T(model)));
  std::printf("  KS(L)  = %.4f\n", analysis::ks_statistic(l, laws::tabulated_cdf_L(model)));
  return 0;
}

// Walks through the barbell: its set functionals on one clique, the
// gradient sandwich, and how the exact mixing time compares with the bounds.

#include <cstdio>

#include "mixiso/mixiso.hpp"

int main() {
  using namespace mixiso;
  const auto chain = barbell(6);
  const auto clique = StateSet::range(12, 0, 6);

  const auto rec = spread_record(chain, clique, false);
  std::printf("barbell(6), A = first clique, pi(A) = %.6g\n", chain.measure(clique));
  std::printf("  conductance %.6g  psi+ %.6g  psi_big %.6g  psi_evo %.6g\n", rec.conductance, rec.psi_plus,
              rec.psi_big, rec.psi_evo);

  const auto s = sandwich(chain, clique, Sign::plus);
  std::printf("  h2 sandwich: %.6g <= psi+ = %.6g <= %.6g\n", s.best_lower(), s.psi, s.upper);

  const auto report = mixing_report(chain, 0.25);
  std::printf("  tau(1/4) = %zu, 1/psi+(1/2) = %.6g\n", report.tau_exact,
              1.0 / profile(chain, Quantity::psi_plus).at(0.5));
  for (const auto& [name, value] : report.bounds) std::printf("  bound %-28s %.6g\n", name.c_str(), value);
  for (const auto& [name, value] : report.lower_bounds) std::printf("  lower %-28s %.6g\n", name.c_str(), value);
}

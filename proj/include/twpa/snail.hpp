#pragma once

// SNAIL (one small junction alpha*E_J in a loop with n large junctions E_J)
// potential, its Taylor expansion around the flux-dependent minimum, and the
// renormalization of the coefficients for an array of M SNAILs in series
// with a linear inductance.

#include <cstddef>
#include <vector>

namespace twpa::snail {

struct SnailParams {
  double alpha = 0.29;    // small/large junction ratio
  double phi_ext = 0.0;   // reduced external flux 2 pi Phi / Phi0 (rad)
  int n_large = 2;
  double e_j = 1.0;

  // Throws InvalidArgument unless 0 < alpha < min(0.5, 1/n_large),
  // n_large >= 1 and e_j > 0.
  void validate() const;
};

// U(phi_s) = -alpha E_J cos(phi_s) - n E_J cos((phi_ext - phi_s) / n)
double snail_potential(double phi_s, const SnailParams& params);

// Closed-form k-th derivative of the potential with respect to phi_s.
double potential_derivative(double phi_s, const SnailParams& params, int order);

// Location of the potential minimum in the well continuously connected to
// phi_s = 0 at zero flux. Throws NumericFailure if the refinement stalls.
double find_minimum(const SnailParams& params);

struct CoefficientSet {
  std::vector<double> c;  // c[0] = c_1, ..., c[order-1] = c_order
  double phi_min = 0.0;

  int order() const { return static_cast<int>(c.size()); }
  // c_n for 1 <= n <= order().
  double coefficient(int n) const;
};

// c_n = U^(n)(phi_min) / (n! E_J) for n = 1..order, 2 <= order <= 6.
CoefficientSet taylor_coefficients(const SnailParams& params, int order = 4);

struct ArrayCoefficientSet {
  double c2 = 0.0;  // renormalized c~_2
  double c3 = 0.0;
  double c4 = 0.0;
  double p = 1.0;   // participation ratio
  int m_snails = 1;
  double inductance_ratio = 0.0;  // L_J / L
};

// p = M r / (2 c2 + M r) with r = L_J / L (r = +inf gives p = 1);
// c~2 = p c2 / M, c~3 = p^3 c3 / M^2,
// c~4 = p^4 / M^3 * (c4 - 9 c3^2 (1 - p) / (4 c2)).
ArrayCoefficientSet array_coefficients(const CoefficientSet& single, int m_snails,
                                       double inductance_ratio);

struct KerrFreeQuery {
  double alpha = 0.29;
  int n_large = 2;
  double e_j = 1.0;
  int m_snails = 1;
  double inductance_ratio = 1.0;
  double flux_min = 0.0;  // Phi / Phi0, inside (-0.5, 0.5)
  double flux_max = 0.49;
  int grid_points = 2001;
};

struct KerrFreePoint {
  double flux_over_phi0 = 0.0;
  CoefficientSet single;
  ArrayCoefficientSet array;
};

// Roots of c~4(Phi) in [flux_min, flux_max]: sign changes of a uniform
// sweep, each refined by bisection to double precision. Sorted by flux;
// empty when c~4 keeps its sign.
std::vector<KerrFreePoint> kerr_free_search(const KerrFreeQuery& query);

}  // namespace twpa::snail

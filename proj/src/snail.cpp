#include "twpa/snail.hpp"

#include "twpa/errors.hpp"
#include "twpa/units.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace twpa::snail {

namespace {

constexpr double kPi = std::numbers::pi;

// k-th derivative of cos evaluated at x.
double cos_derivative(double x, int k) {
  switch (k % 4) {
    case 0: return std::cos(x);
    case 1: return -std::sin(x);
    case 2: return -std::cos(x);
    default: return std::sin(x);
  }
}

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) {
    f *= k;
  }
  return f;
}

}  // namespace

void SnailParams::validate() const {
  if (n_large < 1) {
    throw InvalidArgument("SNAIL needs at least one large junction");
  }
  const double alpha_max = std::min(0.5, 1.0 / n_large);
  if (!(alpha > 0.0) || !(alpha < alpha_max)) {
    std::ostringstream msg;
    msg << "SNAIL asymmetry alpha=" << alpha << " must lie in (0, " << alpha_max
        << ") for a single potential minimum";
    throw InvalidArgument(msg.str());
  }
  if (!(e_j > 0.0) || !std::isfinite(phi_ext)) {
    throw InvalidArgument("SNAIL needs e_j > 0 and finite flux");
  }
}

double snail_potential(double phi_s, const SnailParams& p) {
  const double n = p.n_large;
  return -p.alpha * p.e_j * std::cos(phi_s) - n * p.e_j * std::cos((p.phi_ext - phi_s) / n);
}

double potential_derivative(double phi_s, const SnailParams& p, int order) {
  if (order < 0) {
    throw InvalidArgument("derivative order must be non-negative");
  }
  const double n = p.n_large;
  const double u = (p.phi_ext - phi_s) / n;
  // d^k/dphi^k cos((phi_ext - phi)/n) = (-1/n)^k cos^(k)(u)
  const double chain = std::pow(-1.0 / n, order);
  return p.e_j * (-p.alpha * cos_derivative(phi_s, order) - n * chain * cos_derivative(u, order));
}

double find_minimum(const SnailParams& p) {
  p.validate();
  // U(phi + 2 pi; phi_ext + 2 pi) = U(phi; phi_ext): work on the principal
  // flux branch and shift back.
  const double turns = std::round(p.phi_ext / units::kTwoPi);
  SnailParams reduced = p;
  reduced.phi_ext = p.phi_ext - turns * units::kTwoPi;

  auto u = [&](double x) { return snail_potential(x, reduced); };
  auto du = [&](double x) { return potential_derivative(x, reduced, 1); };
  auto d2u = [&](double x) { return potential_derivative(x, reduced, 2); };

  // Golden-section search over the principal cell.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = -kPi;
  double b = kPi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = u(x1);
  double f2 = u(x2);
  for (int it = 0; it < 200 && (b - a) > 1e-6; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = u(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = u(x2);
    }
  }

  // Newton on U' safeguarded by a sign-change bracket.
  double lo = a - 0.25;
  double hi = b + 0.25;
  if (du(lo) > 0.0 || du(hi) < 0.0) {
    std::ostringstream msg;
    msg << "find_minimum: no bracketing sign change of U' near phi=" << 0.5 * (a + b)
        << " (alpha=" << p.alpha << ", phi_ext=" << p.phi_ext << ")";
    throw NumericFailure(msg.str());
  }
  const double tolerance = 1e-12 * p.e_j;
  double x = 0.5 * (a + b);
  for (int it = 0; it < 100; ++it) {
    const double g = du(x);
    if (std::abs(g) <= tolerance && d2u(x) > 0.0) {
      // One more Newton step polishes to machine precision.
      const double polished = x - g / d2u(x);
      if (polished > lo && polished < hi && std::abs(du(polished)) <= std::abs(g)) {
        x = polished;
      }
      return x + turns * units::kTwoPi;
    }
    if (g < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    const double curvature = d2u(x);
    double next = curvature > 0.0 ? x - g / curvature : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) {
      next = 0.5 * (lo + hi);
    }
    x = next;
  }
  std::ostringstream msg;
  msg << "find_minimum: no convergence after 100 iterations (alpha=" << p.alpha
      << ", phi_ext=" << p.phi_ext << ", last phi=" << x << ", U'=" << du(x) << ")";
  throw NumericFailure(msg.str());
}

double CoefficientSet::coefficient(int n) const {
  if (n < 1 || n > order()) {
    throw InvalidArgument("coefficient index outside the computed expansion order");
  }
  return c[static_cast<std::size_t>(n - 1)];
}

CoefficientSet taylor_coefficients(const SnailParams& params, int order) {
  if (order < 2 || order > 6) {
    throw InvalidArgument("taylor_coefficients: order must be in 2..6");
  }
  CoefficientSet set;
  set.phi_min = find_minimum(params);
  set.c.reserve(static_cast<std::size_t>(order));
  for (int k = 1; k <= order; ++k) {
    set.c.push_back(potential_derivative(set.phi_min, params, k) / (factorial(k) * params.e_j));
  }
  return set;
}

ArrayCoefficientSet array_coefficients(const CoefficientSet& single, int m_snails,
                                       double inductance_ratio) {
  if (single.order() < 4) {
    throw InvalidArgument("array_coefficients needs c2..c4");
  }
  if (m_snails < 1 || !(inductance_ratio > 0.0)) {
    throw InvalidArgument("array_coefficients needs m_snails >= 1 and L_J/L > 0");
  }
  const double c2 = single.coefficient(2);
  const double c3 = single.coefficient(3);
  const double c4 = single.coefficient(4);
  if (!(c2 > 0.0)) {
    throw InvalidArgument("array_coefficients needs c2 > 0");
  }
  const double m = m_snails;
  const double p = std::isinf(inductance_ratio)
                       ? 1.0
                       : m * inductance_ratio / (2.0 * c2 + m * inductance_ratio);
  ArrayCoefficientSet out;
  out.p = p;
  out.m_snails = m_snails;
  out.inductance_ratio = inductance_ratio;
  out.c2 = p / m * c2;
  out.c3 = std::pow(p, 3) / (m * m) * c3;
  out.c4 = std::pow(p, 4) / (m * m * m) * (c4 - 9.0 * c3 * c3 / (4.0 * c2) * (1.0 - p));
  return out;
}

std::vector<KerrFreePoint> kerr_free_search(const KerrFreeQuery& q) {
  if (!(q.flux_min > -0.5) || !(q.flux_max < 0.5) || !(q.flux_min < q.flux_max)) {
    throw InvalidArgument("kerr_free_search: flux range must satisfy -0.5 < min < max < 0.5");
  }
  if (q.grid_points < 2) {
    throw InvalidArgument("kerr_free_search: grid needs at least two points");
  }
  auto evaluate = [&](double flux) {
    SnailParams p{q.alpha, units::reduced_flux(flux), q.n_large, q.e_j};
    KerrFreePoint point;
    point.flux_over_phi0 = flux;
    point.single = taylor_coefficients(p, 4);
    point.array = array_coefficients(point.single, q.m_snails, q.inductance_ratio);
    return point;
  };

  const int n = q.grid_points;
  std::vector<double> grid(static_cast<std::size_t>(n));
  std::vector<double> c4(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double flux = q.flux_min + (q.flux_max - q.flux_min) * i / (n - 1);
    grid[static_cast<std::size_t>(i)] = flux;
    c4[static_cast<std::size_t>(i)] = evaluate(flux).array.c4;
  }

  std::vector<KerrFreePoint> roots;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    double a = grid[i];
    double b = grid[i + 1];
    double fa = c4[i];
    const double fb = c4[i + 1];
    if (fa == 0.0) {
      roots.push_back(evaluate(a));
      continue;
    }
    if (std::signbit(fa) == std::signbit(fb) || fb == 0.0) {
      continue;
    }
    // Bisect until the bracket collapses to adjacent doubles.
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (a + b);
      if (mid <= a || mid >= b) {
        break;
      }
      const double fm = evaluate(mid).array.c4;
      if (fm == 0.0) {
        a = b = mid;
        break;
      }
      if (std::signbit(fm) == std::signbit(fa)) {
        a = mid;
        fa = fm;
      } else {
        b = mid;
      }
    }
    const auto at_a = evaluate(a);
    const auto at_b = evaluate(b);
    roots.push_back(std::abs(at_a.array.c4) <= std::abs(at_b.array.c4) ? at_a : at_b);
  }
  if (c4.back() == 0.0) {
    roots.push_back(evaluate(grid.back()));
  }
  return roots;
}

}  // namespace twpa::snail

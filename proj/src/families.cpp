#include "ctori/families.hpp"

#include <cmath>

namespace ctori {

UnitaryMatrix standard_form(const UnitaryMatrix& u, const SolverConfig& cfg) {
  const int n = u.dim();
  const IntersectionSet set = find_intersections(u, cfg);

  RVec alpha;
  if (set.classification == IntersectionClass::Continuum) {
    if (set.continuum_witnesses.empty()) {
      throw std::domain_error("standard_form: no intersection available");
    }
    alpha = set.continuum_witnesses.front();
  } else {
    if (!set.converged || set.points.empty()) {
      throw std::domain_error("standard_form: solver did not certify an intersection");
    }
    alpha = set.points.front().alpha;
  }

  CVec v(n);
  v(0) = 1.0;
  for (int r = 1; r < n; ++r) v(r) = std::exp(cxd(0.0, alpha(r - 1)));
  const CVec w = u.mat() * v;

  // Right phases carry the flat vector onto the located preimage, left phases
  // rotate its image back to the flat vector.
  CMat m = u.mat();
  for (int k = 0; k < n; ++k) m.col(k) *= v(k);
  for (int j = 0; j < n; ++j) {
    const double mod = std::abs(w(j));
    if (mod < 1e-10) throw std::domain_error("standard_form: intersection image has vanishing component");
    m.row(j) *= std::conj(w(j)) / mod;
  }
  return UnitaryMatrix::trusted(std::move(m));
}

UnitaryMatrix interpolating_family(int n, double sigma) {
  if (!is_odd_prime(n)) {
    throw std::invalid_argument("interpolating_family: N must be an odd prime");
  }
  const UnitaryMatrix f = fourier_matrix(n);
  CVec d(n);
  for (int s = 0; s < n; ++s) {
    const int e = (s * s) % n;
    d(s) = std::exp(cxd(0.0, sigma * e));
  }
  CMat m = f.mat() * d.asDiagonal() * f.mat().adjoint();
  return UnitaryMatrix::trusted(std::move(m));
}

std::vector<CVec> family_intersections_analytic(double sigma, double dedup_tol) {
  if (sigma <= 0.0 || sigma > kPi) {
    throw std::domain_error(
        "family_intersections_analytic: sigma must lie in (0, pi]; the tori coincide at 0");
  }
  const cxd es = std::exp(cxd(0.0, sigma));
  const cxd eia = (1.0 + 2.0 * es) / (2.0 + es);
  const cxd w = std::exp(cxd(0.0, kTwoPi / 3.0));
  const cxd w2 = std::conj(w);

  std::vector<CVec> columns;
  const auto add = [&](cxd z1, cxd z2) {
    CVec c(3);
    c << cxd(1.0, 0.0), z1, z2;
    columns.push_back(c);
  };
  add(1.0, 1.0);
  add(w, w2);
  add(w2, w);
  add(-eia, -eia);
  add(-eia, 1.0);
  add(1.0, -std::conj(eia));

  // Deduplicate coincident columns with the solver's toroidal tolerance.
  std::vector<CVec> distinct;
  for (const auto& c : columns) {
    const RVec pc = column_phases(c);
    bool dup = false;
    for (const auto& d : distinct) {
      if (toroidal_distance(pc, column_phases(d)) < dedup_tol) {
        dup = true;
        break;
      }
    }
    if (!dup) distinct.push_back(c);
  }
  return distinct;
}

RVec column_phases(const CVec& column) {
  RVec a(column.size() - 1);
  for (int r = 1; r < column.size(); ++r) a(r - 1) = wrap_angle(std::arg(column(r)));
  return a;
}

}  // namespace ctori

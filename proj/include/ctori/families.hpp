#pragma once

#include <vector>

#include "ctori/intersect.hpp"
#include "ctori/matcore.hpp"

namespace ctori {

/// Equivalent representative of U that fixes the flat vector: one intersection
/// is located numerically and the matrix is enphased so that point becomes the
/// flat vector on both tori.
UnitaryMatrix standard_form(const UnitaryMatrix& u, const SolverConfig& cfg = {});

/// One-parameter family U(sigma) = F diag(e^{i sigma (s^2 mod N)}) F^dagger,
/// with entries (1/N) sum_s e^{i sigma s^2} omega^{(u-v)s}, exponent s^2
/// reduced mod N. Identity at sigma = 0; covers the van der Waerden matrix at
/// sigma = 2 pi / 3 (N = 3); real at sigma = pi (N = 3). N odd prime.
UnitaryMatrix interpolating_family(int n, double sigma);

/// Closed-form intersection points of the N = 3 family: the six columns
/// (1,1,1), (1,w,w^2), (1,w^2,w), (1,-e^{ia},-e^{ia}), (1,-e^{ia},1),
/// (1,1,-e^{-ia}) with e^{ia} = (1+2e^{i sigma})/(2+e^{i sigma}),
/// deduplicated at `dedup_tol`. Throws std::domain_error at sigma = 0
/// (coincident tori).
std::vector<CVec> family_intersections_analytic(double sigma, double dedup_tol = 1e-7);

/// Phase angles (alpha_1, alpha_2) of an analytic column.
RVec column_phases(const CVec& column);

}  // namespace ctori

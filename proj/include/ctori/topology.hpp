#pragma once

#include <vector>

#include "ctori/matcore.hpp"

namespace ctori {

/// Tangent data of the two tori at an intersection point, in one affine chart.
/// Coordinates are the n = N-1 components z_s = w_s / w_chart (s != chart)
/// of the image w = U (1, e^{i alpha}), in ascending s order.
struct TangentFrame {
  int chart = 0;
  CVec z;             // affine coordinates of the point, length n
  CMat fixed_vecs;    // n x n, column r = pushforward of the fixed-torus angle r
  CMat shifted_vecs;  // n x n, column r = d z / d alpha_r
};

/// Throws std::domain_error when the chart component of U (1, e^{i alpha}) is
/// smaller than 1e-10 in modulus (chart failure; retry with another chart).
TangentFrame tangent_frame(const UnitaryMatrix& u, const RVec& alpha, int chart = 0);

struct IndexResult {
  double det = 0.0;
  int index = 0;  // sign of det, 0 when |det| <= jacobian_tol
};

/// Orientation of the combined tangent frame [fixed | shifted] as a real
/// 2n x 2n determinant in (Re, Im) coordinates. The global sign is calibrated
/// so the N = 3 Fourier pair gives +1 on the quadratic-residue basis.
/// `alpha` must solve the unbiasedness system to `residual_tol`; the chart is
/// chosen automatically, with a permuted-chart retry near chart failure.
IndexResult intersection_index(const UnitaryMatrix& u, const RVec& alpha,
                               double residual_tol = 1e-9, double jacobian_tol = 1e-8);

/// Same, with the chart forced (for chart-invariance checks).
IndexResult intersection_index_in_chart(const UnitaryMatrix& u, const RVec& alpha,
                                        int chart, double jacobian_tol = 1e-8);

/// Nonzero squares mod p, ascending.
std::vector<int> quadratic_residues(int p);

/// sum_x omega^{x^2} by direct summation; sqrt(p) for p = 4k+1, i sqrt(p)
/// for p = 4k+3.
cxd gauss_sum(int p);

struct MubIndexRow {
  int z = 0;
  int a = 0;
  double det = 0.0;
  int index = 0;
};

/// Index table of the Fourier-pair intersection points sitting at the
/// circulant MUB vectors |z,a>, grouped by basis label z. p odd prime <= 17.
std::vector<MubIndexRow> fourier_mub_index_table(int p);

struct IndexReport {
  struct Entry {
    RVec alpha;
    double det = 0.0;
    int index = 0;
  };
  std::vector<Entry> per_point;
  long total = 0;
};

IndexReport index_report(const UnitaryMatrix& u, const std::vector<RVec>& alphas,
                         double residual_tol = 1e-9, double jacobian_tol = 1e-8);

}  // namespace ctori

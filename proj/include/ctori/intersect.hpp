#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ctori/birkhoff.hpp"
#include "ctori/matcore.hpp"
#include "ctori/topology.hpp"

namespace ctori {

struct SolverConfig {
  double residual_tol = 1e-12;
  double dedup_tol = 1e-7;   // toroidal max-metric
  double jacobian_tol = 1e-8;
  int starts_per_round = 0;  // 0: scaled by dimension
  int max_rounds = 16;
  int stable_rounds = 2;  // consecutive rounds with unchanged count
  std::uint64_t seed = 0x51ee7;
  int threads = 1;
};

enum class IntersectionClass { FiniteTransversal, FiniteDegenerate, Continuum };

struct IntersectionPoint {
  RVec alpha;       // solution on the torus, each component in [0, 2pi)
  CVec z;           // affine coordinates of the projective point
  double residual = 0.0;  // max |f_j| re-evaluated at alpha
  double jac_det = 0.0;   // orientation determinant of the tangent frames
  int index = 0;          // -1, 0, +1
};

struct RoundStats {
  int round = 0;
  int starts = 0;
  int total_points = 0;
};

struct IntersectionSet {
  IntersectionClass classification = IntersectionClass::FiniteTransversal;
  std::vector<IntersectionPoint> points;       // empty for Continuum
  std::vector<RVec> continuum_witnesses;       // sample of solutions on the curves
  bool converged = true;                       // false: round budget exhausted, no curve structure
  std::vector<RoundStats> rounds;              // stabilization evidence
  long index_sum = 0;
};

/// f_j = |(U (1, e^{i alpha_1}, ..., e^{i alpha_{N-1}}))_j|^2 - 1.
RVec residual(const UnitaryMatrix& u, const RVec& alpha);

/// Analytic derivative, N x (N-1): d f_j / d alpha_r = 2 Re(conj(z_j) i U_{jr} e^{i alpha_r}).
RMat residual_jacobian(const UnitaryMatrix& u, const RVec& alpha);

/// Componentwise circular distance, max metric.
double toroidal_distance(const RVec& a, const RVec& b);

/// Multistart damped Newton on the reduced system (f_0 dropped). Rounds of
/// starts run until the deduplicated count is stable; the result is classified
/// by the tangent-frame determinants. Solution sets that keep growing and
/// organize into curves are reported as Continuum.
IntersectionSet find_intersections(const UnitaryMatrix& u, const SolverConfig& cfg = {});

enum class CountKind { Finite, Continuum, NonConverged };

struct CountResult {
  CountKind kind = CountKind::Finite;
  int count = 0;
  std::vector<RoundStats> rounds;
};

CountResult count_intersections(const UnitaryMatrix& u, const SolverConfig& cfg = {});

struct ScanCell {
  double u = 0.0, v = 0.0;
  bool in_domain = false;
  bool member = false;
  double margin = 0.0;
  CountKind kind = CountKind::Finite;
  int count = 0;
  bool solver_ok = true;
};

/// Evaluates membership and intersection counts on a resolution x resolution
/// grid over the section's bounding box. Per-cell solver failures are recorded
/// in the cell; the scan continues.
std::vector<ScanCell> scan_section(const CrossSection& section, int resolution,
                                   const SolverConfig& cfg = {});

}  // namespace ctori

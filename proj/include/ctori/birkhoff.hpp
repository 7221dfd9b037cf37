#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "ctori/matcore.hpp"

namespace ctori {

/// The six 3x3 permutation matrices in the labelling under which
/// B = sum_i pi_i P_i has entries
///   [[pi0+pi1, pi2+pi3, pi4+pi5],
///    [pi2+pi4, pi0+pi5, pi1+pi3],
///    [pi3+pi5, pi1+pi4, pi0+pi2]].
/// Indices 0, 3, 4 are the even permutations, 1, 2, 5 the transpositions.
const std::array<Eigen::Matrix3d, 6>& permutation_matrices_3();

/// All-1/3 matrix (centre of the polytope).
BistochasticMatrix van_der_waerden_3();

struct PermutationWeights {
  Eigen::Matrix<double, 6, 1> pi;
};

/// Decomposes B into permutation weights. The linear system has a
/// one-dimensional kernel along (+1,-1,-1,+1,+1,-1) (even minus odd); the
/// returned point minimizes ||pi||^2 over the nonnegative feasible segment.
/// Throws std::domain_error if no nonnegative solution exists.
PermutationWeights permutation_decomposition(const BistochasticMatrix& b);

/// D = sqrt( Tr[(B1-B2)(B1-B2)^T] / 2 ).
double bistochastic_distance(const BistochasticMatrix& b1, const BistochasticMatrix& b2);

struct UnistochasticCertificate {
  bool member = false;
  Eigen::Vector3d links = Eigen::Vector3d::Zero();  // L_k = sqrt(B_0k B_1k)
  double margin = 0.0;  // smallest triangle-inequality slack; 0 on the orthostochastic boundary
};

/// Chain-links membership test, N = 3: the three column links must close a
/// (possibly degenerate) triangle.
UnistochasticCertificate is_unistochastic(const BistochasticMatrix& b);

/// Builds a unitary with |U|^2 = B (N = 3). First row sqrt(B_0k); second row
/// phases close the link triangle; third row is the conjugate cross product.
/// Output is dephased. Throws std::domain_error when B is not unistochastic.
UnitaryMatrix reconstruct_unitary(const BistochasticMatrix& b);

/// Uniform sample of the N = 3 polytope: the top-left 2x2 block is an affine
/// chart, sampled box-uniformly and rejected against the five completion
/// inequalities.
BistochasticMatrix sample_birkhoff(RngStream& rng);
BistochasticMatrix sample_birkhoff(std::uint64_t seed);

enum class SectionKind { Facet, Triangle, Hexagon, Parabolic };

/// A 2-D slice of the polytope with chart (u,v) -> B.
///
/// Triangle, hexagon and parabolic charts are affine with frames orthonormal
/// in the D metric, centred on the van der Waerden matrix, so chart distances
/// equal matrix distances. The facet chart is the bilinear (ruled) span of the
/// facet's four vertex permutations; its domain is the unit square and its
/// boundary consists of the facet's four short edges.
class CrossSection {
 public:
  static CrossSection facet(int row, int col);
  static CrossSection triangle();
  static CrossSection hexagon(const Eigen::Vector3d& p);
  /// edge_id indexes the nine even/odd permutation pairs (see source);
  /// 0 is the identity-(12) edge.
  static CrossSection parabolic(int edge_id = 0);

  SectionKind kind() const { return kind_; }

  /// Throws std::domain_error when (u,v) is outside the section.
  BistochasticMatrix point(double u, double v) const;

  bool in_domain(double u, double v) const;

  /// Chart coordinates of the section centre.
  Eigen::Vector2d centre() const { return centre_uv_; }

  /// Domain corners in chart coordinates (polygon, CCW). For the facet these
  /// are the four vertex permutations.
  const std::vector<Eigen::Vector2d>& domain_polygon() const { return polygon_; }

  /// Distance from the centre to the domain boundary along `angle`.
  double exit_radius(double angle) const;

 private:
  CrossSection() = default;
  RMat at(double u, double v) const;  // unclamped chart evaluation

  SectionKind kind_ = SectionKind::Triangle;
  // Affine charts: B = C + u E1 + v E2.
  RMat c_, e1_, e2_;
  // Facet chart: bilinear combination of four permutations.
  std::array<RMat, 4> facet_corners_{};
  Eigen::Vector2d centre_uv_ = Eigen::Vector2d::Zero();
  std::vector<Eigen::Vector2d> polygon_;
};

struct BoundaryTrace {
  struct Sample {
    double u = 0.0, v = 0.0;
    double margin = 0.0;
    /// True when a member -> nonmember transition was bisected inside the
    /// section; false when the ray left the domain while still member (the
    /// sample is then the domain exit point).
    bool interior = false;
  };
  std::vector<Sample> samples;
  /// False when no ray found an interior transition (section effectively
  /// entirely unistochastic).
  bool has_interior_boundary = false;
};

/// Traces the orthostochastic boundary inside a section with `resolution`
/// rays from the centre, bisecting the membership transition on each ray.
BoundaryTrace section_boundary_trace(const CrossSection& s, int resolution);

}  // namespace ctori

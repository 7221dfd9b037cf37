#include "ctori/birkhoff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ctori {

namespace {

std::array<Eigen::Matrix3d, 6> make_permutations() {
  std::array<Eigen::Matrix3d, 6> p;
  for (auto& m : p) m = Eigen::Matrix3d::Zero();
  // Positions of the 1-entries, matching the pi labelling.
  const int ones[6][3][2] = {
      {{0, 0}, {1, 1}, {2, 2}},  // identity
      {{0, 0}, {1, 2}, {2, 1}},  // (12)
      {{0, 1}, {1, 0}, {2, 2}},  // (01)
      {{0, 1}, {1, 2}, {2, 0}},  // 3-cycle
      {{0, 2}, {1, 0}, {2, 1}},  // 3-cycle
      {{0, 2}, {1, 1}, {2, 0}},  // (02)
  };
  for (int i = 0; i < 6; ++i)
    for (int k = 0; k < 3; ++k) p[i](ones[i][k][0], ones[i][k][1]) = 1.0;
  return p;
}

const Eigen::Matrix<double, 6, 1>& kernel_direction() {
  static const Eigen::Matrix<double, 6, 1> v = [] {
    Eigen::Matrix<double, 6, 1> w;
    w << 1, -1, -1, 1, 1, -1;
    return w;
  }();
  return v;
}

// D-metric inner product on matrix space.
double dot_d(const RMat& a, const RMat& b) { return 0.5 * (a.array() * b.array()).sum(); }

double norm_d(const RMat& a) { return std::sqrt(dot_d(a, a)); }

// Clips the half-plane c + u a + v b >= 0 family (one per matrix entry)
// starting from a large box, returning the CCW polygon of the feasible set.
std::vector<Eigen::Vector2d> clip_domain(const RMat& c, const RMat& e1, const RMat& e2) {
  std::vector<Eigen::Vector2d> poly = {
      {-8.0, -8.0}, {8.0, -8.0}, {8.0, 8.0}, {-8.0, 8.0}};
  for (int i = 0; i < c.rows(); ++i) {
    for (int j = 0; j < c.cols(); ++j) {
      const double a = e1(i, j), b = e2(i, j), k = c(i, j);
      if (std::abs(a) < 1e-15 && std::abs(b) < 1e-15) continue;
      std::vector<Eigen::Vector2d> next;
      const auto value = [&](const Eigen::Vector2d& q) { return k + a * q.x() + b * q.y(); };
      const std::size_t n = poly.size();
      for (std::size_t s = 0; s < n; ++s) {
        const Eigen::Vector2d& p0 = poly[s];
        const Eigen::Vector2d& p1 = poly[(s + 1) % n];
        const double v0 = value(p0), v1 = value(p1);
        if (v0 >= 0.0) next.push_back(p0);
        if ((v0 > 0.0 && v1 < 0.0) || (v0 < 0.0 && v1 > 0.0)) {
          const double t = v0 / (v0 - v1);
          next.push_back(p0 + t * (p1 - p0));
        }
      }
      poly = std::move(next);
      if (poly.empty()) return poly;
    }
  }
  // Merge near-duplicate vertices produced by nearly coincident constraints.
  std::vector<Eigen::Vector2d> merged;
  for (const auto& q : poly) {
    if (merged.empty() || (merged.back() - q).norm() > 1e-9) merged.push_back(q);
  }
  if (merged.size() > 1 && (merged.front() - merged.back()).norm() <= 1e-9) merged.pop_back();
  return merged;
}

}  // namespace

const std::array<Eigen::Matrix3d, 6>& permutation_matrices_3() {
  static const std::array<Eigen::Matrix3d, 6> p = make_permutations();
  return p;
}

BistochasticMatrix van_der_waerden_3() {
  return BistochasticMatrix::trusted(RMat::Constant(3, 3, 1.0 / 3.0));
}

PermutationWeights permutation_decomposition(const BistochasticMatrix& b) {
  if (b.dim() != 3) throw std::invalid_argument("permutation_decomposition: N must be 3");
  const auto& perms = permutation_matrices_3();

  Eigen::Matrix<double, 9, 6> a;
  for (int i = 0; i < 6; ++i) {
    a.col(i) = Eigen::Map<const Eigen::Matrix<double, 9, 1>>(perms[i].data());
  }
  const Eigen::Matrix<double, 9, 1> rhs =
      Eigen::Map<const Eigen::Matrix<double, 9, 1>>(b.mat().data());

  // Minimal-norm solution; the kernel component is then zero, so this is the
  // unconstrained minimizer of ||pi||^2 on the solution line.
  Eigen::CompleteOrthogonalDecomposition<Eigen::Matrix<double, 9, 6>> cod(a);
  Eigen::Matrix<double, 6, 1> pi = cod.solve(rhs);

  if ((a * pi - rhs).cwiseAbs().maxCoeff() > 1e-10) {
    throw std::domain_error("permutation_decomposition: inconsistent system");
  }

  // Clamp onto the nonnegative segment pi + t*v.
  const auto& v = kernel_direction();
  double t_lo = -std::numeric_limits<double>::infinity();
  double t_hi = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 6; ++i) {
    const double bound = -pi(i) / v(i);  // v(i) = +/-1
    if (v(i) > 0.0) {
      t_lo = std::max(t_lo, bound);
    } else {
      t_hi = std::min(t_hi, bound);
    }
  }
  if (t_lo > t_hi + 1e-12) {
    throw std::domain_error("permutation_decomposition: no nonnegative solution");
  }
  const double t = std::clamp(0.0, t_lo, t_hi);
  pi += t * v;
  pi = pi.cwiseMax(0.0);
  pi /= pi.sum();
  return {pi};
}

double bistochastic_distance(const BistochasticMatrix& b1, const BistochasticMatrix& b2) {
  if (b1.dim() != b2.dim()) throw std::invalid_argument("bistochastic_distance: dims differ");
  return norm_d(b1.mat() - b2.mat());
}

UnistochasticCertificate is_unistochastic(const BistochasticMatrix& b) {
  if (b.dim() != 3) throw std::invalid_argument("is_unistochastic: N must be 3");
  const RMat& m = b.mat();
  UnistochasticCertificate cert;
  for (int k = 0; k < 3; ++k) {
    cert.links(k) = std::sqrt(std::max(0.0, m(0, k)) * std::max(0.0, m(1, k)));
  }
  const double l0 = cert.links(0), l1 = cert.links(1), l2 = cert.links(2);
  cert.margin = std::min({l1 + l2 - l0, l0 + l2 - l1, l0 + l1 - l2});
  cert.member = cert.margin >= -1e-12;
  return cert;
}

UnitaryMatrix reconstruct_unitary(const BistochasticMatrix& b) {
  const auto cert = is_unistochastic(b);
  if (!cert.member) throw std::domain_error("reconstruct_unitary: matrix is not unistochastic");
  const RMat& m = b.mat();

  // Order links descending; the two largest carry the triangle closure.
  std::array<int, 3> idx = {0, 1, 2};
  std::sort(idx.begin(), idx.end(),
            [&](int a, int c) { return cert.links(a) > cert.links(c); });
  const double la = cert.links(idx[0]), lb = cert.links(idx[1]), lc = cert.links(idx[2]);

  Eigen::Vector3d theta = Eigen::Vector3d::Zero();
  if (lb > 1e-15) {
    // Close la + lb e^{i t_b} + lc e^{i t_c} = 0. Collinear (margin ~ 0)
    // degenerates to cos = +/-1 via the clamp.
    double cb = (lc * lc - la * la - lb * lb) / (2.0 * la * lb);
    cb = std::clamp(cb, -1.0, 1.0);
    const double tb = std::acos(cb);
    const cxd rest = -cxd(la, 0.0) - lb * std::exp(cxd(0.0, tb));
    theta(idx[1]) = tb;
    theta(idx[2]) = (std::abs(rest) > 1e-15) ? std::arg(rest) : 0.0;
  }
  // else: at most one nonzero link; member forces it to vanish too, and any
  // phases satisfy the closure.

  CMat u(3, 3);
  for (int k = 0; k < 3; ++k) {
    u(0, k) = std::sqrt(std::max(0.0, m(0, k)));
    u(1, k) = std::sqrt(std::max(0.0, m(1, k))) * std::exp(cxd(0.0, theta(k)));
  }
  // Third row: conjugate cross product of the first two.
  u(2, 0) = std::conj(u(0, 1) * u(1, 2) - u(0, 2) * u(1, 1));
  u(2, 1) = std::conj(u(0, 2) * u(1, 0) - u(0, 0) * u(1, 2));
  u(2, 2) = std::conj(u(0, 0) * u(1, 1) - u(0, 1) * u(1, 0));
  const double n2 = u.row(2).norm();
  if (n2 > 1e-14) u.row(2) /= n2;

  // Dephase rows below the first; the first row is already nonnegative.
  for (int j = 1; j < 3; ++j) {
    const double mod = std::abs(u(j, 0));
    if (mod > 1e-14) u.row(j) *= std::conj(u(j, 0)) / mod;
  }
  return UnitaryMatrix::trusted(std::move(u));
}

BistochasticMatrix sample_birkhoff(RngStream& rng) {
  for (;;) {
    const double b00 = rng.uniform(), b01 = rng.uniform();
    const double b10 = rng.uniform(), b11 = rng.uniform();
    if (b00 + b01 > 1.0 || b10 + b11 > 1.0) continue;
    if (b00 + b10 > 1.0 || b01 + b11 > 1.0) continue;
    if (b00 + b01 + b10 + b11 < 1.0) continue;
    RMat m(3, 3);
    m << b00, b01, 1.0 - b00 - b01,
         b10, b11, 1.0 - b10 - b11,
         1.0 - b00 - b10, 1.0 - b01 - b11, b00 + b01 + b10 + b11 - 1.0;
    return BistochasticMatrix::trusted(std::move(m));
  }
}

BistochasticMatrix sample_birkhoff(std::uint64_t seed) {
  RngStream rng(seed);
  return sample_birkhoff(rng);
}

CrossSection CrossSection::facet(int row, int col) {
  if (row < 0 || row > 2 || col < 0 || col > 2) {
    throw std::invalid_argument("CrossSection::facet: entry out of range");
  }
  CrossSection s;
  s.kind_ = SectionKind::Facet;
  // The facet B(row,col) = 0 is the tetrahedron on the four permutations with
  // a zero there. Its two long (sqrt(3)) edges join permutations of equal
  // parity; order the corners so the bilinear chart is ruled along the short
  // edges: corners 0,1 span one long edge, 2,3 the other.
  const auto& perms = permutation_matrices_3();
  std::vector<int> members;
  for (int i = 0; i < 6; ++i) {
    if (perms[i](row, col) == 0.0) members.push_back(i);
  }
  // Parity in the labelling: 0,3,4 even; 1,2,5 odd.
  const auto is_even = [](int i) { return i == 0 || i == 3 || i == 4; };
  std::vector<int> evens, odds;
  for (int i : members) (is_even(i) ? evens : odds).push_back(i);
  s.facet_corners_[0] = perms[odds[0]];
  s.facet_corners_[1] = perms[odds[1]];
  s.facet_corners_[2] = perms[evens[0]];
  s.facet_corners_[3] = perms[evens[1]];
  s.centre_uv_ = {0.5, 0.5};
  s.polygon_ = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  return s;
}

CrossSection CrossSection::triangle() {
  CrossSection s;
  s.kind_ = SectionKind::Triangle;
  const auto& perms = permutation_matrices_3();
  s.c_ = van_der_waerden_3().mat();
  RMat d1 = perms[3] - perms[0];
  RMat d2 = perms[4] - perms[0];
  d1 /= norm_d(d1);
  d2 -= dot_d(d2, d1) * d1;
  d2 /= norm_d(d2);
  s.e1_ = d1;
  s.e2_ = d2;
  s.centre_uv_ = {0.0, 0.0};
  s.polygon_ = clip_domain(s.c_, s.e1_, s.e2_);
  return s;
}

CrossSection CrossSection::hexagon(const Eigen::Vector3d& p) {
  if (p.minCoeff() < 0.0 || std::abs(p.sum() - 1.0) > 1e-10) {
    throw std::invalid_argument("CrossSection::hexagon: p must be a probability vector");
  }
  const Eigen::Vector3d pt = p - Eigen::Vector3d::Constant(1.0 / 3.0);
  if (pt.norm() < 1e-12) {
    throw std::invalid_argument("CrossSection::hexagon: p equal to the flat vector does not cut a 2-D slice");
  }
  // Zero-row/col-sum matrices X with X*pt = 0. In the basis
  // M_ij = (e_i - e_2)(e_j - e_2)^T, i,j in {0,1}, the constraint reads
  // sum_j c_ij (pt_j - pt_2) = 0 for each i.
  std::array<RMat, 4> basis;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      RMat m = RMat::Zero(3, 3);
      m(i, j) = 1.0;
      m(i, 2) = -1.0;
      m(2, j) = -1.0;
      m(2, 2) = 1.0;
      basis[2 * i + j] = m;
    }
  }
  const double g0 = pt(0) - pt(2), g1 = pt(1) - pt(2);
  // Row-space vector (g0, g1): nullspace direction per i is (-g1, g0).
  RMat d1 = -g1 * basis[0] + g0 * basis[1];  // i = 0 row
  RMat d2 = -g1 * basis[2] + g0 * basis[3];  // i = 1 row
  CrossSection s;
  s.kind_ = SectionKind::Hexagon;
  s.c_ = van_der_waerden_3().mat();
  d1 /= norm_d(d1);
  d2 -= dot_d(d2, d1) * d1;
  d2 /= norm_d(d2);
  // Deterministic sign convention.
  if (d1(0, 0) < 0.0 || (d1(0, 0) == 0.0 && d1(0, 1) < 0.0)) d1 = -d1;
  if (d2(0, 0) < 0.0 || (d2(0, 0) == 0.0 && d2(0, 1) < 0.0)) d2 = -d2;
  s.e1_ = d1;
  s.e2_ = d2;
  s.centre_uv_ = {0.0, 0.0};
  s.polygon_ = clip_domain(s.c_, s.e1_, s.e2_);
  return s;
}

CrossSection CrossSection::parabolic(int edge_id) {
  // The nine short edges join an even and an odd permutation.
  static const int evens[3] = {0, 3, 4};
  static const int odds[3] = {1, 2, 5};
  if (edge_id < 0 || edge_id > 8) {
    throw std::invalid_argument("CrossSection::parabolic: edge_id must be 0..8");
  }
  const auto& perms = permutation_matrices_3();
  const RMat& pa = perms[evens[edge_id / 3]];
  const RMat& pb = perms[odds[edge_id % 3]];

  CrossSection s;
  s.kind_ = SectionKind::Parabolic;
  s.c_ = van_der_waerden_3().mat();
  RMat d1 = pb - pa;
  d1 /= norm_d(d1);
  RMat d2 = 0.5 * (pa + pb) - s.c_;
  d2 -= dot_d(d2, d1) * d1;
  d2 /= norm_d(d2);
  s.e1_ = d1;
  s.e2_ = d2;
  s.centre_uv_ = {0.0, 0.0};
  s.polygon_ = clip_domain(s.c_, s.e1_, s.e2_);
  return s;
}

RMat CrossSection::at(double u, double v) const {
  if (kind_ == SectionKind::Facet) {
    // Corners (0,0) and (1,1) are the two odd permutations, (1,0) and (0,1)
    // the two even ones, so every chart edge is a short (sqrt(2)) edge and
    // the chart sweeps the facet's ruled surface.
    return (1.0 - u) * (1.0 - v) * facet_corners_[0] + u * (1.0 - v) * facet_corners_[2] +
           (1.0 - u) * v * facet_corners_[3] + u * v * facet_corners_[1];
  }
  return c_ + u * e1_ + v * e2_;
}

bool CrossSection::in_domain(double u, double v) const {
  if (kind_ == SectionKind::Facet) {
    return u >= -1e-12 && u <= 1.0 + 1e-12 && v >= -1e-12 && v <= 1.0 + 1e-12;
  }
  return at(u, v).minCoeff() >= -1e-12;
}

BistochasticMatrix CrossSection::point(double u, double v) const {
  if (!in_domain(u, v)) throw std::domain_error("CrossSection::point: (u,v) outside the section");
  RMat m = at(u, v).cwiseMax(0.0);
  return BistochasticMatrix::trusted(std::move(m));
}

double CrossSection::exit_radius(double angle) const {
  const double cu = std::cos(angle), cv = std::sin(angle);
  double r = std::numeric_limits<double>::infinity();
  if (kind_ == SectionKind::Facet) {
    // Rays from (1/2, 1/2) in the unit square.
    for (const double d : {cu, cv}) {
      if (d > 1e-15) r = std::min(r, 0.5 / d);
      if (d < -1e-15) r = std::min(r, -0.5 / d);
    }
    return r;
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double slope = cu * e1_(i, j) + cv * e2_(i, j);
      if (slope < -1e-15) r = std::min(r, -c_(i, j) / slope);
    }
  }
  return r;
}

BoundaryTrace section_boundary_trace(const CrossSection& s, int resolution) {
  if (resolution < 4) throw std::invalid_argument("section_boundary_trace: resolution too small");
  BoundaryTrace trace;
  const Eigen::Vector2d c = s.centre();

  const auto margin_at = [&](double u, double v) {
    return is_unistochastic(s.point(u, v)).margin;
  };

  for (int k = 0; k < resolution; ++k) {
    const double angle = kTwoPi * k / resolution;
    const double cu = std::cos(angle), cv = std::sin(angle);
    const double r_exit = s.exit_radius(angle);
    if (!std::isfinite(r_exit) || r_exit <= 0.0) continue;

    const auto member_at = [&](double r) {
      const double u = c.x() + r * cu, v = c.y() + r * cv;
      return margin_at(u, v) >= -1e-12;
    };

    // March outward for the first nonmember radius.
    const int steps = 256;
    double r_in = 0.0, r_out = -1.0;
    for (int i = 1; i <= steps; ++i) {
      const double r = r_exit * i / steps;
      if (member_at(r)) {
        r_in = r;
      } else {
        r_out = r;
        break;
      }
    }

    BoundaryTrace::Sample sample;
    if (r_out < 0.0) {
      // Member all the way; record the domain exit point.
      sample.u = c.x() + r_exit * cu;
      sample.v = c.y() + r_exit * cv;
      sample.margin = margin_at(sample.u, sample.v);
      sample.interior = false;
    } else {
      while (r_out - r_in > 1e-13) {
        const double mid = 0.5 * (r_in + r_out);
        (member_at(mid) ? r_in : r_out) = mid;
        if (std::abs(margin_at(c.x() + mid * cu, c.y() + mid * cv)) < 1e-10) {
          r_in = r_out = mid;
          break;
        }
      }
      sample.u = c.x() + r_in * cu;
      sample.v = c.y() + r_in * cv;
      sample.margin = margin_at(sample.u, sample.v);
      sample.interior = true;
      trace.has_interior_boundary = true;
    }
    trace.samples.push_back(sample);
  }
  return trace;
}

}  // namespace ctori

#include "ctori/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace ctori {

double unitarity_defect(const CMat& m) {
  const CMat g = m.adjoint() * m - CMat::Identity(m.rows(), m.cols());
  return g.cwiseAbs().maxCoeff();
}

UnitaryMatrix::UnitaryMatrix(CMat m, double tol) : m_(std::move(m)) {
  if (m_.rows() < 2 || m_.rows() != m_.cols()) {
    throw std::invalid_argument("UnitaryMatrix: dimension must be >= 2 and square");
  }
  if (unitarity_defect(m_) > tol) {
    throw std::invalid_argument("UnitaryMatrix: input is not unitary within tolerance");
  }
  const double det_mod = std::abs(m_.determinant());
  if (std::abs(det_mod - 1.0) > 1e-10) {
    throw std::invalid_argument("UnitaryMatrix: |det| deviates from 1");
  }
}

UnitaryMatrix UnitaryMatrix::trusted(CMat m) {
  UnitaryMatrix u;
  u.m_ = std::move(m);
  return u;
}

BistochasticMatrix::BistochasticMatrix(RMat m, double tol) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() < 2) {
    throw std::invalid_argument("BistochasticMatrix: must be square, dim >= 2");
  }
  if (m_.minCoeff() < -1e-14) {
    throw std::invalid_argument("BistochasticMatrix: negative entry");
  }
  const int n = static_cast<int>(m_.rows());
  for (int i = 0; i < n; ++i) {
    if (std::abs(m_.row(i).sum() - 1.0) > tol || std::abs(m_.col(i).sum() - 1.0) > tol) {
      throw std::invalid_argument("BistochasticMatrix: row/column sum deviates from 1");
    }
  }
}

BistochasticMatrix BistochasticMatrix::trusted(RMat m) {
  BistochasticMatrix b;
  b.m_ = std::move(m);
  return b;
}

CVec CliffordTorusPoint::to_vector() const {
  const int n = static_cast<int>(probabilities.size());
  CVec v(n);
  v(0) = std::sqrt(std::max(0.0, probabilities(0)));
  for (int i = 1; i < n; ++i) {
    v(i) = std::sqrt(std::max(0.0, probabilities(i))) *
           std::exp(cxd(0.0, phases(i - 1)));
  }
  return v;
}

double wrap_angle(double a) {
  double w = std::fmod(a, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;
  return w;
}

UnitaryMatrix fourier_matrix(int n) {
  if (n < 2) throw std::invalid_argument("fourier_matrix: n must be >= 2");
  CMat f(n, n);
  const double s = 1.0 / std::sqrt(static_cast<double>(n));
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      // (j*k) mod n keeps the argument small; exact for n at desk scale.
      const int e = static_cast<int>((static_cast<long long>(j) * k) % n);
      f(j, k) = s * std::exp(cxd(0.0, kTwoPi * e / n));
    }
  }
  return UnitaryMatrix::trusted(std::move(f));
}

UnitaryMatrix haar_random_unitary(int n, RngStream& rng) {
  if (n < 2) throw std::invalid_argument("haar_random_unitary: n must be >= 2");
  CMat g(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) g(j, k) = rng.complex_gaussian();
  Eigen::HouseholderQR<CMat> qr(g);
  CMat q = qr.householderQ();
  const CMat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < n; ++k) {
    const cxd d = r(k, k);
    const double m = std::abs(d);
    // Zero diagonal has probability zero; fall back to phase 1.
    q.col(k) *= (m > 0.0) ? d / m : cxd(1.0, 0.0);
  }
  return UnitaryMatrix::trusted(std::move(q));
}

UnitaryMatrix haar_random_unitary(int n, std::uint64_t seed) {
  RngStream rng(seed);
  return haar_random_unitary(n, rng);
}

namespace {

cxd unit_phase(cxd v) {
  const double m = std::abs(v);
  return m > 0.0 ? v / m : cxd(1.0, 0.0);
}

}  // namespace

DephaseResult dephase(const UnitaryMatrix& u, bool ordered) {
  const int n = u.dim();
  CMat m = u.mat();

  if (ordered) {
    // Pick the row/column of the globally smallest modulus entry as the new
    // first row/column, then sort the rest by modulus. The (0,0) entry is
    // then a simultaneous minimum of its row and column, so both come out
    // nondecreasing.
    const RMat mod = m.cwiseAbs();
    int r0 = 0, c0 = 0;
    mod.minCoeff(&r0, &c0);
    std::vector<int> rows(n), cols(n);
    std::iota(rows.begin(), rows.end(), 0);
    std::iota(cols.begin(), cols.end(), 0);
    std::stable_sort(rows.begin(), rows.end(), [&](int a, int b) {
      if (a == r0) return true;
      if (b == r0) return false;
      return mod(a, c0) < mod(b, c0);
    });
    std::stable_sort(cols.begin(), cols.end(), [&](int a, int b) {
      if (a == c0) return true;
      if (b == c0) return false;
      return mod(r0, a) < mod(r0, b);
    });
    CMat p(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) p(i, j) = m(rows[i], cols[j]);
    m = std::move(p);
  }

  bool degenerate = false;
  for (int k = 0; k < n; ++k) {
    if (std::abs(m(0, k)) < 1e-14 || std::abs(m(k, 0)) < 1e-14) degenerate = true;
  }
  if (degenerate) {
    return {UnitaryMatrix::trusted(std::move(m)), DephaseStatus::Degenerate};
  }

  for (int k = 0; k < n; ++k) m.col(k) *= std::conj(unit_phase(m(0, k)));
  for (int j = 1; j < n; ++j) m.row(j) *= std::conj(unit_phase(m(j, 0)));
  // Round away the O(eps) imaginary residue in the pinned row/column.
  for (int k = 0; k < n; ++k) {
    m(0, k) = cxd(std::abs(m(0, k)), 0.0);
    m(k, 0) = cxd(std::abs(m(k, 0)), 0.0);
  }
  return {UnitaryMatrix::trusted(std::move(m)), DephaseStatus::Ok};
}

BistochasticMatrix unistochastic_projection(const UnitaryMatrix& u) {
  return BistochasticMatrix::trusted(u.mat().cwiseAbs2());
}

bool is_odd_prime(int p) {
  if (p < 3 || p % 2 == 0) return false;
  for (int d = 3; static_cast<long long>(d) * d <= p; d += 2) {
    if (p % d == 0) return false;
  }
  return true;
}

int mod_inverse(int a, int p) {
  int r0 = p, r1 = ((a % p) + p) % p;
  int t0 = 0, t1 = 1;
  while (r1 != 0) {
    const int q = r0 / r1;
    const int r2 = r0 - q * r1;
    const int t2 = t0 - q * t1;
    r0 = r1;
    r1 = r2;
    t0 = t1;
    t1 = t2;
  }
  if (r0 != 1) throw std::invalid_argument("mod_inverse: argument not invertible");
  return ((t0 % p) + p) % p;
}

CVec mub_circulant_vector(int p, int z, int a) {
  if (!is_odd_prime(p)) throw std::invalid_argument("mub_circulant_vector: p must be an odd prime");
  if (z % p == 0) throw std::invalid_argument("mub_circulant_vector: z must be nonzero mod p");
  a = ((a % p) + p) % p;
  z = ((z % p) + p) % p;
  const int inv2z = mod_inverse((2 * z) % p, p);
  CVec v(p);
  for (int r = 0; r < p; ++r) {
    const int num = (((r * r - 2 * r * a) % p) + p) % p;
    const int e = (num * inv2z) % p;
    v(r) = std::exp(cxd(0.0, kTwoPi * e / p));
  }
  return v;
}

Eigen::Matrix2d induced_metric(const Eigen::Vector3d& p) {
  if (p.minCoeff() < 0.0 || std::abs(p.sum() - 1.0) > 1e-12) {
    throw std::invalid_argument("induced_metric: not a probability vector");
  }
  Eigen::Matrix2d g;
  g << p(1) * (1.0 - p(1)), -p(1) * p(2), -p(1) * p(2), p(2) * (1.0 - p(2));
  return g;
}

}  // namespace ctori

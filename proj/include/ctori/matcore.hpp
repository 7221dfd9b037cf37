#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <stdexcept>

#include "ctori/rng.hpp"

namespace ctori {

using cxd = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Max-abs deviation of U^dagger U from the identity.
double unitarity_defect(const CMat& m);

/// N x N complex matrix certified unitary at construction.
class UnitaryMatrix {
 public:
  explicit UnitaryMatrix(CMat m, double tol = 1e-12);

  /// Wraps without checking; for internal constructions that are unitary by
  /// construction (Fourier, Haar QR, enphasings of checked matrices).
  static UnitaryMatrix trusted(CMat m);

  int dim() const { return static_cast<int>(m_.rows()); }
  const CMat& mat() const { return m_; }

 private:
  UnitaryMatrix() = default;
  CMat m_;
};

/// Nonnegative matrix with unit row and column sums.
class BistochasticMatrix {
 public:
  explicit BistochasticMatrix(RMat m, double tol = 1e-12);
  static BistochasticMatrix trusted(RMat m);

  int dim() const { return static_cast<int>(m_.rows()); }
  const RMat& mat() const { return m_; }

 private:
  BistochasticMatrix() = default;
  RMat m_;
};

/// Torus point in action-angle form: probabilities sum to 1, N-1 phases.
struct CliffordTorusPoint {
  RVec probabilities;
  RVec phases;  // each in [0, 2pi)

  /// Embedding (sqrt(p_0), sqrt(p_1) e^{i nu_1}, ...).
  CVec to_vector() const;
};

/// Wraps an angle into [0, 2pi).
double wrap_angle(double a);

/// F_{jk} = exp(2 pi i j k / n) / sqrt(n).
UnitaryMatrix fourier_matrix(int n);

/// Haar-distributed unitary: complex Ginibre matrix, QR, then each column of
/// Q multiplied by the phase of the matching diagonal entry of R (canonical
/// positive-diagonal factorization). Deterministic for a fixed seed.
UnitaryMatrix haar_random_unitary(int n, std::uint64_t seed);
UnitaryMatrix haar_random_unitary(int n, RngStream& rng);

enum class DephaseStatus { Ok, Degenerate };

struct DephaseResult {
  UnitaryMatrix u;
  DephaseStatus status;
};

/// Left/right diagonal phases chosen so the first row and column are real and
/// nonnegative. With `ordered`, rows and columns are additionally permuted so
/// both are nondecreasing. A zero in the first row or column makes the phase
/// choice ambiguous; the input is returned with status Degenerate.
DephaseResult dephase(const UnitaryMatrix& u, bool ordered = false);

/// Entrywise squared moduli |U_jk|^2.
BistochasticMatrix unistochastic_projection(const UnitaryMatrix& u);

bool is_odd_prime(int p);

/// Inverse of a mod p (p prime), by extended Euclid.
int mod_inverse(int a, int p);

/// Circulant-basis vector with components omega^{(r^2 - 2ra) / (2z)},
/// exponent arithmetic mod p, first component 1. p odd prime, 1 <= z < p.
CVec mub_circulant_vector(int p, int z, int a);

/// Metric on the probability-p torus, N = 3:
/// [[p1(1-p1), -p1 p2], [-p1 p2, p2(1-p2)]].
Eigen::Matrix2d induced_metric(const Eigen::Vector3d& p);

}  // namespace ctori

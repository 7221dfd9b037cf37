#include "ctori/topology.hpp"

#include <algorithm>
#include <cmath>

namespace ctori {

namespace {

// Fixes the handedness of the (Re, Im) coordinate convention; chosen so the
// N = 3 Fourier pair carries +1 on the quadratic-residue basis.
constexpr double kOrientationSign = 1.0;

CVec phase_vector(const RVec& alpha) {
  CVec v(alpha.size() + 1);
  v(0) = 1.0;
  for (int r = 0; r < alpha.size(); ++r) v(r + 1) = std::exp(cxd(0.0, alpha(r)));
  return v;
}

}  // namespace

TangentFrame tangent_frame(const UnitaryMatrix& u, const RVec& alpha, int chart) {
  const int n_dim = u.dim();
  const int n = n_dim - 1;
  if (alpha.size() != n) throw std::invalid_argument("tangent_frame: alpha has wrong length");
  if (chart < 0 || chart >= n_dim) throw std::invalid_argument("tangent_frame: bad chart");

  const CVec v = phase_vector(alpha);
  const CVec w = u.mat() * v;
  if (std::abs(w(chart)) < 1e-10) {
    throw std::domain_error("tangent_frame: chart component vanishes");
  }

  TangentFrame frame;
  frame.chart = chart;
  frame.z.resize(n);
  int out = 0;
  for (int s = 0; s < n_dim; ++s) {
    if (s == chart) continue;
    frame.z(out++) = w(s) / w(chart);
  }

  // Shifted torus: z_s(alpha) = w_s / w_chart with w = U (1, e^{i alpha});
  // d z_s / d alpha_r = i e^{i alpha_r} (U_{sr} - z_s U_{chart,r}) / w_chart.
  frame.shifted_vecs.resize(n, n);
  out = 0;
  for (int s = 0; s < n_dim; ++s) {
    if (s == chart) continue;
    for (int r = 1; r <= n; ++r) {
      const cxd factor = cxd(0.0, 1.0) * v(r) / w(chart);
      frame.shifted_vecs(out, r - 1) = factor * (u.mat()(s, r) - frame.z(out) * u.mat()(chart, r));
    }
    ++out;
  }

  // Fixed torus through the same point: coordinates w_s = e^{i(nu_s - nu_chart)}
  // with nu_0 = 0. For r != chart the pushforward is i z_r along slot r; for
  // r = chart it is -i z (all slots).
  frame.fixed_vecs = CMat::Zero(n, n);
  for (int r = 1; r <= n; ++r) {
    if (r == chart) {
      frame.fixed_vecs.col(r - 1) = cxd(0.0, -1.0) * frame.z;
    } else {
      const int slot = (r < chart) ? r : r - 1;
      frame.fixed_vecs(slot, r - 1) = cxd(0.0, 1.0) * frame.z(slot);
    }
  }
  return frame;
}

namespace {

double frame_determinant(const TangentFrame& f) {
  const int n = static_cast<int>(f.z.size());
  RMat m(2 * n, 2 * n);
  for (int c = 0; c < n; ++c) {
    for (int s = 0; s < n; ++s) {
      m(2 * s, c) = f.fixed_vecs(s, c).real();
      m(2 * s + 1, c) = f.fixed_vecs(s, c).imag();
      m(2 * s, n + c) = f.shifted_vecs(s, c).real();
      m(2 * s + 1, n + c) = f.shifted_vecs(s, c).imag();
    }
  }
  return kOrientationSign * m.determinant();
}

double max_residual(const UnitaryMatrix& u, const RVec& alpha) {
  const CVec w = u.mat() * phase_vector(alpha);
  double worst = 0.0;
  for (int j = 0; j < w.size(); ++j) worst = std::max(worst, std::abs(std::norm(w(j)) - 1.0));
  return worst;
}

}  // namespace

IndexResult intersection_index_in_chart(const UnitaryMatrix& u, const RVec& alpha,
                                        int chart, double jacobian_tol) {
  const TangentFrame f = tangent_frame(u, alpha, chart);
  IndexResult r;
  r.det = frame_determinant(f);
  r.index = (std::abs(r.det) > jacobian_tol) ? (r.det > 0.0 ? 1 : -1) : 0;
  return r;
}

IndexResult intersection_index(const UnitaryMatrix& u, const RVec& alpha,
                               double residual_tol, double jacobian_tol) {
  if (max_residual(u, alpha) > residual_tol) {
    throw std::domain_error("intersection_index: alpha does not solve the system");
  }
  // At an intersection every |w_j| = 1, so chart 0 is always valid; keep the
  // permuted-chart fallback as a safety net.
  const CVec w = u.mat() * phase_vector(alpha);
  int chart = 0;
  if (std::abs(w(0)) < 1e-10) {
    for (int c = 1; c < u.dim(); ++c) {
      if (std::abs(w(c)) > std::abs(w(chart))) chart = c;
    }
  }
  return intersection_index_in_chart(u, alpha, chart, jacobian_tol);
}

std::vector<int> quadratic_residues(int p) {
  if (!is_odd_prime(p)) throw std::invalid_argument("quadratic_residues: p must be an odd prime");
  std::vector<int> q;
  for (int x = 1; x < p; ++x) {
    const int s = (x * x) % p;
    if (!std::count(q.begin(), q.end(), s)) q.push_back(s);
  }
  std::sort(q.begin(), q.end());
  return q;
}

cxd gauss_sum(int p) {
  if (!is_odd_prime(p)) throw std::invalid_argument("gauss_sum: p must be an odd prime");
  cxd sum = 0.0;
  for (int x = 0; x < p; ++x) {
    const int e = (x * x) % p;
    sum += std::exp(cxd(0.0, kTwoPi * e / p));
  }
  return sum;
}

std::vector<MubIndexRow> fourier_mub_index_table(int p) {
  if (!is_odd_prime(p) || p > 17) {
    throw std::invalid_argument("fourier_mub_index_table: p must be an odd prime <= 17");
  }
  const UnitaryMatrix f = fourier_matrix(p);
  std::vector<MubIndexRow> rows;
  rows.reserve(static_cast<std::size_t>(p) * (p - 1));
  for (int z = 1; z < p; ++z) {
    for (int a = 0; a < p; ++a) {
      const CVec vec = mub_circulant_vector(p, z, a);
      RVec alpha(p - 1);
      for (int r = 1; r < p; ++r) alpha(r - 1) = wrap_angle(std::arg(vec(r)));
      const IndexResult res = intersection_index(f, alpha, 1e-9, 1e-8);
      rows.push_back({z, a, res.det, res.index});
    }
  }
  return rows;
}

IndexReport index_report(const UnitaryMatrix& u, const std::vector<RVec>& alphas,
                         double residual_tol, double jacobian_tol) {
  IndexReport report;
  for (const auto& alpha : alphas) {
    const IndexResult r = intersection_index(u, alpha, residual_tol, jacobian_tol);
    report.per_point.push_back({alpha, r.det, r.index});
    report.total += r.index;
  }
  return report;
}

}  // namespace ctori

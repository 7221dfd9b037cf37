#include "ctori/intersect.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <map>
#include <thread>

namespace ctori {

namespace {

CVec phase_vector(const RVec& alpha) {
  CVec v(alpha.size() + 1);
  v(0) = 1.0;
  for (int r = 0; r < alpha.size(); ++r) v(r + 1) = std::exp(cxd(0.0, alpha(r)));
  return v;
}

double circular_distance(double a, double b) {
  double d = std::abs(a - b);
  d = std::fmod(d, kTwoPi);
  return std::min(d, kTwoPi - d);
}

}  // namespace

RVec residual(const UnitaryMatrix& u, const RVec& alpha) {
  const CVec w = u.mat() * phase_vector(alpha);
  RVec f(u.dim());
  for (int j = 0; j < u.dim(); ++j) f(j) = std::norm(w(j)) - 1.0;
  return f;
}

RMat residual_jacobian(const UnitaryMatrix& u, const RVec& alpha) {
  const int n = u.dim();
  const CVec v = phase_vector(alpha);
  const CVec w = u.mat() * v;
  RMat jac(n, n - 1);
  for (int j = 0; j < n; ++j) {
    for (int r = 1; r < n; ++r) {
      jac(j, r - 1) = 2.0 * std::real(std::conj(w(j)) * cxd(0.0, 1.0) * u.mat()(j, r) * v(r));
    }
  }
  return jac;
}

double toroidal_distance(const RVec& a, const RVec& b) {
  double worst = 0.0;
  for (int i = 0; i < a.size(); ++i) worst = std::max(worst, circular_distance(a(i), b(i)));
  return worst;
}

namespace {

struct NewtonResult {
  RVec alpha;
  double residual_norm = std::numeric_limits<double>::infinity();
  bool ok = false;
};

double reduced_norm(const UnitaryMatrix& u, const RVec& alpha) {
  const RVec f = residual(u, alpha);
  return f.tail(f.size() - 1).cwiseAbs().maxCoeff();
}

// Damped Newton on the reduced (square) system; f_0 is dropped since the
// residual components sum to zero.
NewtonResult newton_refine(const UnitaryMatrix& u, RVec alpha, double target) {
  const int n = u.dim() - 1;
  NewtonResult out;
  double fnorm = reduced_norm(u, alpha);
  for (int iter = 0; iter < 80; ++iter) {
    if (fnorm < 1e-15) break;
    const RVec f_full = residual(u, alpha);
    const RVec f = f_full.tail(n);
    const RMat jac_full = residual_jacobian(u, alpha);
    const RMat jac = jac_full.bottomRows(n);
    const RVec step = jac.colPivHouseholderQr().solve(-f);
    if (!step.allFinite()) break;

    double lambda = 1.0;
    RVec next = alpha + step;
    double next_norm = reduced_norm(u, next);
    int halvings = 0;
    while (next_norm >= fnorm && halvings < 30) {
      lambda *= 0.5;
      next = alpha + lambda * step;
      next_norm = reduced_norm(u, next);
      ++halvings;
    }
    if (next_norm >= fnorm) break;  // no progress in 30 halvings
    alpha = next;
    fnorm = next_norm;
    if (lambda * step.cwiseAbs().maxCoeff() < 1e-16) break;
  }
  for (int i = 0; i < alpha.size(); ++i) alpha(i) = wrap_angle(alpha(i));
  out.alpha = alpha;
  out.residual_norm = residual(u, alpha).cwiseAbs().maxCoeff();
  out.ok = out.residual_norm < target;
  return out;
}

// Deduplicated solution store with a coarse 2-D bucket index on the first two
// angle components (or the single component when N = 2).
class SolutionStore {
 public:
  explicit SolutionStore(double tol) : tol_(tol), cell_(std::max(tol * 64.0, 1e-3)) {}

  // Returns true when the point is new.
  bool insert(const RVec& alpha, double res) {
    const auto key = key_of(alpha);
    for (int du = -1; du <= 1; ++du) {
      for (int dv = -1; dv <= 1; ++dv) {
        const auto it = buckets_.find(neighbour(key, du, dv));
        if (it == buckets_.end()) continue;
        for (const int idx : it->second) {
          if (toroidal_distance(points_[idx], alpha) < tol_) {
            if (res < residuals_[idx]) {
              points_[idx] = alpha;
              residuals_[idx] = res;
            }
            return false;
          }
        }
      }
    }
    points_.push_back(alpha);
    residuals_.push_back(res);
    buckets_[key].push_back(static_cast<int>(points_.size()) - 1);
    return true;
  }

  const std::vector<RVec>& points() const { return points_; }
  const std::vector<double>& residuals() const { return residuals_; }
  int size() const { return static_cast<int>(points_.size()); }

 private:
  using Key = std::pair<long, long>;

  Key key_of(const RVec& a) const {
    const long ku = static_cast<long>(std::floor(a(0) / cell_));
    const long kv = a.size() > 1 ? static_cast<long>(std::floor(a(1) / cell_)) : 0;
    return {ku, kv};
  }

  Key neighbour(Key k, int du, int dv) const {
    const long cells = static_cast<long>(std::ceil(kTwoPi / cell_));
    auto wrap = [cells](long x) { return ((x % cells) + cells) % cells; };
    return {wrap(k.first + du), wrap(k.second + dv)};
  }

  double tol_;
  double cell_;
  std::vector<RVec> points_;
  std::vector<double> residuals_;
  std::map<Key, std::vector<int>> buckets_;
};

std::vector<RVec> lattice_starts(int n_angles, int per_axis) {
  std::vector<RVec> starts;
  std::vector<int> idx(n_angles, 0);
  for (;;) {
    RVec a(n_angles);
    for (int i = 0; i < n_angles; ++i) {
      a(i) = kTwoPi * (idx[i] + 0.5) / per_axis;
    }
    starts.push_back(a);
    int carry = 0;
    while (carry < n_angles && ++idx[carry] == per_axis) idx[carry++] = 0;
    if (carry == n_angles) break;
  }
  return starts;
}

double median_nearest_neighbour(const std::vector<RVec>& pts) {
  if (pts.size() < 2) return std::numeric_limits<double>::infinity();
  std::vector<double> nn(pts.size(), std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double d = toroidal_distance(pts[i], pts[j]);
      nn[i] = std::min(nn[i], d);
      nn[j] = std::min(nn[j], d);
    }
  }
  std::nth_element(nn.begin(), nn.begin() + nn.size() / 2, nn.end());
  return nn[nn.size() / 2];
}

int default_starts(int n_dim) {
  switch (n_dim) {
    case 2: return 32;
    case 3: return 192;
    case 4: return 512;
    case 5: return 1500;
    case 6: return 6000;
    default: return 20000;
  }
}

}  // namespace

IntersectionSet find_intersections(const UnitaryMatrix& u, const SolverConfig& cfg) {
  const int n_dim = u.dim();
  const int n = n_dim - 1;
  IntersectionSet result;
  RngStream rng(cfg.seed);

  // Coincident tori (e.g. enphased permutations) solve the system identically;
  // probe a few random points before doing any Newton work.
  {
    bool all_zero = true;
    std::vector<RVec> witnesses;
    for (int k = 0; k < 16; ++k) {
      RVec a(n);
      for (int i = 0; i < n; ++i) a(i) = rng.uniform(0.0, kTwoPi);
      if (residual(u, a).cwiseAbs().maxCoeff() > cfg.residual_tol) {
        all_zero = false;
        break;
      }
      witnesses.push_back(a);
    }
    if (all_zero) {
      result.classification = IntersectionClass::Continuum;
      result.continuum_witnesses = std::move(witnesses);
      return result;
    }
  }

  const int starts_per_round =
      cfg.starts_per_round > 0 ? cfg.starts_per_round : default_starts(n_dim);
  SolutionStore store(cfg.dedup_tol);

  const auto run_starts = [&](const std::vector<RVec>& starts) {
    if (cfg.threads > 1 && starts.size() > 64) {
      std::vector<NewtonResult> results(starts.size());
      std::atomic<std::size_t> cursor{0};
      auto worker = [&] {
        for (;;) {
          const std::size_t i = cursor.fetch_add(1);
          if (i >= starts.size()) return;
          results[i] = newton_refine(u, starts[i], cfg.residual_tol);
        }
      };
      std::vector<std::thread> pool;
      for (int t = 0; t < cfg.threads; ++t) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
      // Deterministic merge in start order.
      for (const auto& r : results) {
        if (r.ok) store.insert(r.alpha, r.residual_norm);
      }
    } else {
      for (const auto& s : starts) {
        const NewtonResult r = newton_refine(u, s, cfg.residual_tol);
        if (r.ok) store.insert(r.alpha, r.residual_norm);
      }
    }
  };

  int stable = 0;
  bool stabilized = false;
  for (int round = 0; round < cfg.max_rounds; ++round) {
    std::vector<RVec> starts;
    if (round == 0) {
      const int per_axis = std::max(2, static_cast<int>(std::round(
                                           std::pow(static_cast<double>(starts_per_round),
                                                    1.0 / n))));
      starts = lattice_starts(n, per_axis);
    }
    while (static_cast<int>(starts.size()) < starts_per_round) {
      RVec a(n);
      for (int i = 0; i < n; ++i) a(i) = rng.uniform(0.0, kTwoPi);
      starts.push_back(a);
    }

    const int before = store.size();
    run_starts(starts);
    result.rounds.push_back({round, static_cast<int>(starts.size()), store.size()});

    if (store.size() == before && store.size() > 0) {
      if (++stable >= cfg.stable_rounds - 1) {
        stabilized = true;
        break;
      }
    } else {
      stable = 0;
    }
  }

  if (!stabilized) {
    // Curve structure: many points with small nearest-neighbour spacing.
    const int count = store.size();
    const double med = median_nearest_neighbour(store.points());
    const double curve_threshold =
        std::max(10.0 * cfg.dedup_tol, std::min(0.05, 60.0 / std::max(count, 1)));
    if (count > 50 && med < curve_threshold) {
      result.classification = IntersectionClass::Continuum;
      const std::size_t stride = std::max<std::size_t>(1, store.points().size() / 256);
      for (std::size_t i = 0; i < store.points().size(); i += stride) {
        result.continuum_witnesses.push_back(store.points()[i]);
      }
      return result;
    }
    result.converged = false;
  }

  // Classify the finite set by the tangent-frame orientation determinants.
  bool any_degenerate = false;
  for (int i = 0; i < store.size(); ++i) {
    IntersectionPoint p;
    p.alpha = store.points()[i];
    p.residual = store.residuals()[i];
    const CVec w = u.mat() * phase_vector(p.alpha);
    int chart = 0;
    for (int c = 1; c < n_dim; ++c) {
      if (std::abs(w(c)) > std::abs(w(chart))) chart = c;
    }
    p.z.resize(n_dim);
    for (int s = 0; s < n_dim; ++s) p.z(s) = w(s) / w(0 /* affine convention */);
    const IndexResult idx =
        intersection_index_in_chart(u, p.alpha, std::abs(w(0)) > 1e-10 ? 0 : chart,
                                    cfg.jacobian_tol);
    p.jac_det = idx.det;
    p.index = idx.index;
    if (p.index == 0) any_degenerate = true;
    result.index_sum += p.index;
    result.points.push_back(std::move(p));
  }
  result.classification = any_degenerate ? IntersectionClass::FiniteDegenerate
                                         : IntersectionClass::FiniteTransversal;
  std::sort(result.points.begin(), result.points.end(),
            [](const IntersectionPoint& a, const IntersectionPoint& b) {
              for (int i = 0; i < a.alpha.size(); ++i) {
                if (a.alpha(i) != b.alpha(i)) return a.alpha(i) < b.alpha(i);
              }
              return false;
            });
  return result;
}

CountResult count_intersections(const UnitaryMatrix& u, const SolverConfig& cfg) {
  const IntersectionSet set = find_intersections(u, cfg);
  CountResult r;
  r.rounds = set.rounds;
  if (set.classification == IntersectionClass::Continuum) {
    r.kind = CountKind::Continuum;
  } else if (!set.converged) {
    r.kind = CountKind::NonConverged;
    r.count = static_cast<int>(set.points.size());
  } else {
    r.kind = CountKind::Finite;
    r.count = static_cast<int>(set.points.size());
  }
  return r;
}

std::vector<ScanCell> scan_section(const CrossSection& section, int resolution,
                                   const SolverConfig& cfg) {
  if (resolution < 2) throw std::invalid_argument("scan_section: resolution too small");

  double u_min = std::numeric_limits<double>::infinity(), u_max = -u_min;
  double v_min = u_min, v_max = -u_min;
  for (const auto& q : section.domain_polygon()) {
    u_min = std::min(u_min, q.x());
    u_max = std::max(u_max, q.x());
    v_min = std::min(v_min, q.y());
    v_max = std::max(v_max, q.y());
  }

  std::vector<ScanCell> cells(static_cast<std::size_t>(resolution) * resolution);
  std::atomic<int> cursor{0};
  auto worker = [&] {
    for (;;) {
      const int idx = cursor.fetch_add(1);
      if (idx >= static_cast<int>(cells.size())) return;
      const int i = idx % resolution, j = idx / resolution;
      ScanCell& cell = cells[idx];
      cell.u = u_min + (u_max - u_min) * (i + 0.5) / resolution;
      cell.v = v_min + (v_max - v_min) * (j + 0.5) / resolution;
      cell.in_domain = section.in_domain(cell.u, cell.v);
      if (!cell.in_domain) continue;
      const BistochasticMatrix b = section.point(cell.u, cell.v);
      const auto cert = is_unistochastic(b);
      cell.margin = cert.margin;
      cell.member = cert.member;
      if (!cell.member) continue;
      try {
        SolverConfig cell_cfg = cfg;
        cell_cfg.threads = 1;
        cell_cfg.seed = splitmix64(cfg.seed ^ splitmix64(static_cast<std::uint64_t>(idx)));
        const UnitaryMatrix u_cell = reconstruct_unitary(b);
        const CountResult c = count_intersections(u_cell, cell_cfg);
        cell.kind = c.kind;
        cell.count = c.count;
        cell.solver_ok = c.kind != CountKind::NonConverged;
      } catch (const std::exception&) {
        cell.solver_ok = false;
      }
    }
  };
  const int n_threads = std::max(1, cfg.threads);
  std::vector<std::thread> pool;
  for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return cells;
}

}  // namespace ctori

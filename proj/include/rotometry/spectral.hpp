#ifndef ROTOMETRY_SPECTRAL_HPP
#define ROTOMETRY_SPECTRAL_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "rotometry/errors.hpp"
#include "rotometry/operators.hpp"
#include "rotometry/parallel.hpp"
#include "rotometry/states.hpp"

namespace rotometry {

struct EigensolveOptions {
  // Matrices at or below this dimension go through the dense solver.
  long dense_threshold = 4096;
  // Accepted residual, relative to the largest matrix entry.
  double residual_tol = 1e-10;
  // 0 picks a limit from the matrix dimension.
  int max_lanczos_steps = 0;
  unsigned rng_seed = 0x5eedu;
};

struct EigenResult {
  Eigen::VectorXd values;    // ascending
  Eigen::MatrixXcd vectors;  // orthonormal columns matching values
};

namespace detail {

// Deterministic phase: the largest-magnitude component of each column is made
// real and positive (first one on ties).
inline void fix_eigenvector_phase(Eigen::MatrixXcd& vectors) {
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    Eigen::Index imax = 0;
    double best = -1.0;
    for (Eigen::Index r = 0; r < vectors.rows(); ++r) {
      const double a = std::abs(vectors(r, c));
      if (a > best + 1e-15) {
        best = a;
        imax = r;
      }
    }
    const Complex z = vectors(imax, c);
    if (std::abs(z) > 0.0) vectors.col(c) *= std::conj(z) / std::abs(z);
  }
}

// One Lanczos run with full reorthogonalization, confined to the orthogonal
// complement of `deflated` columns. Returns the smallest Ritz pair.
inline std::pair<double, Eigen::VectorXcd> lanczos_smallest(const ManyBodyOperator& h,
                                                            const Eigen::MatrixXcd& deflated,
                                                            double abs_tol, int max_steps,
                                                            unsigned seed) {
  const Eigen::Index dim = h.dim();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  auto project_out = [&](Eigen::VectorXcd& v) {
    // Two classical Gram-Schmidt passes keep the complement clean.
    for (int pass = 0; pass < 2; ++pass) {
      if (deflated.cols() > 0) v -= deflated * (deflated.adjoint() * v);
    }
  };

  Eigen::VectorXcd v(dim);
  for (int attempt = 0;; ++attempt) {
    for (Eigen::Index i = 0; i < dim; ++i) v(i) = Complex(gauss(rng), gauss(rng));
    project_out(v);
    const double n = v.norm();
    if (n > 1e-8) {
      v /= n;
      break;
    }
    if (attempt > 8) throw SolverError("lanczos: cannot find a start vector outside the deflated space");
  }

  std::vector<Eigen::VectorXcd> krylov{v};
  std::vector<double> alpha, beta;
  Eigen::VectorXd ritz_values;
  Eigen::MatrixXd ritz_vectors;

  for (int j = 0; j < max_steps; ++j) {
    Eigen::VectorXcd w = h.apply(krylov.back());
    if (j > 0) w -= beta.back() * krylov[krylov.size() - 2];
    const double a = std::real(krylov.back().dot(w));
    alpha.push_back(a);
    w -= a * krylov.back();
    project_out(w);
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : krylov) w -= q.dot(w) * q;
    }
    const double b = w.norm();

    const int m = static_cast<int>(alpha.size());
    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      tri(i, i) = alpha[static_cast<std::size_t>(i)];
      if (i + 1 < m) {
        tri(i, i + 1) = beta[static_cast<std::size_t>(i)];
        tri(i + 1, i) = beta[static_cast<std::size_t>(i)];
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
    ritz_values = es.eigenvalues();
    ritz_vectors = es.eigenvectors();

    const double residual_bound = b * std::abs(ritz_vectors(m - 1, 0));
    const bool exhausted = b < 1e-13 || m == static_cast<int>(dim);
    if (residual_bound <= abs_tol || exhausted) {
      Eigen::VectorXcd x = Eigen::VectorXcd::Zero(dim);
      for (int i = 0; i < m; ++i) x += ritz_vectors(i, 0) * krylov[static_cast<std::size_t>(i)];
      project_out(x);
      x.normalize();
      const double lambda = ritz_values(0);
      const double residual = (h.apply(x) - lambda * x).norm();
      if (residual <= abs_tol || exhausted) return {lambda, std::move(x)};
    }
    if (b < 1e-13) {
      throw SolverError("lanczos: Krylov space collapsed before convergence");
    }
    krylov.push_back(w / b);
    beta.push_back(b);
  }
  throw SolverError("lanczos: no convergence in " + std::to_string(max_steps) + " steps");
}

}  // namespace detail

// Lowest k eigenpairs of a Hermitian operator. Small problems use the dense
// solver; larger ones use Lanczos with deflation, which reproduces degenerate
// multiplets one copy at a time.
inline EigenResult eigensolve(const ManyBodyOperator& h, int num_values,
                              const EigensolveOptions& opts = {}) {
  const Eigen::Index dim = h.dim();
  if (dim == 0) throw ConfigError("eigensolve: empty basis");
  const int k = std::clamp<int>(num_values, 1, static_cast<int>(dim));

  EigenResult out;
  if (dim <= opts.dense_threshold) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h.to_dense());
    if (es.info() != Eigen::Success) throw SolverError("eigensolve: dense solver failed");
    out.values = es.eigenvalues().head(k);
    out.vectors = es.eigenvectors().leftCols(k);
  } else {
    const double abs_tol = opts.residual_tol * std::max(1.0, h.max_abs());
    const int max_steps =
        opts.max_lanczos_steps > 0
            ? opts.max_lanczos_steps
            : static_cast<int>(std::min<Eigen::Index>(dim, 400));
    out.values.resize(k);
    out.vectors.resize(dim, k);
    Eigen::MatrixXcd deflated(dim, 0);
    for (int i = 0; i < k; ++i) {
      auto [lambda, x] =
          detail::lanczos_smallest(h, deflated, abs_tol, max_steps, opts.rng_seed + 977u * i);
      out.values(i) = lambda;
      out.vectors.col(i) = x;
      deflated.conservativeResize(Eigen::NoChange, i + 1);
      deflated.col(i) = x;
    }
    // Deflation can pick up near-degenerate values slightly out of order.
    for (int i = 1; i < k; ++i) {
      if (out.values(i) < out.values(i - 1) - abs_tol) {
        throw SolverError("eigensolve: deflated values out of order; tighten residual_tol");
      }
    }
  }
  detail::fix_eigenvector_phase(out.vectors);
  return out;
}

// e^{-i H t} v through a Lanczos subspace with full reorthogonalization, for
// dimensions past the dense propagator's comfort zone. Convergence is judged
// by the change between successive subspace approximations; if the space cap
// is hit the time step is halved recursively.
inline Eigen::VectorXcd krylov_propagate(const ManyBodyOperator& h, const Eigen::VectorXcd& v,
                                         double time, double tol = 1e-12, int max_space = 120,
                                         int depth = 0) {
  if (depth > 40) throw SolverError("krylov_propagate: time-splitting recursion exhausted");
  const double norm = v.norm();
  if (norm == 0.0 || time == 0.0) return v;

  std::vector<Eigen::VectorXcd> krylov{v / norm};
  std::vector<double> alpha, beta;
  Eigen::VectorXcd prev;
  for (int j = 0; j < max_space; ++j) {
    Eigen::VectorXcd w = h.apply(krylov.back());
    if (j > 0) w -= beta.back() * krylov[krylov.size() - 2];
    const double a = std::real(krylov.back().dot(w));
    alpha.push_back(a);
    w -= a * krylov.back();
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : krylov) w -= q.dot(w) * q;
    }
    const double b = w.norm();

    const int m = static_cast<int>(alpha.size());
    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      tri(i, i) = alpha[static_cast<std::size_t>(i)];
      if (i + 1 < m) tri(i, i + 1) = tri(i + 1, i) = beta[static_cast<std::size_t>(i)];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
    Eigen::VectorXcd phases(m);
    for (int i = 0; i < m; ++i) {
      phases(i) = std::exp(Complex(0.0, -es.eigenvalues()(i) * time));
    }
    Eigen::VectorXcd coeff =
        es.eigenvectors().cast<Complex>() * (phases.array() * es.eigenvectors().row(0).transpose().cast<Complex>().array()).matrix();

    const bool exhausted = b < 1e-13 || m == static_cast<int>(h.dim());
    double delta = std::numeric_limits<double>::infinity();
    if (prev.size() > 0) {
      Eigen::VectorXcd padded = Eigen::VectorXcd::Zero(m);
      padded.head(prev.size()) = prev;
      delta = (coeff - padded).norm();
    }
    if (delta <= tol || exhausted) {
      Eigen::VectorXcd out = Eigen::VectorXcd::Zero(v.size());
      for (int i = 0; i < m; ++i) out += coeff(i) * krylov[static_cast<std::size_t>(i)];
      return norm * out;
    }
    prev = coeff;
    krylov.push_back(w / b);
    beta.push_back(b);
  }
  const Eigen::VectorXcd half = krylov_propagate(h, v, 0.5 * time, tol, max_space, depth + 1);
  return krylov_propagate(h, half, 0.5 * time, tol, max_space, depth + 1);
}

struct GroundState {
  double energy = 0.0;
  // Distance to the first excited level (infinite for a 1x1 problem).
  double gap = std::numeric_limits<double>::infinity();
  bool degenerate = false;
  PureState state;
};

inline GroundState ground_state(const ManyBodyOperator& h, const EigensolveOptions& opts = {}) {
  const int k = h.dim() >= 2 ? 2 : 1;
  EigenResult res = eigensolve(h, k, opts);
  GroundState gs{res.values(0), std::numeric_limits<double>::infinity(), false,
                 PureState(h.basis(), res.vectors.col(0))};
  if (k == 2) {
    gs.gap = res.values(1) - res.values(0);
    gs.degenerate = gs.gap <= 1e-10 * std::max(1.0, h.max_abs());
  }
  return gs;
}

struct SweepPoint {
  double parameter = 0.0;
  Eigen::VectorXd energies;
};

// Evaluate the lowest num_levels energies of build(parameter) across a grid.
// Points are independent, so the loop runs on the worker pool; the output
// order always follows the grid.
template <typename BuildFn>
std::vector<SweepPoint> sweep_spectrum(const std::vector<double>& grid, int num_levels,
                                       BuildFn&& build, const EigensolveOptions& opts = {}) {
  std::vector<SweepPoint> out(grid.size());
  parallel_for(static_cast<std::int64_t>(grid.size()), [&](std::int64_t i) {
    const double x = grid[static_cast<std::size_t>(i)];
    EigenResult res = eigensolve(build(x), num_levels, opts);
    out[static_cast<std::size_t>(i)] = SweepPoint{x, std::move(res.values)};
  });
  return out;
}

struct AntiCrossingOptions {
  int coarse_points = 33;
  // Absolute width of the final parameter bracket.
  double parameter_tol = 1e-9;
};

struct AntiCrossing {
  double parameter = 0.0;
  double gap = 0.0;
  int evaluations = 0;
};

// Locate the minimum of the first excitation gap of build(x) on [lo, hi]: a
// coarse scan brackets the minimum, then a golden-section search refines it.
// Throws BracketError when the coarse minimum sits on the interval edge.
template <typename BuildFn>
AntiCrossing find_anticrossing(double lo, double hi, BuildFn&& build,
                               const AntiCrossingOptions& aopts = {},
                               const EigensolveOptions& eopts = {}) {
  if (!(lo < hi)) throw ConfigError("find_anticrossing: need lo < hi");
  if (aopts.coarse_points < 3) throw ConfigError("find_anticrossing: need at least 3 coarse points");

  int evals = 0;
  auto gap_at = [&](double x) {
    const ManyBodyOperator h = build(x);
    if (h.dim() < 2) throw ConfigError("find_anticrossing: spectrum has a single level");
    ++evals;
    EigenResult res = eigensolve(h, 2, eopts);
    return res.values(1) - res.values(0);
  };

  const int n = aopts.coarse_points;
  std::vector<double> xs(static_cast<std::size_t>(n)), gaps(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    xs[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  }
  parallel_for(n, [&](std::int64_t i) {
    const ManyBodyOperator h = build(xs[static_cast<std::size_t>(i)]);
    if (h.dim() < 2) throw ConfigError("find_anticrossing: spectrum has a single level");
    EigenResult res = eigensolve(h, 2, eopts);
    gaps[static_cast<std::size_t>(i)] = res.values(1) - res.values(0);
  });
  evals += n;

  const auto it = std::min_element(gaps.begin(), gaps.end());
  const int imin = static_cast<int>(it - gaps.begin());
  if (imin == 0 || imin == n - 1) {
    throw BracketError("find_anticrossing: gap minimum lies at the edge of [" +
                       std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }

  double a = xs[static_cast<std::size_t>(imin - 1)];
  double b = xs[static_cast<std::size_t>(imin + 1)];
  const double invphi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = gap_at(c);
  double fd = gap_at(d);
  while (b - a > aopts.parameter_tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = gap_at(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = gap_at(d);
    }
  }
  const double xstar = 0.5 * (a + b);
  return AntiCrossing{xstar, gap_at(xstar), evals};
}

}  // namespace rotometry

#endif  // ROTOMETRY_SPECTRAL_HPP

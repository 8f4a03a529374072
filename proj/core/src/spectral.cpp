#include "treeweave/spectral.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "treeweave/errors.hpp"
#include "treeweave/rng.hpp"

namespace treeweave {

std::vector<double> laplacian_apply(const Graph& g, std::span<const double> x) {
  if (x.size() != g.order()) {
    throw DomainError("laplacian_apply: vector length " + std::to_string(x.size()) +
                      " does not match " + std::to_string(g.order()) + " vertices");
  }
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double acc = static_cast<double>(g.degree(i)) * x[i];
    for (const std::uint32_t nb : g.neighbor_indices(i)) acc -= x[nb];
    y[i] = acc;
  }
  return y;
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void axpy(std::vector<double>& y, double c, std::span<const double> x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += c * x[i];
}

void subtract_mean(std::vector<double>& x) {
  double mean = 0.0;
  for (const double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  for (double& v : x) v -= mean;
}

/// Number of eigenvalues of the symmetric tridiagonal (diag, off) below x,
/// via the Sturm sequence of the LDL^T pivots.
int sturm_count_below(const std::vector<double>& diag, const std::vector<double>& off,
                      double x) {
  int count = 0;
  double d = diag[0] - x;
  if (d < 0) ++count;
  for (std::size_t i = 1; i < diag.size(); ++i) {
    double prev = d;
    if (prev == 0.0) prev = std::numeric_limits<double>::min();
    d = (diag[i] - x) - off[i - 1] * off[i - 1] / prev;
    if (d < 0) ++count;
  }
  return count;
}

/// Solves (T - shift I) y = rhs for a symmetric tridiagonal T by Gaussian
/// elimination with partial pivoting (one extra superdiagonal of fill-in).
bool tridiag_shifted_solve(const std::vector<double>& diag, const std::vector<double>& off,
                           double shift, std::vector<double> rhs, std::vector<double>& y) {
  const std::size_t k = diag.size();
  std::vector<double> d(k), e(k, 0.0), f(k, 0.0), sub(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) d[i] = diag[i] - shift;
  for (std::size_t i = 0; i + 1 < k; ++i) {
    e[i] = off[i];
    sub[i + 1] = off[i];
  }
  for (std::size_t i = 0; i + 1 < k; ++i) {
    if (std::abs(sub[i + 1]) > std::abs(d[i])) {
      std::swap(d[i], sub[i + 1]);
      std::swap(e[i], d[i + 1]);
      if (i + 2 < k) std::swap(f[i], e[i + 1]);
      std::swap(rhs[i], rhs[i + 1]);
    }
    if (d[i] == 0.0) return false;
    const double m = sub[i + 1] / d[i];
    d[i + 1] -= m * e[i];
    if (i + 2 < k) e[i + 1] -= m * f[i];
    rhs[i + 1] -= m * rhs[i];
  }
  if (d[k - 1] == 0.0) return false;
  y.assign(k, 0.0);
  for (std::size_t i = k; i-- > 0;) {
    double acc = rhs[i];
    if (i + 1 < k) acc -= e[i] * y[i + 1];
    if (i + 2 < k) acc -= f[i] * y[i + 2];
    y[i] = acc / d[i];
    if (!std::isfinite(y[i])) return false;
  }
  return true;
}

/// Smallest eigenpair of the symmetric tridiagonal built from the Lanczos
/// coefficients: bisection on the Sturm count, then inverse iteration.
void tridiag_smallest_eigenpair(const std::vector<double>& diag,
                                const std::vector<double>& off, double& theta,
                                std::vector<double>& s) {
  const std::size_t k = diag.size();
  if (k == 1) {
    theta = diag[0];
    s.assign(1, 1.0);
    return;
  }
  double lo = diag[0], hi = diag[0];
  for (std::size_t i = 0; i < k; ++i) {
    const double r = (i > 0 ? std::abs(off[i - 1]) : 0.0) + (i + 1 < k ? std::abs(off[i]) : 0.0);
    lo = std::min(lo, diag[i] - r);
    hi = std::max(hi, diag[i] + r);
  }
  const double scale = std::max({1.0, std::abs(lo), std::abs(hi)});
  while (hi - lo > 1e-15 * scale) {
    const double mid = 0.5 * (lo + hi);
    if (sturm_count_below(diag, off, mid) >= 1) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  theta = 0.5 * (lo + hi);

  std::vector<double> rhs(k, 1.0 / std::sqrt(static_cast<double>(k)));
  double delta = 1e-13 * scale;
  for (int attempt = 0; attempt < 8; ++attempt) {
    std::vector<double> y;
    if (tridiag_shifted_solve(diag, off, theta + delta, rhs, y)) {
      const double ny = norm(y);
      if (ny > 0.0 && std::isfinite(ny)) {
        for (double& v : y) v /= ny;
        std::vector<double> z;
        if (tridiag_shifted_solve(diag, off, theta + delta, y, z)) {
          const double nz = norm(z);
          if (nz > 0.0 && std::isfinite(nz)) {
            for (double& v : z) v /= nz;
            s = std::move(z);
            return;
          }
        }
        s = std::move(y);
        return;
      }
    }
    delta *= 16.0;
  }
  // Last resort: uniform vector; the residual check catches inaccuracy.
  s = rhs;
}

std::vector<double> deterministic_start(const Graph& g) {
  const std::size_t n = g.order();
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t h =
        mix64((static_cast<std::uint64_t>(g.ids()[i]) << 32) ^ static_cast<std::uint64_t>(i));
    v[i] = static_cast<double>(h >> 11) * 0x1.0p-52 - 1.0;  // [-1, 1)
  }
  return v;
}

}  // namespace

SpectralReport lambda2(const Graph& g, double tol) {
  if (!(tol > 0.0) || tol > 1e-2) {
    throw DomainError("lambda2 tolerance must lie in (0, 1e-2]");
  }
  const std::size_t n = g.order();
  if (n < 2) {
    throw DomainError("lambda2 needs at least 2 vertices");
  }
  if (g.connected_components().size() > 1) {
    return SpectralReport{0.0, 0, 0.0, false};
  }

  std::vector<double> v = deterministic_start(g);
  subtract_mean(v);
  double nv = norm(v);
  if (nv < 1e-12) {
    // Hash start degenerated; fall back to a fixed non-constant vector.
    std::fill(v.begin(), v.end(), -1.0);
    v[0] = static_cast<double>(n) - 1.0;
    subtract_mean(v);
    nv = norm(v);
  }
  for (double& x : v) x /= nv;

  std::vector<std::vector<double>> basis;
  basis.push_back(std::move(v));
  std::vector<double> alpha, beta;

  const std::size_t budget = 50 * n;
  const std::size_t kmax = std::min(n - 1, budget);
  double best_residual = std::numeric_limits<double>::infinity();
  std::size_t iterations = 0;

  const auto materialize_residual = [&](const std::vector<double>& s, double theta,
                                        double& out_residual) {
    std::vector<double> x(n, 0.0);
    for (std::size_t j = 0; j < s.size(); ++j) axpy(x, s[j], basis[j]);
    const double nx = norm(x);
    if (nx == 0.0) {
      out_residual = std::numeric_limits<double>::infinity();
      return;
    }
    for (double& e : x) e /= nx;
    std::vector<double> lx = laplacian_apply(g, x);
    axpy(lx, -theta, x);
    out_residual = norm(lx);
  };

  for (std::size_t k = 0; k < kmax; ++k) {
    std::vector<double> w = laplacian_apply(g, basis[k]);
    ++iterations;
    if (k > 0) axpy(w, -beta[k - 1], basis[k - 1]);
    const double a = dot(basis[k], w);
    alpha.push_back(a);
    axpy(w, -a, basis[k]);
    // Deflation of the kernel plus full reorthogonalization keeps the whole
    // basis orthogonal to the all-ones vector.
    subtract_mean(w);
    for (std::size_t j = 0; j <= k; ++j) axpy(w, -dot(basis[j], w), basis[j]);
    const double b = norm(w);

#ifndef NDEBUG
    {
      double drift = 0.0;
      for (const double e : w) drift += e;
      assert(std::abs(drift) <= 1e-6 * std::max(1.0, b) * static_cast<double>(n));
    }
#endif

    double theta = 0.0;
    std::vector<double> s;
    tridiag_smallest_eigenpair(alpha, beta, theta, s);
    const double estimate = std::abs(b * s.back());
    const bool exhausted = b < 1e-13;

    if (estimate <= tol * std::max(1.0, theta) || exhausted || k + 1 == kmax) {
      double residual = 0.0;
      materialize_residual(s, theta, residual);
      best_residual = std::min(best_residual, residual);
      if (residual <= tol * std::max(1.0, theta)) {
        return SpectralReport{theta, iterations, residual, true};
      }
      if (exhausted || k + 1 == kmax) {
        throw SolverError("lambda2 did not reach tolerance " + std::to_string(tol) +
                              " within " + std::to_string(iterations) + " iterations",
                          best_residual);
      }
    }
    beta.push_back(b);
    std::vector<double> next = std::move(w);
    for (double& e : next) e /= b;
    basis.push_back(std::move(next));
  }
  throw SolverError("lambda2 iteration budget exhausted", best_residual);
}

double lambda2_dense(const Graph& g) {
  const std::size_t n = g.order();
  if (n > 64) {
    throw CapacityError("dense eigensolver is capped at 64 vertices");
  }
  if (n < 2) {
    throw DomainError("lambda2_dense needs at least 2 vertices");
  }

  std::vector<double> a(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    a[i * n + i] = static_cast<double>(g.degree(i));
    for (const std::uint32_t nb : g.neighbor_indices(i)) a[i * n + nb] = -1.0;
  }

  // Cyclic Jacobi sweeps.
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) off += a[p * n + q] * a[p * n + q];
    }
    if (off < 1e-26 * static_cast<double>(n * n)) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (std::abs(apq) < 1e-300) continue;
        const double app = a[p * n + p];
        const double aqq = a[q * n + q];
        const double tau = (aqq - app) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t i = 0; i < n; ++i) {
          const double aip = a[i * n + p];
          const double aiq = a[i * n + q];
          a[i * n + p] = c * aip - s * aiq;
          a[i * n + q] = s * aip + c * aiq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double api = a[p * n + i];
          const double aqi = a[q * n + i];
          a[p * n + i] = c * api - s * aqi;
          a[q * n + i] = s * api + c * aqi;
        }
      }
    }
  }

  std::vector<double> eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = a[i * n + i];
  std::sort(eig.begin(), eig.end());
  return eig[1];
}

}  // namespace treeweave

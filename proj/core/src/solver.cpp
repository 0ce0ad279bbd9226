#include "lexmarket/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <random>
#include <stdexcept>
#include <thread>

namespace lexmarket {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using DMat = std::vector<std::vector<double>>;

// Shortest-augmenting-path assignment: matches every row (rows <= cols) to a
// distinct column minimizing total cost. Returns the minimum; fills row_to_col.
double lap_min(const DMat& cost, std::vector<int>& row_to_col) {
  int n = static_cast<int>(cost.size());
  int m = n == 0 ? 0 : static_cast<int>(cost[0].size());
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, kInf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      int i0 = p[j0], j1 = -1;
      double delta = kInf;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  row_to_col.assign(static_cast<std::size_t>(n), -1);
  double total = 0.0;
  for (int j = 1; j <= m; ++j) {
    if (p[j] == 0) continue;
    row_to_col[static_cast<std::size_t>(p[j] - 1)] = j - 1;
    total += cost[p[j] - 1][j - 1];
  }
  return total;
}

// Maximum-weight perfect matching value and permutation for a square matrix.
double max_matching(const DMat& w, std::vector<int>& perm) {
  std::size_t n = w.size();
  DMat cost(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) cost[i][j] = -w[i][j];
  return -lap_min(cost, perm);
}

// Welfare gain from doubling the capacity of one good: the price probe.
std::vector<double> vcg_prices_double(const DMat& w) {
  std::size_t n = w.size();
  std::vector<int> perm;
  double base = max_matching(w, perm);
  std::vector<double> prices(n, 0.0);
  for (std::size_t l = 0; l < n; ++l) {
    DMat cost(n, std::vector<double>(n + 1));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) cost[i][j] = -w[i][j];
      cost[i][n] = -w[i][l];
    }
    std::vector<int> rc;
    double probe = -lap_min(cost, rc);
    prices[l] = std::max(0.0, probe - base);
  }
  return prices;
}

struct AfwState {
  std::vector<std::vector<int>> perms;
  std::vector<double> weights;
  DMat x;
};

DMat matrix_from_state(const AfwState& st, std::size_t n) {
  DMat x(n, std::vector<double>(n, 0.0));
  for (std::size_t k = 0; k < st.perms.size(); ++k)
    for (std::size_t i = 0; i < n; ++i)
      x[i][static_cast<std::size_t>(st.perms[k][i])] += st.weights[k];
  return x;
}

// Away-step conditional gradient for max sum_i lambda_i u_i.x_i - delta|x|^2
// over doubly stochastic matrices, to a duality-gap tolerance.
void afw_solve(const DMat& u, const std::vector<double>& lambda, double delta, double gap_tol,
               AfwState& st, unsigned max_steps = 2000) {
  std::size_t n = u.size();
  DMat grad(n, std::vector<double>(n));
  if (st.perms.empty()) {
    DMat w(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) w[i][j] = lambda[i] * u[i][j];
    std::vector<int> perm;
    max_matching(w, perm);
    st.perms.push_back(perm);
    st.weights.assign(1, 1.0);
    st.x = matrix_from_state(st, n);
  }
  auto inner = [&](const DMat& a, const std::vector<int>& perm) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i][static_cast<std::size_t>(perm[i])];
    return s;
  };
  for (unsigned step = 0; step < max_steps; ++step) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        grad[i][j] = lambda[i] * u[i][j] - 2.0 * delta * st.x[i][j];
    std::vector<int> fw;
    max_matching(grad, fw);
    double g_fw = inner(grad, fw);
    double g_x = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) g_x += grad[i][j] * st.x[i][j];
    double gap = g_fw - g_x;
    if (gap <= gap_tol) return;
    // away vertex: worst active permutation under the gradient
    std::size_t away = 0;
    double g_away = kInf;
    for (std::size_t k = 0; k < st.perms.size(); ++k) {
      double val = inner(grad, st.perms[k]);
      if (val < g_away) {
        g_away = val;
        away = k;
      }
    }
    bool use_fw = gap >= g_x - g_away;
    // direction d and maximal step
    DMat dir(n, std::vector<double>(n, 0.0));
    double gamma_max;
    if (use_fw) {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) dir[i][j] = -st.x[i][j];
        dir[i][static_cast<std::size_t>(fw[i])] += 1.0;
      }
      gamma_max = 1.0;
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) dir[i][j] = st.x[i][j];
        dir[i][static_cast<std::size_t>(st.perms[away][i])] -= 1.0;
      }
      double wA = st.weights[away];
      if (wA >= 1.0 - 1e-15) return;  // single-vertex state cannot move away
      gamma_max = wA / (1.0 - wA);
    }
    double gd = 0.0, dd = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        gd += grad[i][j] * dir[i][j];
        dd += dir[i][j] * dir[i][j];
      }
    if (gd <= 0.0 || dd <= 0.0) return;
    double gamma = delta > 0.0 ? gd / (2.0 * delta * dd) : gamma_max;
    gamma = std::min(gamma, gamma_max);
    if (gamma <= 0.0) return;
    if (use_fw) {
      for (double& wk : st.weights) wk *= (1.0 - gamma);
      bool found = false;
      for (std::size_t k = 0; k < st.perms.size(); ++k)
        if (st.perms[k] == fw) {
          st.weights[k] += gamma;
          found = true;
          break;
        }
      if (!found) {
        st.perms.push_back(fw);
        st.weights.push_back(gamma);
      }
    } else {
      for (double& wk : st.weights) wk *= (1.0 + gamma);
      st.weights[away] -= gamma;
    }
    for (std::size_t k = st.perms.size(); k-- > 0;) {
      if (st.weights[k] <= 1e-14) {
        st.perms.erase(st.perms.begin() + static_cast<long>(k));
        st.weights.erase(st.weights.begin() + static_cast<long>(k));
      }
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) st.x[i][j] += gamma * dir[i][j];
    if ((step & 63u) == 63u) st.x = matrix_from_state(st, n);  // drift control
  }
}

// Best utility over {y >= 0, sum y <= 1, p.y <= b}: optimal vertices use at
// most two goods (one tight constraint each), enumerated in closed form.
double budget_demand_double(const std::vector<double>& u, const std::vector<double>& p,
                            double b) {
  std::size_t n = u.size();
  double best = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double amount = 1.0;
    if (p[j] > 0.0) amount = std::min(1.0, b / p[j]);
    if (amount < 0.0) amount = 0.0;
    best = std::max(best, u[j] * amount);
  }
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) {
      if (j == k || p[j] == p[k]) continue;
      double yj = (b - p[k]) / (p[j] - p[k]);
      if (yj < 0.0 || yj > 1.0) continue;
      best = std::max(best, u[j] * yj + u[k] * (1.0 - yj));
    }
  return best;
}

struct RestartOutcome {
  bool converged = false;
  double residual = kInf;
  unsigned iterations = 0;
  std::vector<double> lambda;
  DMat x;
  std::vector<double> prices;
  double dividend = 0.0;
};

double multiplier_cap(const DMat& u) {
  double gap = kInf;
  for (const auto& row : u) {
    std::vector<double> vals(row);
    vals.push_back(0.0);
    std::sort(vals.begin(), vals.end());
    for (std::size_t a = 0; a + 1 < vals.size(); ++a) {
      double d = vals[a + 1] - vals[a];
      if (d > 1e-12) gap = std::min(gap, d);
    }
  }
  if (!std::isfinite(gap)) gap = 1.0;
  return std::clamp(2.0 / gap, 4.0, 1e9);
}

// Regularized least squares for the Anderson mixing coefficients: solves
// (D^T D + tau I) g = D^T r for a handful of history columns.
std::vector<double> anderson_coeffs(const std::vector<std::vector<double>>& dres,
                                    const std::vector<double>& r) {
  std::size_t m = dres.size();
  std::vector<std::vector<double>> a(m, std::vector<double>(m + 1, 0.0));
  double trace = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t k = 0; k < m; ++k)
      for (std::size_t i = 0; i < r.size(); ++i) a[j][k] += dres[j][i] * dres[k][i];
    trace += a[j][j];
    for (std::size_t i = 0; i < r.size(); ++i) a[j][m] += dres[j][i] * r[i];
  }
  double tau = 1e-12 * trace + 1e-300;
  for (std::size_t j = 0; j < m; ++j) a[j][j] += tau;
  for (std::size_t c = 0; c < m; ++c) {  // partial-pivot elimination
    std::size_t piv = c;
    for (std::size_t rr = c + 1; rr < m; ++rr)
      if (std::abs(a[rr][c]) > std::abs(a[piv][c])) piv = rr;
    std::swap(a[c], a[piv]);
    if (std::abs(a[c][c]) < 1e-300) return {};
    for (std::size_t rr = c + 1; rr < m; ++rr) {
      double f = a[rr][c] / a[c][c];
      for (std::size_t k = c; k <= m; ++k) a[rr][k] -= f * a[c][k];
    }
  }
  std::vector<double> g(m, 0.0);
  for (std::size_t c = m; c-- > 0;) {
    double s = a[c][m];
    for (std::size_t k = c + 1; k < m; ++k) s -= a[c][k] * g[k];
    g[c] = s / a[c][c];
  }
  return g;
}

RestartOutcome run_restart(const DMat& u, const DMat& omega, double eps_floor, double delta,
                           const SolverParams& params, const std::vector<double>& lambda0) {
  std::size_t n = u.size();
  double bar = multiplier_cap(u);
  std::vector<double> lambda = lambda0;
  for (double& v : lambda) v = std::clamp(v, eps_floor, bar);
  AfwState st;
  RestartOutcome best;
  // The damped update can settle into a limit cycle when the step is too
  // aggressive for the local geometry; halving the step whenever the best
  // residual stops improving walks it down until the cycle collapses.
  double damp = params.damping;
  unsigned since_best = 0;
  // The map is stiff: agents tied on a good see feedback of order 1/delta, so
  // the stable step size shrinks with delta while untied directions then crawl.
  // Anderson extrapolation over a short residual history accelerates the slow
  // directions; a safeguard drops the history whenever a proposal regresses.
  constexpr std::size_t kAaDepth = 4;
  std::vector<std::vector<double>> hist_lam, hist_res;
  std::vector<double> aa_fallback;
  unsigned aa_cooldown = 0;
  bool last_aa = false;
  double last_aa_res = kInf;
  // The allocation solve must be far more accurate than the multiplier
  // residual we aim for, or its noise dominates the map: a duality gap g
  // permits the allocation to be off by sqrt(g/delta). The conditional
  // gradient's exact line search lands on the optimal face exactly once the
  // active set settles, so a tight tolerance costs little with a warm state.
  const double gap_tol = std::max(1e-15, delta * 1e-12);
  for (unsigned it = 0; it < params.max_iters; ++it) {
    afw_solve(u, lambda, delta, gap_tol, st);
    const DMat& x = st.x;
    DMat w(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) w[i][j] = lambda[i] * u[i][j];
    std::vector<double> p = vcg_prices_double(w);
    double psum = 0.0;
    for (double v : p) psum += v;
    double alpha = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double spend = 0.0, income = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        spend += p[j] * x[i][j];
        income += p[j] * omega[i][j];
      }
      alpha = std::max(alpha, spend - income);
    }
    double denom = params.eta + (1.0 - params.eta) * psum;
    std::vector<double> phi(n), rvec(n);
    double residual = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double income = 0.0, have = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        income += p[j] * omega[i][j];
        have += u[i][j] * x[i][j];
      }
      double target = budget_demand_double(u[i], p, income + alpha);
      double gain = std::clamp(target - have, 0.0, 1.0);
      phi[i] = std::clamp((lambda[i] + gain) / denom, eps_floor, bar);
      rvec[i] = phi[i] - lambda[i];
      residual = std::max(residual, std::abs(rvec[i]));
    }
    if (it == 0 && residual < 0.1) {
      // A start that already evaluates nearly converged sits on (or near) the
      // tie manifold, where the feedback has slope of order 1/delta: a plain
      // step must not carry it further than the O(delta) band around the ties
      // or the iteration degenerates into an oscillation it then has to anneal
      // its way out of. Size the step so the first move stays inside the band.
      damp = std::clamp(delta / residual, 1e-6, damp);
    }
    if (last_aa && (residual > 2.0 * last_aa_res || residual > 100.0 * best.residual)) {
      // The extrapolation regressed (or wandered above the best point found):
      // discard it, resume from the plain damped step it displaced, and pause
      // extrapolating while the history refills.
      lambda = aa_fallback;
      hist_lam.clear();
      hist_res.clear();
      aa_cooldown = 20;
      last_aa = false;
      continue;
    }
    last_aa = false;
    if (residual < best.residual) {
      best.residual = residual;
      best.iterations = it + 1;
      best.lambda = lambda;
      best.x = x;
      best.prices = p;
      best.dividend = alpha;
      since_best = 0;
    } else if (++since_best >= 150) {
      damp = std::max(damp * 0.5, 1.0 / 4096.0);
      since_best = 0;
    }
    if (residual <= params.residual_tol) {
      best.converged = true;
      return best;
    }
    hist_lam.push_back(lambda);
    hist_res.push_back(rvec);
    if (hist_lam.size() > kAaDepth + 1) {
      hist_lam.erase(hist_lam.begin());
      hist_res.erase(hist_res.begin());
    }
    for (std::size_t i = 0; i < n; ++i)
      lambda[i] = (1.0 - damp) * lambda[i] + damp * phi[i];
    if (aa_cooldown > 0) {
      --aa_cooldown;
    } else if (hist_lam.size() >= 2) {
      std::size_t m = hist_lam.size() - 1;
      std::vector<std::vector<double>> dlam(m, std::vector<double>(n)),
          dres(m, std::vector<double>(n));
      for (std::size_t j = 0; j < m; ++j)
        for (std::size_t i = 0; i < n; ++i) {
          dlam[j][i] = hist_lam[j + 1][i] - hist_lam[j][i];
          dres[j][i] = hist_res[j + 1][i] - hist_res[j][i];
        }
      std::vector<double> g = anderson_coeffs(dres, rvec);
      if (!g.empty()) {
        double gmax = 0.0;
        for (double v : g) gmax = std::max(gmax, std::abs(v));
        if (gmax > 20.0)  // near-collinear history: temper the extrapolation
          for (double& v : g) v *= 20.0 / gmax;
        aa_fallback = lambda;
        const std::vector<double>& base = hist_lam.back();
        for (std::size_t i = 0; i < n; ++i) {
          double v = base[i] + damp * rvec[i];
          for (std::size_t j = 0; j < m; ++j) v -= g[j] * (dlam[j][i] + damp * dres[j][i]);
          lambda[i] = std::clamp(v, eps_floor, bar);
        }
        last_aa = true;
        last_aa_res = residual;
      }
    }
  }
  // The regularization biases the snapshot by O(delta) regardless of how
  // exactly the multiplier equations are met, so a residual at that scale is
  // as converged as the sample can meaningfully be.
  best.converged = best.residual <= std::max(params.residual_tol, delta);
  return best;
}

// Snaps a noisy double to the rational it most plausibly rounds from. A
// perturbation of size `tol` can only distinguish denominators up to about
// sqrt(1/tol) (neighboring fractions with denominator q sit ~1/q^2 apart),
// so restrict the best-approximation cap accordingly and take the nearest.
Rat snap_rational(double v, double tol, long cap) {
  if (!std::isfinite(v)) return Rat(0);
  if (std::abs(v) <= tol) return Rat(0);
  long eff = cap;
  if (tol > 0.0) {
    double c = std::sqrt(1.0 / tol);
    if (c < static_cast<double>(cap)) eff = std::max(4L, static_cast<long>(c));
  }
  return rationalize(v, eff);
}

RatVec snap_vec(const std::vector<double>& v, double tol, long cap) {
  RatVec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = snap_rational(v[i], tol, cap);
  return out;
}

// Exact affine projection onto {row sums = 1, column sums = 1}.
void project_doubly_stochastic(RatMat& x) {
  std::size_t n = x.size();
  RatVec r(n, Rat(0)), c(n, Rat(0));
  Rat s = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) r[i] += x[i][j];
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) c[j] += x[i][j];
  for (std::size_t i = 0; i < n; ++i) {
    r[i] -= 1;
    s += r[i];
  }
  for (std::size_t j = 0; j < n; ++j) c[j] -= 1;
  Rat nn(static_cast<unsigned long>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) x[i][j] += -r[i] / nn - c[j] / nn + s / (nn * nn);
}

double richardson_tail(const std::vector<double>& f) {
  std::size_t T = f.size();
  if (T == 0) return 0.0;
  if (T == 1) return f[0];
  if (T == 2) return 2.0 * f[1] - f[0];
  double a_last = 2.0 * f[T - 1] - f[T - 2];
  double a_prev = 2.0 * f[T - 2] - f[T - 3];
  return (4.0 * a_last - a_prev) / 3.0;
}

}  // namespace

unsigned resolve_threads(const SolverParams& params) {
  unsigned base = params.threads > 0 ? params.threads : std::thread::hardware_concurrency();
  if (base == 0) base = 1;
  if (const char* env = std::getenv("LEXMARKET_THREADS")) {
    char* end = nullptr;
    long cap = std::strtol(env, &end, 10);
    if (end != env && cap > 0) base = std::min<unsigned>(base, static_cast<unsigned>(cap));
  }
  return std::max(1u, base);
}

DividendEquilibrium solve_dividend_equilibrium(const Economy& e, double eps_floor, double delta,
                                               const SolverParams& params,
                                               const std::vector<double>* warm) {
  std::size_t n = e.n();
  DMat u(n, std::vector<double>(n)), omega(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      u[i][j] = rat_to_double(e.u[i][j]);
      omega[i][j] = rat_to_double(e.omega[i][j]);
    }
  double bar = multiplier_cap(u);

  unsigned R = std::max(1u, params.restarts);
  std::vector<std::vector<double>> inits(R);
  for (unsigned r = 0; r < R; ++r) {
    if (r == 0 && warm && warm->size() == n) {
      inits[r] = *warm;
    } else {
      std::mt19937_64 rng(params.rng_seed + r);
      std::uniform_real_distribution<double> dist(eps_floor, std::min(1.0, bar));
      inits[r].resize(n);
      for (std::size_t i = 0; i < n; ++i) inits[r][i] = dist(rng);
    }
  }

  std::vector<RestartOutcome> outcomes(R);
  unsigned workers = std::min<unsigned>(resolve_threads(params), R);
  if (workers <= 1) {
    for (unsigned r = 0; r < R; ++r) {
      outcomes[r] = run_restart(u, omega, eps_floor, delta, params, inits[r]);
      if (outcomes[r].converged) {
        outcomes.resize(r + 1);
        break;
      }
    }
  } else {
    std::vector<std::thread> pool;
    std::size_t next = 0;
    std::mutex mu;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          std::size_t r;
          {
            std::lock_guard<std::mutex> lk(mu);
            if (next >= outcomes.size()) return;
            r = next++;
          }
          outcomes[r] = run_restart(u, omega, eps_floor, delta, params, inits[r]);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  DividendEquilibrium de;
  std::size_t pick = 0;
  bool found = false;
  for (std::size_t r = 0; r < outcomes.size(); ++r) {
    if (outcomes[r].converged) {
      pick = r;
      found = true;
      break;
    }
    if (!found && outcomes[r].residual < outcomes[pick].residual) pick = r;
  }
  const RestartOutcome& o = outcomes[pick];
  de.converged = o.converged;
  de.residual = o.residual;
  de.iterations = o.iterations;
  de.restart_index = static_cast<unsigned>(pick);
  de.lambda = o.lambda;
  de.x = o.x;
  de.prices = o.prices;
  de.dividend = o.dividend;
  if (!de.converged) {
    de.notes.push_back("no fixed point found within budget; best residual " +
                       std::to_string(de.residual));
    return de;
  }

  // Round-trip check: the snapshot should be an exact one-currency
  // equilibrium after rounding. The regularization biases the iterate by
  // O(delta), so snap within that band; prices are scale-free, so normalize
  // by the largest entry before snapping.
  double snap_tol = std::max(3e-6, delta);
  Allocation x;
  x.rows.assign(n, RatVec());
  for (std::size_t i = 0; i < n; ++i)
    x.rows[i] = snap_vec(de.x[i], snap_tol, params.denominator_cap);
  project_doubly_stochastic(x.rows);
  std::vector<double> unit_p = de.prices;
  double pmax = 0.0;
  for (double v : unit_p) pmax = std::max(pmax, std::abs(v));
  if (pmax > 0.0)
    for (double& v : unit_p) v /= pmax;
  LexPriceSystem sys;
  sys.P.assign(1, snap_vec(unit_p, snap_tol, params.denominator_cap));
  sys.alpha = dividends_from(e, x, sys.P);
  VerificationReport rep = verify_lde(e, x, sys);
  de.verified = rep.ok;
  if (!rep.ok)
    for (std::size_t f = 0; f < rep.failures.size() && f < 3; ++f)
      de.notes.push_back("round-trip: " + rep.failures[f].what);
  return de;
}

TierDecomposition tier_decompose(const PriceCurve& curve) {
  TierDecomposition td;
  std::vector<const CurveSample*> tail;
  for (const CurveSample& s : curve)
    if (s.converged) tail.push_back(&s);
  if (tail.size() < 4) {
    td.ambiguous = true;
    td.notes.push_back("need at least 4 converged samples, have " +
                       std::to_string(tail.size()));
    return td;
  }
  std::size_t T = tail.size();
  std::size_t n = tail[0]->prices.size();
  DMat work(T, std::vector<double>(n));
  for (std::size_t t = 0; t < T; ++t) work[t] = tail[t]->prices;

  // Floor for treating a residual price as zero. It must sit above
  // double-precision differencing junk yet below any genuine rate class the
  // grid can still resolve at its finest point (2^-32 when the deepest tier
  // shrinks quadratically), which leaves roughly [1e-13, 2e-10].
  double overall = 0.0;
  for (double v : work[T - 1]) overall = std::max(overall, std::abs(v));
  double noise = 1e-11 * (1.0 + overall);

  auto fitted_slope = [&](std::size_t j) {
    // average halving exponent over the last few consecutive sample pairs
    double acc = 0.0;
    int cnt = 0;
    std::size_t first = T >= 4 ? T - 4 : 0;
    for (std::size_t t = first; t + 1 < T; ++t) {
      double a = std::abs(work[t][j]), b = std::abs(work[t + 1][j]);
      if (a <= noise || b <= noise) return kInf;
      acc += std::log2(a / b);
      ++cnt;
    }
    return cnt > 0 ? acc / cnt : kInf;
  };

  constexpr double kWindow = 0.25;
  constexpr double kMargin = 0.02;
  constexpr double kRatioLo = 1e-2, kRatioHi = 1e2;

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t rep = 0;
    double mag = -1.0;
    for (std::size_t j = 0; j < n; ++j)
      if (std::abs(work[T - 1][j]) > mag) {
        mag = std::abs(work[T - 1][j]);
        rep = j;
      }
    if (mag <= noise) break;
    double slope_rep = fitted_slope(rep);
    std::vector<std::size_t> members;
    for (std::size_t j = 0; j < n; ++j) {
      if (std::abs(work[T - 1][j]) <= noise) continue;
      double dslope = std::abs(fitted_slope(j) - slope_rep);
      double ratio = std::abs(work[T - 1][j]) / mag;
      bool in_tier = dslope < kWindow && ratio >= kRatioLo && ratio <= kRatioHi;
      if (std::isfinite(dslope) && std::abs(dslope - kWindow) < kMargin) {
        td.ambiguous = true;
        td.notes.push_back("tier classification ambiguous for good " + std::to_string(j) +
                           " at tier " + std::to_string(k + 1));
      }
      if (in_tier) members.push_back(j);
    }
    RatVec row(n, Rat(0));
    std::vector<double> drow(n, 0.0);
    for (std::size_t j : members) {
      if (j == rep) {
        row[j] = 1;
        drow[j] = 1.0;
        continue;
      }
      std::vector<double> f;
      std::size_t first = T >= 3 ? T - 3 : 0;
      for (std::size_t t = first; t < T; ++t) f.push_back(work[t][j] / work[t][rep]);
      double lim = richardson_tail(f);
      // Snap within the observed sample scatter: the exact ratio is a rational
      // constant, and the scatter bounds how precisely the data pins it down.
      double spread = *std::max_element(f.begin(), f.end()) - *std::min_element(f.begin(), f.end());
      double tol = std::clamp(2.0 * spread, 1e-7, 0.05);
      row[j] = snap_rational(lim, tol, 1000000);
      drow[j] = rat_to_double(row[j]);
    }
    std::vector<double> scale(T);
    for (std::size_t t = 0; t < T; ++t) scale[t] = std::abs(work[t][rep]);
    for (std::size_t t = 0; t < T; ++t)
      for (std::size_t j : members) work[t][j] -= scale[t] * drow[j];
    td.representatives.push_back(rep);
    td.rows.push_back(std::move(row));
    td.scales.push_back(std::move(scale));
    ++td.tier_count;
  }

  // Surplus index: first tier whose scale the redistribution surplus matches,
  // i.e. the first k where surplus / scale_k has a positive (possibly
  // infinite) limit. A ratio still decaying at a fractional halving rate has
  // not matched yet, so classification goes by the fitted halving exponent:
  // near-zero or negative exponent = matched, clearly positive = still above.
  td.surplus_index = td.tier_count;
  for (std::size_t k = 0; k < td.tier_count; ++k) {
    std::vector<double> g(T);
    for (std::size_t t = 0; t < T; ++t) {
      double psum = 0.0;
      for (double v : tail[t]->prices) psum += v;
      double surplus = tail[t]->eps / static_cast<double>(n) * psum + tail[t]->dividend;
      g[t] = td.scales[k][t] > 0.0 ? surplus / td.scales[k][t] : kInf;
    }
    double acc = 0.0;
    int cnt = 0;
    std::size_t first = T >= 4 ? T - 4 : 0;
    for (std::size_t t = first; t + 1 < T; ++t) {
      if (!(g[t] > 0.0) || !(g[t + 1] > 0.0) || !std::isfinite(g[t]) || !std::isfinite(g[t + 1])) {
        cnt = 0;
        break;
      }
      acc += std::log2(g[t] / g[t + 1]);
      ++cnt;
    }
    bool positive = g[T - 1] >= 1e-4 && cnt > 0 && acc / cnt < kWindow;
    if (positive) {
      td.surplus_index = k + 1;
      break;
    }
  }
  td.d = std::min(td.tier_count, td.surplus_index);
  return td;
}

ExtractResult extract_lde(const Economy& e, const SolverParams& params) {
  std::size_t n = e.n();
  ExtractResult res;
  std::vector<double> warm, warm_prev;
  double warm_eps = 0.0, warm_prev_eps = 0.0;
  for (int t = params.grid_min; t <= params.grid_max; ++t) {
    Rat eps_rat(1, 1L << t);
    Economy et = perturb(e, eps_rat);
    double eps = rat_to_double(eps_rat);
    // The fixed point moves linearly in eps while the regularization band
    // narrows quadratically, so seed each refinement with the multipliers
    // extrapolated linearly in eps from the last two solved grid points.
    std::vector<double> seed = warm;
    if (warm_prev.size() == warm.size() && warm_prev_eps > warm_eps) {
      double f = (warm_eps - eps) / (warm_prev_eps - warm_eps);
      for (std::size_t i = 0; i < seed.size(); ++i)
        seed[i] = warm[i] + f * (warm[i] - warm_prev[i]);
    }
    DividendEquilibrium de = solve_dividend_equilibrium(
        et, eps, eps * eps, params, seed.empty() ? nullptr : &seed);
    CurveSample s;
    s.t = t;
    s.eps = eps;
    s.prices = de.prices;
    s.dividend = de.dividend;
    s.x = de.x;
    s.converged = de.converged;
    res.curve.push_back(std::move(s));
    if (de.converged) {
      warm_prev = warm;
      warm_prev_eps = warm_eps;
      warm = de.lambda;
      warm_eps = eps;
    }
    for (const std::string& note : de.notes)
      res.notes.push_back("eps 2^-" + std::to_string(t) + ": " + note);
  }

  res.tiers = tier_decompose(res.curve);
  for (const std::string& note : res.tiers.notes) res.notes.push_back(note);

  // Allocation limit across the converged tail.
  std::vector<const CurveSample*> tail;
  for (const CurveSample& s : res.curve)
    if (s.converged) tail.push_back(&s);
  if (tail.size() < 3) {
    res.notes.push_back("too few converged grid points to extrapolate the allocation");
    return res;
  }
  res.x.rows.assign(n, RatVec(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<double> f;
      std::size_t first = tail.size() >= 3 ? tail.size() - 3 : 0;
      for (std::size_t t = first; t < tail.size(); ++t) f.push_back(tail[t]->x[i][j]);
      double lim = richardson_tail(f);
      double spread =
          *std::max_element(f.begin(), f.end()) - *std::min_element(f.begin(), f.end());
      double tol = std::clamp(2.0 * spread, 1e-5, 0.05);
      res.x.rows[i][j] = snap_rational(lim, tol, params.denominator_cap);
    }
  project_doubly_stochastic(res.x.rows);

  res.system.P.assign(res.tiers.d, RatVec());
  for (std::size_t k = 0; k < res.tiers.d; ++k) res.system.P[k] = res.tiers.rows[k];
  if (res.system.P.empty()) res.system.P.assign(1, RatVec(n, Rat(0)));
  res.system.alpha = dividends_from(e, res.x, res.system.P);

  res.verification = verify_lde(e, res.x, res.system);
  res.strong = check_strong_cbp(e, res.x, res.system);
  res.ok = res.verification.ok && res.strong.ok;
  if (!res.verification.ok)
    for (const auto& f : res.verification.failures) res.notes.push_back("verify: " + f.what);
  if (!res.strong.ok)
    for (const auto& f : res.strong.failures) res.notes.push_back("strong: " + f.what);
  return res;
}

}  // namespace lexmarket

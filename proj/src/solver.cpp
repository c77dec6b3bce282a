#include "rice/solver.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <random>
#include <stdexcept>

#include "rice/parallel.hpp"

namespace rice {

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::gradient: return "gradient";
    case Termination::objective_change: return "objective-change";
    case Termination::max_iterations: return "max-iter";
    case Termination::line_search_failed: return "line-search-failed";
  }
  return "unknown";
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

struct Pair {
  std::vector<double> s, y;
  double rho;
};

// Minimizes phi(y) = -scale * f(D y) over the scaled box.
class ScaledRun {
 public:
  ScaledRun(const Objective& f, std::span<const double> lower, std::span<const double> upper,
            const SolveOptions& opts, double scale)
      : f_(f), lo_(lower), hi_(upper), opts_(opts), scale_(scale), n_(lower.size()),
        d_(opts.variable_scale.empty() ? std::vector<double>(n_, 1.0) : opts.variable_scale),
        ly_(n_), uy_(n_), x_(n_), gx_(n_) {
    for (std::size_t i = 0; i < n_; ++i) {
      ly_[i] = lo_[i] / d_[i];
      uy_[i] = hi_[i] / d_[i];
    }
  }

  SolveReport run(std::span<const double> init) {
    SolveReport rep;
    std::vector<double> y(n_), g(n_);
    for (std::size_t i = 0; i < n_; ++i) y[i] = std::clamp(init[i] / d_[i], ly_[i], uy_[i]);
    double fx;
    double phi = eval(y, g, fx);
    if (!std::isfinite(phi)) throw std::invalid_argument("maximize: objective not finite at start");
    rep.objective_log.push_back(fx);

    std::deque<Pair> mem;
    std::vector<double> d(n_), yt(n_), gt(n_), step(n_);
    std::vector<char> free(n_);
    rep.reason = Termination::max_iterations;
    int it = 0;
    for (; it < opts_.max_iterations; ++it) {
      double pg = 0;
      for (std::size_t i = 0; i < n_; ++i)
        pg = std::max(pg, std::abs(std::clamp(y[i] - g[i], ly_[i], uy_[i]) - y[i]));
      if (pg < opts_.gradient_tolerance) {
        rep.reason = Termination::gradient;
        break;
      }
      for (std::size_t i = 0; i < n_; ++i)
        free[i] = !((y[i] <= ly_[i] && g[i] > 0) || (y[i] >= uy_[i] && g[i] < 0));

      bool accepted = false;
      double phi_new = phi, fx_new = fx;
      for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
        if (attempt == 1) {
          if (mem.empty()) break;
          mem.clear();
        }
        direction(mem, g, free, d);
        double alpha = 1.0;
        if (mem.empty()) {
          double dmax = 0;
          for (double v : d) dmax = std::max(dmax, std::abs(v));
          if (dmax > 0) alpha = std::min(1.0, 1.0 / dmax);
        }
        for (int k = 0; k < opts_.max_backtracks; ++k, alpha *= opts_.backtrack) {
          bool moved = false;
          for (std::size_t i = 0; i < n_; ++i) {
            yt[i] = std::clamp(y[i] + alpha * d[i], ly_[i], uy_[i]);
            step[i] = yt[i] - y[i];
            moved |= step[i] != 0;
          }
          if (!moved) break;
          const double decrease = dot(g, step);
          const double trial = eval(yt, gt, fx_new);
          if (std::isfinite(trial) && trial <= phi + opts_.armijo * decrease && trial <= phi) {
            phi_new = trial;
            accepted = true;
            break;
          }
        }
      }
      if (!accepted) {
        rep.reason = Termination::line_search_failed;
        break;
      }

      Pair p{std::vector<double>(n_), std::vector<double>(n_), 0};
      for (std::size_t i = 0; i < n_; ++i) {
        p.s[i] = yt[i] - y[i];
        p.y[i] = gt[i] - g[i];
      }
      const double sy = dot(p.s, p.y);
      if (sy > 2.2e-16 * dot(p.y, p.y)) {
        p.rho = 1.0 / sy;
        mem.push_back(std::move(p));
        if (static_cast<int>(mem.size()) > opts_.memory) mem.pop_front();
      }
      const double change = std::abs(phi_new - phi) / std::max({std::abs(phi), std::abs(phi_new), 1e-300});
      y.swap(yt);
      g.swap(gt);
      phi = phi_new;
      fx = fx_new;
      rep.objective_log.push_back(fx);
      if (change < opts_.objective_tolerance) {
        ++it;
        rep.reason = Termination::objective_change;
        break;
      }
    }
    rep.iterations = it;
    rep.objective = fx;
    rep.x.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) rep.x[i] = to_x(y, i);
    return rep;
  }

 private:
  double to_x(const std::vector<double>& y, std::size_t i) const {
    return std::clamp(d_[i] * y[i], lo_[i], hi_[i]);
  }

  // Returns phi; fx receives the unscaled objective. Model failures at trial
  // points count as an infinitely bad objective.
  double eval(const std::vector<double>& y, std::vector<double>& g, double& fx) {
    for (std::size_t i = 0; i < n_; ++i) x_[i] = to_x(y, i);
    try {
      fx = f_(x_, gx_);
    } catch (const std::exception&) {
      return std::numeric_limits<double>::infinity();
    }
    for (std::size_t i = 0; i < n_; ++i) g[i] = -scale_ * gx_[i] * d_[i];
    return -scale_ * fx;
  }

  // Two-loop recursion restricted to the free coordinates; falls back to
  // steepest descent when the result is not a descent direction.
  void direction(std::deque<Pair>& mem, const std::vector<double>& g,
                 const std::vector<char>& free, std::vector<double>& d) const {
    std::vector<double> q(n_);
    for (std::size_t i = 0; i < n_; ++i) q[i] = free[i] ? g[i] : 0.0;
    if (!mem.empty()) {
      std::vector<double> a(mem.size());
      for (std::size_t k = mem.size(); k-- > 0;) {
        const auto& p = mem[k];
        double sq = 0;
        for (std::size_t i = 0; i < n_; ++i)
          if (free[i]) sq += p.s[i] * q[i];
        a[k] = p.rho * sq;
        for (std::size_t i = 0; i < n_; ++i)
          if (free[i]) q[i] -= a[k] * p.y[i];
      }
      const auto& last = mem.back();
      const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
      for (double& v : q) v *= gamma;
      for (std::size_t k = 0; k < mem.size(); ++k) {
        const auto& p = mem[k];
        double yr = 0;
        for (std::size_t i = 0; i < n_; ++i)
          if (free[i]) yr += p.y[i] * q[i];
        const double b = p.rho * yr;
        for (std::size_t i = 0; i < n_; ++i)
          if (free[i]) q[i] += p.s[i] * (a[k] - b);
      }
    }
    for (std::size_t i = 0; i < n_; ++i) d[i] = free[i] ? -q[i] : 0.0;
    if (!mem.empty() && !(dot(g, d) < 0)) {
      mem.clear();
      for (std::size_t i = 0; i < n_; ++i) d[i] = free[i] ? -g[i] : 0.0;
    }
  }

  const Objective& f_;
  std::span<const double> lo_, hi_;
  const SolveOptions& opts_;
  double scale_;
  std::size_t n_;
  std::vector<double> d_, ly_, uy_, x_, gx_;
};

std::vector<double> perturbed_start(std::span<const double> init, std::span<const double> lower,
                                    std::span<const double> upper, double amount,
                                    std::uint64_t seed, int index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index)};
  std::mt19937_64 gen(seq);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<double> x(init.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    x[i] = std::clamp(init[i] + amount * (upper[i] - lower[i]) * unit(gen), lower[i], upper[i]);
  return x;
}

}  // namespace

SolveReport maximize(const Objective& f, std::span<const double> lower,
                     std::span<const double> upper, std::span<const double> init,
                     const SolveOptions& opts) {
  const std::size_t n = init.size();
  if (lower.size() != n || upper.size() != n)
    throw std::invalid_argument("maximize: bounds and start differ in length");
  if (!opts.variable_scale.empty() && opts.variable_scale.size() != n)
    throw std::invalid_argument("maximize: variable scale has the wrong length");
  if (opts.multistart < 1 || !(opts.gradient_tolerance > 0) || !(opts.objective_tolerance > 0) ||
      !(opts.multistart_tie >= 0))
    throw std::invalid_argument("maximize: invalid options");
  for (std::size_t i = 0; i < n; ++i)
    if (!(lower[i] <= upper[i])) throw std::invalid_argument("maximize: empty box");

  std::vector<double> x0(n);
  for (std::size_t i = 0; i < n; ++i) x0[i] = std::clamp(init[i], lower[i], upper[i]);
  double scale = 1.0;
  {
    std::vector<double> g(n);
    const double f0 = f(x0, g);
    if (!std::isfinite(f0)) throw std::invalid_argument("maximize: objective not finite at start");
    if (opts.objective_scale) scale = *opts.objective_scale;
    else if (f0 != 0) scale = 1.0 / std::abs(f0);
  }

  std::vector<std::vector<double>> starts{x0};
  for (int k = 1; k < opts.multistart; ++k)
    starts.push_back(perturbed_start(x0, lower, upper, opts.perturbation, opts.seed, k));
  std::vector<SolveReport> runs(starts.size());
  parallel_for(starts.size(), opts.threads, [&](std::size_t k) {
    ScaledRun run(f, lower, upper, opts, scale);
    runs[k] = run.run(starts[k]);
    runs[k].start_index = static_cast<int>(k);
  });
  // A perturbed start has to win by a margin; otherwise it would carry its
  // perturbation in flat coordinates into the answer.
  std::size_t best = 0;
  for (std::size_t k = 1; k < runs.size(); ++k)
    if (runs[k].objective - runs[best].objective >
        opts.multistart_tie * std::abs(runs[best].objective))
      best = k;
  return std::move(runs[best]);
}

FdGradient gradient_fd(const ValueOnly& f, std::span<const double> x, double h,
                       std::span<const double> lower, std::span<const double> upper) {
  const std::size_t n = x.size();
  FdGradient out{std::vector<double>(n), std::vector<char>(n, 0)};
  std::vector<double> p(x.begin(), x.end());
  const double f0 = f(p);
  for (std::size_t i = 0; i < n; ++i) {
    const bool down_ok = lower.empty() || x[i] - h >= lower[i];
    const bool up_ok = upper.empty() || x[i] + h <= upper[i];
    double plus = f0, minus = f0, width = 0;
    if (up_ok) {
      p[i] = x[i] + h;
      plus = f(p);
      width += h;
    }
    if (down_ok) {
      p[i] = x[i] - h;
      minus = f(p);
      width += h;
    }
    p[i] = x[i];
    out.one_sided[i] = !(up_ok && down_ok);
    out.gradient[i] = width > 0 ? (plus - minus) / width : 0.0;
  }
  return out;
}

}  // namespace rice

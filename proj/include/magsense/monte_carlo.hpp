#pragma once

// Monte-Carlo oracle for the transient output spectrum.
//
// Trajectories of the linear Langevin equations are integrated with
// Euler-Maruyama, starting from Gaussian samples of the prepared state. The
// cavity output a_out = sqrt(kappa_a) a - a_in is transformed with the
// exponential window e^{-t/(2 t_m)} (so that int |w|^2 dt = t_m), i.e. a
// Laplace transform at s = 1/(2 t_m) - i omega, and passed through the
// field-referring filter
//
//   H(s) = [(s + km/2)(s + ka/2) + g^2] / (g sqrt(ka)),
//
// which turns the windowed output into sqrt2 eps_B B0 + noise. The
// periodogram |H a_out|^2 / (2 eps^2 t_m) is averaged over the ensemble.
//
// The recursion is linear, so each trajectory is stored as its sampled
// pre-pulse state plus the transform of its noise-driven part; the response
// to the pulse-kicked initial state is added by superposition of the four
// deterministic basis responses. This is exactly the same arithmetic as
// integrating the kicked trajectory directly (see simulate_direct).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "magsense/dynamics.hpp"
#include "magsense/errors.hpp"
#include "magsense/model.hpp"
#include "magsense/series.hpp"
#include "magsense/spectra.hpp"

namespace magsense {

struct MonteCarloOptions {
  std::size_t n_traj = 1000;
  std::uint64_t seed = 0;
  /// dt = min(1/kappa_a, 1/kappa_m, 1/g) / step_divisor.
  double step_divisor = 50.0;
  /// Integration horizon in units of t_m; the window power left beyond it
  /// is e^{-window_span}.
  double window_span = 20.0;
  /// Worker threads; 0 reads MAGNON_SENSE_THREADS, falling back to the
  /// hardware concurrency.
  unsigned threads = 0;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent engine for trajectory `index` of the stream `seed`.
inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t index) {
  const std::uint64_t a = splitmix64(seed ^ 0x6a09e667f3bcc908ULL);
  const std::uint64_t b = splitmix64(a + splitmix64(index));
  std::seed_seq seq{static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                    static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(index)};
  return std::mt19937_64(seq);
}

inline unsigned worker_count(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("MAGNON_SENSE_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

/// Runs body(i) for i in [0, n) on `workers` threads; contiguous chunks.
template <typename Body>
void parallel_for(std::size_t n, unsigned workers, Body&& body) {
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &body] {
      for (std::size_t i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

/// Order-fixed pairwise summation of f(0) + ... + f(n-1).
template <typename T, typename F>
T pairwise_sum(std::size_t lo, std::size_t hi, const F& f) {
  if (hi - lo <= 8) {
    T acc{};
    for (std::size_t i = lo; i < hi; ++i) acc += f(i);
    return acc;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum<T>(lo, mid, f) + pairwise_sum<T>(mid, hi, f);
}

}  // namespace detail

/// Field-referring filter H(s) for the windowed output.
inline Complex output_filter(const SystemParams& p, double omega, double t_m) {
  const Complex s(0.5 / t_m, -omega);
  return ((s + 0.5 * p.kappa_m) * (s + 0.5 * p.kappa_a) + p.g_am * p.g_am) /
         (p.g_am * std::sqrt(p.kappa_a));
}

/// Euler-Maruyama step used for a given parameter set.
inline double monte_carlo_step(const SystemParams& p, double step_divisor) {
  const double slowest = std::min({1.0 / p.kappa_a, 1.0 / p.kappa_m, 1.0 / p.g_am});
  return slowest / step_divisor;
}

class TrajectoryEnsemble {
 public:
  /// Integrates opts.n_traj trajectories for measurement window t_m.
  static TrajectoryEnsemble simulate(const SystemParams& p, double t_m,
                                     const std::vector<double>& grid,
                                     const MonteCarloOptions& opts) {
    validate(p);
    validate_grid(grid);
    if (opts.n_traj < 1) throw DomainError("monte carlo: n_traj must be >= 1");
    if (!(t_m > 0.0)) throw DomainError("monte carlo: t_m must be positive");
    if (!(opts.step_divisor > 0.0) || !(opts.window_span > 0.0)) {
      throw DomainError("monte carlo: step_divisor and window_span must be positive");
    }

    TrajectoryEnsemble e;
    e.params_ = p;
    e.t_m_ = t_m;
    e.grid_ = grid;
    e.dt_ = monte_carlo_step(p, opts.step_divisor);
    e.n_steps_ = static_cast<std::size_t>(std::ceil(opts.window_span * t_m / e.dt_));
    e.n_traj_ = opts.n_traj;

    const Matrix4 a = build_drift(p);
    const Matrix4 step = Matrix4::Identity() + e.dt_ * a;
    const Eigen::EigenSolver<Matrix4> es(step, false);
    if (es.eigenvalues().cwiseAbs().maxCoeff() >= 1.0) {
      throw DomainError(
          "monte carlo: Euler-Maruyama step is unstable for these rates; "
          "use a smaller step (larger step_divisor)");
    }

    const std::size_t nw = grid.size();
    e.filter_.resize(nw);
    for (std::size_t i = 0; i < nw; ++i) e.filter_[i] = output_filter(p, grid[i], t_m);

    e.build_weights();
    e.build_basis(step);

    const CovarianceState prep = prepared_state(p);
    const Eigen::LLT<Matrix4> init_chol(prep.sigma);
    if (init_chol.info() != Eigen::Success) {
      throw DomainError("monte carlo: prepared covariance is not positive definite");
    }
    const Matrix4 init_l = init_chol.matrixL();

    const Matrix4 d = build_diffusion(p, p.bath_squeeze);
    // Input quadrature covariance per unit time for the cavity bath.
    Eigen::Matrix2d cav = d.block<2, 2>(0, 0) / p.kappa_a;
    const Eigen::LLT<Eigen::Matrix2d> cav_chol(cav);
    if (cav_chol.info() != Eigen::Success) {
      throw DomainError("monte carlo: cavity input covariance is not positive definite");
    }
    const Eigen::Matrix2d cav_l = cav_chol.matrixL();
    const double mag_sd = std::sqrt(magnon_occupation(p) + 0.5);

    e.initial_.resize(opts.n_traj);
    e.noise_x_.assign(opts.n_traj * nw, Complex{});
    e.noise_p_.assign(opts.n_traj * nw, Complex{});
    bool diverged = false;

    detail::parallel_for(opts.n_traj, detail::worker_count(opts.threads), [&](std::size_t j) {
      auto rng = detail::substream(opts.seed, j);
      std::normal_distribution<double> normal(0.0, 1.0);
      Vector4 xi;
      for (int k = 0; k < 4; ++k) xi(k) = normal(rng);
      e.initial_[j] = init_l * xi;
      if (!e.integrate_noise(a, cav_l, mag_sd, rng, normal, &e.noise_x_[j * nw],
                             &e.noise_p_[j * nw])) {
        diverged = true;
      }
    });
    if (diverged) {
      throw DomainError("monte carlo: trajectory diverged; use a smaller step");
    }
    return e;
  }

  /// Field-referred filtered output for trajectory j and pulse kick `kick`,
  /// written into `out` (one entry per grid point). The y channel reads the
  /// reflected quadrature -a_p, for which the pulse enters as -sqrt2 eps B_y.
  void estimator(std::size_t j, const PulseKick& kick, Channel c,
                 std::vector<Complex>& out) const {
    const std::size_t nw = grid_.size();
    out.resize(nw);
    const Vector4 x0 = kick.map * initial_[j] + kick.displacement;
    const Complex* noise = (c == Channel::x ? noise_x_.data() : noise_p_.data()) + j * nw;
    const auto& basis = c == Channel::x ? basis_x_ : basis_p_;
    const double sign = c == Channel::x ? 1.0 : -1.0;
    for (std::size_t i = 0; i < nw; ++i) {
      Complex acc = noise[i];
      for (int b = 0; b < 4; ++b) acc += x0(b) * basis[b * nw + i];
      out[i] = sign * filter_[i] * acc;
    }
  }

  /// Ensemble spectrum for `pulse` in channel `c`. `values` is the noise PSD
  /// (ensemble variance of the field-referred periodogram) with its standard
  /// error; components: noise, signal (|ensemble mean|^2), total.
  SpectrumSeries spectrum(const FieldPulse& pulse, Channel c) const {
    const std::size_t nw = grid_.size();
    const std::size_t n = n_traj_;
    const PulseKick kick = pulse_kick(params_, pulse);
    std::vector<Complex> est(n * nw);
    {
      std::vector<Complex> row;
      for (std::size_t j = 0; j < n; ++j) {
        estimator(j, kick, c, row);
        std::copy(row.begin(), row.end(), est.begin() + static_cast<std::ptrdiff_t>(j * nw));
      }
    }
    const double norm = 1.0 / (2.0 * params_.epsilon_b * params_.epsilon_b * t_m_);

    SpectrumSeries s;
    s.omega = grid_;
    s.channel = c;
    s.values.resize(nw);
    s.std_error.resize(nw);
    auto& noise = s.components["noise"];
    auto& signal = s.components["signal"];
    auto& total = s.components["total"];
    noise.resize(nw);
    signal.resize(nw);
    total.resize(nw);
    const double dn = static_cast<double>(n);
    for (std::size_t i = 0; i < nw; ++i) {
      const Complex mean =
          detail::pairwise_sum<Complex>(0, n, [&](std::size_t j) { return est[j * nw + i]; }) / dn;
      const double mean_pow = detail::pairwise_sum<double>(0, n, [&](std::size_t j) {
                                return std::norm(est[j * nw + i]);
                              }) / dn;
      double var = 0.0;
      double se = 0.0;
      if (n > 1) {
        const double m2 = detail::pairwise_sum<double>(0, n, [&](std::size_t j) {
          return std::norm(est[j * nw + i] - mean);
        });
        var = m2 / (dn - 1.0);
        const double m4 = detail::pairwise_sum<double>(0, n, [&](std::size_t j) {
          const double d = std::norm(est[j * nw + i] - mean) - m2 / dn;
          return d * d;
        });
        se = std::sqrt(m4 / (dn - 1.0) / dn);
      }
      noise[i] = norm * var;
      signal[i] = norm * std::norm(mean);
      total[i] = norm * mean_pow;
      s.values[i] = noise[i];
      s.std_error[i] = norm * se;
    }
    return s;
  }

  /// Integrates one trajectory with the kick applied to the initial state
  /// inside the time loop; used to cross-check the superposition.
  std::vector<Complex> simulate_direct(std::size_t j, const FieldPulse& pulse,
                                       Channel c, std::uint64_t seed) const {
    const SystemParams& p = params_;
    const std::size_t nw = grid_.size();
    const Matrix4 a = build_drift(p);
    const Matrix4 d = build_diffusion(p, p.bath_squeeze);
    const Eigen::Matrix2d cav_l = (d.block<2, 2>(0, 0) / p.kappa_a).llt().matrixL();
    const double mag_sd = std::sqrt(magnon_occupation(p) + 0.5);
    auto rng = detail::substream(seed, j);
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector4 xi;
    for (int k = 0; k < 4; ++k) xi(k) = normal(rng);
    const Matrix4 init_l = prepared_state(p).sigma.llt().matrixL();
    const PulseKick kick = pulse_kick(p, pulse);
    Vector4 x = kick.map * (init_l * xi) + kick.displacement;

    std::vector<Complex> tx(nw), tp(nw);
    const double sq_dt = std::sqrt(dt_);
    const double ska = std::sqrt(p.kappa_a);
    const double skm = std::sqrt(p.kappa_m);
    for (std::size_t k = 0; k < n_steps_; ++k) {
      const double n1 = normal(rng);
      const double n2 = normal(rng);
      const Eigen::Vector2d w = sq_dt * (cav_l * Eigen::Vector2d(n1, n2));
      const double wmx = sq_dt * mag_sd * normal(rng);
      const double wmp = sq_dt * mag_sd * normal(rng);
      const double ox = ska * x(kAx) * dt_ - w(0);
      const double op = ska * x(kAp) * dt_ - w(1);
      for (std::size_t i = 0; i < nw; ++i) {
        const Complex z = weight(k, i);
        tx[i] += z * ox;
        tp[i] += z * op;
      }
      Vector4 noise(ska * w(0), ska * w(1), skm * wmx, skm * wmp);
      x += dt_ * (a * x) + noise;
    }
    std::vector<Complex> out(nw);
    for (std::size_t i = 0; i < nw; ++i) {
      out[i] = c == Channel::x ? filter_[i] * tx[i] : -filter_[i] * tp[i];
    }
    return out;
  }

  const SystemParams& params() const { return params_; }
  double measurement_time() const { return t_m_; }
  const std::vector<double>& grid() const { return grid_; }
  double step() const { return dt_; }
  std::size_t steps() const { return n_steps_; }
  std::size_t size() const { return n_traj_; }
  const Vector4& initial_state(std::size_t j) const { return initial_[j]; }

 private:
  Complex weight(std::size_t k, std::size_t i) const {
    if (!weights_.empty()) return weights_[k * grid_.size() + i];
    const Complex s(0.5 / t_m_, -grid_[i]);
    return std::exp(-s * (static_cast<double>(k) * dt_));
  }

  void build_weights() {
    const std::size_t nw = grid_.size();
    if (n_steps_ * nw > (std::size_t{1} << 23)) return;  // fall back to exp()
    weights_.resize(n_steps_ * nw);
    for (std::size_t i = 0; i < nw; ++i) {
      const Complex s(0.5 / t_m_, -grid_[i]);
      for (std::size_t k = 0; k < n_steps_; ++k) {
        weights_[k * nw + i] = std::exp(-s * (static_cast<double>(k) * dt_));
      }
    }
  }

  void build_basis(const Matrix4& step) {
    const std::size_t nw = grid_.size();
    basis_x_.assign(4 * nw, Complex{});
    basis_p_.assign(4 * nw, Complex{});
    const double ska = std::sqrt(params_.kappa_a);
    for (int b = 0; b < 4; ++b) {
      Vector4 y = Vector4::Unit(b);
      for (std::size_t k = 0; k < n_steps_; ++k) {
        const double ox = ska * y(kAx) * dt_;
        const double op = ska * y(kAp) * dt_;
        for (std::size_t i = 0; i < nw; ++i) {
          const Complex z = weight(k, i);
          basis_x_[b * nw + i] += z * ox;
          basis_p_[b * nw + i] += z * op;
        }
        y = step * y;
      }
    }
  }

  bool integrate_noise(const Matrix4& a, const Eigen::Matrix2d& cav_l, double mag_sd,
                       std::mt19937_64& rng, std::normal_distribution<double>& normal,
                       Complex* tx, Complex* tp) const {
    const std::size_t nw = grid_.size();
    const double sq_dt = std::sqrt(dt_);
    const double ska = std::sqrt(params_.kappa_a);
    const double skm = std::sqrt(params_.kappa_m);
    Vector4 x = Vector4::Zero();
    for (std::size_t k = 0; k < n_steps_; ++k) {
      const double n1 = normal(rng);
      const double n2 = normal(rng);
      const double wx = sq_dt * cav_l(0, 0) * n1;
      const double wp = sq_dt * (cav_l(1, 0) * n1 + cav_l(1, 1) * n2);
      const double wmx = sq_dt * mag_sd * normal(rng);
      const double wmp = sq_dt * mag_sd * normal(rng);
      const double ox = ska * x(kAx) * dt_ - wx;
      const double op = ska * x(kAp) * dt_ - wp;
      if (!weights_.empty()) {
        const Complex* z = &weights_[k * nw];
        for (std::size_t i = 0; i < nw; ++i) {
          tx[i] += z[i] * ox;
          tp[i] += z[i] * op;
        }
      } else {
        for (std::size_t i = 0; i < nw; ++i) {
          const Complex z = weight(k, i);
          tx[i] += z * ox;
          tp[i] += z * op;
        }
      }
      const Vector4 drift = a * x;
      x(kAx) += dt_ * drift(kAx) + ska * wx;
      x(kAp) += dt_ * drift(kAp) + ska * wp;
      x(kMx) += dt_ * drift(kMx) + skm * wmx;
      x(kMp) += dt_ * drift(kMp) + skm * wmp;
    }
    return x.allFinite();
  }

  SystemParams params_;
  double t_m_ = 0.0;
  std::vector<double> grid_;
  double dt_ = 0.0;
  std::size_t n_steps_ = 0;
  std::size_t n_traj_ = 0;
  std::vector<Complex> filter_;
  std::vector<Complex> weights_;
  std::vector<Complex> basis_x_, basis_p_;
  std::vector<Vector4> initial_;
  std::vector<Complex> noise_x_, noise_p_;
};

/// Ensemble-averaged field-referred output spectrum for one pulse; `values`
/// holds the noise PSD, comparable to transient_noise_psd.
inline SpectrumSeries monte_carlo_output_spectrum(const SystemParams& p,
                                                  const FieldPulse& pulse, double t_m,
                                                  const std::vector<double>& grid,
                                                  Channel c, const MonteCarloOptions& opts) {
  return TrajectoryEnsemble::simulate(p, t_m, grid, opts).spectrum(pulse, c);
}

}  // namespace magsense

#pragma once

// Linear quantum Langevin dynamics of the quadrature vector
// R = (a_x, a_p, m_x, m_p):
//
//   dR/dt = A R + noise,   <noise noise^T>_sym = D delta(t - t')
//
// plus the instantaneous kick produced by a delta field pulse at t = 0.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <complex>
#include <numbers>

#include "magsense/errors.hpp"
#include "magsense/model.hpp"

namespace magsense {

using Matrix4 = Eigen::Matrix4d;
using Vector4 = Eigen::Vector4d;

/// Fixed quadrature ordering.
enum Quadrature : int { kAx = 0, kAp = 1, kMx = 2, kMp = 3 };

inline Matrix4 build_drift(const SystemParams& p) {
  const double ha = 0.5 * p.kappa_a;
  const double hm = 0.5 * p.kappa_m;
  const double g = p.g_am;
  Matrix4 a;
  // clang-format off
  a << -ha, 0.0, 0.0,   g,
       0.0, -ha,  -g, 0.0,
       0.0,   g, -hm, 0.0,
        -g, 0.0, 0.0, -hm;
  // clang-format on
  return a;
}

/// Symmetrized input-noise correlations per unit time. The cavity sees the
/// squeezed thermal reservoir `sq`, the magnon a thermal one.
inline Matrix4 build_diffusion(const SystemParams& p, const SqueezeParams& sq) {
  const BathCorrelators c = bath_correlators(sq, cavity_occupation(p));
  const double nm = magnon_occupation(p);
  Matrix4 d = Matrix4::Zero();
  d(kAx, kAx) = p.kappa_a * (c.n_q + 0.5 + c.re_m);
  d(kAp, kAp) = p.kappa_a * (c.n_q + 0.5 - c.re_m);
  d(kAx, kAp) = p.kappa_a * c.im_m;
  d(kAp, kAx) = d(kAx, kAp);
  d(kMx, kMx) = p.kappa_m * (nm + 0.5);
  d(kMp, kMp) = p.kappa_m * (nm + 0.5);
  return d;
}

/// Largest real part of the spectrum of `a`.
inline double spectral_abscissa(const Matrix4& a) {
  const Eigen::EigenSolver<Matrix4> es(a, false);
  return es.eigenvalues().real().maxCoeff();
}

inline bool is_hurwitz(const Matrix4& a) { return spectral_abscissa(a) < 0.0; }

struct LinearSystem {
  Matrix4 drift;
  Matrix4 diffusion;

  /// Checks that the drift is Hurwitz and the diffusion symmetric PSD.
  static LinearSystem make(const Matrix4& drift, const Matrix4& diffusion) {
    if (!is_hurwitz(drift)) {
      throw DomainError("drift matrix is not Hurwitz: no stationary state");
    }
    const double scale = diffusion.norm();
    if ((diffusion - diffusion.transpose()).norm() > 1e-12 * scale) {
      throw DomainError("diffusion matrix is not symmetric");
    }
    const Eigen::SelfAdjointEigenSolver<Matrix4> es(diffusion);
    if (es.eigenvalues().minCoeff() < -1e-12 * scale) {
      throw DomainError("diffusion matrix is not positive semidefinite");
    }
    return {drift, diffusion};
  }
};

inline LinearSystem sensing_system(const SystemParams& p) {
  return LinearSystem::make(build_drift(p), build_diffusion(p, p.bath_squeeze));
}

inline LinearSystem preparation_system(const SystemParams& p) {
  return LinearSystem::make(build_drift(p), build_diffusion(p, p.pre_squeeze));
}

/// Instantaneous action of B(t) = B0 delta(t) on the quadratures:
/// R(0+) = map * R(0-) + displacement. The longitudinal part is kept to
/// first order in gamma B0_z (m_x += gB m_p, m_p -= gB m_x) and acts on the
/// pre-pulse state only.
struct PulseKick {
  Matrix4 map = Matrix4::Identity();
  Vector4 displacement = Vector4::Zero();
};

inline PulseKick pulse_kick(const SystemParams& p, const FieldPulse& b) {
  PulseKick k;
  const double gbz = longitudinal_phase(p, b);
  k.map(kMx, kMp) = gbz;
  k.map(kMp, kMx) = -gbz;
  const double amp = std::numbers::sqrt2 * p.epsilon_b;
  const double s = std::sin(p.pulse_phase);
  const double c = std::cos(p.pulse_phase);
  k.displacement(kMx) = -amp * (b.b0_x * s + b.b0_y * c);
  k.displacement(kMp) = amp * (b.b0_x * c - b.b0_y * s);
  return k;
}

/// Symmetrized covariance <{dR_i, dR_j}>/2 at a given time.
struct CovarianceState {
  Matrix4 sigma = 0.5 * Matrix4::Identity();
  double time = 0.0;
};

/// Robertson-Schroedinger condition Sigma + (i/2) Omega >= 0, Omega the
/// symplectic form of the (x, p) pairs; vacuum is 1/2 on the diagonal.
inline bool satisfies_uncertainty(const CovarianceState& s, double tol = 1e-9) {
  Eigen::Matrix4cd h = s.sigma.cast<std::complex<double>>();
  for (int k = 0; k < 4; k += 2) {
    h(k, k + 1) += std::complex<double>(0.0, 0.5);
    h(k + 1, k) -= std::complex<double>(0.0, 0.5);
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -tol;
}

/// ||A S + S A^T + D||_F / ||D||_F.
inline double lyapunov_residual(const Matrix4& a, const Matrix4& d,
                                const Matrix4& s) {
  const double scale = d.norm();
  const double res = (a * s + s * a.transpose() + d).norm();
  return scale > 0.0 ? res / scale : res;
}

/// Solves A S + S A^T + D = 0 through the vectorized 16x16 system
/// (I (x) A + A (x) I) vec S = -vec D.
inline CovarianceState steady_covariance(const Matrix4& a, const Matrix4& d) {
  if (!is_hurwitz(a)) {
    throw DomainError("no stationary state: drift matrix is not Hurwitz");
  }
  using Matrix16 = Eigen::Matrix<double, 16, 16>;
  using Vector16 = Eigen::Matrix<double, 16, 1>;
  Matrix16 k = Matrix16::Zero();
  for (int i = 0; i < 4; ++i) {
    k.block<4, 4>(4 * i, 4 * i) += a;
    for (int j = 0; j < 4; ++j) {
      k.block<4, 4>(4 * i, 4 * j).diagonal().array() += a(i, j);
    }
  }
  const Eigen::FullPivLU<Matrix16> lu(k);
  const Vector16 rhs = -Eigen::Map<const Vector16>(d.data());
  Vector16 x = lu.solve(rhs);
  x += lu.solve(rhs - k * x);  // one step of iterative refinement

  CovarianceState out;
  out.sigma = Eigen::Map<const Matrix4>(x.data());
  out.sigma = 0.5 * (out.sigma + out.sigma.transpose()).eval();
  out.time = 0.0;
  if (lyapunov_residual(a, d, out.sigma) > 1e-10) {
    throw DomainError("steady_covariance: Lyapunov residual above tolerance");
  }
  return out;
}

/// Sigma(t) = e^{At} Sigma0 e^{A^T t} + int_0^t e^{As} D e^{A^T s} ds.
/// The short-step propagator pair comes from the Van Loan block exponential;
/// longer times follow by repeated doubling
///   Q(2h) = Q(h) + Phi(h) Q(h) Phi(h)^T,  Phi(2h) = Phi(h)^2,
/// which never forms growing exponentials.
inline CovarianceState evolve_covariance(const Matrix4& a, const Matrix4& d,
                                         const CovarianceState& sigma0,
                                         double t) {
  if (!(t >= 0.0)) throw DomainError("evolve_covariance: t must be >= 0");
  if (t == 0.0) return sigma0;

  const double norm = a.cwiseAbs().colwise().sum().maxCoeff();
  int doublings = 0;
  double h = t;
  while (norm * h > 0.25 && doublings < 200) {
    h *= 0.5;
    ++doublings;
  }

  using Matrix8 = Eigen::Matrix<double, 8, 8>;
  Matrix8 m = Matrix8::Zero();
  m.block<4, 4>(0, 0) = -a * h;
  m.block<4, 4>(0, 4) = d * h;
  m.block<4, 4>(4, 4) = a.transpose() * h;
  const Matrix8 e = m.exp();
  Matrix4 phi = e.block<4, 4>(4, 4).transpose();
  Matrix4 q = phi * e.block<4, 4>(0, 4);
  q = 0.5 * (q + q.transpose()).eval();

  for (int i = 0; i < doublings; ++i) {
    q = (q + phi * q * phi.transpose()).eval();
    q = 0.5 * (q + q.transpose()).eval();
    phi = (phi * phi).eval();
  }

  CovarianceState out;
  out.sigma = phi * sigma0.sigma * phi.transpose() + q;
  out.sigma = 0.5 * (out.sigma + out.sigma.transpose()).eval();
  out.time = sigma0.time + t;
  return out;
}

/// Engineered initial state: the stationary state of the preparation stage
/// (pre-squeezed cavity reservoir, no field).
inline CovarianceState prepared_state(const SystemParams& p) {
  const LinearSystem sys = preparation_system(p);
  return steady_covariance(sys.drift, sys.diffusion);
}

}  // namespace magsense

#include "lli/ms_gate.hpp"

#include <cmath>
#include <stdexcept>

#include "lli/constants.hpp"

namespace lli {

void MotionalMode::validate() const {
  if (frequency_hz <= 0.0) throw std::invalid_argument("mode frequency");
  if (lamb_dicke <= 0.0 || lamb_dicke >= 0.3)
    throw std::invalid_argument("Lamb-Dicke parameter outside (0, 0.3)");
  if (n_max < 2) throw std::invalid_argument("n_max must be >= 2");
}

void GateConfig::validate() const {
  mode.validate();
  if (delta_ms_hz <= 0.0) throw std::invalid_argument("delta_ms");
  if (std::abs(gate_time_s * delta_ms_hz - 1.0) > 1e-9)
    throw std::invalid_argument("gate_time must be 1/delta_ms");
  if (step_s <= 0.0 || step_s > gate_time_s)
    throw std::invalid_argument("integrator step");
}

double GateConfig::red_detuning_hz(int carrier) const {
  return -(mode.frequency_hz + delta_ms_hz) +
         tones.at(static_cast<size_t>(carrier)).stark_offset_hz;
}

double GateConfig::blue_detuning_hz(int carrier) const {
  return (mode.frequency_hz + delta_ms_hz) +
         tones.at(static_cast<size_t>(carrier)).stark_offset_hz;
}

double analytic_rabi_estimate(const GateConfig& cfg) {
  // Single-loop closure: eta * Omega = 2*pi*delta_ms / 2.
  return constants::pi * cfg.delta_ms_hz / cfg.mode.lamb_dicke;
}

BasisPtr make_gate_basis(int n_max) {
  std::vector<std::vector<IonLevel>> levels{
      {{Manifold::S_half, 1}, {Manifold::D_five_half, 1}},
      {{Manifold::S_half, -1}, {Manifold::D_five_half, -1}}};
  return make_basis(std::move(levels), n_max);
}

Ket gate_initial_state(const BasisPtr& basis) {
  return make_ket(basis,
                  {{Manifold::S_half, 1}, {Manifold::S_half, -1}}, 0);
}

namespace {

// One sideband coupling: out[to[k]] += alpha * w[k] * v[from[k]].
struct Coupling {
  std::vector<int> from, to;
  std::vector<double> w;

  void apply(const cplx& alpha, const Eigen::VectorXcd& v,
             Eigen::VectorXcd& out) const {
    for (size_t k = 0; k < w.size(); ++k)
      out[to[k]] += alpha * w[k] * v[from[k]];
  }
  void apply_adjoint(const cplx& alpha, const Eigen::VectorXcd& v,
                     Eigen::VectorXcd& out) const {
    for (size_t k = 0; k < w.size(); ++k)
      out[from[k]] += alpha * w[k] * v[to[k]];
  }
};

struct GateTerms {
  // Per carrier: sigma+_j a (lower) and sigma+_j a^dag (raise), plus the
  // excited-state projector for the Stark diagonal.
  std::array<Coupling, 2> lower, raise;
  std::array<std::vector<int>, 2> excited;
  int dim = 0;

  GateTerms(const CompositeBasis& b) : dim(b.dim()) {
    if (b.n_ions() != 2) throw std::invalid_argument("gate needs two ions");
    const int fock = b.fock_dim();
    std::vector<int> li;
    int n = 0;
    for (int idx = 0; idx < b.dim(); ++idx) {
      b.decompose(idx, li, n);
      for (int j = 0; j < 2; ++j) {
        // Level 0 is the S state, level 1 the addressed D state.
        if (li[static_cast<size_t>(j)] == 1) excited[static_cast<size_t>(j)].push_back(idx);
        if (li[static_cast<size_t>(j)] != 0) continue;
        std::vector<int> up = li;
        up[static_cast<size_t>(j)] = 1;
        if (n > 0) {
          auto& c = lower[static_cast<size_t>(j)];
          c.from.push_back(idx);
          c.to.push_back(b.index(up, n - 1));
          c.w.push_back(std::sqrt(static_cast<double>(n)));
        }
        if (n + 1 < fock) {
          auto& c = raise[static_cast<size_t>(j)];
          c.from.push_back(idx);
          c.to.push_back(b.index(up, n + 1));
          c.w.push_back(std::sqrt(static_cast<double>(n + 1)));
        }
      }
    }
  }

  // out = H(t) v, H in rad/s.
  void apply(double t, const GateConfig& cfg, const Eigen::VectorXcd& v,
             Eigen::VectorXcd& out) const {
    out.setZero();
    const double dw = constants::two_pi * cfg.delta_ms_hz;
    for (int j = 0; j < 2; ++j) {
      const CarrierTones& tn = cfg.tones[static_cast<size_t>(j)];
      const double s = constants::two_pi * tn.stark_offset_hz;
      const double g = 0.5 * cfg.mode.lamb_dicke * tn.rabi_rad;
      const cplx i_g(0.0, g);
      const cplx cr = i_g * std::exp(cplx(0.0, (dw - s) * t - tn.phase_red));
      const cplx cb = i_g * std::exp(cplx(0.0, -(dw + s) * t - tn.phase_blue));
      const auto& lo = lower[static_cast<size_t>(j)];
      const auto& hi = raise[static_cast<size_t>(j)];
      lo.apply(cr, v, out);
      lo.apply_adjoint(std::conj(cr), v, out);
      hi.apply(cb, v, out);
      hi.apply_adjoint(std::conj(cb), v, out);
      const double shift = constants::two_pi * tn.stark_shift_hz;
      if (shift != 0.0)
        for (int idx : excited[static_cast<size_t>(j)]) out[idx] += shift * v[idx];
    }
  }
};

// acc = exp(-i H dt) v by a truncated series; converges in a few terms for
// |H| dt << 1.
void step_series(const GateTerms& terms, const GateConfig& cfg, double t_mid,
                 double dt, Eigen::VectorXcd& v, Eigen::VectorXcd& work,
                 Eigen::VectorXcd& acc) {
  acc = v;
  const double vnorm = v.norm();
  for (int k = 1; k <= 25; ++k) {
    terms.apply(t_mid, cfg, v, work);
    v = work * (cplx(0.0, -dt) / static_cast<double>(k));
    acc += v;
    if (v.norm() < 1e-16 * vnorm) break;
  }
  v = acc;
}

}  // namespace

Eigen::MatrixXcd hamiltonian_at(double t, const GateConfig& cfg,
                                const CompositeBasis& basis) {
  GateTerms terms(basis);
  Eigen::MatrixXcd h(basis.dim(), basis.dim());
  Eigen::VectorXcd e = Eigen::VectorXcd::Zero(basis.dim());
  Eigen::VectorXcd col(basis.dim());
  for (int c = 0; c < basis.dim(); ++c) {
    e[c] = 1.0;
    terms.apply(t, cfg, e, col);
    h.col(c) = col;
    e[c] = 0.0;
  }
  return h;
}

GatePopulations gate_populations(const Ket& k) {
  const CompositeBasis& b = *k.basis;
  GatePopulations p;
  for (int idx = 0; idx < b.dim(); ++idx) {
    const double w = std::norm(k.amp[idx]);
    const int cfg = b.internal_config(idx);
    if (cfg == 0) p.p_ss += w;        // (S, S)
    else if (cfg == 3) p.p_dd += w;   // (D, D)
    else p.p_mixed += w;
  }
  return p;
}

cplx bell_coherence(const Ket& k) {
  const CompositeBasis& b = *k.basis;
  const int fock = b.fock_dim();
  cplx rho = 0.0;
  for (int n = 0; n < fock; ++n)
    rho += k.amp[0 * fock + n] * std::conj(k.amp[3 * fock + n]);
  return rho;
}

Trajectory propagate(const Ket& k0, const GateConfig& cfg, double duration,
                     int sample_every) {
  cfg.validate();
  if (duration < 0.0) throw std::invalid_argument("negative duration");
  GateTerms terms(*k0.basis);
  Trajectory tr;
  tr.final = k0;
  Eigen::VectorXcd work(k0.amp.size()), acc(k0.amp.size());
  const long n_steps = std::lround(std::ceil(duration / cfg.step_s - 1e-12));
  double t = 0.0;
  if (sample_every > 0) {
    tr.times_s.push_back(0.0);
    tr.populations.push_back(gate_populations(tr.final));
  }
  for (long i = 0; i < n_steps; ++i) {
    const double dt = std::min(cfg.step_s, duration - t);
    step_series(terms, cfg, t + 0.5 * dt, dt, tr.final.amp, work, acc);
    t += dt;
    if (sample_every > 0 && ((i + 1) % sample_every == 0 || i + 1 == n_steps)) {
      tr.times_s.push_back(t);
      tr.populations.push_back(gate_populations(tr.final));
    }
  }
  tr.final.check_norm(1e-9);
  return tr;
}

Ket propagate_final(const Ket& k0, const GateConfig& cfg, double duration) {
  return propagate(k0, cfg, duration, 0).final;
}

Ket propagate_expm(const Ket& k0, const GateConfig& cfg, double duration,
                   double step_s) {
  cfg.validate();
  Ket k = k0;
  const long n_steps = std::lround(std::ceil(duration / step_s - 1e-12));
  double t = 0.0;
  for (long i = 0; i < n_steps; ++i) {
    const double dt = std::min(step_s, duration - t);
    Eigen::MatrixXcd h = hamiltonian_at(t + 0.5 * dt, cfg, *k.basis);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h);
    const auto& vv = eig.eigenvectors();
    Eigen::VectorXcd phases(h.rows());
    for (int r = 0; r < h.rows(); ++r)
      phases[r] = std::exp(cplx(0.0, -eig.eigenvalues()[r] * dt));
    k.amp = vv * phases.asDiagonal() * (vv.adjoint() * k.amp);
    t += dt;
  }
  k.check_norm(1e-9);
  return k;
}

double calibrate_rabi(GateConfig& cfg) {
  // Power calibration runs on the bare sidebands: Stark terms zeroed.
  GateConfig c = cfg;
  for (auto& tn : c.tones) {
    tn.stark_shift_hz = 0.0;
    tn.stark_offset_hz = 0.0;
  }
  const double guess = analytic_rabi_estimate(cfg);
  BasisPtr basis = make_gate_basis(cfg.mode.n_max);
  Ket k0 = gate_initial_state(basis);
  auto pss = [&](double rabi) {
    c.tones[0].rabi_rad = rabi;
    c.tones[1].rabi_rad = rabi;
    return gate_populations(propagate_final(k0, c, c.gate_time_s)).p_ss;
  };
  double lo = 0.8 * guess, hi = 1.2 * guess;
  double f_lo = pss(lo) - 0.5, f_hi = pss(hi) - 0.5;
  if (f_lo * f_hi > 0.0)
    throw std::runtime_error("no closure root in the Rabi bracket: P_SS(0.8)=" +
                             std::to_string(f_lo + 0.5) + " P_SS(1.2)=" +
                             std::to_string(f_hi + 0.5));
  for (int it = 0; it < 22; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = pss(mid) - 0.5;
    if ((f_mid < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  const double rabi = 0.5 * (lo + hi);
  cfg.tones[0].rabi_rad = rabi;
  cfg.tones[1].rabi_rad = rabi;
  return rabi;
}

void calibrate_stark_offsets(GateConfig& cfg) {
  if (cfg.tones[0].rabi_rad <= 0.0 || cfg.tones[1].rabi_rad <= 0.0)
    throw std::runtime_error("calibrate the Rabi frequency first");
  BasisPtr basis = make_gate_basis(cfg.mode.n_max);
  Ket k0 = gate_initial_state(basis);
  GateConfig c = cfg;
  auto fidelity = [&]() {
    return gate_fidelity(propagate_final(k0, c, c.gate_time_s)).overlap;
  };

  // The fidelity landscape over a wide offset range has loop-closure
  // revivals, so a plain line search can lock onto a false peak. Scan a
  // common offset on a coarse grid first (the shifts are typically equal),
  // then refine each carrier inside one grid cell.
  const double lo =
      std::min({0.0, c.tones[0].stark_shift_hz, c.tones[1].stark_shift_hz}) -
      2e3;
  const double hi =
      std::max({0.0, c.tones[0].stark_shift_hz, c.tones[1].stark_shift_hz}) +
      2e3;
  const int n_grid = 1 + static_cast<int>(std::ceil((hi - lo) / 500.0));
  double best_x = lo, best_f = -1.0;
  for (int i = 0; i < n_grid; ++i) {
    const double x = lo + (hi - lo) * i / (n_grid - 1);
    c.tones[0].stark_offset_hz = x;
    c.tones[1].stark_offset_hz = x;
    const double f = fidelity();
    if (f > best_f) {
      best_f = f;
      best_x = x;
    }
  }
  c.tones[0].stark_offset_hz = best_x;
  c.tones[1].stark_offset_hz = best_x;

  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int sweep = 0; sweep < 2; ++sweep) {
    for (int j = 0; j < 2; ++j) {
      const double mid = c.tones[static_cast<size_t>(j)].stark_offset_hz;
      double a = mid - 750.0;
      double b = mid + 750.0;
      double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
      auto eval = [&](double x) {
        c.tones[static_cast<size_t>(j)].stark_offset_hz = x;
        return fidelity();
      };
      double f1 = eval(x1), f2 = eval(x2);
      while (b - a > 10.0) {
        if (f1 < f2) {
          a = x1;
          x1 = x2;
          f1 = f2;
          x2 = a + gr * (b - a);
          f2 = eval(x2);
        } else {
          b = x2;
          x2 = x1;
          f2 = f1;
          x1 = b - gr * (b - a);
          f1 = eval(x1);
        }
      }
      c.tones[static_cast<size_t>(j)].stark_offset_hz = 0.5 * (a + b);
    }
  }
  cfg.tones[0].stark_offset_hz = c.tones[0].stark_offset_hz;
  cfg.tones[1].stark_offset_hz = c.tones[1].stark_offset_hz;
}

GateFidelity gate_fidelity(const Ket& k) {
  const GatePopulations p = gate_populations(k);
  const double coh = std::abs(bell_coherence(k));
  GateFidelity f;
  f.overlap = 0.5 * (p.p_ss + p.p_dd) + coh;
  f.parity_estimate = 0.5 * (p.p_ss + p.p_dd) + 0.5 * (2.0 * coh);
  return f;
}

}  // namespace lli

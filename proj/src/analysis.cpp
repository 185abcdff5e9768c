#include "lli/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "analysis_detail.hpp"
#include "lli/constants.hpp"

namespace lli {

double extract_phase(double p0, double p90, double amplitude,
                     double clamp_slack) {
  if (!(amplitude > 0.0))
    throw std::invalid_argument("amplitude must be positive");
  const double x = (p0 - p90) / (2.0 * amplitude);
  if (std::abs(x) > 1.0 + clamp_slack)
    throw std::runtime_error("parity pair inconsistent with the contrast");
  return std::asin(std::clamp(x, -1.0, 1.0));
}

double extract_amplitude(double p_minus45, double p_plus45) {
  return 0.5 * (p_minus45 - p_plus45);
}

double extract_phase_sampled(double p0, double p90, double amplitude,
                             long shots, double clamp_slack) {
  if (shots <= 0) return extract_phase(p0, p90, amplitude, clamp_slack);
  if (!(amplitude > 0.0))
    throw std::invalid_argument("amplitude must be positive");
  const double x = (p0 - p90) / (2.0 * amplitude);
  if (std::abs(x) > 1.0 + clamp_slack)
    throw std::runtime_error("parity pair inconsistent with the contrast");
  // var(x) from the binomial spread of each parity. E[asin(x)] expands to
  // asin(mu) + asin''(mu) var(x)/2 with asin''(u) = u (1-u^2)^{-3/2}, so the
  // second term below undoes the curvature pull. The expansion only holds
  // away from the arcsine singularity; the correction argument is winsorized
  // at 0.7 so tail samples keep their plain-asin value instead of being
  // dragged in by a diverging correction (which would eat real variance and
  // skew the mixed-to-entangled noise ratio).
  const double vx = ((1.0 - p0 * p0) + (1.0 - p90 * p90)) /
                    (4.0 * amplitude * amplitude * static_cast<double>(shots));
  const double xc = std::clamp(x, -0.7, 0.7);
  const double u = 1.0 - xc * xc;
  return std::asin(std::clamp(x, -1.0, 1.0)) -
         0.5 * xc * vx / (u * std::sqrt(u));
}

double sidereal_time(double utc, double epoch) {
  if (utc < epoch)
    throw std::invalid_argument("timestamp precedes the equinox epoch");
  return utc - epoch;
}

namespace detail {

double resolved_omega(const ExtractOptions& opts) {
  return opts.omega_rad > 0.0 ? opts.omega_rad
                              : constants::omega_sidereal_rad;
}

namespace {

struct SettingPair {
  const MeasurementRecord* p0 = nullptr;
  const MeasurementRecord* p90 = nullptr;
};

struct BlockView {
  SettingPair sig[2][2];  // [variant R=0 L=1][tau short=0 long=1]
  const MeasurementRecord* c_lo = nullptr;  // phi0 - 45 deg
  const MeasurementRecord* c_hi = nullptr;
  double tau_short = 0.0;
  double tau_long = 0.0;
  bool exact = true;  // every signal record carries the expectation value
};

bool parse_block(const Pass1& p, const BlockRange& r, BlockView* out,
                 std::string* reason) {
  double lo = std::numeric_limits<double>::max(), hi = 0.0;
  for (std::size_t i = r.begin; i < r.end; ++i) {
    const MeasurementRecord& rec = *p.ordered[i];
    if (rec.contrast_flag) continue;
    lo = std::min(lo, rec.tau_s);
    hi = std::max(hi, rec.tau_s);
  }
  if (!(hi > 1.5 * lo)) {
    *reason = "wait times not distinguishable";
    return false;
  }
  out->tau_short = lo;
  out->tau_long = hi;
  for (std::size_t i = r.begin; i < r.end; ++i) {
    const MeasurementRecord& rec = *p.ordered[i];
    if (rec.contrast_flag) {
      if (!out->c_lo) {
        out->c_lo = &rec;
      } else if (!out->c_hi) {
        out->c_hi = &rec;
        if (out->c_hi->phase_setting_rad < out->c_lo->phase_setting_rad)
          std::swap(out->c_lo, out->c_hi);
      }
      continue;
    }
    if (rec.shots != 0) out->exact = false;
    const int vi = rec.variant == StateVariant::R ? 0 : 1;
    const int ti = rec.tau_s > 1.5 * lo ? 1 : 0;
    SettingPair& sp = out->sig[vi][ti];
    if (!sp.p0) {
      sp.p0 = &rec;
    } else if (!sp.p90) {
      sp.p90 = &rec;
      if (sp.p90->phase_setting_rad < sp.p0->phase_setting_rad)
        std::swap(sp.p0, sp.p90);
    } else {
      *reason = "duplicate setting";
      return false;
    }
  }
  for (int vi = 0; vi < 2; ++vi)
    for (int ti = 0; ti < 2; ++ti)
      if (!out->sig[vi][ti].p0 || !out->sig[vi][ti].p90) {
        *reason = "missing setting";
        return false;
      }
  return true;
}

double parity_variance(const MeasurementRecord& r) {
  const double spread = std::max(1.0 - r.parity * r.parity, 0.05);
  return spread / static_cast<double>(r.shots);
}

}  // namespace

Pass1 contrast_pass(const std::vector<MeasurementRecord>& records,
                    const ExtractOptions& opts) {
  Pass1 p;
  p.ordered.reserve(records.size());
  for (const auto& r : records) p.ordered.push_back(&r);
  std::stable_sort(p.ordered.begin(), p.ordered.end(),
                   [](const MeasurementRecord* a, const MeasurementRecord* b) {
                     if (a->block != b->block) return a->block < b->block;
                     return a->utc < b->utc;
                   });
  for (std::size_t i = 0; i < p.ordered.size();) {
    std::size_t j = i;
    while (j < p.ordered.size() && p.ordered[j]->block == p.ordered[i]->block)
      ++j;
    p.blocks.push_back({p.ordered[i]->block, i, j});
    i = j;
  }
  p.a_short.assign(p.blocks.size(), 0.0);
  p.fail.assign(p.blocks.size(), "");

  double ema = 0.0;
  bool have_ema = false;
  for (std::size_t b = 0; b < p.blocks.size(); ++b) {
    const MeasurementRecord* c_lo = nullptr;
    const MeasurementRecord* c_hi = nullptr;
    for (std::size_t i = p.blocks[b].begin; i < p.blocks[b].end; ++i) {
      const MeasurementRecord& rec = *p.ordered[i];
      if (!rec.contrast_flag) continue;
      if (!c_lo) {
        c_lo = &rec;
      } else if (!c_hi) {
        c_hi = &rec;
        if (c_hi->phase_setting_rad < c_lo->phase_setting_rad)
          std::swap(c_lo, c_hi);
      }
    }
    double a_blk = -1.0;
    if (c_lo && c_hi)
      a_blk = extract_amplitude(c_lo->parity, c_hi->parity);
    if (a_blk > opts.min_amplitude) {
      ema = have_ema ? opts.ema_alpha * a_blk + (1.0 - opts.ema_alpha) * ema
                     : a_blk;
      have_ema = true;
    } else if (!have_ema) {
      p.fail[b] = "no usable contrast yet";
      continue;
    }
    if (a_blk <= opts.min_amplitude && c_lo && c_hi && a_blk >= 0.0)
      p.fail[b] = "";  // low contrast point; the held EMA still serves
    p.a_short[b] = ema;
  }
  return p;
}

bool block_entry(const Pass1& p, std::size_t i, const ExtractOptions& opts,
                 FreqEntry* out, std::string* reason) {
  if (!p.fail[i].empty()) {
    *reason = p.fail[i];
    return false;
  }
  BlockView v;
  if (!parse_block(p, p.blocks[i], &v, reason)) return false;
  const double a_short = p.a_short[i];
  if (!(a_short > opts.min_amplitude)) {
    *reason = "contrast too low";
    return false;
  }
  double decay_factor = 1.0;
  if (opts.decay_lifetime_s > 0.0 && std::isfinite(opts.decay_lifetime_s))
    decay_factor =
        std::exp(-2.0 * (v.tau_long - v.tau_short) / opts.decay_lifetime_s);
  const double amp[2] = {a_short, a_short * decay_factor};
  const double dtau = v.tau_long - v.tau_short;
  const double omega = resolved_omega(opts);

  FreqEntry e;
  e.block = p.blocks[i].id;
  e.exact_parity = v.exact;
  double f_var[2] = {0.0, 0.0};
  double utc_sum = 0.0;
  Eigen::Matrix<double, 5, 1> basis_sum = Eigen::Matrix<double, 5, 1>::Zero();
  for (int vi = 0; vi < 2; ++vi) {
    double phi[2] = {0.0, 0.0};
    double var_phi[2] = {0.0, 0.0};
    Eigen::Matrix<double, 5, 1> psi[2];
    for (int ti = 0; ti < 2; ++ti) {
      const SettingPair& sp = v.sig[vi][ti];
      double dphi;
      try {
        dphi = extract_phase_sampled(sp.p0->parity, sp.p90->parity, amp[ti],
                                     v.exact ? 0 : sp.p0->shots,
                                     opts.clamp_slack);
      } catch (const std::exception& ex) {
        *reason = ex.what();
        return false;
      }
      phi[ti] = 0.5 * constants::pi - 2.0 * sp.p0->phase_setting_rad - dphi;
      utc_sum += sp.p0->utc + sp.p90->utc;
      if (!v.exact) {
        const double x =
            std::clamp((sp.p0->parity - sp.p90->parity) / (2.0 * amp[ti]),
                       -1.0, 1.0);
        const double cos2 = std::max(1.0 - x * x, 0.01);
        var_phi[ti] = (parity_variance(*sp.p0) + parity_variance(*sp.p90)) /
                      (4.0 * amp[ti] * amp[ti] * cos2);
      }
      if (opts.store_basis) {
        const double tau = ti == 0 ? v.tau_short : v.tau_long;
        psi[ti] =
            0.5 * (harmonic_window_means(sp.p0->utc - opts.epoch_utc, tau,
                                         omega) +
                   harmonic_window_means(sp.p90->utc - opts.epoch_utc, tau,
                                         omega));
      }
    }
    const double f_v = (phi[1] - phi[0]) / (constants::two_pi * dtau);
    f_var[vi] = (var_phi[0] + var_phi[1]) /
                (constants::two_pi * dtau * constants::two_pi * dtau);
    if (vi == 0)
      e.f_r_hz = f_v;
    else
      e.f_l_hz = f_v;
    if (opts.store_basis)
      basis_sum += (v.tau_long * psi[1] - v.tau_short * psi[0]) / dtau;
  }
  e.f_hz = 0.5 * (e.f_r_hz + e.f_l_hz);
  e.sigma_hz = v.exact ? 1.0 : std::sqrt(0.25 * (f_var[0] + f_var[1]));
  e.utc = utc_sum / 8.0;
  if (opts.store_basis) {
    e.basis = 0.5 * basis_sum;
    e.has_basis = true;
  }
  *out = e;
  return true;
}

FrequencySeries assemble(const Pass1& p, const std::vector<FreqEntry>& entries,
                         const std::vector<char>& ok,
                         const std::vector<std::string>& reasons,
                         const ExtractOptions& opts) {
  FrequencySeries s;
  s.epoch_utc = opts.epoch_utc;
  s.omega_rad = resolved_omega(opts);
  for (std::size_t i = 0; i < p.blocks.size(); ++i) {
    if (ok[i]) {
      s.entries.push_back(entries[i]);
    } else {
      s.skipped.push_back("block " + std::to_string(p.blocks[i].id) + ": " +
                          reasons[i]);
    }
  }
  return s;
}

}  // namespace detail

FreqEntry extract_frequency(const std::vector<MeasurementRecord>& block,
                            double a_short, const ExtractOptions& opts) {
  detail::Pass1 p;
  for (const auto& r : block) p.ordered.push_back(&r);
  std::stable_sort(p.ordered.begin(), p.ordered.end(),
                   [](const MeasurementRecord* a, const MeasurementRecord* b) {
                     return a->utc < b->utc;
                   });
  p.blocks.push_back({block.empty() ? 0 : block.front().block, 0,
                      p.ordered.size()});
  p.a_short.push_back(a_short);
  p.fail.emplace_back();
  FreqEntry e;
  std::string reason;
  if (!detail::block_entry(p, 0, opts, &e, &reason))
    throw std::runtime_error("block rejected: " + reason);
  return e;
}

FrequencySeries extract_block_frequencies_serial(
    const std::vector<MeasurementRecord>& records,
    const ExtractOptions& opts) {
  detail::Pass1 p = detail::contrast_pass(records, opts);
  std::vector<FreqEntry> entries(p.blocks.size());
  std::vector<char> ok(p.blocks.size(), 0);
  std::vector<std::string> reasons(p.blocks.size());
  for (std::size_t i = 0; i < p.blocks.size(); ++i)
    ok[i] = detail::block_entry(p, i, opts, &entries[i], &reasons[i]) ? 1 : 0;
  return detail::assemble(p, entries, ok, reasons, opts);
}

void correct_systematics(FrequencySeries& series,
                         const std::vector<FieldLogEntry>& field_log,
                         const std::vector<OmegaLogEntry>& omega_log,
                         const ZeemanModel& zeeman,
                         const QuadrupoleModel& quadrupole,
                         double max_gap_s) {
  auto nearest = [](const auto& log, double utc,
                    double max_gap) -> const auto* {
    using Entry = typename std::decay_t<decltype(log)>::value_type;
    if (log.empty()) return static_cast<const Entry*>(nullptr);
    auto it = std::lower_bound(
        log.begin(), log.end(), utc,
        [](const Entry& e, double t) { return e.utc < t; });
    const Entry* best = nullptr;
    if (it != log.end()) best = &*it;
    if (it != log.begin()) {
      const Entry* prev = &*(it - 1);
      if (!best || std::abs(prev->utc - utc) < std::abs(best->utc - utc))
        best = prev;
    }
    if (best && std::abs(best->utc - utc) > max_gap) return static_cast<const Entry*>(nullptr);
    return best;
  };
  for (auto& e : series.entries) {
    const FieldLogEntry* fb = nearest(field_log, e.utc, max_gap_s);
    if (fb) {
      const double corr =
          zeeman.quad_coeff_hz_per_gauss * fb->delta_b_gauss;
      e.f_hz -= corr;
      e.f_r_hz -= corr;
      e.f_l_hz -= corr;
      e.corrected_zeeman = true;
    } else {
      e.uncorrected_gap = true;
    }
    const OmegaLogEntry* om = nearest(omega_log, e.utc, max_gap_s);
    if (om) {
      const double corr = quadrupole.slope_hz_per_hz *
                          (om->omega_cm_hz - quadrupole.ref_freq_hz);
      e.f_hz -= corr;
      e.f_r_hz -= corr;
      e.f_l_hz -= corr;
      e.corrected_quadrupole = true;
    } else {
      e.uncorrected_gap = true;
    }
  }
}

FrequencySeries bin_series(const FrequencySeries& series, double width_s) {
  if (width_s <= 0.0) throw std::invalid_argument("bin width");
  FrequencySeries out;
  out.delta_tau_s = series.delta_tau_s;
  out.epoch_utc = series.epoch_utc;
  out.omega_rad = series.omega_rad;
  if (series.entries.empty()) return out;
  const double t0 = series.entries.front().utc;
  long current = -1;
  FreqEntry acc;
  double wsum = 0.0, fw = 0.0, frw = 0.0, flw = 0.0, tw = 0.0;
  Eigen::Matrix<double, 5, 1> bw = Eigen::Matrix<double, 5, 1>::Zero();
  bool all_basis = true, all_exact = true, all_zee = true, all_quad = true,
       any_gap = false;
  auto flush = [&]() {
    if (wsum <= 0.0) return;
    FreqEntry e;
    e.utc = tw / wsum;
    e.f_hz = fw / wsum;
    e.f_r_hz = frw / wsum;
    e.f_l_hz = flw / wsum;
    e.sigma_hz = std::sqrt(1.0 / wsum);
    e.corrected_zeeman = all_zee;
    e.corrected_quadrupole = all_quad;
    e.uncorrected_gap = any_gap;
    e.exact_parity = all_exact;
    e.has_basis = all_basis;
    if (all_basis) e.basis = bw / wsum;
    e.block = -1;
    out.entries.push_back(e);
  };
  for (const auto& e : series.entries) {
    const long bin = static_cast<long>(std::floor((e.utc - t0) / width_s));
    if (bin != current) {
      flush();
      current = bin;
      wsum = fw = frw = flw = tw = 0.0;
      bw.setZero();
      all_basis = all_exact = all_zee = all_quad = true;
      any_gap = false;
    }
    const double w = 1.0 / (e.sigma_hz * e.sigma_hz);
    wsum += w;
    fw += w * e.f_hz;
    frw += w * e.f_r_hz;
    flw += w * e.f_l_hz;
    tw += w * e.utc;
    if (e.has_basis)
      bw += w * e.basis;
    else
      all_basis = false;
    all_exact = all_exact && e.exact_parity;
    all_zee = all_zee && e.corrected_zeeman;
    all_quad = all_quad && e.corrected_quadrupole;
    any_gap = any_gap || e.uncorrected_gap;
  }
  flush();
  return out;
}

AllanCurve allan_deviation(const FrequencySeries& series,
                           const AllanOptions& opts) {
  const auto& es = series.entries;
  if (es.size() < 16)
    throw std::invalid_argument("Allan deviation needs at least 16 samples");
  std::vector<double> y(es.size());
  std::vector<double> gaps;
  for (std::size_t i = 0; i < es.size(); ++i) {
    y[i] = es[i].f_hz;
    if (i > 0) gaps.push_back(es[i].utc - es[i - 1].utc);
  }
  std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
  const double dt = gaps[gaps.size() / 2];

  // Prefix sums for O(1) group means.
  std::vector<double> ps(y.size() + 1, 0.0);
  for (std::size_t i = 0; i < y.size(); ++i) ps[i + 1] = ps[i] + y[i];
  auto mean = [&](std::size_t a, std::size_t m) {
    return (ps[a + m] - ps[a]) / static_cast<double>(m);
  };

  AllanCurve curve;
  const std::size_t n = y.size();
  for (std::size_t m = 1; n / m >= static_cast<std::size_t>(
                              std::max(2, opts.min_groups));
       m *= 2) {
    double acc = 0.0;
    int cnt = 0;
    if (opts.overlapping) {
      for (std::size_t i = 0; i + 2 * m <= n; ++i) {
        const double d = mean(i + m, m) - mean(i, m);
        acc += d * d;
        ++cnt;
      }
    } else {
      const std::size_t k = n / m;
      for (std::size_t g = 0; g + 1 < k; ++g) {
        const double d = mean((g + 1) * m, m) - mean(g * m, m);
        acc += d * d;
        ++cnt;
      }
    }
    if (cnt < 1) break;
    curve.points.push_back({static_cast<double>(m) * dt,
                            std::sqrt(acc / (2.0 * cnt)), cnt});
  }

  // Log-log fit over the first decade.
  double sw = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& pt : curve.points) {
    if (pt.tau_s > opts.fit_decade_factor * dt || pt.sigma_hz <= 0.0)
      continue;
    const double w = pt.groups;
    const double lx = std::log(pt.tau_s), ly = std::log(pt.sigma_hz);
    sw += w;
    sx += w * lx;
    sy += w * ly;
    sxx += w * lx * lx;
    sxy += w * lx * ly;
  }
  const double det = sw * sxx - sx * sx;
  if (sw > 0.0 && std::abs(det) > 1e-12 * sw * sxx) {
    curve.exponent = (sw * sxy - sx * sy) / det;
    curve.prefactor_hz_rt_s = std::exp((sxx * sy - sx * sxy) / det);
  }
  return curve;
}

FitResult fit_sidereal(const FrequencySeries& binned, const LabFrame& frame) {
  const auto& es = binned.entries;
  if (es.size() < 6)
    throw std::invalid_argument("sidereal fit needs more than 5 bins");
  LabFrame fr = frame;
  resolve_equinox_epoch(fr, es.front().utc);
  const double omega =
      binned.omega_rad > 0.0 ? binned.omega_rad : constants::omega_sidereal_rad;
  bool use_basis = true;
  for (const auto& e : es) use_basis = use_basis && e.has_basis;
  if (use_basis &&
      std::abs(binned.epoch_utc - fr.equinox_epoch_utc) > 1e-6)
    use_basis = false;  // rows were built against a different phase origin

  const int n = static_cast<int>(es.size());
  Eigen::MatrixXd x(n, 5);
  Eigen::VectorXd yv(n), rtw(n);
  for (int i = 0; i < n; ++i) {
    const FreqEntry& e = es[static_cast<std::size_t>(i)];
    if (use_basis) {
      x.row(i) = e.basis.transpose();
    } else {
      const double t = sidereal_time(e.utc, fr.equinox_epoch_utc);
      x(i, 0) = 1.0;
      x(i, 1) = std::sin(omega * t);
      x(i, 2) = std::cos(omega * t);
      x(i, 3) = std::sin(2.0 * omega * t);
      x(i, 4) = std::cos(2.0 * omega * t);
    }
    yv(i) = e.f_hz;
    rtw(i) = 1.0 / e.sigma_hz;
  }
  const Eigen::MatrixXd xw = rtw.asDiagonal() * x;
  const Eigen::VectorXd yw = rtw.asDiagonal() * yv;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xw);
  qr.setThreshold(1e-10);
  if (qr.rank() < 5)
    throw std::runtime_error(
        "sidereal fit is rank deficient over this window");
  const Eigen::VectorXd theta = qr.solve(yw);
  const Eigen::Matrix<double, 5, 5> normal = xw.transpose() * xw;
  Eigen::Matrix<double, 5, 5> cov = normal.ldlt().solve(
      Eigen::Matrix<double, 5, 5>::Identity());
  const double chi2 = (yw - xw * theta).squaredNorm();
  FitResult fit;
  fit.dc = theta(0);
  fit.a = theta(1);
  fit.b = theta(2);
  fit.c = theta(3);
  fit.d = theta(4);
  fit.n_bins = n;
  fit.chi2_red = n > 5 ? chi2 / (n - 5) : 0.0;
  if (fit.chi2_red > 1.0) {
    cov *= fit.chi2_red;
    fit.scaled = true;
  }
  fit.covariance = cov;
  return fit;
}

CmnBounds invert_to_cmn(const FitResult& fit, const HarmonicDesign& design) {
  Eigen::FullPivLU<Eigen::Matrix4d> lu(design.m);
  if (!lu.isInvertible())
    throw std::runtime_error("harmonic design matrix is singular");
  const Eigen::Matrix4d minv = lu.inverse();
  const Eigen::Vector4d abcd(fit.a, fit.b, fit.c, fit.d);
  const Eigen::Vector4d vals = minv * abcd;
  const Eigen::Matrix4d cov4 = fit.covariance.block<4, 4>(1, 1);
  const Eigen::Matrix4d covx = minv * cov4 * minv.transpose();
  CmnBounds b;
  Bound* slots[4] = {&b.c_x_minus_y, &b.c_xy, &b.c_xz, &b.c_yz};
  for (int i = 0; i < 4; ++i) {
    slots[i]->value = vals(i);
    slots[i]->sigma = std::sqrt(std::max(covx(i, i), 0.0));
  }
  return b;
}

}  // namespace lli

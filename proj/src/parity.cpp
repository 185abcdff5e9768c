#include "lli/parity.hpp"

#include <cmath>
#include <stdexcept>

#include "lli/constants.hpp"
#include "lli/rng.hpp"
#include "lli/unitary.hpp"

namespace lli {

bool s_manifold_bright(const IonLevel& lv) {
  return lv.manifold == Manifold::S_half;
}

namespace {

// Bright/dark bit pattern for each internal configuration id.
std::vector<int> config_patterns(const CompositeBasis& b,
                                 const BrightPredicate& bright) {
  std::vector<int> pat(static_cast<size_t>(b.internal_dim()));
  std::vector<int> li;
  int n = 0;
  for (int cfg = 0; cfg < b.internal_dim(); ++cfg) {
    b.decompose(cfg * b.fock_dim(), li, n);
    int bits = 0;
    for (int i = 0; i < b.n_ions(); ++i)
      if (bright(b.levels(i)[static_cast<size_t>(li[static_cast<size_t>(i)])]))
        bits |= 1 << i;
    pat[static_cast<size_t>(cfg)] = bits;
  }
  return pat;
}

int pattern_parity(int bits, int n_ions) {
  int dark = n_ions - __builtin_popcount(static_cast<unsigned>(bits));
  return (dark & 1) ? -1 : 1;
}

}  // namespace

std::vector<double> outcome_probabilities(const Ket& k,
                                          const BrightPredicate& bright) {
  if (!k.basis) throw std::invalid_argument("ket without basis");
  const CompositeBasis& b = *k.basis;
  auto pat = config_patterns(b, bright);
  std::vector<double> p(static_cast<size_t>(1) << b.n_ions(), 0.0);
  for (int idx = 0; idx < b.dim(); ++idx)
    p[static_cast<size_t>(pat[static_cast<size_t>(b.internal_config(idx))])] +=
        std::norm(k.amp[idx]);
  return p;
}

double parity_expectation(const Ket& k, const BrightPredicate& bright) {
  auto p = outcome_probabilities(k, bright);
  double x = 0.0;
  for (size_t c = 0; c < p.size(); ++c)
    x += p[c] * pattern_parity(static_cast<int>(c), k.basis->n_ions());
  return x;
}

double SampleCounts::parity() const {
  if (shots <= 0) return 0.0;
  int n_ions = 0;
  while ((1L << n_ions) < static_cast<long>(counts.size())) ++n_ions;
  long acc = 0;
  for (size_t c = 0; c < counts.size(); ++c)
    acc += counts[c] * pattern_parity(static_cast<int>(c), n_ions);
  return static_cast<double>(acc) / static_cast<double>(shots);
}

SampleCounts sample_outcomes(const Ket& k, long shots, std::uint64_t seed,
                             const BrightPredicate& bright) {
  auto p = outcome_probabilities(k, bright);
  SampleCounts out;
  out.counts.assign(p.size(), 0);
  out.shots = shots;
  if (shots <= 0) return out;
  Rng rng(seed);
  // Multinomial by sequential binomial splits.
  long left = shots;
  double mass = 1.0;
  for (size_t c = 0; c + 1 < p.size() && left > 0; ++c) {
    double q = mass > 1e-300 ? p[c] / mass : 0.0;
    if (q > 1.0) q = 1.0;
    long n = rng.binomial(left, q);
    out.counts[c] = n;
    left -= n;
    mass -= p[c];
  }
  out.counts.back() = left;
  return out;
}

Ket analysis_pulses(const Ket& k, Transition ion0_tr, Transition ion1_tr,
                    double phi_a) {
  // Pulse laser phase offset by -pi/2 so the joint fringe on
  // (|SS> + e^{i phi}|DD>)/sqrt(2) comes out as +cos(phi + 2 phi_a).
  const double pp = phi_a - constants::pi / 2.0;
  Unitary u0 = carrier_rotation(k.basis, 0, ion0_tr, constants::pi / 2.0, pp);
  Unitary u1 = carrier_rotation(k.basis, 1, ion1_tr, constants::pi / 2.0, pp);
  return apply(u1, apply(u0, k));
}

}  // namespace lli

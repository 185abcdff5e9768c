#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "lli/ket.hpp"

// Fluorescence parity readout. An ion in S1/2 scatters (bright, +1), an ion
// shelved in D5/2 stays dark (-1); parity of a configuration is the product
// over ions.

namespace lli {

using BrightPredicate = std::function<bool(const IonLevel&)>;

// Default detection: S manifold bright.
bool s_manifold_bright(const IonLevel& lv);

// <prod_i (+/-1)_i>, motional mode traced out.
double parity_expectation(const Ket& k,
                          const BrightPredicate& bright = s_manifold_bright);

// Projective readout statistics: counts per bright/dark configuration.
// Configuration bit i set = ion i bright. Deterministic for a given seed.
struct SampleCounts {
  std::vector<long> counts;  // size 2^n_ions
  long shots = 0;

  double parity() const;  // empirical parity of the sample
};

SampleCounts sample_outcomes(const Ket& k, long shots, std::uint64_t seed,
                             const BrightPredicate& bright = s_manifold_bright);

// Per-configuration outcome probabilities (bright/dark marginals of |k|^2).
std::vector<double> outcome_probabilities(
    const Ket& k, const BrightPredicate& bright = s_manifold_bright);

// Parity analysis pulses for the two-ion Bell/branch states: a pi/2 pulse on
// the given transition of each ion, phase referenced so that the state
// (|SS> + e^{i phi}|DD>)/sqrt(2) yields parity  cos(phi + 2*phi_a).
Ket analysis_pulses(const Ket& k, Transition ion0_tr, Transition ion1_tr,
                    double phi_a);

}  // namespace lli

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

// Internal levels of a single 40Ca+ ion restricted to the S1/2 and D5/2
// manifolds, and the named 729 nm carrier transitions between them.

namespace lli {

enum class Manifold { S_half, D_five_half };

struct IonLevel {
  Manifold manifold = Manifold::S_half;
  int two_mj = 1;  // 2*mJ, so half-integers stay exact

  constexpr IonLevel() = default;
  constexpr IonLevel(Manifold m, int tmj) : manifold(m), two_mj(tmj) {}

  void validate() const {
    int lim = manifold == Manifold::S_half ? 1 : 5;
    if (two_mj < -lim || two_mj > lim || ((two_mj & 1) == 0))
      throw std::invalid_argument("invalid mJ for manifold");
  }

  friend constexpr bool operator==(const IonLevel& a, const IonLevel& b) {
    return a.manifold == b.manifold && a.two_mj == b.two_mj;
  }

  std::string name() const;  // e.g. "S+1/2", "D-5/2"
};

// Named carriers: C1 S-1/2 <-> D-5/2, C2 S+1/2 <-> D+5/2,
//                 C3 S+1/2 <-> D+1/2, C4 S-1/2 <-> D-1/2.
enum class Transition { C1, C2, C3, C4 };

struct TransitionLevels {
  IonLevel lower;  // S1/2 state
  IonLevel upper;  // D5/2 state
};

constexpr TransitionLevels transition_levels(Transition t) {
  switch (t) {
    case Transition::C1:
      return {{Manifold::S_half, -1}, {Manifold::D_five_half, -5}};
    case Transition::C2:
      return {{Manifold::S_half, 1}, {Manifold::D_five_half, 5}};
    case Transition::C3:
      return {{Manifold::S_half, 1}, {Manifold::D_five_half, 1}};
    case Transition::C4:
    default:
      return {{Manifold::S_half, -1}, {Manifold::D_five_half, -1}};
  }
}

// Level sets used throughout. The four-level set covers the Bell-state gate
// (both S states and the inner D states); the six-level set adds the outer
// D states addressed by C1/C2 during state transfer.
std::vector<IonLevel> gate_level_set();      // S-1/2, S+1/2, D-1/2, D+1/2
std::vector<IonLevel> transfer_level_set();  // + D-5/2, D+5/2

// Lande g factor of the manifold the level belongs to.
double lande_g(const IonLevel& lv);

}  // namespace lli

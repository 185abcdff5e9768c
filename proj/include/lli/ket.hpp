#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "lli/basis.hpp"

namespace lli {

using cplx = std::complex<double>;

// Pure state over a CompositeBasis. Amplitudes are kept normalized; any
// operation that would break the norm beyond tolerance throws.

struct Ket {
  BasisPtr basis;
  Eigen::VectorXcd amp;

  double norm() const { return amp.norm(); }
  void check_norm(double tol = 1e-9) const;
};

// Product state |levels...>|n>. Throws if a level is not in the basis.
Ket make_ket(const BasisPtr& basis, const std::vector<IonLevel>& levels,
             int n_fock = 0);

// |<a|b>|^2, bases must match in layout.
double fidelity(const Ket& a, const Ket& b);

cplx overlap(const Ket& a, const Ket& b);

}  // namespace lli

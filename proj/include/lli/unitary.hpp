#pragma once

#include <Eigen/Dense>

#include "lli/ket.hpp"

namespace lli {

// Dense unitary on a CompositeBasis.
struct Unitary {
  BasisPtr basis;
  Eigen::MatrixXcd mat;

  // Max-norm of U^dag U - I.
  double unitarity_defect() const;
};

// Resonant carrier rotation on one ion and one named transition, identity on
// every other level and on the motional mode:
//   R(theta, phi) = cos(theta/2) I - i sin(theta/2) (cos(phi) sx + sin(phi) sy)
// with s+ = |upper><lower|. Rotations on other ions commute with it.
Unitary carrier_rotation(const BasisPtr& basis, int ion, Transition tr,
                         double theta, double phi);

// y = U x with norm check. Throws on basis/layout mismatch.
Ket apply(const Unitary& u, const Ket& k);

Unitary compose(const Unitary& second, const Unitary& first);  // second*first

}  // namespace lli

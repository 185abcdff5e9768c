#include "lli/unitary.hpp"

#include <cmath>
#include <stdexcept>

namespace lli {

double Unitary::unitarity_defect() const {
  Eigen::MatrixXcd d =
      mat.adjoint() * mat - Eigen::MatrixXcd::Identity(mat.rows(), mat.cols());
  return d.cwiseAbs().maxCoeff();
}

Unitary carrier_rotation(const BasisPtr& basis, int ion, Transition tr,
                         double theta, double phi) {
  if (!basis) throw std::invalid_argument("null basis");
  if (ion < 0 || ion >= basis->n_ions())
    throw std::invalid_argument("ion index range");
  TransitionLevels tl = transition_levels(tr);
  int lo = basis->level_index(ion, tl.lower);
  int hi = basis->level_index(ion, tl.upper);
  if (lo < 0 || hi < 0)
    throw std::invalid_argument("transition levels not in basis");

  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  // In the {lower, upper} pair: diag cos, off-diagonal -i s e^{-+ i phi}.
  const cplx u_lo_hi = cplx(0.0, -s) * std::exp(cplx(0.0, -phi));  // <lo|U|hi>
  const cplx u_hi_lo = cplx(0.0, -s) * std::exp(cplx(0.0, phi));   // <hi|U|lo>

  Unitary u;
  u.basis = basis;
  u.mat = Eigen::MatrixXcd::Zero(basis->dim(), basis->dim());
  std::vector<int> li;
  int n = 0;
  for (int idx = 0; idx < basis->dim(); ++idx) {
    basis->decompose(idx, li, n);
    int mine = li[static_cast<size_t>(ion)];
    if (mine == lo) {
      li[static_cast<size_t>(ion)] = hi;
      int other = basis->index(li, n);
      u.mat(idx, idx) = c;
      u.mat(other, idx) = u_hi_lo;
      li[static_cast<size_t>(ion)] = lo;
    } else if (mine == hi) {
      li[static_cast<size_t>(ion)] = lo;
      int other = basis->index(li, n);
      u.mat(idx, idx) = c;
      u.mat(other, idx) = u_lo_hi;
      li[static_cast<size_t>(ion)] = hi;
    } else {
      u.mat(idx, idx) = 1.0;
    }
  }
  return u;
}

Ket apply(const Unitary& u, const Ket& k) {
  if (!u.basis || !k.basis || !u.basis->same_layout(*k.basis))
    throw std::invalid_argument("apply: basis layout mismatch");
  Ket out;
  out.basis = k.basis;
  out.amp = u.mat * k.amp;
  out.check_norm(1e-8);
  return out;
}

Unitary compose(const Unitary& second, const Unitary& first) {
  if (!second.basis || !first.basis ||
      !second.basis->same_layout(*first.basis))
    throw std::invalid_argument("compose: basis layout mismatch");
  Unitary u;
  u.basis = first.basis;
  u.mat = second.mat * first.mat;
  return u;
}

}  // namespace lli

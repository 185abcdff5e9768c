#include "lli/ket.hpp"

#include <cmath>
#include <stdexcept>

namespace lli {

void Ket::check_norm(double tol) const {
  if (!basis) throw std::runtime_error("ket without basis");
  if (std::abs(norm() - 1.0) > tol)
    throw std::runtime_error("ket norm drifted: " + std::to_string(norm()));
}

Ket make_ket(const BasisPtr& basis, const std::vector<IonLevel>& levels,
             int n_fock) {
  if (!basis) throw std::invalid_argument("null basis");
  if (static_cast<int>(levels.size()) != basis->n_ions())
    throw std::invalid_argument("level count != n_ions");
  std::vector<int> li(levels.size());
  for (int i = 0; i < basis->n_ions(); ++i) {
    li[static_cast<size_t>(i)] = basis->level_index(i, levels[static_cast<size_t>(i)]);
    if (li[static_cast<size_t>(i)] < 0)
      throw std::invalid_argument("level " + levels[static_cast<size_t>(i)].name() +
                                  " not in basis for ion " + std::to_string(i));
  }
  Ket k;
  k.basis = basis;
  k.amp = Eigen::VectorXcd::Zero(basis->dim());
  k.amp[basis->index(li, n_fock)] = 1.0;
  return k;
}

cplx overlap(const Ket& a, const Ket& b) {
  if (!a.basis || !b.basis || !a.basis->same_layout(*b.basis))
    throw std::invalid_argument("overlap: basis layout mismatch");
  return a.amp.dot(b.amp);  // conjugates a
}

double fidelity(const Ket& a, const Ket& b) {
  return std::norm(overlap(a, b));
}

}  // namespace lli

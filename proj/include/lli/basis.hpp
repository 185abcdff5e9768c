#pragma once

#include <memory>
#include <vector>

#include "lli/levels.hpp"

// Tensor-product basis for n ions plus one shared motional mode. Ordering:
// ion 0 is the slowest index, the Fock index the fastest, i.e.
//   idx = ((l0*L1 + l1)*L2 + ...)*(n_max+1) + n.

namespace lli {

class CompositeBasis {
 public:
  // Same level list for every ion.
  CompositeBasis(int n_ions, std::vector<IonLevel> levels, int n_max);
  // Per-ion level lists (the gate uses a different pair per ion).
  CompositeBasis(std::vector<std::vector<IonLevel>> levels_per_ion, int n_max);

  int n_ions() const { return static_cast<int>(levels_.size()); }
  int n_max() const { return n_max_; }
  int fock_dim() const { return n_max_ + 1; }
  int dim() const { return dim_; }

  const std::vector<IonLevel>& levels(int ion) const { return levels_[ion]; }
  int level_count(int ion) const {
    return static_cast<int>(levels_[ion].size());
  }

  // Index of a level within an ion's list; -1 if the ion lacks it.
  int level_index(int ion, const IonLevel& lv) const;

  // Flat index from per-ion level indices and a Fock number.
  int index(const std::vector<int>& level_idx, int n) const;

  // Inverse of index().
  void decompose(int idx, std::vector<int>& level_idx, int& n) const;

  // Number of distinct internal configurations (dim / fock_dim).
  int internal_dim() const { return dim_ / fock_dim(); }

  // Internal configuration id for a flat index (row-major over ions).
  int internal_config(int idx) const { return idx / fock_dim(); }
  int fock_of(int idx) const { return idx % fock_dim(); }

  bool same_layout(const CompositeBasis& other) const;

 private:
  std::vector<std::vector<IonLevel>> levels_;
  int n_max_ = 0;
  int dim_ = 0;
};

using BasisPtr = std::shared_ptr<const CompositeBasis>;

BasisPtr make_basis(int n_ions, std::vector<IonLevel> levels, int n_max);
BasisPtr make_basis(std::vector<std::vector<IonLevel>> levels_per_ion,
                    int n_max);

}  // namespace lli

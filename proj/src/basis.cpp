#include "lli/basis.hpp"

#include <stdexcept>

#include "lli/constants.hpp"

namespace lli {

std::string IonLevel::name() const {
  std::string s = manifold == Manifold::S_half ? "S" : "D";
  s += two_mj < 0 ? '-' : '+';
  s += std::to_string(two_mj < 0 ? -two_mj : two_mj);
  s += "/2";
  return s;
}

std::vector<IonLevel> gate_level_set() {
  return {{Manifold::S_half, -1},
          {Manifold::S_half, 1},
          {Manifold::D_five_half, -1},
          {Manifold::D_five_half, 1}};
}

std::vector<IonLevel> transfer_level_set() {
  return {{Manifold::S_half, -1},      {Manifold::S_half, 1},
          {Manifold::D_five_half, -5}, {Manifold::D_five_half, -1},
          {Manifold::D_five_half, 1},  {Manifold::D_five_half, 5}};
}

double lande_g(const IonLevel& lv) {
  return lv.manifold == Manifold::S_half ? constants::g_s_half
                                         : constants::g_d_five_half;
}

CompositeBasis::CompositeBasis(int n_ions, std::vector<IonLevel> levels,
                               int n_max)
    : CompositeBasis(
          std::vector<std::vector<IonLevel>>(static_cast<size_t>(n_ions),
                                             std::move(levels)),
          n_max) {}

CompositeBasis::CompositeBasis(std::vector<std::vector<IonLevel>> levels_per_ion,
                               int n_max)
    : levels_(std::move(levels_per_ion)), n_max_(n_max) {
  if (levels_.empty()) throw std::invalid_argument("basis needs >= 1 ion");
  if (n_max_ < 0) throw std::invalid_argument("n_max must be >= 0");
  long d = n_max_ + 1;
  for (const auto& ls : levels_) {
    if (ls.empty()) throw std::invalid_argument("empty level list");
    for (const auto& lv : ls) lv.validate();
    d *= static_cast<long>(ls.size());
    if (d > 1'000'000) throw std::invalid_argument("basis too large");
  }
  dim_ = static_cast<int>(d);
}

int CompositeBasis::level_index(int ion, const IonLevel& lv) const {
  const auto& ls = levels_.at(static_cast<size_t>(ion));
  for (size_t i = 0; i < ls.size(); ++i)
    if (ls[i] == lv) return static_cast<int>(i);
  return -1;
}

int CompositeBasis::index(const std::vector<int>& level_idx, int n) const {
  if (static_cast<int>(level_idx.size()) != n_ions())
    throw std::invalid_argument("level_idx size mismatch");
  if (n < 0 || n > n_max_) throw std::invalid_argument("fock index range");
  int idx = 0;
  for (int i = 0; i < n_ions(); ++i) {
    int li = level_idx[static_cast<size_t>(i)];
    if (li < 0 || li >= level_count(i))
      throw std::invalid_argument("level index range");
    idx = idx * level_count(i) + li;
  }
  return idx * fock_dim() + n;
}

void CompositeBasis::decompose(int idx, std::vector<int>& level_idx,
                               int& n) const {
  if (idx < 0 || idx >= dim_) throw std::invalid_argument("index range");
  n = idx % fock_dim();
  idx /= fock_dim();
  level_idx.assign(static_cast<size_t>(n_ions()), 0);
  for (int i = n_ions() - 1; i >= 0; --i) {
    level_idx[static_cast<size_t>(i)] = idx % level_count(i);
    idx /= level_count(i);
  }
}

bool CompositeBasis::same_layout(const CompositeBasis& other) const {
  if (n_ions() != other.n_ions() || n_max_ != other.n_max_) return false;
  for (int i = 0; i < n_ions(); ++i)
    if (levels_[static_cast<size_t>(i)] != other.levels_[static_cast<size_t>(i)])
      return false;
  return true;
}

BasisPtr make_basis(int n_ions, std::vector<IonLevel> levels, int n_max) {
  return std::make_shared<const CompositeBasis>(n_ions, std::move(levels),
                                                n_max);
}

BasisPtr make_basis(std::vector<std::vector<IonLevel>> levels_per_ion,
                    int n_max) {
  return std::make_shared<const CompositeBasis>(std::move(levels_per_ion),
                                                n_max);
}

}  // namespace lli

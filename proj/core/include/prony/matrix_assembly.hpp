#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "prony/signal_model.hpp"
#include "prony/types.hpp"

namespace prony {

class WorkerPool;

/// The ordered index set I_n = {0, ..., n}^d, lexicographic with the last
/// coordinate fastest. Row and column r of every assembled matrix refer to
/// point(r).
class IndexSet {
 public:
  IndexSet(int n, int dim);

  int n() const noexcept { return n_; }
  int dim() const noexcept { return dim_; }
  Index size() const noexcept { return size_; }
  std::span<const int> point(Index r) const {
    return {coords_.data() + r * dim_, static_cast<std::size_t>(dim_)};
  }

 private:
  int n_;
  int dim_;
  Index size_;
  std::vector<int> coords_;
};

/// \throws CapacityError when (n+1)^d is not addressable.
IndexSet index_set(int n, int dim);

/// T[k, h] = f(k - h).
DenseMatrix build_T(const SampleGrid& grid, const IndexSet& idx, const WorkerPool* pool = nullptr);

/// T_ell[k, h] = f(k - h + e_ell), ell in 1..d.
DenseMatrix build_T_ell(const SampleGrid& grid, const IndexSet& idx, int ell,
                        const WorkerPool* pool = nullptr);

/// f = [f(k)] for k in I_n.
ComplexVector build_f_vector(const SampleGrid& grid, const IndexSet& idx);

/// B_mu = sum_ell mu_ell T_ell, accumulated in ell order for every entry.
DenseMatrix build_B_mu(std::span<const DenseMatrix> t_ells, const ComplexVector& mu,
                       const WorkerPool* pool = nullptr);

/// (sum_ell w_ell T_ell) * X without materialising the N x N matrix.
///
/// Each fixed row panel of the result is accumulated from fixed-width tiles
/// generated from the grid, always in tile order, so the result does not
/// depend on the worker count. A unit weight vector e_ell yields T_ell * X.
DenseMatrix streamed_shift_product(const SampleGrid& grid, const IndexSet& idx,
                                   const ComplexVector& weights, const DenseMatrix& x,
                                   const WorkerPool* pool = nullptr);

/// Debug dump: uint64 rows, uint64 cols, then row-major (re, im) doubles.
void save_matrix(const DenseMatrix& m, const std::filesystem::path& path);
DenseMatrix load_matrix(const std::filesystem::path& path);

}  // namespace prony

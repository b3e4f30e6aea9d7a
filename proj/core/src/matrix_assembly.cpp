#include "prony/matrix_assembly.hpp"

#include <cstdint>
#include <fstream>
#include <limits>

#include "prony/errors.hpp"
#include "prony/parallel.hpp"

namespace prony {

namespace {

// Linear grid offsets: point k - h + e lives at key[k] - key[h] + base.
struct Addressing {
  std::vector<Index> key;
  Index center = 0;
  Index stride_of_axis(int ell) const { return strides[static_cast<std::size_t>(ell - 1)]; }
  std::vector<Index> strides;
};

Addressing addressing(const SampleGrid& grid, const IndexSet& idx) {
  if (grid.dim() != idx.dim()) throw InputError("grid and index set differ in dimension");
  if (grid.n() < idx.n()) throw InputError("sample box too small for the index set");
  const int d = idx.dim();
  Addressing a;
  a.strides.assign(static_cast<std::size_t>(d), 1);
  for (int i = d - 2; i >= 0; --i) {
    a.strides[static_cast<std::size_t>(i)] = a.strides[static_cast<std::size_t>(i) + 1] * grid.side();
  }
  for (int i = 0; i < d; ++i) a.center += static_cast<Index>(grid.n()) * a.strides[static_cast<std::size_t>(i)];
  a.key.resize(static_cast<std::size_t>(idx.size()));
  for (Index r = 0; r < idx.size(); ++r) {
    Index key = 0;
    const auto p = idx.point(r);
    for (int i = 0; i < d; ++i) key += p[static_cast<std::size_t>(i)] * a.strides[static_cast<std::size_t>(i)];
    a.key[static_cast<std::size_t>(r)] = key;
  }
  return a;
}

template <typename Body>
void for_panels(Index extent, const WorkerPool* pool, Body&& body) {
  const Index panels = (extent + kPanelSize - 1) / kPanelSize;
  auto run = [&](std::size_t p) {
    const Index begin = static_cast<Index>(p) * kPanelSize;
    body(begin, std::min(kPanelSize, extent - begin));
  };
  if (pool) {
    pool->parallel_for(static_cast<std::size_t>(panels), run);
  } else {
    for (Index p = 0; p < panels; ++p) run(static_cast<std::size_t>(p));
  }
}

DenseMatrix build_shifted(const SampleGrid& grid, const IndexSet& idx, Index shift,
                          const WorkerPool* pool) {
  const Addressing a = addressing(grid, idx);
  const Index n = idx.size();
  DenseMatrix out(n, n);
  const Complex* values = grid.values().data();
  for_panels(n, pool, [&](Index c0, Index width) {
    for (Index c = c0; c < c0 + width; ++c) {
      const Index base = a.center + shift - a.key[static_cast<std::size_t>(c)];
      for (Index r = 0; r < n; ++r) out(r, c) = values[a.key[static_cast<std::size_t>(r)] + base];
    }
  });
  return out;
}

}  // namespace

IndexSet::IndexSet(int n, int dim) : n_(n), dim_(dim), size_(1) {
  if (n < 0 || dim < 1) throw InputError("index set needs n >= 0 and d >= 1");
  const Index side = static_cast<Index>(n) + 1;
  for (int i = 0; i < dim; ++i) {
    if (size_ > std::numeric_limits<Index>::max() / side / dim) throw CapacityError("index set is not addressable");
    size_ *= side;
  }
  coords_.resize(static_cast<std::size_t>(size_ * dim));
  for (Index r = 0; r < size_; ++r) {
    Index rest = r;
    for (int i = dim - 1; i >= 0; --i) {
      coords_[static_cast<std::size_t>(r * dim + i)] = static_cast<int>(rest % side);
      rest /= side;
    }
  }
}

IndexSet index_set(int n, int dim) { return IndexSet(n, dim); }

DenseMatrix build_T(const SampleGrid& grid, const IndexSet& idx, const WorkerPool* pool) {
  return build_shifted(grid, idx, 0, pool);
}

DenseMatrix build_T_ell(const SampleGrid& grid, const IndexSet& idx, int ell, const WorkerPool* pool) {
  if (ell < 1 || ell > idx.dim()) throw InputError("shift direction out of range");
  const Addressing a = addressing(grid, idx);
  return build_shifted(grid, idx, a.stride_of_axis(ell), pool);
}

ComplexVector build_f_vector(const SampleGrid& grid, const IndexSet& idx) {
  const Addressing a = addressing(grid, idx);
  ComplexVector f(idx.size());
  for (Index r = 0; r < idx.size(); ++r) f(r) = grid.values()[static_cast<std::size_t>(a.center + a.key[static_cast<std::size_t>(r)])];
  return f;
}

DenseMatrix build_B_mu(std::span<const DenseMatrix> t_ells, const ComplexVector& mu, const WorkerPool* pool) {
  if (t_ells.empty() || static_cast<Index>(t_ells.size()) != mu.size()) throw InputError("need one weight per shifted matrix");
  const Index rows = t_ells[0].rows();
  const Index cols = t_ells[0].cols();
  for (const auto& t : t_ells) {
    if (t.rows() != rows || t.cols() != cols) throw InputError("shifted matrices differ in shape");
  }
  DenseMatrix out(rows, cols);
  for_panels(cols, pool, [&](Index c0, Index width) {
    auto block = out.middleCols(c0, width);
    block = mu(0) * t_ells[0].middleCols(c0, width);
    for (std::size_t ell = 1; ell < t_ells.size(); ++ell) {
      block += mu(static_cast<Index>(ell)) * t_ells[ell].middleCols(c0, width);
    }
  });
  return out;
}

DenseMatrix streamed_shift_product(const SampleGrid& grid, const IndexSet& idx, const ComplexVector& weights,
                                   const DenseMatrix& x, const WorkerPool* pool) {
  if (weights.size() != idx.dim()) throw InputError("need one weight per dimension");
  if (x.rows() != idx.size()) throw InputError("operand rows differ from index set size");
  const Addressing a = addressing(grid, idx);
  const Index n = idx.size();
  const Complex* values = grid.values().data();
  std::vector<std::pair<Index, Complex>> terms;
  for (int ell = 1; ell <= idx.dim(); ++ell) {
    if (weights(ell - 1) != Complex(0.0, 0.0)) terms.emplace_back(a.center + a.stride_of_axis(ell), weights(ell - 1));
  }
  DenseMatrix out = DenseMatrix::Zero(n, x.cols());
  for_panels(n, pool, [&](Index r0, Index height) {
    DenseMatrix tile(height, kPanelSize);
    for (Index c0 = 0; c0 < n; c0 += kPanelSize) {
      const Index width = std::min(kPanelSize, n - c0);
      for (Index c = 0; c < width; ++c) {
        const Index col_key = a.key[static_cast<std::size_t>(c0 + c)];
        for (Index r = 0; r < height; ++r) {
          const Index diff = a.key[static_cast<std::size_t>(r0 + r)] - col_key;
          Complex acc(0.0, 0.0);
          for (const auto& [base, w] : terms) acc += w * values[diff + base];
          tile(r, c) = acc;
        }
      }
      out.middleRows(r0, height).noalias() += tile.leftCols(width) * x.middleRows(c0, width);
    }
  });
  return out;
}

void save_matrix(const DenseMatrix& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  const auto rows = static_cast<std::uint64_t>(m.rows());
  const auto cols = static_cast<std::uint64_t>(m.cols());
  out.write(reinterpret_cast<const char*>(&rows), sizeof rows);
  out.write(reinterpret_cast<const char*>(&cols), sizeof cols);
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      const double parts[2] = {m(r, c).real(), m(r, c).imag()};
      out.write(reinterpret_cast<const char*>(parts), sizeof parts);
    }
  }
  if (!out) throw InputError("failed writing " + path.string());
}

DenseMatrix load_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::uint64_t rows = 0;
  std::uint64_t cols = 0;
  in.read(reinterpret_cast<char*>(&rows), sizeof rows);
  in.read(reinterpret_cast<char*>(&cols), sizeof cols);
  if (!in || rows > (1ull << 31) || cols > (1ull << 31)) throw InputError("matrix header is malformed");
  DenseMatrix m(static_cast<Index>(rows), static_cast<Index>(cols));
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      double parts[2];
      in.read(reinterpret_cast<char*>(parts), sizeof parts);
      if (!in) throw InputError("matrix file is truncated");
      m(r, c) = Complex(parts[0], parts[1]);
    }
  }
  return m;
}

}  // namespace prony

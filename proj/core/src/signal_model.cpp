#include "prony/signal_model.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "prony/errors.hpp"
#include "prony/parallel.hpp"

namespace prony {

double mod1_distance(double a, double b) {
  const double diff = std::abs(a - b);
  const double wrapped = diff - std::floor(diff);
  return std::min(wrapped, 1.0 - wrapped);
}

namespace {

double wrap01(double x) {
  double r = x - std::floor(x);
  // floor can round x - floor(x) up to exactly 1 for tiny negative x.
  if (r >= 1.0) r = 0.0;
  return r;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double unit_interval(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace

ExponentialSum::ExponentialSum(RealMatrix params, ComplexVector coeffs)
    : params_(std::move(params)), coeffs_(std::move(coeffs)) {
  if (params_.rows() < 1 || params_.cols() < 1) throw InputError("exponential sum needs m >= 1 and d >= 1");
  if (coeffs_.size() != params_.rows()) throw InputError("coefficient count differs from parameter count");
  for (Index j = 0; j < params_.rows(); ++j) {
    for (Index i = 0; i < params_.cols(); ++i) {
      const double t = params_(j, i);
      if (!std::isfinite(t) || t < 0.0 || t >= 1.0) throw InputError("parameter outside [0,1)");
    }
    if (coeffs_(j) == Complex(0.0, 0.0) || !std::isfinite(std::abs(coeffs_(j)))) {
      throw InputError("coefficients must be finite and nonzero");
    }
  }
  for (Index a = 0; a < params_.rows(); ++a) {
    for (Index b = a + 1; b < params_.rows(); ++b) {
      if (params_.row(a) == params_.row(b)) throw InputError("parameters must be pairwise distinct");
    }
  }
}

ExponentialSum ExponentialSum::wrapped(RealMatrix params, ComplexVector coeffs) {
  for (Index j = 0; j < params.rows(); ++j) {
    for (Index i = 0; i < params.cols(); ++i) {
      if (!std::isfinite(params(j, i))) throw InputError("parameter is not finite");
      params(j, i) = wrap01(params(j, i));
    }
  }
  return ExponentialSum(std::move(params), std::move(coeffs));
}

Complex ExponentialSum::evaluate(std::span<const int> k) const {
  if (static_cast<Index>(k.size()) != params_.cols()) throw InputError("lattice point has wrong dimension");
  Complex sum(0.0, 0.0);
  for (Index j = 0; j < params_.rows(); ++j) {
    // Accumulate the phase modulo 1 so large |k| keeps full precision.
    double phase = 0.0;
    for (Index i = 0; i < params_.cols(); ++i) {
      const double term = params_(j, i) * static_cast<double>(k[static_cast<std::size_t>(i)]);
      phase = wrap01(phase + (term - std::floor(term)));
    }
    const double angle = -kTwoPi * phase;
    sum += coeffs_(j) * Complex(std::cos(angle), std::sin(angle));
  }
  return sum;
}

Complex noise_factor(const NoiseModel& noise, std::span<const int> k) {
  if (noise.epsilon == 0.0) return {0.0, 0.0};
  std::uint64_t h = splitmix64(noise.seed);
  for (int ki : k) h = splitmix64(h ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(ki)));
  const double r = noise.epsilon * unit_interval(splitmix64(h ^ 0x5152ULL));
  const double theta = kTwoPi * unit_interval(splitmix64(h ^ 0x7468ULL));
  return {r * std::cos(theta), r * std::sin(theta)};
}

Index box_size(int dim, int n) {
  if (dim < 1 || n < 0) throw InputError("box needs d >= 1 and n >= 0");
  const Index side = 2 * static_cast<Index>(n) + 2;
  Index size = 1;
  for (int i = 0; i < dim; ++i) {
    if (size > std::numeric_limits<Index>::max() / side) throw CapacityError("sample box is not addressable");
    size *= side;
  }
  return size;
}

SampleGrid::SampleGrid(int dim, int n, std::vector<Complex> values)
    : dim_(dim), n_(n), values_(std::move(values)) {
  if (static_cast<Index>(values_.size()) != box_size(dim, n)) {
    throw InputError("grid holds " + std::to_string(values_.size()) + " values, box needs " +
                     std::to_string(box_size(dim, n)));
  }
}

Index SampleGrid::offset(std::span<const int> k) const {
  if (static_cast<int>(k.size()) != dim_) throw InputError("lattice point has wrong dimension");
  Index linear = 0;
  for (int ki : k) {
    if (ki < -n_ || ki > n_ + 1) throw InputError("lattice point outside the sample box");
    linear = linear * side() + (ki + n_);
  }
  return linear;
}

std::vector<int> SampleGrid::point(Index linear) const {
  std::vector<int> k(static_cast<std::size_t>(dim_));
  for (int i = dim_ - 1; i >= 0; --i) {
    k[static_cast<std::size_t>(i)] = static_cast<int>(linear % side()) - n_;
    linear /= side();
  }
  return k;
}

SampleGrid sample_grid(const ExponentialSum& sum, int n, const NoiseModel& noise,
                       const WorkerPool* pool) {
  if (n < 1) throw InputError("n must be positive");
  if (!(noise.epsilon >= 0.0) || !std::isfinite(noise.epsilon)) throw InputError("noise bound must be finite and >= 0");
  const int dim = sum.dim();
  const Index size = box_size(dim, n);
  std::vector<Complex> values(static_cast<std::size_t>(size));
  const Index side = 2 * static_cast<Index>(n) + 2;
  constexpr Index kChunk = 4096;
  const Index chunks = (size + kChunk - 1) / kChunk;
  auto body = [&](std::size_t c) {
    const Index begin = static_cast<Index>(c) * kChunk;
    const Index end = std::min(size, begin + kChunk);
    std::vector<int> k(static_cast<std::size_t>(dim));
    for (Index p = begin; p < end; ++p) {
      Index rest = p;
      for (int i = dim - 1; i >= 0; --i) {
        k[static_cast<std::size_t>(i)] = static_cast<int>(rest % side) - n;
        rest /= side;
      }
      const Complex f = sum.evaluate(k);
      values[static_cast<std::size_t>(p)] =
          noise.epsilon == 0.0 ? f : f * (Complex(1.0, 0.0) + noise_factor(noise, k));
    }
  };
  if (pool) {
    pool->parallel_for(static_cast<std::size_t>(chunks), body);
  } else {
    for (Index c = 0; c < chunks; ++c) body(static_cast<std::size_t>(c));
  }
  return SampleGrid(dim, n, std::move(values));
}

ExponentialSum standard_test_family(int dim, int terms) {
  if (dim < 1 || terms < 1) throw InputError("family needs d >= 1 and m >= 1");
  const long long dm = static_cast<long long>(dim) * terms;
  long long scale = 1;
  while (scale < dm) scale *= 10;
  RealMatrix params(terms, dim);
  ComplexVector coeffs(terms);
  for (int j = 1; j <= terms; ++j) {
    for (int i = 1; i <= dim; ++i) {
      const long long numerator = static_cast<long long>(i - 1) * terms + (j - 1);
      params(j - 1, i - 1) = static_cast<double>(numerator) / static_cast<double>(scale);
    }
    coeffs(j - 1) = Complex(j, j);
  }
  return ExponentialSum(std::move(params), std::move(coeffs));
}

}  // namespace prony

#include "prony/signal_io.hpp"

#include <array>
#include <cstring>
#include <fstream>

#include "prony/errors.hpp"

namespace prony {

namespace {

constexpr std::array<char, 8> kGridMagic{'P', 'R', 'N', 'Y', 'G', 'R', 'I', 'D'};
constexpr std::uint32_t kGridVersion = 1;

template <typename T>
void write_pod(std::ofstream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw InputError("grid file is truncated");
  return value;
}

}  // namespace

nlohmann::json signal_to_json(const ExponentialSum& sum) {
  nlohmann::json t = nlohmann::json::array();
  nlohmann::json c = nlohmann::json::array();
  for (int j = 0; j < sum.terms(); ++j) {
    nlohmann::json row = nlohmann::json::array();
    for (int i = 0; i < sum.dim(); ++i) row.push_back(sum.params()(j, i));
    t.push_back(std::move(row));
    c.push_back({sum.coeffs()(j).real(), sum.coeffs()(j).imag()});
  }
  return {{"d", sum.dim()}, {"m", sum.terms()}, {"t", std::move(t)}, {"c", std::move(c)}};
}

ExponentialSum signal_from_json(const nlohmann::json& j) {
  try {
    const int d = j.at("d").get<int>();
    const int m = j.at("m").get<int>();
    const auto& t = j.at("t");
    const auto& c = j.at("c");
    if (d < 1 || m < 1) throw InputError("signal needs d >= 1 and m >= 1");
    if (t.size() != static_cast<std::size_t>(m) || c.size() != static_cast<std::size_t>(m)) {
      throw InputError("signal lists do not have m entries");
    }
    RealMatrix params(m, d);
    ComplexVector coeffs(m);
    for (int r = 0; r < m; ++r) {
      if (t[r].size() != static_cast<std::size_t>(d)) throw InputError("parameter row does not have d entries");
      for (int i = 0; i < d; ++i) params(r, i) = t[r][i].get<double>();
      if (c[r].size() != 2) throw InputError("coefficient must be [re, im]");
      coeffs(r) = Complex(c[r][0].get<double>(), c[r][1].get<double>());
    }
    return ExponentialSum(std::move(params), std::move(coeffs));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed signal definition: ") + e.what());
  }
}

void save_signal(const ExponentialSum& sum, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  // 17 significant digits make the text form round-trip bit-exactly.
  out << signal_to_json(sum).dump(2) << '\n';
  if (!out) throw InputError("failed writing " + path.string());
}

ExponentialSum load_signal(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError("cannot parse " + path.string() + ": " + e.what());
  }
  return signal_from_json(j);
}

void save_grid(const SampleGrid& grid, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  out.write(kGridMagic.data(), kGridMagic.size());
  write_pod(out, kGridVersion);
  write_pod(out, static_cast<std::uint32_t>(grid.dim()));
  write_pod(out, static_cast<std::uint32_t>(grid.n()));
  write_pod(out, std::uint32_t{0});
  for (const Complex& v : grid.values()) {
    write_pod(out, v.real());
    write_pod(out, v.imag());
  }
  if (!out) throw InputError("failed writing " + path.string());
}

SampleGrid load_grid(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kGridMagic) throw InputError(path.string() + " is not a grid file");
  if (read_pod<std::uint32_t>(in) != kGridVersion) throw InputError("unsupported grid format version");
  const auto d = read_pod<std::uint32_t>(in);
  const auto n = read_pod<std::uint32_t>(in);
  read_pod<std::uint32_t>(in);
  if (d < 1 || n < 1 || d > 64 || n > (1u << 20)) throw InputError("grid header out of range");
  const Index size = box_size(static_cast<int>(d), static_cast<int>(n));
  std::vector<Complex> values(static_cast<std::size_t>(size));
  for (auto& v : values) {
    const double re = read_pod<double>(in);
    const double im = read_pod<double>(in);
    v = Complex(re, im);
  }
  if (in.peek() != std::ifstream::traits_type::eof()) throw InputError("grid file has trailing data");
  return SampleGrid(static_cast<int>(d), static_cast<int>(n), std::move(values));
}

}  // namespace prony

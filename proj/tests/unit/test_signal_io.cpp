#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include <prony/errors.hpp>
#include <prony/signal_io.hpp>

namespace prony {
namespace {

namespace fs = std::filesystem;

fs::path temp_file(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "prony_signal_io";
  fs::create_directories(dir);
  return dir / name;
}

TEST(SignalIo, SignalRoundTripsBitExactly) {
  RealMatrix t(3, 2);
  t << 0.1, 0.7, 1.0 / 3.0, 0.123456789012345678, 0.0, 0.999999999999;
  ComplexVector c(3);
  c << Complex(1.0 / 7.0, -2.5), Complex(1e-300, 3.0), Complex(-4.0, 0.1);
  const ExponentialSum sum(t, c);
  const fs::path path = temp_file("signal.json");
  save_signal(sum, path);
  const ExponentialSum back = load_signal(path);
  EXPECT_TRUE(back.params() == sum.params());
  EXPECT_TRUE(back.coeffs() == sum.coeffs());
}

TEST(SignalIo, RejectsMalformedDefinitions) {
  EXPECT_THROW(signal_from_json(nlohmann::json{{"d", 1}}), InputError);
  EXPECT_THROW(signal_from_json(nlohmann::json{{"d", 1}, {"m", 1}, {"t", {{0.1, 0.2}}}, {"c", {{1.0, 0.0}}}}),
               InputError);
  EXPECT_THROW(signal_from_json(nlohmann::json{{"d", 1}, {"m", 1}, {"t", {{0.1}}}, {"c", {{0.0, 0.0}}}}), InputError);
  const fs::path path = temp_file("broken.json");
  std::ofstream(path) << "{ not json";
  EXPECT_THROW(load_signal(path), InputError);
}

TEST(GridIo, RoundTripsBitExactly) {
  const SampleGrid grid = sample_grid(standard_test_family(2, 3), 3, {1e-4, 5});
  const fs::path path = temp_file("grid.bin");
  save_grid(grid, path);
  EXPECT_EQ(fs::file_size(path), 24u + 16u * grid.values().size());
  EXPECT_TRUE(load_grid(path) == grid);
}

TEST(GridIo, RejectsCorruptFiles) {
  const fs::path bad_magic = temp_file("bad_magic.bin");
  std::ofstream(bad_magic, std::ios::binary) << "NOTAGRID and some more bytes";
  EXPECT_THROW(load_grid(bad_magic), InputError);

  const SampleGrid grid = sample_grid(standard_test_family(1, 1), 2, {});
  const fs::path path = temp_file("truncated.bin");
  save_grid(grid, path);
  fs::resize_file(path, fs::file_size(path) - 8);
  EXPECT_THROW(load_grid(path), InputError);
  EXPECT_THROW(load_grid(temp_file("missing.bin")), InputError);
}

}  // namespace
}  // namespace prony

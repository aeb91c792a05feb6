#include "conslab/snapshot.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "conslab/error.hpp"

namespace conslab {

namespace {

constexpr char kMagic[5] = {'C', 'S', 'L', 'B', '1'};

template <class T>
void put_le(std::ostream& os, T v) {
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big)
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
  os.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <class T>
T get_le(std::istream& is) {
  unsigned char b[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(b), sizeof(T))) throw Error("snapshot: truncated file");
  if constexpr (std::endian::native == std::endian::big)
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
  T v;
  std::memcpy(&v, b, sizeof(T));
  return v;
}

}  // namespace

void write_snapshot(const std::filesystem::path& path, const std::vector<ScalarField>& components) {
  if (components.empty()) throw InvalidArgument("write_snapshot: no components");
  const Grid& g = components.front().g();
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("write_snapshot: cannot open " + path.string());
  os.write(kMagic, sizeof(kMagic));
  put_le<std::uint32_t>(os, g.N1);
  put_le<std::uint32_t>(os, g.N2);
  put_le<std::uint32_t>(os, g.Nz);
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(components.size()));
  put_le<double>(os, g.L1);
  put_le<double>(os, g.L2);
  put_le<double>(os, g.Zmax);
  put_le<double>(os, g.stretch);
  for (const auto& c : components) {
    if (c.g().size() != g.size()) throw InvalidArgument("write_snapshot: grid mismatch");
    for (double v : c.values()) put_le<double>(os, v);
  }
  if (!os) throw Error("write_snapshot: write failed for " + path.string());
}

void write_snapshot(const std::filesystem::path& path, const VectorField& u) {
  write_snapshot(path, std::vector<ScalarField>{u[0], u[1], u[2]});
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("read_snapshot: cannot open " + path.string());
  char magic[5];
  if (!is.read(magic, 5) || std::memcmp(magic, kMagic, 5) != 0)
    throw Error("read_snapshot: bad magic in " + path.string());
  const auto n1 = get_le<std::uint32_t>(is);
  const auto n2 = get_le<std::uint32_t>(is);
  const auto nz = get_le<std::uint32_t>(is);
  const auto nc = get_le<std::uint32_t>(is);
  const double l1 = get_le<double>(is);
  const double l2 = get_le<double>(is);
  const double zmax = get_le<double>(is);
  const double stretch = get_le<double>(is);
  Snapshot snap;
  snap.grid = make_grid(l1, l2, static_cast<int>(n1), static_cast<int>(n2), static_cast<int>(nz), zmax,
                        stretch);
  for (std::uint32_t c = 0; c < nc; ++c) {
    ScalarField f(snap.grid);
    for (auto& v : f.values()) v = get_le<double>(is);
    snap.components.push_back(std::move(f));
  }
  return snap;
}

}  // namespace conslab

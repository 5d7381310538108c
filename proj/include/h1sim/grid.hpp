#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace h1sim {

// Flat (i,j,k) -> index layout, k fastest. All field and permittivity grids
// share one Dims so kernels can mix them freely.
struct Dims {
  int nx = 0, ny = 0, nz = 0;
  std::size_t size() const { return std::size_t(nx) * ny * nz; }
  std::size_t at(int i, int j, int k) const {
    return (std::size_t(i) * ny + j) * nz + k;
  }
  bool contains(int i, int j, int k) const {
    return i >= 0 && i < nx && j >= 0 && j < ny && k >= 0 && k < nz;
  }
};

template <typename T>
struct Grid3 {
  Dims dims;
  std::vector<T> data;

  Grid3() = default;
  explicit Grid3(Dims d, T fill = T(0)) : dims(d), data(d.size(), fill) {}

  T& operator()(int i, int j, int k) { return data[dims.at(i, j, k)]; }
  const T& operator()(int i, int j, int k) const { return data[dims.at(i, j, k)]; }
  T* raw() { return data.data(); }
  const T* raw() const { return data.data(); }
};

using FieldGrid = Grid3<float>;
using ScalarGrid = Grid3<double>;

// FNV-1a, used for content-addressed cache keys; stable across builds.
inline std::uint64_t fnv1a64(const void* bytes, std::size_t n,
                             std::uint64_t h = 1469598103934665603ull) {
  const auto* p = static_cast<const unsigned char*>(bytes);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace h1sim

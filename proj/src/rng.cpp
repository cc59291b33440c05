#include "sdesplit/rng.hpp"

#include <cmath>
#include <numbers>

namespace sdesplit {

namespace {

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_state(const StreamKey& key) {
  std::uint64_t h = mix64(key.seed);
  h = mix64(h ^ (key.path_index + 0x632be59bd9b4e019ULL));
  h = mix64(h ^ (static_cast<std::uint64_t>(key.purpose) + 0x9e6c63d0876a9a47ULL));
  return h;
}

}  // namespace

RandomStream::RandomStream(const StreamKey& key) : state_(derive_state(key)) {}

std::uint64_t RandomStream::next_u64() {
  state_ += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double RandomStream::uniform() {
  // 53-bit mantissa, shifted into (0, 1] so log() is always finite.
  return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double RandomStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

double RandomStream::gamma(double shape) {
  if (!(shape > 0.0)) throw std::invalid_argument("gamma: shape must be positive");
  if (shape < 1.0) {
    const double u = uniform();
    return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double RandomStream::chi_square(double dof) {
  if (dof == 0.0) return 0.0;
  return 2.0 * gamma(dof / 2.0);
}

double RandomStream::noncentral_chi_square(double dof, double noncentrality) {
  if (!(dof >= 1.0)) throw std::invalid_argument("noncentral_chi_square: dof must be >= 1");
  if (noncentrality < 0.0) throw std::invalid_argument("noncentral_chi_square: negative noncentrality");
  const double z = normal() + std::sqrt(noncentrality);
  return chi_square(dof - 1.0) + z * z;
}

NoiseGrid make_noise_grid(const StreamKey& key, double h_fine, std::size_t n_steps) {
  if (!(h_fine > 0.0)) throw std::invalid_argument("make_noise_grid: h_fine must be positive");
  if (n_steps == 0) throw std::invalid_argument("make_noise_grid: n_steps must be >= 1");
  NoiseGrid grid;
  grid.key = key;
  grid.h_fine = h_fine;
  grid.n_steps = n_steps;
  grid.increments.resize(n_steps);
  RandomStream rng(key);
  const double scale = std::sqrt(h_fine);
  for (std::size_t i = 0; i < n_steps; ++i) grid.increments[i] = scale * rng.normal();
  return grid;
}

NoiseGrid coarsen(const NoiseGrid& grid, std::size_t factor) {
  if (factor == 0 || grid.n_steps % factor != 0)
    throw std::invalid_argument("coarsen: factor must divide n_steps");
  NoiseGrid out;
  out.key = grid.key;
  out.h_fine = grid.h_fine * static_cast<double>(factor);
  out.n_steps = grid.n_steps / factor;
  out.increments.resize(out.n_steps);
  for (std::size_t i = 0; i < out.n_steps; ++i) {
    double sum = 0.0;  // left-to-right so coupled runs are bit-exact
    for (std::size_t j = 0; j < factor; ++j) sum += grid.increments[i * factor + j];
    out.increments[i] = sum;
  }
  return out;
}

std::vector<double> standard_normal(const StreamKey& key, std::size_t count) {
  if (count == 0) throw std::invalid_argument("standard_normal: count must be >= 1");
  std::vector<double> out(count);
  RandomStream rng(key);
  for (auto& x : out) x = rng.normal();
  return out;
}

}  // namespace sdesplit

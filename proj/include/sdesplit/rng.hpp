#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace sdesplit {

// What a stream is used for. Part of the stream key so that, e.g., the
// optimizer can never consume draws destined for path noise.
enum class Purpose : std::uint64_t {
  path_noise = 0,
  bootstrap = 1,
  optimizer_jitter = 2,
};

// Identifies one independent random stream. Distinct keys give
// statistically independent streams; the same key always reproduces the
// same stream, on any platform and under any thread schedule.
struct StreamKey {
  std::uint64_t seed = 0;
  std::uint64_t path_index = 0;
  Purpose purpose = Purpose::path_noise;
};

// SplitMix64 stream seeded by hashing the full key. Normal variates use
// Box-Muller on 53-bit uniforms, so output is bit-exact everywhere.
class RandomStream {
 public:
  explicit RandomStream(const StreamKey& key);

  std::uint64_t next_u64();
  double uniform();         // (0, 1]
  double normal();          // standard normal
  double gamma(double shape);            // Marsaglia-Tsang
  double chi_square(double dof);
  double noncentral_chi_square(double dof, double noncentrality);  // dof >= 1

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Brownian increment grid at resolution h_fine. Increments are i.i.d.
// Normal(0, h_fine); grids are immutable after creation.
struct NoiseGrid {
  StreamKey key;
  double h_fine = 0.0;
  std::size_t n_steps = 0;
  std::vector<double> increments;
};

NoiseGrid make_noise_grid(const StreamKey& key, double h_fine, std::size_t n_steps);

// Sums consecutive blocks of `factor` increments (left to right, so the
// total sum is bit-identical to the fine grid's). factor must divide n_steps.
NoiseGrid coarsen(const NoiseGrid& grid, std::size_t factor);

std::vector<double> standard_normal(const StreamKey& key, std::size_t count);

}  // namespace sdesplit

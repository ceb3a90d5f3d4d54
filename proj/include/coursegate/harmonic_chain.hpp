#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace coursegate {

// 1-D chain of unit masses joined by unit nearest-neighbour springs of unit
// rest length. Particle 0 is clamped; the last particle is driven so its
// displacement is strain_rate * (n - 1) * t. Interior particles start at rest
// on the lattice with velocities drawn uniformly from
// [-velocity_scale, velocity_scale].
struct ChainParams {
  int n_particles = 32;
  int steps = 1000;
  double dt = 0.01;
  double strain_rate = 0.0;
  double velocity_scale = 0.0;
};

struct ChainSample {
  int step = 0;
  double mean_force = 0.0;    // mean spring tension
  double total_energy = 0.0;  // kinetic + spring potential
  std::uint64_t digest = 0;   // FNV-1a over the position bit patterns
};

struct ChainTrajectory {
  std::vector<ChainSample> samples;      // steps + 1 rows, step 0 first
  std::vector<double> final_positions;   // absolute positions, lattice site i at x = i
};

// Velocity-Verlet integration. Deterministic in (params, seed).
ChainTrajectory run_harmonic_chain(const ChainParams& params, std::uint64_t seed);

// splitmix64 step; also used to derive per-node seeds.
std::uint64_t splitmix64(std::uint64_t& state) noexcept;

// trajectory-table artifact: header `step,mean_force,total_energy,digest`,
// one row per step with 9 significant digits in scientific notation and a
// 16-hex-digit digest, then a `#snapshot` trailer holding final positions.
std::string format_trajectory_table(const ChainTrajectory& trajectory);

struct TrajectoryRow {
  std::string step;
  std::string mean_force;
  std::string total_energy;
  std::string digest;
};

struct TrajectoryTable {
  std::vector<TrajectoryRow> rows;
  int snapshot_step = 0;
  std::vector<double> snapshot;
};

// Throws Error(ADAPTER_FAILURE) on malformed input.
TrajectoryTable parse_trajectory_table(std::string_view bytes);

// "%.8e" with negative zero folded to zero.
std::string format_sci9(double value);

}  // namespace coursegate

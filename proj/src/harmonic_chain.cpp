#include "coursegate/harmonic_chain.hpp"

#include <bit>
#include <charconv>
#include <cstdio>
#include <sstream>

#include "coursegate/error.hpp"

namespace coursegate {
namespace {

std::uint64_t positions_digest(const std::vector<double>& u) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < u.size(); ++i) {
    auto bits = std::bit_cast<std::uint64_t>(static_cast<double>(i) + u[i]);
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xFF;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

ChainSample sample(int step, const std::vector<double>& u, const std::vector<double>& v) {
  const auto n = u.size();
  double kinetic = 0.0;
  for (double vi : v) kinetic += 0.5 * vi * vi;
  double potential = 0.0;
  double tension = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    double stretch = u[i + 1] - u[i];
    potential += 0.5 * stretch * stretch;
    tension += stretch;
  }
  ChainSample s;
  s.step = step;
  s.mean_force = n > 1 ? tension / static_cast<double>(n - 1) : 0.0;
  s.total_energy = kinetic + potential;
  s.digest = positions_digest(u);
  return s;
}

void accelerations(const std::vector<double>& u, std::vector<double>& a) {
  for (std::size_t i = 1; i + 1 < u.size(); ++i) a[i] = u[i + 1] - 2.0 * u[i] + u[i - 1];
}

[[noreturn]] void bad_table(const std::string& what) {
  throw Error(ErrorCode::kAdapterFailure, "malformed trajectory-table: " + what);
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

ChainTrajectory run_harmonic_chain(const ChainParams& p, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(p.n_particles);
  const double drive_velocity = p.strain_rate * static_cast<double>(n - 1);

  std::vector<double> u(n, 0.0);
  std::vector<double> v(n, 0.0);
  std::vector<double> a(n, 0.0);
  std::uint64_t rng = seed;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    double unit = static_cast<double>(splitmix64(rng) >> 11) * 0x1.0p-53;
    v[i] = p.velocity_scale * (2.0 * unit - 1.0);
  }
  if (n > 1) v[n - 1] = drive_velocity;

  ChainTrajectory out;
  out.samples.reserve(static_cast<std::size_t>(p.steps) + 1);
  out.samples.push_back(sample(0, u, v));
  accelerations(u, a);
  for (int step = 1; step <= p.steps; ++step) {
    for (std::size_t i = 1; i + 1 < n; ++i) {
      v[i] += 0.5 * p.dt * a[i];
      u[i] += p.dt * v[i];
    }
    if (n > 1) u[n - 1] = drive_velocity * p.dt * step;
    accelerations(u, a);
    for (std::size_t i = 1; i + 1 < n; ++i) v[i] += 0.5 * p.dt * a[i];
    out.samples.push_back(sample(step, u, v));
  }
  out.final_positions.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.final_positions[i] = static_cast<double>(i) + u[i];
  return out;
}

std::string format_sci9(double value) {
  if (value == 0.0) value = 0.0;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.8e", value);
  return buf;
}

std::string format_trajectory_table(const ChainTrajectory& trajectory) {
  std::string out = "step,mean_force,total_energy,digest\n";
  char digest[17];
  for (const auto& s : trajectory.samples) {
    std::snprintf(digest, sizeof digest, "%016llx", static_cast<unsigned long long>(s.digest));
    out += std::to_string(s.step);
    out += ',';
    out += format_sci9(s.mean_force);
    out += ',';
    out += format_sci9(s.total_energy);
    out += ',';
    out += digest;
    out += '\n';
  }
  int last_step = trajectory.samples.empty() ? 0 : trajectory.samples.back().step;
  out += "#snapshot step=" + std::to_string(last_step) +
         " n=" + std::to_string(trajectory.final_positions.size()) + "\n";
  for (double x : trajectory.final_positions) {
    out += format_sci9(x);
    out += '\n';
  }
  return out;
}

TrajectoryTable parse_trajectory_table(std::string_view bytes) {
  TrajectoryTable table;
  std::istringstream in{std::string(bytes)};
  std::string line;
  if (!std::getline(in, line) || line != "step,mean_force,total_energy,digest") {
    bad_table("missing header");
  }
  bool in_snapshot = false;
  std::size_t expected = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("#snapshot", 0) == 0) {
      unsigned long long n = 0;
      if (std::sscanf(line.c_str(), "#snapshot step=%d n=%llu", &table.snapshot_step, &n) != 2) {
        bad_table("bad snapshot marker");
      }
      expected = n;
      in_snapshot = true;
      continue;
    }
    if (in_snapshot) {
      double x = 0.0;
      auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), x);
      if (ec != std::errc{} || ptr != line.data() + line.size()) bad_table("bad snapshot value");
      table.snapshot.push_back(x);
      continue;
    }
    TrajectoryRow row;
    std::istringstream cells(line);
    if (!std::getline(cells, row.step, ',') || !std::getline(cells, row.mean_force, ',') ||
        !std::getline(cells, row.total_energy, ',') || !std::getline(cells, row.digest)) {
      bad_table("row with fewer than four columns");
    }
    table.rows.push_back(std::move(row));
  }
  if (in_snapshot && table.snapshot.size() != expected) bad_table("snapshot size mismatch");
  return table;
}

}  // namespace coursegate

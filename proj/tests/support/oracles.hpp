#pragma once

// Independent reference implementations and random generators shared by the
// unit tests and the acceptance binary. Nothing here calls the code it is
// used to check.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "coursegate/adapters.hpp"
#include "coursegate/curriculum.hpp"
#include "coursegate/executor.hpp"
#include "coursegate/module_meta.hpp"
#include "coursegate/workflow.hpp"

namespace cgtest {

using namespace coursegate;

// Small deterministic generator (splitmix64 stream).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  // Uniform integer in [lo, hi].
  int between(int lo, int hi);
  double unit();  // [0, 1)
  bool chance(double p) { return unit() < p; }

 private:
  std::uint64_t state_;
};

// ---- planner ----

struct OraclePlan {
  double cost = 0.0;
  std::vector<ModuleId> order;
};

// Tries every module subset that contains `target`; for each, finds the
// lexicographically smallest valid ordering ending at `target` by memoized
// depth-first search. Returns the cheapest, ties broken by sequence.
std::optional<OraclePlan> brute_force_plan(const std::vector<ModuleMeta>& modules, const ModuleId& target,
                                           const TrackConstraints& constraints);

// Validity of a whole track straight from the metadata lists.
bool oracle_track_valid(const std::vector<ModuleMeta>& modules, const std::vector<ModuleId>& entries,
                        const TrackConstraints& constraints);

double oracle_cost(const std::vector<ModuleMeta>& modules, const std::vector<ModuleId>& entries);

// Random acyclic module catalogue with up to `max_nodes` modules. Ids are
// m00, m01, ...; prerequisites point to lower indices, alternatives anywhere,
// and occasionally to an external id.
std::vector<ModuleMeta> random_catalog(Rng& rng, int max_nodes, bool allow_external = true);
TrackConstraints random_constraints(Rng& rng);

// Random valid module with arbitrary field values (for round trips).
ModuleMeta random_module(Rng& rng, const std::string& id, const std::vector<ModuleId>& others);

// ---- workflows / executor ----

// Random DAG of up to `max_nodes` nodes using the test tools below; every
// in-port is linked. When `failures` is set some nodes use the failing tool.
Workflow random_workflow(Rng& rng, int max_nodes, bool failures);
std::vector<Resource> random_pool(Rng& rng, int max_resources);

// Tools: "t-src" (no inputs), "t-mix" (any inputs; digests inputs, params,
// seed), "t-fail" (always throws).
std::shared_ptr<AdapterRegistry> test_adapters();

// ---- harmonic chain ----

struct ReferenceSample {
  double mean_force = 0.0;
  double total_energy = 0.0;
};

// Kick-drift-kick velocity Verlet in absolute coordinates with an explicit
// force loop; same initial-velocity draw as the stub.
std::vector<ReferenceSample> reference_chain(int n, int steps, double dt, double strain_rate,
                                             double velocity_scale, std::uint64_t seed);

}  // namespace cgtest

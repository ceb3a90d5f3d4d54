#include <gtest/gtest.h>

#include <chrono>
#include <filesystem>
#include <future>
#include <thread>

#include "coursegate/artifact.hpp"
#include "coursegate/canonical_json.hpp"
#include "coursegate/error.hpp"
#include "coursegate/executor.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

namespace {

using namespace coursegate;
namespace fs = std::filesystem;

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::kBadRequest;
}

std::vector<Resource> fixture_pool() { return pool_from_json(parse_json(cgtest::read_fixture("pool.json"))); }

std::shared_ptr<const AdapterRegistry> builtins() {
  return std::make_shared<AdapterRegistry>(AdapterRegistry::with_builtins());
}

fs::path scratch_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("coursegate-test-" + name + "-" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Replays the event log and checks ordering, dependencies and slot usage.
void audit(const Workflow& wf, const ExecutionRecord& rec) {
  std::map<std::string, std::set<std::string>> preds;
  for (const auto& l : wf.links) preds[l.to.node].insert(l.from.node);
  std::map<std::string, int> busy;
  std::map<std::string, EventType> last;
  std::uint64_t prev_seq = 0;
  double prev_time = 0.0;
  for (const auto& e : rec.events) {
    ASSERT_GT(e.seq, prev_seq);
    ASSERT_GE(e.time, prev_time);
    prev_seq = e.seq;
    prev_time = e.time;
    switch (e.type) {
      case EventType::kQueued:
        EXPECT_FALSE(last.contains(e.node)) << e.node;
        for (const auto& p : preds[e.node]) EXPECT_EQ(last[p], EventType::kFinished) << e.node << " <- " << p;
        break;
      case EventType::kStarted:
        EXPECT_EQ(last[e.node], EventType::kQueued) << e.node;
        EXPECT_EQ(e.resource, rec.assignment.at(e.node));
        EXPECT_LE(++busy[e.resource], rec.slots.at(e.resource)) << e.resource;
        break;
      case EventType::kFinished:
        EXPECT_EQ(last[e.node], EventType::kStarted) << e.node;
        --busy[e.resource];
        break;
      case EventType::kFailed:
        if (last.contains(e.node) && last[e.node] == EventType::kStarted) --busy[e.resource];
        break;
    }
    last[e.node] = e.type;
  }
  for (const auto& [r, n] : busy) EXPECT_EQ(n, 0) << r;
}

// Nodes that must fail: failing tools and everything downstream of them.
std::set<std::string> expected_failures(const Workflow& wf) {
  std::set<std::string> out;
  for (const auto& n : wf.nodes) {
    if (n.tool == "t-fail") out.insert(n.id);
  }
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& l : wf.links) {
      if (out.contains(l.from.node) && out.insert(l.to.node).second) grew = true;
    }
  }
  return out;
}

TEST(Plan, FixturePolicies) {
  auto wf = cgtest::load_workflow("pipeline-2.json");
  auto rr = plan_execution(wf, fixture_pool(), Policy::kRoundRobin);
  EXPECT_EQ(rr.assignment, (std::map<std::string, std::string>{
                               {"lammps", "cluster-1"}, {"atomeye", "pc-1"}, {"r", "cluster-1"}, {"ffmpeg", "pc-1"}}));
  auto ff = plan_execution(wf, fixture_pool(), Policy::kFastestFit);
  for (const auto& [node, res] : ff.assignment) EXPECT_EQ(res, "cluster-1") << node;
  EXPECT_EQ(ff.layers, topo_layers(wf));
}

TEST(Plan, Errors) {
  auto wf = cgtest::load_workflow("pipeline-1.json");
  EXPECT_EQ(code_of([&] { plan_execution(wf, {}, Policy::kRoundRobin); }), ErrorCode::kEmptyPool);
  EXPECT_EQ(code_of([&] { plan_execution(wf, {{"a", ResourceKind::kPc, 0, 1.0}}, Policy::kRoundRobin); }),
            ErrorCode::kBadParameter);
  EXPECT_EQ(code_of([&] {
              plan_execution(wf, {{"a", ResourceKind::kPc, 1, 1.0}, {"a", ResourceKind::kCloud, 1, 1.0}},
                             Policy::kFastestFit);
            }),
            ErrorCode::kBadParameter);
  EXPECT_EQ(code_of([] { pool_from_json(parse_json(R"([{"id":"x","kind":"mainframe"}])")); }),
            ErrorCode::kBadParameter);
  auto bad = wf;
  bad.nodes[1].in_ports[0].kind = "video";
  EXPECT_EQ(code_of([&] { plan_execution(bad, fixture_pool(), Policy::kRoundRobin); }),
            ErrorCode::kInvalidWorkflow);
  EXPECT_EQ(parse_policy("round_robin"), Policy::kRoundRobin);
  EXPECT_FALSE(parse_policy("random"));
}

TEST(ContentHash, KnownVectors) {
  EXPECT_EQ(content_hash(""), "sha256:e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(content_hash("abc"), "sha256:ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Executor, Pipeline1Succeeds) {
  Executor ex(builtins());
  auto wf = cgtest::load_workflow("pipeline-1.json");
  auto rec = ex.execute(plan_execution(wf, fixture_pool(), Policy::kRoundRobin), wf, {}, 42);
  EXPECT_EQ(rec.status, RunStatus::kSucceeded);
  EXPECT_EQ(rec.run_id, "run-000001");
  ASSERT_EQ(rec.artifacts.size(), 2u);
  EXPECT_EQ(rec.artifacts[0].node, "lammps");
  EXPECT_EQ(rec.artifacts[0].kind, "trajectory-table");
  EXPECT_EQ(rec.artifacts[1].node, "r");
  EXPECT_EQ(rec.artifacts[1].bytes.rfind("step,mean_force\n0,", 0), 0u);
  for (const auto& a : rec.artifacts) EXPECT_EQ(a.id, content_hash(a.bytes));
  audit(wf, rec);
  // lammps costs 1000 on cluster-1 (0.5), r costs 1 on pc-1 (1.0).
  EXPECT_EQ(rec.events.back().time, 501.0);
}

TEST(Executor, Pipeline3ProducesEveryArtifact) {
  Executor ex(builtins());
  auto wf = cgtest::load_workflow("pipeline-3.json");
  auto rec = ex.execute(plan_execution(wf, fixture_pool(), Policy::kFastestFit), wf, {}, 7);
  ASSERT_EQ(rec.status, RunStatus::kSucceeded);
  EXPECT_EQ(rec.artifacts.size(), 5u);
  EXPECT_EQ(rec.find_artifact("ffmpeg", "video")->bytes.rfind("VIDEO fps=25 frames=11\n", 0), 0u);
  audit(wf, rec);
}

TEST(Executor, SeedControlsOutput) {
  Executor ex(builtins());
  auto wf = cgtest::load_workflow("pipeline-1.json");
  auto plan = plan_execution(wf, fixture_pool(), Policy::kRoundRobin);
  auto a = ex.execute(plan, wf, {}, 1);
  auto b = ex.execute(plan, wf, {}, 1);
  auto c = ex.execute(plan, wf, {}, 2);
  EXPECT_EQ(a.artifacts, [&] {
    auto copy = b.artifacts;
    for (auto& x : copy) x.run_id = a.run_id;
    return copy;
  }());
  EXPECT_NE(a.artifacts[0].id, c.artifacts[0].id);
  EXPECT_NE(a.run_id, b.run_id);
}

TEST(Executor, SubmitRejectsBadRequests) {
  Executor ex(builtins());
  auto wf = cgtest::load_workflow("pipeline-1.json");
  auto plan = plan_execution(wf, fixture_pool(), Policy::kRoundRobin);

  auto missing = wf;
  missing.nodes[1].tool = "gnuplot";
  try {
    ex.submit(plan, missing, {}, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kAdapterMissing);
    EXPECT_EQ(e.details().at("tools"), nlohmann::json::array({"gnuplot"}));
  }

  auto partial = plan;
  partial.assignment.erase("r");
  EXPECT_EQ(code_of([&] { ex.submit(partial, wf, {}, 1); }), ErrorCode::kBadParameter);

  auto open_port = derive_subset(wf, {"lammps"});
  open_port.nodes[0].in_ports.push_back({"restart", "trajectory-table"});
  auto open_plan = plan_execution(open_port, fixture_pool(), Policy::kRoundRobin);
  EXPECT_EQ(code_of([&] { ex.submit(open_plan, open_port, {}, 1); }), ErrorCode::kBadParameter);
  auto rec = ex.execute(open_plan, open_port, {{{"lammps", "restart"}, "ignored"}}, 1);
  EXPECT_EQ(rec.status, RunStatus::kSucceeded);

  EXPECT_TRUE(ex.run_ids().size() == 1u);
  EXPECT_EQ(code_of([&] { ex.run_status("run-999999"); }), ErrorCode::kUnknownRun);
}

TEST(Executor, FailureIsolatesIndependentBranches) {
  auto adapters = cgtest::test_adapters();
  Executor ex(adapters);
  Workflow wf;
  wf.id = "split";
  auto node = [](std::string id, std::string tool, bool has_input) {
    CrateNode n;
    n.id = std::move(id);
    n.tool = std::move(tool);
    if (has_input) n.in_ports.push_back({"in0", "blob"});
    n.out_ports.push_back({"out", "blob"});
    return n;
  };
  wf.nodes = {node("src", "t-src", false), node("bad", "t-fail", true), node("after-bad", "t-mix", true),
              node("good", "t-mix", true)};
  wf.links = {{{"src", "out"}, {"bad", "in0"}},
              {{"bad", "out"}, {"after-bad", "in0"}},
              {{"src", "out"}, {"good", "in0"}}};
  auto rec = ex.execute(plan_execution(wf, {{"pc", ResourceKind::kPc, 1, 1.0}}, Policy::kRoundRobin), wf, {}, 3);
  EXPECT_EQ(rec.status, RunStatus::kFailed);
  EXPECT_EQ(rec.nodes.at("good").state, NodeState::kFinished);
  EXPECT_EQ(rec.nodes.at("bad").state, NodeState::kFailed);
  EXPECT_FALSE(rec.nodes.at("bad").failed_by_dependency);
  EXPECT_EQ(rec.nodes.at("bad").error.rfind("ADAPTER_FAILURE", 0), 0u);
  EXPECT_EQ(rec.nodes.at("after-bad").state, NodeState::kFailed);
  EXPECT_TRUE(rec.nodes.at("after-bad").failed_by_dependency);
  EXPECT_TRUE(rec.find_artifact("good", "out"));
  EXPECT_FALSE(rec.find_artifact("bad", "out"));
  audit(wf, rec);
}

TEST(Executor, RandomDagsAreDeterministicAndRespectConstraints) {
  cgtest::Rng rng(2024);
  auto adapters = cgtest::test_adapters();
  for (int trial = 0; trial < 40; ++trial) {
    auto wf = cgtest::random_workflow(rng, 12, true);
    auto pool = cgtest::random_pool(rng, 4);
    auto policy = rng.chance(0.5) ? Policy::kRoundRobin : Policy::kFastestFit;
    auto plan = plan_execution(wf, pool, policy);
    auto seed = rng.next();

    Executor one(adapters, {1, std::nullopt});
    Executor four(adapters, {4, std::nullopt});
    auto a = one.execute(plan, wf, {}, seed);
    auto b = four.execute(plan, wf, {}, seed);
    EXPECT_EQ(canonical_dump(to_json(a, true)), canonical_dump(to_json(b, true)));
    audit(wf, a);

    auto failing = expected_failures(wf);
    EXPECT_EQ(a.status, failing.empty() ? RunStatus::kSucceeded : RunStatus::kFailed);
    for (const auto& n : wf.nodes) {
      EXPECT_EQ(a.nodes.at(n.id).state, failing.contains(n.id) ? NodeState::kFailed : NodeState::kFinished)
          << n.id;
      for (const auto& p : n.out_ports) {
        const auto* art = a.find_artifact(n.id, p.name);
        EXPECT_EQ(art != nullptr, !failing.contains(n.id));
        if (art) EXPECT_EQ(art->id, content_hash(art->bytes));
      }
    }
  }
}

TEST(Executor, CancelBeforeStart) {
  Executor ex(builtins());
  auto wf = cgtest::load_workflow("pipeline-1.json");
  auto id = ex.submit(plan_execution(wf, fixture_pool(), Policy::kRoundRobin), wf, {}, 1, {.hold = true});
  EXPECT_EQ(ex.run_status(id).status, RunStatus::kQueued);
  EXPECT_TRUE(ex.cancel(id));
  auto rec = ex.wait(id);
  EXPECT_EQ(rec.status, RunStatus::kCancelled);
  for (const auto& e : rec.events) EXPECT_NE(e.type, EventType::kStarted);
  EXPECT_TRUE(rec.artifacts.empty());
  EXPECT_FALSE(ex.cancel(id));
}

TEST(Executor, CancelWhileRunningLetsRunningNodeFinish) {
  auto adapters = cgtest::test_adapters();
  std::promise<void> gate;
  std::shared_future<void> open = gate.get_future().share();
  adapters->add(std::make_shared<FunctionAdapter>("t-block", std::vector<std::string>{}, "blob",
                                                  [open](const AdapterRequest&) {
                                                    open.wait();
                                                    return std::string("done\n");
                                                  }));
  Executor ex(adapters);
  Workflow wf;
  wf.id = "blocking";
  CrateNode first{"first", "t-block", {}, {{"out", "blob"}}, std::nullopt, {}};
  CrateNode second{"second", "t-mix", {{"in0", "blob"}}, {{"out", "blob"}}, std::nullopt, {}};
  wf.nodes = {first, second};
  wf.links = {{{"first", "out"}, {"second", "in0"}}};
  auto id = ex.submit(plan_execution(wf, {{"pc", ResourceKind::kPc, 1, 1.0}}, Policy::kRoundRobin), wf, {}, 1);

  for (int i = 0; i < 2000 && ex.run_status(id).nodes.at("first").state != NodeState::kRunning; ++i) {
    std::this_thread::sleep_for(std::chrono::milliseconds(1));
  }
  ASSERT_EQ(ex.run_status(id).nodes.at("first").state, NodeState::kRunning);
  EXPECT_TRUE(ex.cancel(id));
  gate.set_value();
  auto rec = ex.wait(id);
  EXPECT_EQ(rec.status, RunStatus::kCancelled);
  EXPECT_EQ(rec.nodes.at("first").state, NodeState::kFinished);
  EXPECT_NE(rec.nodes.at("second").state, NodeState::kRunning);
  EXPECT_NE(rec.nodes.at("second").state, NodeState::kFinished);
  EXPECT_EQ(rec.artifacts.size(), 1u);
}

TEST(Executor, RecordsPersistAndReload) {
  auto dir = scratch_dir("persist");
  auto wf = cgtest::load_workflow("pipeline-2.json");
  ExecutionRecord original;
  {
    Executor ex(builtins(), {2, dir});
    original = ex.execute(plan_execution(wf, fixture_pool(), Policy::kRoundRobin), wf, {}, 9);
  }
  EXPECT_TRUE(fs::exists(dir / original.run_id / "record.json"));
  EXPECT_TRUE(fs::exists(dir / original.run_id / "ffmpeg" / "video"));
  auto loaded = load_records(dir);
  ASSERT_EQ(loaded.size(), 1u);
  EXPECT_EQ(canonical_dump(to_json(loaded[0], true)), canonical_dump(to_json(original, true)));

  Executor again(builtins(), {2, dir});
  again.adopt(loaded[0]);
  EXPECT_EQ(again.run_status(original.run_id).status, RunStatus::kSucceeded);
  auto next = again.execute(plan_execution(wf, fixture_pool(), Policy::kRoundRobin), wf, {}, 9);
  EXPECT_EQ(next.run_id, "run-000002");
  fs::remove_all(dir);
}

TEST(Executor, RecordJsonRoundTrip) {
  Executor ex(builtins());
  auto wf = cgtest::load_workflow("pipeline-3.json");
  auto rec = ex.execute(plan_execution(wf, fixture_pool(), Policy::kRoundRobin), wf, {}, 5);
  auto back = record_from_json(to_json(rec, true));
  EXPECT_EQ(canonical_dump(to_json(back, true)), canonical_dump(to_json(rec, true)));
  auto slim = to_json(rec);
  for (const auto& a : slim.at("artifacts")) EXPECT_FALSE(a.contains("bytes"));
}

}  // namespace

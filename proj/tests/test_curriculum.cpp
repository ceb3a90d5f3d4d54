#include <gtest/gtest.h>

#include <algorithm>

#include "coursegate/canonical_json.hpp"
#include "coursegate/curriculum.hpp"
#include "coursegate/error.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

namespace {

using namespace coursegate;
using cgtest::kAltId;
using cgtest::kNextId;
using cgtest::kPrereqId;
using cgtest::kReferenceId;

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::kBadRequest;
}

ModuleMeta simple(const std::string& id, std::vector<ModuleId> previous = {}, int weeks = 1,
                  WorkloadRange workload = {2, 4}) {
  ModuleMeta m;
  m.id = id;
  m.title = id;
  m.previous = std::move(previous);
  m.languages = {"English"};
  m.duration = Duration::from_weeks(weeks);
  m.scale = ScaleLevel::kMini;
  m.workload = workload;
  return m;
}

CourseTrack track_of(std::vector<ModuleId> entries) { return {"t", "t", std::move(entries), "test"}; }

std::map<ModuleId, ModuleMeta> by_id(const std::vector<ModuleMeta>& ms) {
  std::map<ModuleId, ModuleMeta> out;
  for (const auto& m : ms) out[m.id] = m;
  return out;
}

TEST(Graph, ReferenceModuleEdges) {
  auto g = build_graph({cgtest::load_module("reference_module.json")});
  EXPECT_EQ(g.nodes.size(), 1u);
  EXPECT_EQ(g.prerequisites.at(kReferenceId), std::vector<ModuleId>{kPrereqId});
  EXPECT_EQ(g.suggests.at(kReferenceId), std::vector<ModuleId>{kNextId});
  EXPECT_EQ(g.alt_groups.at(kReferenceId), std::set<ModuleId>{kAltId});
  EXPECT_EQ(g.external, (std::set<ModuleId>{kNextId, kPrereqId, kAltId}));
}

TEST(Graph, TwoCycleDetected) {
  try {
    build_graph({simple("a", {"b"}), simple("b", {"a"})});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCycleDetected);
    auto cycle = e.details().at("cycle");
    EXPECT_GE(cycle.size(), 2u);
  }
}

TEST(Graph, EmptyAndDuplicate) {
  auto g = build_graph({});
  EXPECT_TRUE(g.nodes.empty());
  EXPECT_EQ(code_of([] { build_graph({simple("a"), simple("a")}); }), ErrorCode::kDuplicateId);
}

TEST(Graph, DotUsesLineStyles) {
  auto g = build_graph(cgtest::load_catalog("reference_catalog.json"));
  auto dot = to_dot(g);
  EXPECT_NE(dot.find("digraph"), std::string::npos);
  EXPECT_NE(dot.find("style=solid"), std::string::npos);
  EXPECT_NE(dot.find("style=dashed"), std::string::npos);
  EXPECT_NE(dot.find("style=dotted"), std::string::npos);
}

TEST(CheckTrack, ReferenceModuleExamples) {
  auto g = build_graph(cgtest::load_catalog("reference_catalog.json"));
  EXPECT_TRUE(check_track(track_of({kPrereqId, kReferenceId}), g).empty());

  auto reversed = check_track(track_of({kReferenceId, kPrereqId}), g);
  ASSERT_EQ(reversed.size(), 1u);
  EXPECT_EQ(reversed[0].code, "PREREQ_UNSATISFIED");
  EXPECT_EQ(reversed[0].module, kReferenceId);
  EXPECT_EQ(reversed[0].prerequisite, kPrereqId);

  // The alternative declares the prerequisite as its alternative.
  EXPECT_TRUE(check_track(track_of({kAltId, kReferenceId}), g).empty());
}

TEST(CheckTrack, AlternativesAreSymmetric) {
  auto a = simple("a");
  auto b = simple("b");
  b.alternatives = {"a"};
  auto c = simple("c", {"b"});
  auto g = build_graph({a, b, c});
  EXPECT_TRUE(check_track(track_of({"a", "c"}), g).empty());
  auto g2 = build_graph({a, b, simple("d", {"a"})});
  EXPECT_TRUE(check_track(track_of({"b", "d"}), g2).empty());
}

TEST(CheckTrack, DuplicatesUnknownAndConstraints) {
  auto g = build_graph(cgtest::load_catalog("reference_catalog.json"));
  auto dup = check_track(track_of({kPrereqId, kPrereqId}), g);
  ASSERT_EQ(dup.size(), 1u);
  EXPECT_EQ(dup[0].code, "DUPLICATE_ENTRY");
  EXPECT_EQ(code_of([&] { check_track(track_of({"ghost"}), g); }), ErrorCode::kUnknownModule);

  TrackConstraints c;
  c.max_complexity = 3;
  c.max_total_minutes = Duration::from_weeks(2).minutes;
  auto report = check_track(track_of({kPrereqId, kReferenceId}), g, c);
  std::vector<std::string> which;
  for (const auto& f : report) {
    EXPECT_EQ(f.code, "CONSTRAINT_VIOLATION");
    which.push_back(f.constraint);
  }
  EXPECT_EQ(which, (std::vector<std::string>{"max_complexity", "max_total_minutes"}));
}

TEST(CheckTrack, AgreesWithOracleOnRandomOrders) {
  cgtest::Rng rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    auto catalog = cgtest::random_catalog(rng, 8);
    auto c = cgtest::random_constraints(rng);
    auto g = build_graph(catalog);
    std::vector<ModuleId> entries;
    for (const auto& m : catalog) {
      if (rng.chance(0.6)) entries.push_back(m.id);
    }
    for (int i = static_cast<int>(entries.size()) - 1; i > 0; --i) std::swap(entries[i], entries[rng.between(0, i)]);
    bool empty = check_track(track_of(entries), g, c).empty();
    EXPECT_EQ(empty, cgtest::oracle_track_valid(catalog, entries, c));
  }
}

TEST(PlanTrack, RootIsSingleEntry) {
  auto g = build_graph(cgtest::load_catalog("reference_catalog.json"));
  auto t = plan_track(kPrereqId, g);
  EXPECT_EQ(t.entries, std::vector<ModuleId>{kPrereqId});
}

TEST(PlanTrack, Diamond) {
  auto g = build_graph(cgtest::load_catalog("diamond_catalog.json"));
  auto t = plan_track("d", g);
  EXPECT_EQ(t.entries, (std::vector<ModuleId>{"a", "b", "c", "d"}));
  auto oracle = cgtest::brute_force_plan(cgtest::load_catalog("diamond_catalog.json"), "d", {});
  ASSERT_TRUE(oracle);
  EXPECT_EQ(oracle->order, t.entries);
  EXPECT_TRUE(check_track(t, g).empty());
}

TEST(PlanTrack, PrefersCheaperAlternative) {
  auto g = build_graph(cgtest::load_catalog("reference_catalog.json"));
  auto t = plan_track(kReferenceId, g);
  // metal-nanocrystals: 1 week x 5 h; non-metal solids: 2 weeks x 7 h.
  EXPECT_EQ(t.entries, (std::vector<ModuleId>{kPrereqId, kReferenceId}));
  EXPECT_TRUE(check_track(t, g).empty());
}

TEST(PlanTrack, Errors) {
  auto g = build_graph(cgtest::load_catalog("reference_catalog.json"));
  EXPECT_EQ(code_of([&] { plan_track("ghost", g); }), ErrorCode::kUnknownModule);

  TrackConstraints c;
  c.max_complexity = 3;
  EXPECT_EQ(code_of([&] { plan_track(kReferenceId, g, c); }), ErrorCode::kUnsatisfiable);

  auto alone = build_graph({cgtest::load_module("reference_module.json")});
  EXPECT_EQ(code_of([&] { plan_track(kReferenceId, alone); }), ErrorCode::kUnresolvedPrereq);
}

TEST(PlanTrack, MatchesExhaustiveOracle) {
  cgtest::Rng rng(4242);
  int feasible = 0;
  for (int trial = 0; trial < 300; ++trial) {
    auto catalog = cgtest::random_catalog(rng, 10);
    auto c = cgtest::random_constraints(rng);
    auto target = catalog[rng.between(0, static_cast<int>(catalog.size()) - 1)].id;
    auto g = build_graph(catalog);
    auto oracle = cgtest::brute_force_plan(catalog, target, c);
    if (!oracle) {
      auto code = code_of([&] { plan_track(target, g, c); });
      EXPECT_TRUE(code == ErrorCode::kUnsatisfiable || code == ErrorCode::kUnresolvedPrereq);
      continue;
    }
    ++feasible;
    auto t = plan_track(target, g, c);
    EXPECT_EQ(t.entries.back(), target);
    EXPECT_EQ(track_cost(t, g), oracle->cost);
    EXPECT_EQ(t.entries, oracle->order);
    EXPECT_TRUE(check_track(t, g, c).empty());
  }
  EXPECT_GT(feasible, 150);
}

TEST(Aggregate, ReferenceModuleAlone) {
  auto m = cgtest::load_module("reference_module.json");
  auto agg = aggregate(track_of({m.id}), by_id({m}));
  EXPECT_EQ(agg.total_weeks(), 2.0);
  EXPECT_EQ(agg.workload_min_hours, 16.0);
  EXPECT_EQ(agg.workload_max_hours, 20.0);
  EXPECT_EQ(agg.max_complexity, 4);
  EXPECT_EQ(agg.total_exercises, 5);
  EXPECT_EQ(agg.scale_histogram.at(ScaleLevel::kMini), 1u);
}

TEST(Aggregate, EmptyTrackIsZero) {
  auto agg = aggregate(track_of({}), {});
  EXPECT_EQ(agg.total_minutes, 0);
  EXPECT_EQ(agg.workload_min_hours, 0.0);
  EXPECT_EQ(agg.workload_max_hours, 0.0);
  EXPECT_EQ(agg.max_complexity, 0);
  EXPECT_EQ(agg.total_price, 0.0);
}

TEST(Aggregate, WeightedWorkloadSum) {
  auto a = simple("a", {}, 1, {2, 2});
  auto b = simple("b", {}, 2, {8, 10});
  auto agg = aggregate(track_of({"a", "b"}), by_id({a, b}));
  EXPECT_EQ(agg.total_weeks(), 3.0);
  EXPECT_EQ(agg.workload_min_hours, 18.0);
  EXPECT_EQ(agg.workload_max_hours, 22.0);
  EXPECT_EQ(code_of([&] { aggregate(track_of({"zzz"}), by_id({a})); }), ErrorCode::kUnknownModule);
}

TEST(Aggregate, AdditiveOverDisjointTracks) {
  cgtest::Rng rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<ModuleMeta> ms;
    for (int i = 0; i < 8; ++i) ms.push_back(cgtest::random_module(rng, "x" + std::to_string(i), {}));
    auto all = by_id(ms);
    std::vector<ModuleId> left, right;
    for (const auto& m : ms) (rng.chance(0.5) ? left : right).push_back(m.id);
    auto both = left;
    both.insert(both.end(), right.begin(), right.end());
    auto l = aggregate(track_of(left), all);
    auto r = aggregate(track_of(right), all);
    auto lr = aggregate(track_of(both), all);
    EXPECT_EQ(lr.total_minutes, l.total_minutes + r.total_minutes);
    EXPECT_NEAR(lr.workload_min_hours, l.workload_min_hours + r.workload_min_hours, 1e-9);
    EXPECT_NEAR(lr.workload_max_hours, l.workload_max_hours + r.workload_max_hours, 1e-9);
    EXPECT_EQ(lr.total_exercises, l.total_exercises + r.total_exercises);
    EXPECT_NEAR(lr.total_price, l.total_price + r.total_price, 1e-9);
    EXPECT_EQ(lr.max_complexity, std::max(l.max_complexity, r.max_complexity));
    for (auto level : {ScaleLevel::kNano, ScaleLevel::kMicro, ScaleLevel::kMini, ScaleLevel::kMacro}) {
      auto get = [&](const CourseAggregate& a) {
        auto it = a.scale_histogram.find(level);
        return it == a.scale_histogram.end() ? std::size_t{0} : it->second;
      };
      EXPECT_EQ(get(lr), get(l) + get(r));
    }
  }
}

TEST(ListNext, DeclaredAndInferred) {
  auto g = build_graph(cgtest::load_catalog("reference_catalog.json"));
  auto next = list_next(kReferenceId, g);
  EXPECT_EQ(next, std::vector<ModuleId>{kNextId});
  EXPECT_TRUE(list_next(kNextId, g).empty());
  EXPECT_EQ(code_of([&] { list_next("ghost", g); }), ErrorCode::kUnknownModule);

  auto g2 = build_graph({simple("a"), simple("b", {"a"})});
  EXPECT_EQ(list_next("a", g2), std::vector<ModuleId>{"b"});
}

TEST(ListNext, LintFlagsUnmirroredNext) {
  auto a = simple("a");
  a.next = {"b"};
  auto g = build_graph({a, simple("b")});
  EXPECT_EQ(lint_next_consistency(g).size(), 1u);
  auto g2 = build_graph({a, simple("b", {"a"})});
  EXPECT_TRUE(lint_next_consistency(g2).empty());
}

TEST(TrackJson, RoundTrip) {
  CourseTrack t{"t1", "Title", {"a", "b"}, "me"};
  EXPECT_EQ(track_from_json(to_json(t)), t);
  EXPECT_THROW(track_from_json(parse_json(R"({"id":"x"})")), std::invalid_argument);
  TrackConstraints c;
  c.max_complexity = 3;
  c.allowed_scales = std::set<ScaleLevel>{ScaleLevel::kMini};
  auto back = constraints_from_json(to_json(c));
  EXPECT_EQ(back.max_complexity, 3);
  EXPECT_EQ(back.allowed_scales, c.allowed_scales);
  EXPECT_THROW(constraints_from_json(parse_json(R"({"max_complexity":9})")), std::invalid_argument);
}

}  // namespace

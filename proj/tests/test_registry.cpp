#include <gtest/gtest.h>

#include <algorithm>
#include <thread>

#include "coursegate/canonical_json.hpp"
#include "coursegate/error.hpp"
#include "coursegate/registry.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

namespace {

using namespace coursegate;
using cgtest::kAltId;
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

std::vector<ModuleId> ids_of(const std::vector<ModuleMeta>& ms) {
  std::vector<ModuleId> out;
  for (const auto& m : ms) out.push_back(m.id);
  return out;
}

void register_catalog(Registry& r) {
  for (auto& m : cgtest::load_catalog("reference_catalog.json")) r.register_module(m);
}

TEST(Registry, RegisterAndGet) {
  Registry r("2026-01-01T00:00:00Z");
  auto id = r.register_module(cgtest::load_module("reference_module.json"));
  EXPECT_EQ(id, kReferenceId);
  ASSERT_TRUE(r.get(id));
  EXPECT_EQ(r.get(id)->complexity, 4);
  EXPECT_FALSE(r.get("nope"));
}

TEST(Registry, DuplicateRejected) {
  Registry r;
  r.register_module(cgtest::load_module("reference_module.json"));
  EXPECT_EQ(code_of([&] { r.register_module(cgtest::load_module("reference_module.json")); }),
            ErrorCode::kDuplicateId);
}

TEST(Registry, ValidationFailureEmbedsReport) {
  Registry r;
  auto m = cgtest::load_module("reference_module.json");
  m.languages = {"Ukrainian"};
  try {
    r.register_module(m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kValidationFailed);
    ASSERT_TRUE(e.details().is_array());
    bool found = false;
    for (const auto& f : e.details()) found = found || (f["code"] == "MISSING_ENGLISH" && f["severity"] == "error");
    EXPECT_TRUE(found) << e.details().dump();
  }
  EXPECT_EQ(r.size(), 0u);
}

TEST(Registry, UpdateReplaces) {
  Registry r;
  auto m = cgtest::load_module("reference_module.json");
  r.register_module(m);
  m.exercises = 9;
  r.update_module(m);
  EXPECT_EQ(r.get(m.id)->exercises, 9);
  m.id = "other";
  EXPECT_EQ(code_of([&] { r.update_module(m); }), ErrorCode::kUnknownModule);
}

TEST(Registry, SearchByKeywordCategoryAndEmptyQuery) {
  Registry r;
  register_catalog(r);
  auto md = ids_of(r.search({.keywords = {"md"}}));
  EXPECT_NE(std::find(md.begin(), md.end(), kReferenceId), md.end());
  EXPECT_EQ(r.search({}).size(), 4u);
  auto phys = ids_of(r.search({.category_prefix = "Physics"}));
  EXPECT_NE(std::find(phys.begin(), phys.end(), kReferenceId), phys.end());
  EXPECT_TRUE(r.search({.category_prefix = "Phys"}).empty());  // whole segments only
  EXPECT_EQ(r.search({.category_prefix = "physics:computational physics"}).size(), 4u);
}

TEST(Registry, SearchTitleTokensAndFilters) {
  Registry r;
  register_catalog(r);
  EXPECT_EQ(ids_of(r.search({.keywords = {"deformation"}})), std::vector<ModuleId>{kReferenceId});
  EXPECT_EQ(ids_of(r.search({.keywords = {"al-cu", "defect"}})),
            std::vector<ModuleId>{cgtest::kNextId});
  EXPECT_EQ(ids_of(r.search({.language = "ukrainian"})), std::vector<ModuleId>{kReferenceId});
  EXPECT_EQ(r.search({.max_complexity = 3}).size(), 2u);
  EXPECT_EQ(ids_of(r.search({.keywords = {"md"}, .scale = ScaleLevel::kMini, .max_complexity = 4})),
            (std::vector<ModuleId>{kReferenceId, cgtest::kPrereqId, kAltId}));
}

TEST(Registry, SearchOrdersByRatingThenId) {
  Registry r;
  register_catalog(r);
  // reference module arrives with one vote of 4.
  r.rate(kAltId, 5);
  r.rate(cgtest::kNextId, 2);
  EXPECT_EQ(ids_of(r.search({})),
            (std::vector<ModuleId>{kAltId, kReferenceId, cgtest::kNextId, cgtest::kPrereqId}));
}

TEST(Registry, ConjunctiveFiltersNarrowProperty) {
  cgtest::Rng rng(5);
  Registry r;
  std::vector<ModuleId> ids;
  for (int i = 0; i < 40; ++i) ids.push_back("mod-" + std::to_string(i));
  for (const auto& id : ids) r.register_module(cgtest::random_module(rng, id, {}));
  const char* words[] = {"md", "metal", "grid", "nano"};
  for (int i = 0; i < 200; ++i) {
    SearchQuery q;
    if (rng.chance(0.5)) q.keywords.push_back(words[rng.between(0, 3)]);
    if (rng.chance(0.5)) q.category_prefix = rng.chance(0.5) ? "Physics" : "Materials";
    if (rng.chance(0.5)) q.scale = static_cast<ScaleLevel>(rng.between(0, 3));
    if (rng.chance(0.5)) q.language = "Ukrainian";
    if (rng.chance(0.5)) q.max_complexity = rng.between(1, 5);
    auto full = ids_of(r.search(q));
    for (int drop = 0; drop < 5; ++drop) {
      SearchQuery looser = q;
      if (drop == 0) looser.keywords.clear();
      if (drop == 1) looser.category_prefix.reset();
      if (drop == 2) looser.scale.reset();
      if (drop == 3) looser.language.reset();
      if (drop == 4) looser.max_complexity.reset();
      auto wide = ids_of(r.search(looser));
      for (const auto& id : full) {
        EXPECT_NE(std::find(wide.begin(), wide.end(), id), wide.end());
      }
    }
  }
}

TEST(Registry, RatingArithmetic) {
  Registry r;
  r.register_module(cgtest::load_module("reference_module.json"));
  auto m = cgtest::load_module("reference_module.json");
  m.id = "fresh";
  m.rating = {};
  r.register_module(m);
  auto a = r.rate("fresh", 4);
  EXPECT_EQ(a.count, 1u);
  EXPECT_EQ(a.sum, 4u);
  EXPECT_EQ(a.mean(), 4.0);
  EXPECT_EQ(to_json(a), parse_json(R"({"count":1,"mean":4,"sum":4})"));
  r.register_module([&] { auto x = m; x.id = "two"; return x; }());
  r.rate("two", 3);
  EXPECT_EQ(r.rate("two", 5).mean(), 4.0);
  EXPECT_EQ(code_of([&] { r.rate("two", 6); }), ErrorCode::kStarsOutOfRange);
  EXPECT_EQ(code_of([&] { r.rate("two", 0); }), ErrorCode::kStarsOutOfRange);
  EXPECT_EQ(code_of([&] { r.rate("ghost", 3); }), ErrorCode::kUnknownModule);
}

TEST(Registry, RatingAggregateProperty) {
  cgtest::Rng rng(11);
  Registry r;
  auto m = cgtest::load_module("reference_module.json");
  m.rating = {};
  r.register_module(m);
  std::uint64_t sum = 0;
  for (int i = 1; i <= 500; ++i) {
    int stars = rng.between(1, 5);
    sum += static_cast<std::uint64_t>(stars);
    auto agg = r.rate(m.id, stars);
    ASSERT_EQ(agg.count, static_cast<std::uint64_t>(i));
    ASSERT_EQ(agg.sum, sum);
    ASSERT_GE(*agg.mean(), 1.0);
    ASSERT_LE(*agg.mean(), 5.0);
  }
}

TEST(Registry, EmptyExport) {
  Registry r("2026-01-01T00:00:00Z");
  EXPECT_EQ(r.export_repository(),
            R"({"created_at":"2026-01-01T00:00:00Z","format_version":"1.0","modules":[],"workflows":[]})");
}

TEST(Registry, ExportImportRoundTripReferenceModule) {
  Registry a;
  a.register_module(cgtest::load_module("reference_module.json"));
  auto bytes = a.export_repository();
  EXPECT_EQ(bytes, a.export_repository());
  Registry b;
  auto report = b.import_repository(bytes);
  EXPECT_EQ(report.added, 1u);
  EXPECT_TRUE(report.skipped.empty());
  EXPECT_EQ(report.external_refs,
            (std::vector<ModuleId>{cgtest::kNextId, cgtest::kPrereqId, kAltId}));
  EXPECT_EQ(b.export_repository(), bytes);

  auto again = b.import_repository(bytes);
  EXPECT_EQ(again.added, 0u);
  ASSERT_EQ(again.skipped.size(), 1u);
  EXPECT_EQ(again.skipped[0].second, "DUPLICATE_ID");
}

TEST(Registry, ExportIgnoresInsertionOrder) {
  auto catalog = cgtest::load_catalog("reference_catalog.json");
  Registry a("2026-01-01T00:00:00Z");
  Registry b("2026-01-01T00:00:00Z");
  for (const auto& m : catalog) a.register_module(m);
  for (auto it = catalog.rbegin(); it != catalog.rend(); ++it) b.register_module(*it);
  EXPECT_EQ(a.export_repository(), b.export_repository());
}

TEST(Registry, RandomRegistriesRoundTripByteIdentical) {
  cgtest::Rng rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    Registry a;
    std::vector<ModuleId> ids;
    int n = rng.between(0, 12);
    for (int i = 0; i < n; ++i) ids.push_back("m-" + std::to_string(trial) + "-" + std::to_string(i));
    for (const auto& id : ids) a.register_module(cgtest::random_module(rng, id, ids));
    auto wf = cgtest::random_workflow(rng, 6, false);
    a.register_workflow(wf);
    auto bytes = a.export_repository();
    Registry b;
    auto report = b.import_repository(bytes);
    EXPECT_EQ(report.added, ids.size());
    EXPECT_EQ(b.export_repository(), bytes);
  }
}

TEST(Registry, UnknownFieldsPreservedThroughArchive) {
  auto archive = R"({"created_at":"2026-01-01T00:00:00Z","format_version":"1.0","modules":[)"
                 R"({"id":"x","title":"X","languages":["English"],"duration_minutes":60,"x_new":[1,{"k":"v"}]}],)"
                 R"("workflows":[]})";
  Registry r;
  r.import_repository(archive);
  auto j = parse_json(r.export_repository());
  EXPECT_EQ(j["modules"][0]["x_new"], parse_json(R"([1,{"k":"v"}])"));
}

TEST(Registry, ImportErrors) {
  Registry r;
  EXPECT_EQ(code_of([&] { r.import_repository("{not json"); }), ErrorCode::kMalformedArchive);
  EXPECT_EQ(code_of([&] { r.import_repository(R"({"modules":[]})"); }), ErrorCode::kMalformedArchive);
  EXPECT_EQ(code_of([&] {
              r.import_repository(R"({"format_version":"9.0","created_at":"x","modules":[],"workflows":[]})");
            }),
            ErrorCode::kUnsupportedVersion);
  EXPECT_EQ(code_of([&] {
              r.import_repository(R"({"format_version":"1.0","created_at":"x","modules":[)"
                                  R"({"id":"a","title":"A","languages":["English"]},)"
                                  R"({"id":"a","title":"A","languages":["English"]}],"workflows":[]})");
            }),
            ErrorCode::kMalformedArchive);
}

TEST(Registry, ImportSkipsInvalidModules) {
  Registry r;
  auto report = r.import_repository(R"({"format_version":"1.0","created_at":"x","modules":[)"
                                    R"({"id":"a","title":"A","languages":["Ukrainian"]},)"
                                    R"({"id":"b","title":"B","languages":["English"]}],"workflows":[]})");
  EXPECT_EQ(report.added, 1u);
  ASSERT_EQ(report.skipped.size(), 1u);
  EXPECT_EQ(report.skipped[0], (std::pair<ModuleId, std::string>{"a", "VALIDATION_FAILED"}));
}

TEST(Registry, RegisteredModulesStayValid) {
  Registry r;
  register_catalog(r);
  auto ids = r.ids();
  for (const auto& m : r.modules()) EXPECT_FALSE(validate_meta(m, ids).has_errors());
}

TEST(Registry, ConcurrentReadersAndWriters) {
  Registry r;
  register_catalog(r);
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&, t] {
      for (int i = 0; i < 200; ++i) {
        if (t % 2 == 0) {
          r.rate(kReferenceId, 1 + (i % 5));
        } else {
          EXPECT_EQ(r.search({}).size(), 4u);
          (void)r.export_repository();
        }
      }
    });
  }
  for (auto& th : threads) th.join();
  EXPECT_EQ(r.get(kReferenceId)->rating.count, 1u + 400u);
}

}  // namespace

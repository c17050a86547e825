#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "blockscene/io.hpp"
#include "blockscene/metrics.hpp"
#include "support/process.hpp"
#include "support/scenes.hpp"

using namespace blockscene;
using blockscene::testing::ScratchDir;
using blockscene::testing::cube_object;
using blockscene::testing::make_node;
using blockscene::testing::run_command;
using blockscene::testing::slurp;
using ::testing::HasSubstr;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::string kCli = BLOCKSCENE_CLI;
const fs::path kDeskLamp = fs::path(BLOCKSCENE_FIXTURES_DIR) / "desk_lamp";

// Unit table with a box hovering off to the side.
fs::path write_scene(const fs::path& dir) {
  SceneGraphStore store;
  store.add_object(make_node(ObjectInstance("table", "table", {Block({0, 0, 0.5}, Extents(1, 1, 1))})));
  store.add_object(make_node(cube_object("box", {2, 1, 3}, 0.4)));
  const fs::path p = dir / "scene.in.json";
  write_text_file(p, store.snapshot_text());
  return p;
}

fs::path write_json(const fs::path& p, const json& doc) {
  write_text_file(p, doc.dump(2));
  return p;
}

}  // namespace

TEST(Cli, SolveFeasible) {
  ScratchDir dir("cli-solve");
  const fs::path scene = write_scene(dir.path());
  const fs::path cons = write_json(dir.path() / "c.json",
                                   {{"movable", "box"},
                                    {"relations",
                                     {{{"reference", "table"}, {"kind", "above"}, {"mode", "exact"}},
                                      {{"reference", "table"}, {"kind", "x_aligned"}},
                                      {{"reference", "table"}, {"kind", "coplanar_right"}}}}});
  const auto out = dir.path() / "out";
  const auto r = run_command(kCli, {"solve", "--scene", scene.string(), "--constraints", cons.string(),
                                    "--out-dir", out.string(), "--seed", "3"},
                             dir.path());
  ASSERT_EQ(r.exit_code, 0) << r.out;
  const json report = json::parse(slurp(out / "report.json"));
  EXPECT_TRUE(report.at("accepted").get<bool>());
  EXPECT_LE(report.at("final_error").get<double>(), 1e-4);
  const SceneGraphStore placed = SceneGraphStore::load_text(slurp(out / "scene.json"));
  const AABB box = object_bounds(placed.object("box"));
  EXPECT_NEAR(box.min.z, 1.0, 1e-2);
  EXPECT_NEAR(box.max.y, 0.5, 1e-2);
  EXPECT_EQ(placed.edge_count(), 3u);
}

TEST(Cli, SolveContradictoryIsRejected) {
  ScratchDir dir("cli-reject");
  const fs::path scene = write_scene(dir.path());
  const fs::path cons = write_json(dir.path() / "c.json",
                                   {{"movable", "box"},
                                    {"relations",
                                     {{{"reference", "table"}, {"kind", "above"}, {"distance", 1.0}},
                                      {{"reference", "table"}, {"kind", "below"}, {"distance", 1.0}}}}});
  const auto out = dir.path() / "out";
  const auto r = run_command(kCli, {"solve", "--scene", scene.string(), "--constraints", cons.string(),
                                    "--out-dir", out.string()},
                             dir.path());
  EXPECT_EQ(r.exit_code, 2) << r.out;
  EXPECT_THAT(r.out, HasSubstr("above"));
  EXPECT_THAT(r.out, HasSubstr("below"));
  const json report = json::parse(slurp(out / "report.json"));
  EXPECT_FALSE(report.at("accepted").get<bool>());
  ASSERT_EQ(report.at("constraints").size(), 2u);
  for (const auto& c : report.at("constraints")) EXPECT_GT(c.at("residual").get<double>(), 0.0);
  EXPECT_FALSE(fs::exists(out / "scene.json"));
}

TEST(Cli, MissingKindNamesTheField) {
  ScratchDir dir("cli-kind");
  const fs::path scene = write_scene(dir.path());
  const fs::path cons = write_json(dir.path() / "c.json", {{"movable", "box"}, {"relations", {{{"reference", "table"}}}}});
  const auto r = run_command(kCli, {"solve", "--scene", scene.string(), "--constraints", cons.string(),
                                    "--out-dir", (dir.path() / "out").string()},
                             dir.path());
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_THAT(r.out, HasSubstr("relations[0].kind"));
  const auto v = run_command(kCli, {"validate", "--scene", scene.string(), "--constraints", cons.string()}, dir.path());
  EXPECT_EQ(v.exit_code, 1);
  EXPECT_THAT(v.out, HasSubstr("relations[0].kind"));
}

TEST(Cli, PipelineWithScriptedBackend) {
  ScratchDir dir("cli-pipeline");
  const auto out = dir.path() / "out";
  const auto r = run_command(kCli, {"pipeline", "a desk with a lamp on it", "--backend",
                                    "scripted:" + kDeskLamp.string(), "--out-dir", out.string()},
                             dir.path());
  ASSERT_EQ(r.exit_code, 0) << r.out;
  for (const char* f : {"scene.json", "metrics.json", "scene.obj", "report.json"}) {
    EXPECT_TRUE(fs::exists(out / f)) << f;
  }
  const SceneGraphStore store = SceneGraphStore::load_text(slurp(out / "scene.json"));
  EXPECT_EQ(store.ids(), (std::vector<std::string>{"desk", "lamp"}));
  const json metrics = json::parse(slurp(out / "metrics.json"));
  EXPECT_EQ(metrics, json::parse(to_json(compute_metrics(store)).dump()));
}

TEST(Cli, UnreachableRemoteWritesNothing) {
  ScratchDir dir("cli-remote");
  const auto out = dir.path() / "out";
  const auto r = run_command(kCli, {"pipeline", "a desk", "--backend", "remote:http://127.0.0.1:1/plan",
                                    "--out-dir", out.string()},
                             dir.path());
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_THAT(r.out, HasSubstr("unreachable"));
  EXPECT_FALSE(fs::exists(out / "scene.json"));
}

TEST(Cli, MetricsMatchesLibrary) {
  ScratchDir dir("cli-metrics");
  SceneGraphStore store;
  store.add_object(make_node(cube_object("a", {0, 0, 0})));
  store.add_object(make_node(cube_object("b", {0.5, 0, 0})));
  const fs::path scene = dir.path() / "s.json";
  write_text_file(scene, store.snapshot_text());
  const auto r = run_command(kCli, {"metrics", "--scene", scene.string(), "--out-dir", dir.path().string()}, dir.path());
  ASSERT_EQ(r.exit_code, 0) << r.out;
  const json m = json::parse(slurp(dir.path() / "metrics.json"));
  EXPECT_DOUBLE_EQ(m.at("overlap_score").get<double>(), 0.25);
  EXPECT_EQ(m, json::parse(to_json(compute_metrics(store)).dump()));
  EXPECT_THAT(r.out, HasSubstr("0.250000"));
}

TEST(Cli, ExportShowConfigValidate) {
  ScratchDir dir("cli-misc");
  const fs::path scene = write_scene(dir.path());
  const auto obj = dir.path() / "x" / "scene.obj";
  auto r = run_command(kCli, {"export", "--scene", scene.string(), "--out", obj.string()}, dir.path());
  ASSERT_EQ(r.exit_code, 0) << r.out;
  EXPECT_EQ(slurp(obj), export_obj(SceneGraphStore::load_text(slurp(scene))));

  const fs::path cfg = write_json(dir.path() / "cfg.json", {{"seed", 11}, {"ga", {{"population_size", 30}}}});
  r = run_command(kCli, {"show-config", "--config", cfg.string()}, dir.path());
  ASSERT_EQ(r.exit_code, 0) << r.out;
  const json shown = json::parse(r.out);
  EXPECT_EQ(shown.at("seed"), 11);
  EXPECT_EQ(shown.at("ga").at("population_size"), 30);

  r = run_command(kCli, {"show-config", "--backend", "remote:http://a.example/p"}, dir.path(),
                  "PLANNER_URL=http://b.example/q PLANNER_TOKEN=secret");
  ASSERT_EQ(r.exit_code, 0) << r.out;
  EXPECT_THAT(r.out, HasSubstr("http://b.example/q"));
  EXPECT_THAT(r.out, ::testing::Not(HasSubstr("secret")));

  r = run_command(kCli, {"validate", "--scene", scene.string(), "--config", cfg.string()}, dir.path());
  EXPECT_EQ(r.exit_code, 0) << r.out;
  write_text_file(dir.path() / "broken.json", "{\"schema\": ");
  r = run_command(kCli, {"validate", "--scene", (dir.path() / "broken.json").string()}, dir.path());
  EXPECT_EQ(r.exit_code, 1);

  r = run_command(kCli, {"frobnicate"}, dir.path());
  EXPECT_EQ(r.exit_code, 1);
}

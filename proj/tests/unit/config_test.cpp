#include <filesystem>
#include <fstream>

#include <yaml-cpp/yaml.h>

#include "doctest.h"
#include "neusim/config.hpp"
#include "neusim/error.hpp"
#include "support.hpp"

using namespace neusim;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
  const auto dir = std::filesystem::temp_directory_path() / "neusim-config-test";
  std::filesystem::create_directories(dir);
  const auto path = dir / name;
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST_CASE("reference platform loads with expected values") {
  const auto cfg = test::platform();
  const auto& p = cfg.platform;
  CHECK(p.tiles == 2);
  CHECK(p.dpu_array.rows == 16);
  CHECK(p.dpu_array.cols == 16);
  CHECK(p.dpu_array.macs_per_cell == 16);
  CHECK(p.stencil_set.size() == 4);
  CHECK(p.ddr.page_policy == config::PagePolicy::Open);
  CHECK(p.freq_mhz.of(config::EngineClass::Dpu) == 1300);
  CHECK(cfg.sim.pti_cycles == 13000);
  CHECK_FALSE(cfg.power.has_value());
  CHECK(std::filesystem::path(p.dsp_kernels).is_absolute());
}

TEST_CASE("power section loads when requested") {
  const auto cfg = test::platform({}, true);
  REQUIRE(cfg.power.has_value());
  CHECK(cfg.power->temp_c == 65);
  CHECK(cfg.power->root.name == "npu");
  CHECK(cfg.power->root.children.size() == 5);
}

TEST_CASE("overrides replace existing keys only") {
  const auto cfg = test::platform({"tiles=4", "ddr.bw_bytes_per_cycle=8.5", "ddr.page_policy=closed"});
  CHECK(cfg.platform.tiles == 4);
  CHECK(cfg.platform.ddr.bw_bytes_per_cycle == 8.5);
  CHECK(cfg.platform.ddr.page_policy == config::PagePolicy::Closed);
  CHECK_THROWS_AS(test::platform({"ddr.no_such_key=1"}), ConfigError);
  CHECK_THROWS_AS(test::platform({"tiles"}), ConfigError);
  CHECK_THROWS_AS(test::platform({"tiles=0"}), ConfigError);
  CHECK_THROWS_AS(test::platform({"tiles=two"}), ConfigError);
}

TEST_CASE("deep merge overlays nested maps") {
  const auto base = YAML::Load("a: {x: 1, y: 2}\nb: 3");
  const auto over = YAML::Load("a: {y: 5}\nc: 4");
  const auto m = config::deep_merge(base, over);
  CHECK(m["a"]["x"].as<int>() == 1);
  CHECK(m["a"]["y"].as<int>() == 5);
  CHECK(m["b"].as<int>() == 3);
  CHECK(m["c"].as<int>() == 4);
}

TEST_CASE("later files override earlier ones") {
  const auto overlay = write_temp("overlay.yaml", "tiles: 3\nsim:\n  pti_cycles: 100\n");
  std::vector<std::filesystem::path> files{test::data_dir() / "platform.yaml", overlay};
  const auto cfg = config::load_config(files);
  CHECK(cfg.platform.tiles == 3);
  CHECK(cfg.sim.pti_cycles == 100);
  CHECK(cfg.platform.dpu_array.rows == 16);
}

TEST_CASE("serialized config round-trips") {
  const auto cfg = test::platform({}, true);
  const auto again = config::parse_config(YAML::Load(config::serialize(cfg)));
  CHECK(again == cfg);
}

TEST_CASE("invalid documents are rejected") {
  const auto missing = write_temp("missing.yaml", "tiles: 2\n");
  std::vector<std::filesystem::path> one{missing};
  CHECK_THROWS_AS(config::load_config(one), ConfigError);
  std::vector<std::filesystem::path> absent{"/nonexistent/platform.yaml"};
  CHECK_THROWS_AS(config::load_config(absent), Error);
  const auto bad = write_temp("bad.yaml", "tiles: [\n");
  std::vector<std::filesystem::path> broken{bad};
  CHECK_THROWS_AS(config::load_config(broken), ConfigError);
}

TEST_CASE("engine class names") {
  CHECK(config::engine_class_from_string("ddr") == config::EngineClass::Ddr);
  CHECK_FALSE(config::engine_class_from_string("gpu").has_value());
  CHECK(config::to_string(config::EngineClass::Noc) == "noc");
}

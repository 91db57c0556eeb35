#include <doctest.h>

#include "fragchain/config.hpp"
#include "fragchain/io.hpp"

using namespace fragchain;

TEST_CASE("minimal config takes defaults") {
  const auto cfg = parse_config(R"({"law": "uniform_binary"})");
  CHECK(cfg.law->name() == "uniform_binary");
  CHECK(cfg.mode == SimMode::exact);
  CHECK(cfg.replicas == 1);
}

TEST_CASE("full config round-trips") {
  const auto cfg = parse_config(R"({"law": {"name": "dirichlet_k", "params": {"k": 3, "a": 0.5}},
    "erosion": 0, "alpha": 0, "mode": "threshold", "epsilon": 0.001, "horizon": "inf",
    "snapshot_times": [1, 2], "seed": 5, "replicas": 10, "event_budget": 1000})");
  CHECK(cfg.mode == SimMode::threshold);
  CHECK(cfg.horizon == kInf);
  CHECK(cfg.law->params().at("k") == 3.0);
  const auto again = parse_config(config_to_json(cfg));
  CHECK(config_to_json(again) == config_to_json(cfg));
  CHECK(again.snapshot_times == cfg.snapshot_times);
  CHECK(again.event_budget == 1000);
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse_config("{"), InvalidConfigError);
  CHECK_THROWS_AS(parse_config("[]"), InvalidConfigError);
  CHECK_THROWS_AS(parse_config(R"({"seed": 1})"), InvalidConfigError);
  CHECK_THROWS_AS(parse_config(R"({"law": "uniform_binary", "colour": 1})"), InvalidConfigError);
  CHECK_THROWS_AS(parse_config(R"({"law": "uniform_binary", "seed": "x"})"), InvalidConfigError);
  CHECK_THROWS_AS(parse_config(R"({"law": "nope"})"), UnknownLawError);
  CHECK_THROWS_AS(parse_config(R"({"law": "uniform_binary", "mode": "fast"})"), PreconditionError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigNotFoundError);
}

TEST_CASE("hashing and number formatting") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(manifest_line("") == "# manifest cbf29ce484222325");
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 12345.678, -2.5}) CHECK(std::stod(format_double(v)) == v);
}

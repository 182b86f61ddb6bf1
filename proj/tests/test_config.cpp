// Copyright 2026 The v4r Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include <doctest.h>

#include <cstdlib>
#include <fstream>

#include "support/check.hpp"
#include "support/synthetic.hpp"
#include "v4r/config.hpp"

using namespace v4r;
using v4r::testing::code_of;
using ojson = nlohmann::ordered_json;

namespace
{

RunConfig parse(const char * text) { return config_from_json(ojson::parse(text), RunConfig{}); }

}  // namespace

TEST_CASE("defaults")
{
  const RunConfig c;
  CHECK(c.delta == 0.15);
  CHECK(c.pairing_mode == PairingMode::MinMse);
  CHECK_FALSE(c.pairing_window.has_value());
  CHECK(c.gate.min_blur == 100.0);
  CHECK(c.gate.min_area_px == 256);
  CHECK(c.gate.max_fg_ratio == 0.6);
  CHECK(c.cleanup.open_radius == 1);
  CHECK(c.cleanup.min_component_px == 64);
  CHECK(c.aug.radius_min == 1);
  CHECK(c.aug.radius_max == 9);
  CHECK(c.global_seed == 0);
  CHECK(c.segmenter == "mog");
  CHECK(c.sidecar.timeout_s == 120.0);
  CHECK(c.sidecar.retries == 2);
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("overlay of nested keys")
{
  const RunConfig c = parse(R"({"delta": 0.2, "mog": {"learning_rate": 0.01, "warmup_frames": 5},
    "pairing_mode": "temporal_closest", "pairing_window": 30, "gate": {"min_area_px": 100},
    "cleanup": {"keep": "all_above_min", "fill_holes": false}, "augment": {"enabled": true, "radius_max": 4},
    "global_seed": 18446744073709551615, "segmenter": "http://127.0.0.1:9000", "sidecar": {"retries": 0},
    "threads": 3})");
  CHECK(c.delta == 0.2);
  CHECK(c.mog.learning_rate == 0.01);
  CHECK(c.mog.warmup_frames == 5);
  CHECK(c.mog.max_components == 5);
  CHECK(c.pairing_mode == PairingMode::TemporalClosest);
  CHECK(c.pairing_window == 30);
  CHECK(c.gate.min_area_px == 100);
  CHECK(c.gate.min_blur == 100.0);
  CHECK(c.cleanup.keep == ComponentKeep::AllAboveMin);
  CHECK_FALSE(c.cleanup.fill_holes);
  CHECK(c.aug_enabled);
  CHECK(c.aug.radius_max == 4);
  CHECK(c.global_seed == 18446744073709551615ULL);
  CHECK(c.uses_sidecar());
  CHECK(c.sidecar.retries == 0);
  CHECK(c.threads == 3);
}

TEST_CASE("unknown keys and bad values are rejected")
{
  CHECK(code_of([] { parse(R"({"delta_typo": 0.1})"); }) == ErrorCode::Config);
  CHECK(code_of([] { parse(R"({"mog": {"alpha": 0.1}})"); }) == ErrorCode::Config);
  CHECK(code_of([] { parse(R"({"gate": {"min_area": 3}})"); }) == ErrorCode::Config);
  CHECK(code_of([] { parse(R"({"delta": "high"})"); }) == ErrorCode::Config);
  CHECK(code_of([] { parse(R"({"delta": 1.5})"); }) == ErrorCode::Config);
  CHECK(code_of([] { parse(R"({"mog": {"learning_rate": 0}})"); }) == ErrorCode::Config);
  CHECK(code_of([] { parse(R"({"pairing_mode": "nearest"})"); }) == ErrorCode::Config);
  CHECK(code_of([] { parse(R"({"pairing_window": 0})"); }) == ErrorCode::Config);
  CHECK(code_of([] { parse(R"({"augment": {"radius_min": 5, "radius_max": 2}})"); }) == ErrorCode::Config);
  CHECK(code_of([] { parse(R"({"global_seed": -1})"); }) == ErrorCode::Config);
  CHECK(code_of([] { parse(R"({"segmenter": "sam"})"); }) == ErrorCode::Config);
  CHECK(code_of([] { parse(R"({"threads": 0})"); }) == ErrorCode::Config);
  CHECK(code_of([] { parse(R"([1, 2])"); }) == ErrorCode::Config);
  try {
    parse(R"({"cleanup": {"radius": 2}})");
  } catch (const Error & e) {
    CHECK(std::string(e.what()).find("cleanup.radius") != std::string::npos);
  }
}

TEST_CASE("effective config round-trips and digests are stable")
{
  RunConfig c = parse(R"({"delta": 0.3, "pairing_window": 12, "augment": {"enabled": true}, "global_seed": 7})");
  const ojson j = config_to_json(c);
  CHECK_FALSE(j.contains("threads"));
  const RunConfig back = config_from_json(j, RunConfig{});
  CHECK(back == c);
  CHECK(config_digest(back) == config_digest(c));
  CHECK(config_digest(c).size() == 16);

  RunConfig threaded = c;
  threaded.threads = 8;
  CHECK(config_digest(threaded) == config_digest(c));
  RunConfig reseeded = c;
  reseeded.global_seed = 8;
  CHECK(config_digest(reseeded) != config_digest(c));

  const ojson unlimited = config_to_json(RunConfig{});
  CHECK(unlimited.at("pairing_window").is_null());
  CHECK(config_from_json(unlimited, c).pairing_window == std::nullopt);
}

TEST_CASE("config files")
{
  testing::TempDir dir;
  std::ofstream(dir / "c.json") << R"({"global_seed": 42})";
  CHECK(load_config(dir / "c.json", RunConfig{}).global_seed == 42);
  std::ofstream(dir / "bad.json") << "{oops";
  CHECK(code_of([&] { load_config(dir / "bad.json", RunConfig{}); }) == ErrorCode::Config);
  CHECK(code_of([&] { load_config(dir / "none.json", RunConfig{}); }) == ErrorCode::Config);
}

TEST_CASE("segmenter from environment")
{
  ::setenv("V4R_SIDECAR_URL", "http://localhost:1234", 1);
  CHECK(RunConfig::from_environment().segmenter == "http://localhost:1234");
  ::unsetenv("V4R_SIDECAR_URL");
  CHECK(RunConfig::from_environment().segmenter == "mog");
}

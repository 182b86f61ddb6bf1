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
#include "v4r/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>

#include "v4r/hash.hpp"

namespace v4r
{

using ojson = nlohmann::ordered_json;

namespace
{

[[noreturn]] void config_error(const std::string & msg)
{
  throw Error(ErrorCode::Config, "config: " + msg);
}

// Reads typed fields off one JSON object and rejects keys nobody asked for.
class ObjectReader
{
public:
  ObjectReader(const ojson & j, std::string where) : j_(j), where_(std::move(where))
  {
    if (!j_.is_object()) config_error(where_ + " must be an object");
  }

  void finish() const
  {
    for (const auto & [key, _] : j_.items()) {
      if (!seen_.count(key)) config_error("unknown key " + path(key));
    }
  }

  const ojson * find(const std::string & key)
  {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void number(const std::string & key, double & out)
  {
    if (const auto * v = find(key)) {
      if (!v->is_number()) config_error(path(key) + " must be a number");
      out = v->get<double>();
    }
  }

  template <typename Int>
  void integer(const std::string & key, Int & out)
  {
    if (const auto * v = find(key)) {
      if (!v->is_number_integer()) config_error(path(key) + " must be an integer");
      out = v->get<Int>();
    }
  }

  template <typename Int>
  void optional_integer(const std::string & key, std::optional<Int> & out)
  {
    if (const auto * v = find(key)) {
      if (v->is_null()) {
        out.reset();
      } else if (v->is_number_integer()) {
        out = v->get<Int>();
      } else {
        config_error(path(key) + " must be an integer or null");
      }
    }
  }

  void boolean(const std::string & key, bool & out)
  {
    if (const auto * v = find(key)) {
      if (!v->is_boolean()) config_error(path(key) + " must be a boolean");
      out = v->get<bool>();
    }
  }

  void string(const std::string & key, std::string & out)
  {
    if (const auto * v = find(key)) {
      if (!v->is_string()) config_error(path(key) + " must be a string");
      out = v->get<std::string>();
    }
  }

  std::string path(const std::string & key) const
  {
    return where_.empty() ? key : where_ + "." + key;
  }

private:
  const ojson & j_;
  std::string where_;
  std::set<std::string> seen_;
};

}  // namespace

RunConfig RunConfig::from_environment()
{
  RunConfig cfg;
  if (const char * url = std::getenv("V4R_SIDECAR_URL"); url && *url) cfg.segmenter = url;
  return cfg;
}

void RunConfig::validate() const
{
  if (!(delta >= 0.0 && delta <= 1.0)) config_error("delta must be in [0,1]");
  try {
    mog.validate();
  } catch (const Error & e) {
    config_error(e.what());
  }
  if (pairing_window && *pairing_window < 1) config_error("pairing_window must be >= 1");
  if (!(gate.min_blur >= 0.0)) config_error("gate.min_blur must be >= 0");
  if (gate.min_area_px < 0) config_error("gate.min_area_px must be >= 0");
  if (!(gate.max_fg_ratio > 0.0 && gate.max_fg_ratio <= 1.0)) {
    config_error("gate.max_fg_ratio must be in (0,1]");
  }
  if (cleanup.open_radius < 0) config_error("cleanup.open_radius must be >= 0");
  if (cleanup.min_component_px < 0) config_error("cleanup.min_component_px must be >= 0");
  if (aug.radius_min < 1 || aug.radius_max < aug.radius_min) {
    config_error("augment radius range must satisfy 1 <= radius_min <= radius_max");
  }
  if (segmenter.empty()) config_error("segmenter must be \"mog\" or a URL");
  if (segmenter != "mog" && segmenter.rfind("http://", 0) != 0 && segmenter.rfind("https://", 0) != 0) {
    config_error("segmenter must be \"mog\" or an http(s) URL, got \"" + segmenter + "\"");
  }
  if (!(sidecar.timeout_s > 0.0)) config_error("sidecar.timeout_s must be positive");
  if (sidecar.retries < 0) config_error("sidecar.retries must be >= 0");
  if (threads && *threads < 1) config_error("threads must be >= 1");
}

RunConfig config_from_json(const ojson & j, const RunConfig & base)
{
  RunConfig cfg = base;
  {
    ObjectReader root(j, "");
    root.number("delta", cfg.delta);
    if (const auto * m = root.find("mog")) {
      ObjectReader r(*m, "mog");
      r.integer("max_components", cfg.mog.max_components);
      r.number("match_threshold_sq", cfg.mog.match_threshold_sq);
      r.number("learning_rate", cfg.mog.learning_rate);
      r.number("complexity_prior", cfg.mog.complexity_prior);
      r.number("initial_variance", cfg.mog.initial_variance);
      r.number("variance_min", cfg.mog.variance_min);
      r.number("variance_max", cfg.mog.variance_max);
      r.number("background_mass", cfg.mog.background_mass);
      r.integer("warmup_frames", cfg.mog.warmup_frames);
      r.finish();
    }
    std::string mode = to_string(cfg.pairing_mode);
    root.string("pairing_mode", mode);
    const auto parsed = parse_pairing_mode(mode);
    if (!parsed) config_error("pairing_mode must be \"min_mse\" or \"temporal_closest\"");
    cfg.pairing_mode = *parsed;
    root.optional_integer("pairing_window", cfg.pairing_window);
    if (const auto * g = root.find("gate")) {
      ObjectReader r(*g, "gate");
      r.number("min_blur", cfg.gate.min_blur);
      r.integer("min_area_px", cfg.gate.min_area_px);
      r.number("max_fg_ratio", cfg.gate.max_fg_ratio);
      r.finish();
    }
    if (const auto * c = root.find("cleanup")) {
      ObjectReader r(*c, "cleanup");
      r.integer("open_radius", cfg.cleanup.open_radius);
      r.integer("min_component_px", cfg.cleanup.min_component_px);
      std::string keep = cfg.cleanup.keep == ComponentKeep::LargestOnly ? "largest_only" : "all_above_min";
      r.string("keep", keep);
      if (keep == "largest_only") {
        cfg.cleanup.keep = ComponentKeep::LargestOnly;
      } else if (keep == "all_above_min") {
        cfg.cleanup.keep = ComponentKeep::AllAboveMin;
      } else {
        config_error("cleanup.keep must be \"largest_only\" or \"all_above_min\"");
      }
      r.boolean("fill_holes", cfg.cleanup.fill_holes);
      r.finish();
    }
    if (const auto * a = root.find("augment")) {
      ObjectReader r(*a, "augment");
      r.boolean("enabled", cfg.aug_enabled);
      r.integer("radius_min", cfg.aug.radius_min);
      r.integer("radius_max", cfg.aug.radius_max);
      r.finish();
    }
    if (const auto * s = root.find("global_seed")) {
      if (!s->is_number_unsigned() && !(s->is_number_integer() && s->get<long long>() >= 0)) {
        config_error("global_seed must be a non-negative integer");
      }
      cfg.global_seed = s->get<std::uint64_t>();
    }
    root.string("segmenter", cfg.segmenter);
    if (const auto * s = root.find("sidecar")) {
      ObjectReader r(*s, "sidecar");
      r.number("timeout_s", cfg.sidecar.timeout_s);
      r.integer("retries", cfg.sidecar.retries);
      r.finish();
    }
    root.optional_integer("threads", cfg.threads);
    root.finish();
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path & path, const RunConfig & base)
{
  std::ifstream in(path);
  if (!in) config_error("cannot open " + path.string());
  ojson j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception & e) {
    config_error(path.string() + ": " + e.what());
  }
  return config_from_json(j, base);
}

ojson config_to_json(const RunConfig & c)
{
  ojson j;
  j["delta"] = c.delta;
  j["mog"] = {
    {"max_components", c.mog.max_components},
    {"match_threshold_sq", c.mog.match_threshold_sq},
    {"learning_rate", c.mog.learning_rate},
    {"complexity_prior", c.mog.complexity_prior},
    {"initial_variance", c.mog.initial_variance},
    {"variance_min", c.mog.variance_min},
    {"variance_max", c.mog.variance_max},
    {"background_mass", c.mog.background_mass},
    {"warmup_frames", c.mog.warmup_frames}};
  j["pairing_mode"] = to_string(c.pairing_mode);
  j["pairing_window"] = c.pairing_window ? ojson(*c.pairing_window) : ojson(nullptr);
  j["gate"] = {
    {"min_blur", c.gate.min_blur},
    {"min_area_px", c.gate.min_area_px},
    {"max_fg_ratio", c.gate.max_fg_ratio}};
  j["cleanup"] = {
    {"open_radius", c.cleanup.open_radius},
    {"min_component_px", c.cleanup.min_component_px},
    {"keep", c.cleanup.keep == ComponentKeep::LargestOnly ? "largest_only" : "all_above_min"},
    {"fill_holes", c.cleanup.fill_holes}};
  j["augment"] = {
    {"enabled", c.aug_enabled}, {"radius_min", c.aug.radius_min}, {"radius_max", c.aug.radius_max}};
  j["global_seed"] = c.global_seed;
  j["segmenter"] = c.segmenter;
  j["sidecar"] = {{"timeout_s", c.sidecar.timeout_s}, {"retries", c.sidecar.retries}};
  return j;
}

std::string config_digest(const RunConfig & cfg)
{
  return to_hex16(Fnv1a().bytes(config_to_json(cfg).dump()).digest());
}

}  // namespace v4r

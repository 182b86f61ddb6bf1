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
#include "v4r/sidecar.hpp"

#include <algorithm>
#include <thread>

#include <httplib.h>

namespace v4r
{

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace
{

[[noreturn]] void sidecar_error(const std::string & msg)
{
  throw Error(ErrorCode::Sidecar, "sidecar: " + msg);
}

}  // namespace

SidecarClient::SidecarClient(std::string base_url, SidecarOptions options)
: base_url_(std::move(base_url)), options_(options)
{
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
  const auto scheme_end = base_url_.find("://");
  if (scheme_end == std::string::npos) sidecar_error("invalid URL \"" + base_url_ + "\"");
  const auto path_start = base_url_.find('/', scheme_end + 3);
  scheme_host_port_ = base_url_.substr(0, path_start);
  if (path_start != std::string::npos) path_prefix_ = base_url_.substr(path_start);
}

ojson SidecarClient::request(const std::string & method, const std::string & path, const ojson * body)
{
  const std::string target = path_prefix_ + path;
  std::string last_problem;
  for (int attempt = 0; attempt <= options_.retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(100 * attempt));
    httplib::Client cli(scheme_host_port_);
    const auto secs = static_cast<time_t>(options_.timeout_s);
    const auto usecs = static_cast<time_t>((options_.timeout_s - static_cast<double>(secs)) * 1e6);
    cli.set_connection_timeout(secs, usecs);
    cli.set_read_timeout(secs, usecs);
    cli.set_write_timeout(secs, usecs);
    httplib::Result res = method == "GET"
                            ? cli.Get(target)
                            : cli.Post(target, body ? body->dump() : std::string("{}"), "application/json");
    if (!res) {
      last_problem = "request to " + base_url_ + path + " failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      last_problem = base_url_ + path + " returned HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      sidecar_error(base_url_ + path + " returned HTTP " + std::to_string(res->status) + ": " + res->body);
    }
    try {
      return ojson::parse(res->body);
    } catch (const nlohmann::json::exception & e) {
      sidecar_error(base_url_ + path + " returned invalid JSON: " + e.what());
    }
  }
  sidecar_error(last_problem);
}

const std::vector<std::string> & SidecarClient::ensure_healthy()
{
  std::lock_guard lock(mutex_);
  if (modes_) return *modes_;
  const ojson j = request("GET", "/health", nullptr);
  if (!j.is_object() || j.value("status", "") != "ok") sidecar_error("health check did not report ok");
  std::vector<std::string> modes;
  if (j.contains("modes") && j["modes"].is_array()) {
    for (const auto & m : j["modes"]) {
      if (m.is_string()) modes.push_back(m.get<std::string>());
    }
  }
  modes_ = std::move(modes);
  return *modes_;
}

SegmentResult SidecarClient::segment(const fs::path & image, const std::string & prompt, int width, int height)
{
  ensure_healthy();
  ojson body;
  body["image_path"] = fs::absolute(image).string();
  body["text_prompt"] = prompt;
  const ojson j = request("POST", "/segment", &body);
  SegmentResult out;
  try {
    out.mask = rle_decode(rle_from_json(j.at("mask")));
    out.score = j.value("score", 0.0);
    out.model_id = j.value("model_id", "");
  } catch (const nlohmann::json::exception & e) {
    sidecar_error(std::string("malformed /segment response: ") + e.what());
  } catch (const Error & e) {
    sidecar_error(std::string("malformed /segment mask: ") + e.what());
  }
  if (!out.mask.same_shape(width, height)) {
    sidecar_error("/segment mask size differs from the input image");
  }
  return out;
}

EmbeddingSet SidecarClient::embed(const std::vector<fs::path> & images, const std::string & space)
{
  ensure_healthy();
  ojson body;
  body["image_paths"] = ojson::array();
  for (const auto & p : images) body["image_paths"].push_back(fs::absolute(p).string());
  body["space"] = space;
  const ojson j = request("POST", "/embed", &body);
  try {
    const auto dim = j.at("dim").get<std::size_t>();
    std::vector<std::vector<double>> rows;
    for (const auto & row : j.at("embeddings")) rows.push_back(row.get<std::vector<double>>());
    if (rows.size() != images.size()) sidecar_error("/embed returned the wrong number of rows");
    std::vector<std::string> sources;
    for (const auto & p : images) sources.push_back(p.string());
    return make_embedding_set(dim, std::move(rows), std::move(sources));
  } catch (const nlohmann::json::exception & e) {
    sidecar_error(std::string("malformed /embed response: ") + e.what());
  } catch (const Error & e) {
    if (e.code() == ErrorCode::Sidecar) throw;
    sidecar_error(std::string("malformed /embed response: ") + e.what());
  }
}

EmbedFn sidecar_embedder(SidecarClient & client)
{
  return [&client](const std::vector<fs::path> & images, EmbeddingSpace space) {
    const auto & modes = client.ensure_healthy();
    const std::string wanted = to_string(space);
    const bool offered = std::find(modes.begin(), modes.end(), wanted) != modes.end();
    return client.embed(images, offered ? wanted : "stub");
  };
}

}  // namespace v4r

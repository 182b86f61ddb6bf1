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
#include "support/stub_sidecar.hpp"

#include <httplib.h>
#include <json.hpp>

#include "v4r/imaging.hpp"
#include "v4r/mask.hpp"
#include "v4r/metrics.hpp"

namespace v4r::testing
{

using ojson = nlohmann::ordered_json;

namespace
{

void reply(httplib::Response & res, int status, const ojson & body)
{
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

}  // namespace

StubSidecar::StubSidecar() : server_(std::make_unique<httplib::Server>())
{
  auto & srv = *server_;
  srv.set_pre_routing_handler([this](const httplib::Request &, httplib::Response & res) {
    ++requests_;
    if (failures_ > 0) {
      --failures_;
      reply(res, 503, {{"error", "warming up"}});
      return httplib::Server::HandlerResponse::Handled;
    }
    return httplib::Server::HandlerResponse::Unhandled;
  });
  srv.Get("/health", [this](const httplib::Request &, httplib::Response & res) {
    reply(res, 200, {{"status", "ok"}, {"modes", modes_}});
  });
  srv.Post("/segment", [this](const httplib::Request & req, httplib::Response & res) {
    ++segment_calls_;
    ojson body;
    try {
      body = ojson::parse(req.body);
      (void)body.at("text_prompt").get<std::string>();
    } catch (const std::exception &) {
      reply(res, 400, {{"error", "bad request"}});
      return;
    }
    Frame img;
    try {
      img = load_image(body.at("image_path").get<std::string>());
    } catch (const std::exception &) {
      reply(res, 422, {{"error", "undecodable image"}});
      return;
    }
    const GrayFrame g = to_gray(img);
    const int h = wrong_size_ ? g.height() - 1 : g.height();
    Mask m(g.width(), h);
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < g.width(); ++c) m.set(r, c, g.at(r, c) >= 128);
    }
    reply(res, 200, {{"mask", rle_to_json(rle_encode(m))}, {"score", 0.9}, {"model_id", "stub-otsu"}});
  });
  srv.Post("/embed", [](const httplib::Request & req, httplib::Response & res) {
    ojson body;
    try {
      body = ojson::parse(req.body);
    } catch (const std::exception &) {
      reply(res, 400, {{"error", "bad request"}});
      return;
    }
    if (body.value("space", "") != "stub" && body.value("space", "") != "dino") {
      reply(res, 400, {{"error", "unknown space"}});
      return;
    }
    ojson rows = ojson::array();
    for (const auto & p : body.at("image_paths")) {
      auto e = builtin_embed(load_image(p.get<std::string>()));
      if (body["space"] == "dino") e.resize(8);
      rows.push_back(e);
    }
    reply(res, 200, {{"dim", body["space"] == "dino" ? 8 : static_cast<int>(kBuiltinDim)},
                     {"embeddings", rows}, {"model_id", "stub"}});
  });
  port_ = srv.bind_to_any_port("127.0.0.1");
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

StubSidecar::~StubSidecar()
{
  server_->stop();
  if (thread_.joinable()) thread_.join();
}

std::string StubSidecar::url() const { return "http://127.0.0.1:" + std::to_string(port_); }

void StubSidecar::set_modes(std::vector<std::string> modes) { modes_ = std::move(modes); }

}  // namespace v4r::testing

// Copyright 2026 The ClimaDash Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "climadash/agent/retrieval.hpp"
#include "climadash/dashboard/store.hpp"
#include "climadash/dsl/model.hpp"
#include "climadash/ingestion/store.hpp"

namespace climadash::service {

struct ServiceOptions {
  // Journals (`<data>/<ds>.jsonl`), dashboards (`<data>/dashboards/`) and
  // the persisted index (`<data>/index.json`). In-memory only when absent.
  std::optional<std::filesystem::path> data_dir;
  // Rebuilt at startup when given; otherwise `<data>/index.json` is loaded
  // if it exists.
  std::optional<std::filesystem::path> corpus_dir;
  // Served at `/`; a placeholder page otherwise.
  std::optional<std::filesystem::path> static_dir;
  // Log line per request.
  std::function<void(const std::string&)> log;
};

struct StartupReport {
  ingestion::ReplayStats replay;
  std::size_t dashboards_loaded = 0;
  std::vector<std::string> dashboards_skipped;
  bool default_dashboard_created = false;
  std::size_t passages = 0;
  std::vector<std::string> index_warnings;
};

// The REST surface over ingestion, KPI evaluation, dashboards and the agent.
// Construction replays journals and loads dashboards, so no request ever
// sees a partially loaded state.
class Server {
 public:
  Server(std::shared_ptr<const dsl::Model> model, ServiceOptions options = {});
  ~Server();

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Binds `host:port` (port 0 picks a free one) and returns the bound port.
  // Throws Error(kIo) when binding fails.
  int bind(const std::string& host, int port);
  // Serves on the bound socket until stop(). Blocks.
  void listen();
  // bind() + listen() on a background thread; returns once accepting.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  void stop();

  const StartupReport& startup() const noexcept { return startup_; }
  ingestion::Store& data() noexcept { return *data_; }
  dashboard::DashboardStore& dashboards() noexcept { return *dashboards_; }
  std::shared_ptr<const agent::RetrievalIndex> index() const;
  // Swaps the index atomically; in-flight queries keep the old one.
  void set_index(agent::RetrievalIndex index);

 private:
  struct Impl;

  std::shared_ptr<const dsl::Model> model_;
  ServiceOptions options_;
  std::unique_ptr<ingestion::Store> data_;
  std::unique_ptr<dashboard::DashboardStore> dashboards_;
  std::shared_ptr<const agent::RetrievalIndex> index_;
  StartupReport startup_;
  std::unique_ptr<Impl> impl_;
};

// Model as served at GET /api/v1/model.
nlohmann::ordered_json model_to_json(const dsl::Model& model);

}  // namespace climadash::service

// Copyright 2026 The ClimaDash Authors
// SPDX-License-Identifier: Apache-2.0

#include "climadash/dashboard/store.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <fstream>
#include <sstream>

namespace climadash::dashboard {

namespace fs = std::filesystem;

bool is_valid_dashboard_id(std::string_view id) noexcept {
  if (id.empty() || id.size() > 64) return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
           (c >= '0' && c <= '9') || c == '_' || c == '-';
  });
}

DashboardStore::DashboardStore(std::shared_ptr<const dsl::Model> model,
                               std::optional<fs::path> dir)
    : model_(std::move(model)), dir_(std::move(dir)) {}

std::size_t DashboardStore::load(std::vector<std::string>* skipped) {
  if (!dir_ || !fs::exists(*dir_)) return 0;
  std::vector<fs::path> files;
  for (const auto& item : fs::directory_iterator(*dir_)) {
    if (item.is_regular_file() && item.path().extension() == ".json") {
      files.push_back(item.path());
    }
  }
  std::sort(files.begin(), files.end());

  std::size_t loaded = 0;
  std::unique_lock lock(map_mutex_);
  for (const auto& path : files) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    auto doc = nlohmann::json::parse(buf.str(), nullptr, false);
    try {
      if (doc.is_discarded()) throw Error(ErrorKind::kInvalid, "not JSON");
      Dashboard d = dashboard_from_json(doc);
      bool sources_ok = std::all_of(d.widgets.begin(), d.widgets.end(),
                                    [&](const Widget& w) { return w.source.resolves(*model_); });
      if (!is_valid_dashboard_id(d.id) || !sources_ok ||
          !geometry_valid(d.rects())) {
        throw Error(ErrorKind::kInvalid, "inconsistent with the active model");
      }
      auto e = std::make_shared<Entry>();
      e->snapshot = std::make_shared<const Dashboard>(std::move(d));
      entries_[e->snapshot->id] = std::move(e);
      ++loaded;
    } catch (const Error& err) {
      if (skipped) skipped->push_back(path.string() + ": " + err.what());
    }
  }
  return loaded;
}

std::shared_ptr<DashboardStore::Entry> DashboardStore::entry(std::string_view id) const {
  std::shared_lock lock(map_mutex_);
  auto it = entries_.find(id);
  if (it == entries_.end()) {
    throw Error(ErrorKind::kNotFound, "no dashboard '" + std::string(id) + "'");
  }
  return it->second;
}

std::vector<DashboardPtr> DashboardStore::list() const {
  std::shared_lock lock(map_mutex_);
  std::vector<DashboardPtr> out;
  out.reserve(entries_.size());
  for (const auto& [id, e] : entries_) out.push_back(std::atomic_load(&e->snapshot));
  return out;
}

DashboardPtr DashboardStore::get(std::string_view id) const {
  return std::atomic_load(&entry(id)->snapshot);
}

bool DashboardStore::contains(std::string_view id) const {
  std::shared_lock lock(map_mutex_);
  return entries_.find(id) != entries_.end();
}

std::string DashboardStore::next_id() const {
  long highest = 0;
  for (const auto& [id, e] : entries_) {
    if (id.size() < 2 || id[0] != 'd') continue;
    long n = 0;
    auto [ptr, ec] = std::from_chars(id.data() + 1, id.data() + id.size(), n);
    if (ec == std::errc() && ptr == id.data() + id.size()) highest = std::max(highest, n);
  }
  return "d" + std::to_string(highest + 1);
}

void DashboardStore::persist(const Dashboard& d) const {
  if (!dir_) return;
  std::error_code ec;
  fs::create_directories(*dir_, ec);
  if (ec) throw Error(ErrorKind::kIo, "mkdir " + dir_->string() + ": " + ec.message());
  fs::path target = *dir_ / (d.id + ".json");
  fs::path tmp = *dir_ / (d.id + ".json.tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << to_json(d).dump(2) << '\n';
    out.close();
    if (!out) throw Error(ErrorKind::kIo, "write " + tmp.string() + " failed");
  }
  fs::rename(tmp, target, ec);
  if (ec) throw Error(ErrorKind::kIo, "rename to " + target.string() + ": " + ec.message());
}

DashboardPtr DashboardStore::create(std::string name, std::vector<Widget> widgets,
                                    std::optional<std::string> id) {
  std::unique_lock lock(map_mutex_);
  Dashboard d;
  d.id = id ? *id : next_id();
  if (!is_valid_dashboard_id(d.id)) {
    throw Error(ErrorKind::kInvalid, "dashboard id '" + d.id +
                                         "' must be 1-64 characters of [A-Za-z0-9_-]");
  }
  if (entries_.count(d.id)) {
    throw Error(ErrorKind::kInvalid, "dashboard '" + d.id + "' already exists");
  }
  if (name.empty()) name = d.id;
  // Validate name and widgets through the same path as a PUT.
  Dashboard seed;
  seed.id = d.id;
  seed.version = 0;
  d = apply_mutation(seed, ReplaceDashboard{std::move(name), std::move(widgets)},
                     *model_);
  persist(d);
  auto e = std::make_shared<Entry>();
  e->snapshot = std::make_shared<const Dashboard>(std::move(d));
  auto snap = e->snapshot;
  entries_.emplace(snap->id, std::move(e));
  return snap;
}

DashboardPtr DashboardStore::mutate(std::string_view id, int expected_version,
                                    const Mutation& mutation) {
  auto e = entry(id);
  std::lock_guard write(e->write_mutex);
  DashboardPtr current = std::atomic_load(&e->snapshot);
  if (current->version != expected_version) {
    throw ConflictError(current, expected_version);
  }
  auto next = std::make_shared<const Dashboard>(
      apply_mutation(*current, mutation, *model_));
  persist(*next);
  std::atomic_store(&e->snapshot, DashboardPtr(next));
  return next;
}

void DashboardStore::remove(std::string_view id, std::optional<int> expected_version) {
  auto e = entry(id);
  std::lock_guard write(e->write_mutex);
  DashboardPtr current = std::atomic_load(&e->snapshot);
  if (expected_version && current->version != *expected_version) {
    throw ConflictError(current, *expected_version);
  }
  std::unique_lock lock(map_mutex_);
  entries_.erase(std::string(id));
  if (dir_) {
    std::error_code ec;
    fs::remove(*dir_ / (std::string(id) + ".json"), ec);
  }
}

}  // namespace climadash::dashboard

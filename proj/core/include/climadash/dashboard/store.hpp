// Copyright 2026 The ClimaDash Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "climadash/dashboard/dashboard.hpp"
#include "climadash/error.hpp"

namespace climadash::dashboard {

using DashboardPtr = std::shared_ptr<const Dashboard>;

// Optimistic-lock failure. Carries the stored dashboard so the caller can
// merge and retry.
class ConflictError : public Error {
 public:
  ConflictError(DashboardPtr current, int expected)
      : Error(ErrorKind::kConflict,
              "dashboard '" + current->id + "' is at version " +
                  std::to_string(current->version) + ", not " +
                  std::to_string(expected)),
        current_(std::move(current)) {}

  const DashboardPtr& current() const noexcept { return current_; }

 private:
  DashboardPtr current_;
};

// Versioned dashboards, optionally persisted as `<dir>/<id>.json`.
//
// Mutations on one dashboard are serialized; readers get immutable
// snapshots and never wait for a writer.
class DashboardStore {
 public:
  DashboardStore(std::shared_ptr<const dsl::Model> model,
                 std::optional<std::filesystem::path> dir = std::nullopt);

  // Loads every `*.json` in the directory. Returns how many were loaded;
  // documents that fail to parse or whose sources no longer resolve are
  // skipped and listed in `skipped`.
  std::size_t load(std::vector<std::string>* skipped = nullptr);

  std::vector<DashboardPtr> list() const;
  // Throws Error(kNotFound).
  DashboardPtr get(std::string_view id) const;
  bool contains(std::string_view id) const;

  // Creates a dashboard at version 1. `id` is generated ("d1", "d2", ...)
  // when absent. Throws Error(kInvalid) for a malformed or taken id, or
  // Error(kGeometry) when the widgets overlap.
  DashboardPtr create(std::string name, std::vector<Widget> widgets = {},
                      std::optional<std::string> id = std::nullopt);

  // Applies `mutation` if the stored version equals `expected_version`.
  // Throws ConflictError on mismatch, or whatever apply_mutation throws;
  // in every failure case the stored state is unchanged.
  DashboardPtr mutate(std::string_view id, int expected_version,
                      const Mutation& mutation);

  // Throws Error(kNotFound), or ConflictError when `expected_version` is
  // given and stale.
  void remove(std::string_view id, std::optional<int> expected_version = {});

  const dsl::Model& model() const noexcept { return *model_; }

 private:
  struct Entry {
    std::mutex write_mutex;
    DashboardPtr snapshot;  // accessed with std::atomic_load/store
  };

  std::shared_ptr<Entry> entry(std::string_view id) const;
  void persist(const Dashboard& d) const;
  std::string next_id() const;

  std::shared_ptr<const dsl::Model> model_;
  std::optional<std::filesystem::path> dir_;
  mutable std::shared_mutex map_mutex_;
  std::map<std::string, std::shared_ptr<Entry>, std::less<>> entries_;
};

bool is_valid_dashboard_id(std::string_view id) noexcept;

}  // namespace climadash::dashboard

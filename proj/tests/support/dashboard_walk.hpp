// Copyright 2026 The ClimaDash Authors
// SPDX-License-Identifier: Apache-2.0
//
// Random add/move/resize/remove sequences against a DashboardStore, checking
// the grid invariants after every step.

#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "climadash/dashboard/store.hpp"
#include "generators.hpp"

namespace cdtest {

struct WalkStats {
  int accepted = 0;
  int rejected = 0;
  std::string failure;  // first broken invariant, empty when none
};

inline WalkStats geometry_walk(Rng& rng, std::shared_ptr<const climadash::dsl::Model> model,
                               int steps) {
  using namespace climadash;
  using namespace climadash::dashboard;
  DashboardStore store(model);
  auto board = store.create("walk", {}, std::string("walk"));
  std::vector<SourceRef> sources;
  for (const auto& d : model->datasources) sources.push_back(SourceRef::datasource(d.name));
  for (const auto& k : model->kpis) sources.push_back(SourceRef::kpi(k.name));

  WalkStats stats;
  auto coord = [&] { return uniform_int(rng, -2, 14); };
  auto size = [&] { return uniform_int(rng, 0, 13); };
  for (int step = 0; step < steps && stats.failure.empty(); ++step) {
    auto before = store.get("walk");
    std::string some_id = before->widgets.empty() || chance(rng, 0.05)
                              ? "w999"
                              : pick(rng, before->widgets).id;
    Mutation m;
    switch (before->widgets.size() > 12 ? uniform_int(rng, 1, 3) : uniform_int(rng, 0, 3)) {
      case 0: {
        WidgetSpec spec;
        spec.source = pick(rng, sources);
        spec.w = uniform_int(rng, 1, 13);
        spec.h = uniform_int(rng, 1, 6);
        if (chance(rng, 0.3)) {
          spec.x = coord();
          spec.y = coord();
        }
        m = AddWidget{spec};
        break;
      }
      case 1:
        m = MoveWidget{some_id, coord(), coord()};
        break;
      case 2:
        m = ResizeWidget{some_id, size(), size()};
        break;
      default:
        m = RemoveWidget{some_id};
        break;
    }
    int expected = chance(rng, 0.1) ? before->version - 1 : before->version;
    bool ok = true;
    try {
      store.mutate("walk", expected, m);
    } catch (const Error&) {
      ok = false;
    }
    auto after = store.get("walk");
    std::ostringstream why;
    if (ok) {
      ++stats.accepted;
      if (after->version != before->version + 1) why << "version jumped to " << after->version;
    } else {
      ++stats.rejected;
      if (*after != *before) why << "rejected mutation changed the dashboard";
    }
    // Checked cell by cell rather than through the library's own predicates.
    std::vector<std::vector<int>> cells;
    for (const auto& w : after->widgets) {
      const auto& r = w.layout;
      if (r.x < 0 || r.y < 0 || r.w < kMinWidgetSize || r.h < kMinWidgetSize || r.x + r.w > kGridColumns) {
        why << " " << w.id << " outside the grid";
        continue;
      }
      if (static_cast<int>(cells.size()) < r.y + r.h) {
        cells.resize(static_cast<std::size_t>(r.y + r.h), std::vector<int>(kGridColumns, 0));
      }
      for (int y = r.y; y < r.y + r.h; ++y) {
        for (int x = r.x; x < r.x + r.w; ++x) {
          if (++cells[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)] == 2) {
            why << " overlap at (" << x << "," << y << ")";
          }
        }
      }
    }
    if (!why.str().empty()) {
      stats.failure = "step " + std::to_string(step) + " " + std::string(mutation_name(m)) + ": " +
                      why.str();
    }
  }
  return stats;
}

}  // namespace cdtest

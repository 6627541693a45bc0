// Copyright 2026 The ClimaDash Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "climadash/dsl/model.hpp"

namespace climadash::dashboard {

inline constexpr int kGridColumns = 12;
inline constexpr int kMinWidgetSize = 2;
inline constexpr int kDefaultWidgetWidth = 6;
inline constexpr int kDefaultWidgetHeight = 4;

enum class WidgetKind { kLine, kBar, kGauge, kStat, kTable };

std::string_view to_string(WidgetKind kind) noexcept;
std::optional<WidgetKind> parse_widget_kind(std::string_view text) noexcept;

// "datasource:<name>" or "kpi:<name>".
struct SourceRef {
  enum class Type { kDatasource, kKpi };

  Type type = Type::kDatasource;
  std::string name;

  static SourceRef datasource(std::string name) {
    return {Type::kDatasource, std::move(name)};
  }
  static SourceRef kpi(std::string name) { return {Type::kKpi, std::move(name)}; }
  static std::optional<SourceRef> parse(std::string_view text);
  std::string to_string() const;
  bool resolves(const dsl::Model& model) const;

  bool operator==(const SourceRef&) const = default;
};

// Grid rectangle in cells. Columns are bounded by kGridColumns, rows are not.
struct Rect {
  int x = 0;
  int y = 0;
  int w = kDefaultWidgetWidth;
  int h = kDefaultWidgetHeight;

  int right() const noexcept { return x + w; }
  int bottom() const noexcept { return y + h; }
  bool overlaps(const Rect& o) const noexcept {
    return x < o.right() && o.x < right() && y < o.bottom() && o.y < bottom();
  }
  bool fits_grid() const noexcept {
    return x >= 0 && y >= 0 && w >= kMinWidgetSize && h >= kMinWidgetSize &&
           right() <= kGridColumns;
  }
  bool operator==(const Rect&) const = default;
};

// Named palette accepted for widget colors.
std::span<const std::string_view> named_colors() noexcept;
bool is_named_color(std::string_view color) noexcept;

struct WidgetConfig {
  std::string title;
  std::optional<std::string> color;
  std::optional<dsl::Duration> window_override;
  std::optional<std::string> group_by_override;

  bool operator==(const WidgetConfig&) const = default;
};

struct Widget {
  std::string id;
  WidgetKind kind = WidgetKind::kTable;
  SourceRef source;
  Rect layout;
  WidgetConfig config;

  bool operator==(const Widget&) const = default;
};

struct Dashboard {
  std::string id;
  std::string name;
  int version = 1;
  std::vector<Widget> widgets;

  const Widget* find_widget(std::string_view widget_id) const;
  std::vector<Rect> rects() const;
  // Fresh widget id, "w<n>" with n one past the largest in use.
  std::string next_widget_id() const;

  bool operator==(const Dashboard&) const = default;
};

// Field roles a widget kind reads from its source.
struct Bindings {
  std::optional<std::string> time_field;
  std::optional<std::string> value_field;
  std::optional<std::string> category_field;

  bool operator==(const Bindings&) const = default;
};

struct AutoConfig {
  WidgetKind kind = WidgetKind::kTable;
  Bindings bindings;
};

// Picks a widget kind for a source with a fixed decision table (first match
// wins):
//   1. KPI with a window and no target      -> line
//   2. KPI with a target                    -> gauge
//   3. KPI with neither                     -> stat
//   4. datasource with datetime + numeric   -> line, y = first numeric field
//   5. datasource with string/enum + numeric -> bar, category = first of them
//   6. anything else                        -> table
// Throws climadash::Error(kNotFound) if the source does not resolve.
AutoConfig auto_configure(const SourceRef& source, const dsl::Model& model);

// Bindings for an explicitly chosen kind (which may differ from the one
// auto_configure would pick).
Bindings default_bindings(const SourceRef& source, WidgetKind kind,
                          const dsl::Model& model);

// First-fit: scans rows top to bottom and columns left to right and returns
// the first top-left cell where a w x h rectangle overlaps nothing. Always
// succeeds because the grid grows downward. Requires 2 <= w <= 12, h >= 2.
std::pair<int, int> auto_place(std::span<const Rect> existing, int w, int h);

// True when every rectangle fits the grid and no two overlap.
bool geometry_valid(std::span<const Rect> rects);

// --- mutations -------------------------------------------------------------

struct WidgetSpec {
  SourceRef source;
  std::optional<WidgetKind> kind;  // auto-configured when absent
  std::optional<int> x;            // auto-placed unless both x and y are set
  std::optional<int> y;
  int w = kDefaultWidgetWidth;
  int h = kDefaultWidgetHeight;
  std::optional<std::string> title;  // defaults to the source name
  std::optional<std::string> color;
  std::optional<dsl::Duration> window_override;
  std::optional<std::string> group_by_override;
};

struct AddWidget {
  WidgetSpec spec;
};
struct RemoveWidget {
  std::string widget_id;
};
struct MoveWidget {
  std::string widget_id;
  int x = 0;
  int y = 0;
};
struct ResizeWidget {
  std::string widget_id;
  int w = kDefaultWidgetWidth;
  int h = kDefaultWidgetHeight;
};
struct RetitleWidget {
  std::string widget_id;
  std::string title;
};
struct RecolorWidget {
  std::string widget_id;
  std::optional<std::string> color;  // nullopt clears the color
};
struct RenameDashboard {
  std::string name;
};
// Several widget properties changed in one step (HTTP PATCH).
struct UpdateWidget {
  std::string widget_id;
  std::optional<int> x, y, w, h;
  std::optional<WidgetKind> kind;
  std::optional<std::string> title;
  std::optional<std::string> color;
  std::optional<dsl::Duration> window_override;
  std::optional<std::string> group_by_override;
};
// Whole-document replacement (HTTP PUT).
struct ReplaceDashboard {
  std::string name;
  std::vector<Widget> widgets;
};

using Mutation =
    std::variant<AddWidget, RemoveWidget, MoveWidget, ResizeWidget,
                 RetitleWidget, RecolorWidget, RenameDashboard, UpdateWidget,
                 ReplaceDashboard>;

std::string_view mutation_name(const Mutation& m) noexcept;

// Pure mutation step: returns the next dashboard with version + 1.
// Throws climadash::Error with kNotFound (unknown widget id, unresolved
// source), kGeometry (overlap, outside grid, below minimum size) or kInvalid
// (bad title, color, field). The input is never modified.
Dashboard apply_mutation(const Dashboard& current, const Mutation& mutation,
                         const dsl::Model& model);

// --- JSON --------------------------------------------------------------------

nlohmann::ordered_json to_json(const Widget& w);
nlohmann::ordered_json to_json(const Dashboard& d);
// Throws climadash::Error(kInvalid) on malformed documents.
Widget widget_from_json(const nlohmann::json& j);
Dashboard dashboard_from_json(const nlohmann::json& j);
WidgetSpec widget_spec_from_json(const nlohmann::json& j);

}  // namespace climadash::dashboard

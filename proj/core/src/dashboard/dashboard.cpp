// Copyright 2026 The ClimaDash Authors
// SPDX-License-Identifier: Apache-2.0

#include "climadash/dashboard/dashboard.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <set>

#include "climadash/error.hpp"

namespace climadash::dashboard {

using dsl::Entity;
using dsl::FieldKind;
using dsl::Model;

std::string_view to_string(WidgetKind kind) noexcept {
  switch (kind) {
    case WidgetKind::kLine:
      return "line";
    case WidgetKind::kBar:
      return "bar";
    case WidgetKind::kGauge:
      return "gauge";
    case WidgetKind::kStat:
      return "stat";
    case WidgetKind::kTable:
      return "table";
  }
  return "table";
}

std::optional<WidgetKind> parse_widget_kind(std::string_view text) noexcept {
  for (auto k : {WidgetKind::kLine, WidgetKind::kBar, WidgetKind::kGauge,
                 WidgetKind::kStat, WidgetKind::kTable}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

std::optional<SourceRef> SourceRef::parse(std::string_view text) {
  auto colon = text.find(':');
  if (colon == std::string_view::npos) return std::nullopt;
  auto prefix = text.substr(0, colon);
  auto name = std::string(text.substr(colon + 1));
  if (name.empty()) return std::nullopt;
  if (prefix == "datasource") return datasource(std::move(name));
  if (prefix == "kpi") return kpi(std::move(name));
  return std::nullopt;
}

std::string SourceRef::to_string() const {
  return (type == Type::kKpi ? "kpi:" : "datasource:") + name;
}

bool SourceRef::resolves(const Model& model) const {
  if (type == Type::kKpi) return model.find_kpi(name) != nullptr;
  return model.entity_of(name) != nullptr;
}

namespace {

constexpr std::array<std::string_view, 10> kColors = {
    "red",  "orange", "yellow", "green", "teal",
    "blue", "purple", "pink",   "gray",  "black"};

constexpr std::size_t kMaxTitleLength = 200;

// Entity whose fields a source exposes (a KPI exposes its datasource's).
const Entity* source_entity(const SourceRef& source, const Model& model) {
  if (source.type == SourceRef::Type::kKpi) {
    const auto* k = model.find_kpi(source.name);
    return k ? model.entity_of(k->source) : nullptr;
  }
  return model.entity_of(source.name);
}

std::optional<std::string> first_field(const Entity& e, auto predicate) {
  for (const auto& f : e.fields) {
    if (predicate(f)) return f.name;
  }
  return std::nullopt;
}

std::optional<std::string> time_field(const Entity& e) {
  auto axis = e.time_axis();
  if (!axis) return std::nullopt;
  return e.fields[*axis].name;
}

std::optional<std::string> numeric_field(const Entity& e) {
  return first_field(e, [](const dsl::Field& f) { return f.type.is_numeric(); });
}

std::optional<std::string> category_field(const Entity& e) {
  return first_field(e,
                     [](const dsl::Field& f) { return f.type.is_categorical(); });
}

std::string checked_title(std::string_view raw) {
  auto begin = raw.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) {
    throw Error(ErrorKind::kInvalid, "widget title must not be empty");
  }
  auto end = raw.find_last_not_of(" \t\r\n");
  std::string title(raw.substr(begin, end - begin + 1));
  if (title.size() > kMaxTitleLength) {
    throw Error(ErrorKind::kInvalid, "widget title is longer than 200 bytes");
  }
  return title;
}

std::optional<std::string> checked_color(const std::optional<std::string>& c) {
  if (c && !is_named_color(*c)) {
    throw Error(ErrorKind::kInvalid, "unknown color '" + *c + "'");
  }
  return c;
}

void check_group_by(const SourceRef& source, const std::optional<std::string>& g,
                    const Model& model) {
  if (!g) return;
  const Entity* e = source_entity(source, model);
  const dsl::Field* f = e ? e->find_field(*g) : nullptr;
  if (!f || !f->type.is_categorical()) {
    throw Error(ErrorKind::kInvalid, "cannot group '" + source.name + "' by '" +
                                         *g + "': not a string or enum field");
  }
}

void check_rect_shape(const Rect& r) {
  if (r.w < kMinWidgetSize || r.h < kMinWidgetSize) {
    throw Error(ErrorKind::kGeometry, "widgets must be at least 2x2 cells");
  }
  if (!r.fits_grid()) {
    throw Error(ErrorKind::kGeometry,
                "widget at (" + std::to_string(r.x) + "," + std::to_string(r.y) +
                    ") size " + std::to_string(r.w) + "x" + std::to_string(r.h) +
                    " does not fit the 12-column grid");
  }
}

void check_free(const Dashboard& d, const Rect& r, std::string_view ignore_id) {
  for (const auto& other : d.widgets) {
    if (other.id == ignore_id) continue;
    if (other.layout.overlaps(r)) {
      throw Error(ErrorKind::kGeometry,
                  "widget would overlap widget '" + other.id + "'");
    }
  }
}

Widget& widget_or_throw(Dashboard& d, const std::string& id) {
  for (auto& w : d.widgets) {
    if (w.id == id) return w;
  }
  throw Error(ErrorKind::kNotFound, "no widget '" + id + "' on dashboard '" +
                                        d.id + "'");
}

void require_source(const SourceRef& source, const Model& model) {
  if (!source.resolves(model)) {
    throw Error(ErrorKind::kNotFound,
                "unknown source '" + source.to_string() + "'");
  }
}

Widget build_widget(const Dashboard& d, const WidgetSpec& spec,
                    const Model& model) {
  require_source(spec.source, model);
  Widget w;
  w.id = d.next_widget_id();
  w.source = spec.source;
  w.kind = spec.kind ? *spec.kind : auto_configure(spec.source, model).kind;
  w.config.title = checked_title(spec.title ? *spec.title : spec.source.name);
  w.config.color = checked_color(spec.color);
  w.config.window_override = spec.window_override;
  check_group_by(spec.source, spec.group_by_override, model);
  w.config.group_by_override = spec.group_by_override;

  if (spec.x.has_value() != spec.y.has_value()) {
    throw Error(ErrorKind::kInvalid, "x and y must be given together");
  }
  if (spec.w < kMinWidgetSize || spec.w > kGridColumns ||
      spec.h < kMinWidgetSize) {
    throw Error(ErrorKind::kGeometry,
                "widget size must be 2..12 columns by at least 2 rows");
  }
  if (spec.x) {
    w.layout = {*spec.x, *spec.y, spec.w, spec.h};
    check_rect_shape(w.layout);
    check_free(d, w.layout, {});
  } else {
    auto rects = d.rects();
    auto [x, y] = auto_place(rects, spec.w, spec.h);
    w.layout = {x, y, spec.w, spec.h};
  }
  return w;
}

}  // namespace

std::span<const std::string_view> named_colors() noexcept { return kColors; }

bool is_named_color(std::string_view color) noexcept {
  return std::find(kColors.begin(), kColors.end(), color) != kColors.end();
}

const Widget* Dashboard::find_widget(std::string_view widget_id) const {
  for (const auto& w : widgets) {
    if (w.id == widget_id) return &w;
  }
  return nullptr;
}

std::vector<Rect> Dashboard::rects() const {
  std::vector<Rect> out;
  out.reserve(widgets.size());
  for (const auto& w : widgets) out.push_back(w.layout);
  return out;
}

std::string Dashboard::next_widget_id() const {
  long highest = 0;
  for (const auto& w : widgets) {
    if (w.id.size() < 2 || w.id[0] != 'w') continue;
    long n = 0;
    auto [ptr, ec] =
        std::from_chars(w.id.data() + 1, w.id.data() + w.id.size(), n);
    if (ec == std::errc() && ptr == w.id.data() + w.id.size()) {
      highest = std::max(highest, n);
    }
  }
  return "w" + std::to_string(highest + 1);
}

AutoConfig auto_configure(const SourceRef& source, const Model& model) {
  require_source(source, model);
  AutoConfig out;
  if (source.type == SourceRef::Type::kKpi) {
    const auto* k = model.find_kpi(source.name);
    if (k->window && !k->target) {
      out.kind = WidgetKind::kLine;
    } else if (k->target) {
      out.kind = WidgetKind::kGauge;
    } else {
      out.kind = WidgetKind::kStat;
    }
  } else {
    const Entity& e = *model.entity_of(source.name);
    bool has_time = e.time_axis().has_value();
    bool has_numeric = numeric_field(e).has_value();
    bool has_category = category_field(e).has_value();
    if (has_time && has_numeric) {
      out.kind = WidgetKind::kLine;
    } else if (has_category && has_numeric) {
      out.kind = WidgetKind::kBar;
    } else {
      out.kind = WidgetKind::kTable;
    }
  }
  out.bindings = default_bindings(source, out.kind, model);
  return out;
}

Bindings default_bindings(const SourceRef& source, WidgetKind kind,
                          const Model& model) {
  Bindings b;
  const Entity* e = source_entity(source, model);
  if (!e) return b;
  bool is_kpi = source.type == SourceRef::Type::kKpi;
  switch (kind) {
    case WidgetKind::kLine:
      b.time_field = time_field(*e);
      // A KPI line plots the KPI series itself.
      if (!is_kpi) b.value_field = numeric_field(*e);
      break;
    case WidgetKind::kBar:
      if (is_kpi) {
        const auto* k = model.find_kpi(source.name);
        b.category_field = k->group_by;
      } else {
        b.category_field = category_field(*e);
        b.value_field = numeric_field(*e);
      }
      break;
    case WidgetKind::kGauge:
    case WidgetKind::kStat:
      if (!is_kpi) {
        b.time_field = time_field(*e);
        b.value_field = numeric_field(*e);
      }
      break;
    case WidgetKind::kTable:
      b.time_field = time_field(*e);
      break;
  }
  return b;
}

std::pair<int, int> auto_place(std::span<const Rect> existing, int w, int h) {
  int floor = 0;
  for (const auto& r : existing) floor = std::max(floor, r.bottom());
  for (int y = 0; y < floor; ++y) {
    for (int x = 0; x + w <= kGridColumns; ++x) {
      Rect candidate{x, y, w, h};
      bool free = std::none_of(existing.begin(), existing.end(),
                               [&](const Rect& r) { return r.overlaps(candidate); });
      if (free) return {x, y};
    }
  }
  return {0, floor};
}

bool geometry_valid(std::span<const Rect> rects) {
  for (std::size_t i = 0; i < rects.size(); ++i) {
    if (!rects[i].fits_grid()) return false;
    for (std::size_t j = i + 1; j < rects.size(); ++j) {
      if (rects[i].overlaps(rects[j])) return false;
    }
  }
  return true;
}

std::string_view mutation_name(const Mutation& m) noexcept {
  static constexpr std::string_view kNames[] = {
      "add_widget",    "remove_widget",   "move",
      "resize",        "retitle",         "recolor",
      "rename_dashboard", "update_widget", "replace_dashboard"};
  return kNames[m.index()];
}

Dashboard apply_mutation(const Dashboard& current, const Mutation& mutation,
                         const Model& model) {
  Dashboard next = current;
  next.version = current.version + 1;

  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, AddWidget>) {
          next.widgets.push_back(build_widget(current, m.spec, model));
        } else if constexpr (std::is_same_v<T, RemoveWidget>) {
          widget_or_throw(next, m.widget_id);
          std::erase_if(next.widgets,
                        [&](const Widget& w) { return w.id == m.widget_id; });
        } else if constexpr (std::is_same_v<T, MoveWidget>) {
          Widget& w = widget_or_throw(next, m.widget_id);
          Rect r{m.x, m.y, w.layout.w, w.layout.h};
          check_rect_shape(r);
          check_free(next, r, w.id);
          w.layout = r;
        } else if constexpr (std::is_same_v<T, ResizeWidget>) {
          Widget& w = widget_or_throw(next, m.widget_id);
          Rect r{w.layout.x, w.layout.y, m.w, m.h};
          check_rect_shape(r);
          check_free(next, r, w.id);
          w.layout = r;
        } else if constexpr (std::is_same_v<T, RetitleWidget>) {
          widget_or_throw(next, m.widget_id).config.title = checked_title(m.title);
        } else if constexpr (std::is_same_v<T, RecolorWidget>) {
          widget_or_throw(next, m.widget_id).config.color = checked_color(m.color);
        } else if constexpr (std::is_same_v<T, RenameDashboard>) {
          auto name = m.name;
          if (name.find_first_not_of(" \t") == std::string::npos) {
            throw Error(ErrorKind::kInvalid, "dashboard name must not be empty");
          }
          next.name = name;
        } else if constexpr (std::is_same_v<T, UpdateWidget>) {
          Widget& w = widget_or_throw(next, m.widget_id);
          Rect r{m.x.value_or(w.layout.x), m.y.value_or(w.layout.y),
                 m.w.value_or(w.layout.w), m.h.value_or(w.layout.h)};
          if (r != w.layout) {
            check_rect_shape(r);
            check_free(next, r, w.id);
            w.layout = r;
          }
          if (m.kind) w.kind = *m.kind;
          if (m.title) w.config.title = checked_title(*m.title);
          if (m.color) w.config.color = checked_color(m.color);
          if (m.window_override) w.config.window_override = m.window_override;
          if (m.group_by_override) {
            check_group_by(w.source, m.group_by_override, model);
            w.config.group_by_override = m.group_by_override;
          }
        } else if constexpr (std::is_same_v<T, ReplaceDashboard>) {
          if (m.name.find_first_not_of(" \t") == std::string::npos) {
            throw Error(ErrorKind::kInvalid, "dashboard name must not be empty");
          }
          std::set<std::string> ids;
          for (const auto& w : m.widgets) {
            if (w.id.empty() || !ids.insert(w.id).second) {
              throw Error(ErrorKind::kInvalid,
                          "widget ids must be present and unique");
            }
            require_source(w.source, model);
            checked_title(w.config.title);
            checked_color(w.config.color);
            check_group_by(w.source, w.config.group_by_override, model);
            check_rect_shape(w.layout);
          }
          std::vector<Rect> rects;
          for (const auto& w : m.widgets) rects.push_back(w.layout);
          if (!geometry_valid(rects)) {
            throw Error(ErrorKind::kGeometry, "widgets overlap");
          }
          next.name = m.name;
          next.widgets = m.widgets;
        }
      },
      mutation);
  return next;
}

// --- JSON ------------------------------------------------------------------

nlohmann::ordered_json to_json(const Widget& w) {
  nlohmann::ordered_json config;
  config["title"] = w.config.title;
  if (w.config.color) config["color"] = *w.config.color;
  if (w.config.window_override) {
    config["window_override"] = w.config.window_override->to_string();
  }
  if (w.config.group_by_override) {
    config["group_by_override"] = *w.config.group_by_override;
  }
  nlohmann::ordered_json j;
  j["id"] = w.id;
  j["kind"] = to_string(w.kind);
  j["source"] = w.source.to_string();
  j["layout"] = {{"x", w.layout.x},
                 {"y", w.layout.y},
                 {"w", w.layout.w},
                 {"h", w.layout.h}};
  j["config"] = std::move(config);
  return j;
}

nlohmann::ordered_json to_json(const Dashboard& d) {
  nlohmann::ordered_json j;
  j["id"] = d.id;
  j["name"] = d.name;
  j["version"] = d.version;
  j["widgets"] = nlohmann::ordered_json::array();
  for (const auto& w : d.widgets) j["widgets"].push_back(to_json(w));
  return j;
}

namespace {

[[noreturn]] void bad_document(const std::string& what) {
  throw Error(ErrorKind::kInvalid, what);
}

const nlohmann::json& member(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) bad_document(std::string("missing '") + key + "'");
  return *it;
}

std::string string_member(const nlohmann::json& j, const char* key) {
  const auto& v = member(j, key);
  if (!v.is_string()) bad_document(std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

int int_member(const nlohmann::json& j, const char* key) {
  const auto& v = member(j, key);
  if (!v.is_number_integer()) {
    bad_document(std::string("'") + key + "' must be an integer");
  }
  auto n = v.get<long long>();
  if (n < -1'000'000 || n > 1'000'000) {
    bad_document(std::string("'") + key + "' is out of range");
  }
  return static_cast<int>(n);
}

std::optional<int> optional_int(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return int_member(j, key);
}

std::optional<std::string> optional_string(const nlohmann::json& j,
                                           const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return string_member(j, key);
}

std::optional<dsl::Duration> optional_duration(const nlohmann::json& j,
                                               const char* key) {
  auto text = optional_string(j, key);
  if (!text) return std::nullopt;
  auto d = dsl::Duration::parse(*text);
  if (!d) bad_document("'" + std::string(key) + "' is not a duration like 7d");
  return d;
}

SourceRef source_member(const nlohmann::json& j) {
  auto text = string_member(j, "source");
  auto ref = SourceRef::parse(text);
  if (!ref) bad_document("source must look like 'kpi:<name>' or 'datasource:<name>'");
  return *ref;
}

WidgetKind kind_from(const std::string& text) {
  auto kind = parse_widget_kind(text);
  if (!kind) bad_document("unknown widget kind '" + text + "'");
  return *kind;
}

}  // namespace

Widget widget_from_json(const nlohmann::json& j) {
  if (!j.is_object()) bad_document("widget must be an object");
  Widget w;
  w.id = string_member(j, "id");
  w.kind = kind_from(string_member(j, "kind"));
  w.source = source_member(j);
  const auto& layout = member(j, "layout");
  if (!layout.is_object()) bad_document("layout must be an object");
  w.layout = {int_member(layout, "x"), int_member(layout, "y"),
              int_member(layout, "w"), int_member(layout, "h")};
  const auto& config = member(j, "config");
  if (!config.is_object()) bad_document("config must be an object");
  w.config.title = string_member(config, "title");
  w.config.color = optional_string(config, "color");
  w.config.window_override = optional_duration(config, "window_override");
  w.config.group_by_override = optional_string(config, "group_by_override");
  return w;
}

Dashboard dashboard_from_json(const nlohmann::json& j) {
  if (!j.is_object()) bad_document("dashboard must be an object");
  Dashboard d;
  d.id = string_member(j, "id");
  d.name = string_member(j, "name");
  d.version = int_member(j, "version");
  if (d.version < 1) bad_document("version must be positive");
  const auto& widgets = member(j, "widgets");
  if (!widgets.is_array()) bad_document("widgets must be an array");
  for (const auto& w : widgets) d.widgets.push_back(widget_from_json(w));
  return d;
}

WidgetSpec widget_spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) bad_document("widget spec must be an object");
  WidgetSpec spec;
  spec.source = source_member(j);
  if (auto kind = optional_string(j, "kind")) spec.kind = kind_from(*kind);
  spec.x = optional_int(j, "x");
  spec.y = optional_int(j, "y");
  if (auto w = optional_int(j, "w")) spec.w = *w;
  if (auto h = optional_int(j, "h")) spec.h = *h;
  const nlohmann::json* config = &j;
  if (j.contains("config") && j["config"].is_object()) config = &j["config"];
  spec.title = optional_string(*config, "title");
  spec.color = optional_string(*config, "color");
  spec.window_override = optional_duration(*config, "window_override");
  spec.group_by_override = optional_string(*config, "group_by_override");
  return spec;
}

}  // namespace climadash::dashboard

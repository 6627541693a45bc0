// Copyright 2026 The ClimaDash Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "climadash/dashboard/dashboard.hpp"
#include "climadash/dsl/model.hpp"

namespace climadash::agent {

enum class Intent {
  kAddWidget,
  kRemoveWidget,
  kMove,
  kResize,
  kRetitle,
  kRecolor,
  kShowValue,
};

std::string_view to_string(Intent intent) noexcept;

// A widget named by 1-based position on the dashboard or by its title.
struct WidgetRef {
  std::optional<int> index;
  std::optional<std::string> title;

  bool operator==(const WidgetRef&) const = default;
};

struct AgentCommand {
  Intent intent = Intent::kAddWidget;
  std::optional<dashboard::WidgetKind> kind;
  std::optional<dashboard::SourceRef> source;
  std::optional<dsl::Duration> window;
  std::optional<std::string> group_by;
  std::optional<WidgetRef> widget_ref;
  std::optional<int> x, y, w, h;
  std::optional<std::string> title;
  std::optional<std::string> color;

  bool operator==(const AgentCommand&) const = default;

  // Only present slots are emitted, e.g.
  // {"intent":"remove_widget","widget_ref":{"index":3}}.
  nlohmann::ordered_json to_json() const;
  static AgentCommand from_json(const nlohmann::json& j);
};

struct NoMatch {
  std::string reason;
  std::vector<std::string> suggestions;

  nlohmann::ordered_json to_json() const;
};

using ParseOutcome = std::variant<AgentCommand, NoMatch>;

// What the grammar may refer to: model sources, categorical field names for
// "grouped by", and the titles of widgets on the current dashboard.
struct GrammarContext {
  std::vector<dashboard::SourceRef> sources;
  std::vector<std::string> group_fields;
  std::vector<std::string> widget_titles;

  static GrammarContext from_model(const dsl::Model& model,
                                   std::vector<std::string> widget_titles = {});
};

// Deterministic keyword grammar. Pipeline: lowercase, split on
// non-alphanumerics, pick the intent from the first intent keyword, then fill
// slots (widget kind synonyms, source phrase with '_' == ' ', "last N days",
// "grouped by X", "widget N" or a quoted/known title, coordinates, sizes,
// colors). Anything that does not fit comes back as NoMatch, never an error.
ParseOutcome parse_utterance(std::string_view text, const GrammarContext& context);

}  // namespace climadash::agent

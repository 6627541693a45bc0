// Copyright 2026 The ClimaDash Authors
// SPDX-License-Identifier: Apache-2.0

#include "climadash/agent/grammar.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <set>

#include "climadash/error.hpp"

namespace climadash::agent {

using dashboard::SourceRef;
using dashboard::WidgetKind;

std::string_view to_string(Intent intent) noexcept {
  switch (intent) {
    case Intent::kAddWidget:
      return "add_widget";
    case Intent::kRemoveWidget:
      return "remove_widget";
    case Intent::kMove:
      return "move";
    case Intent::kResize:
      return "resize";
    case Intent::kRetitle:
      return "retitle";
    case Intent::kRecolor:
      return "recolor";
    case Intent::kShowValue:
      return "show_value";
  }
  return "add_widget";
}

namespace {

std::optional<Intent> parse_intent(std::string_view s) {
  for (auto i : {Intent::kAddWidget, Intent::kRemoveWidget, Intent::kMove,
                 Intent::kResize, Intent::kRetitle, Intent::kRecolor,
                 Intent::kShowValue}) {
    if (to_string(i) == s) return i;
  }
  return std::nullopt;
}

struct Token {
  std::string text;  // lowercase
  std::size_t begin = 0;
  std::size_t end = 0;
  bool used = false;
};

struct Quote {
  std::string text;  // original case, without the quotes
  bool used = false;
};

bool is_alnum(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

char lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

std::vector<std::string> words_of(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (is_alnum(static_cast<unsigned char>(c))) {
      cur.push_back(lower(c));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

bool is_number(std::string_view s) {
  return !s.empty() && s.size() <= 4 &&
         std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

int to_int(std::string_view s) {
  int v = 0;
  std::from_chars(s.data(), s.data() + s.size(), v);
  return v;
}

template <std::size_t N>
bool one_of(std::string_view s, const std::array<std::string_view, N>& set) {
  return std::find(set.begin(), set.end(), s) != set.end();
}

constexpr std::array<std::string_view, 10> kOrdinals = {
    "first", "second", "third",   "fourth", "fifth",
    "sixth", "seventh", "eighth", "ninth",  "tenth"};

class Utterance {
 public:
  explicit Utterance(std::string_view text) : raw_(text) {
    std::size_t i = 0;
    while (i < text.size()) {
      if (text[i] == '"') {
        auto close = text.find('"', i + 1);
        if (close != std::string_view::npos) {
          quotes.push_back({std::string(text.substr(i + 1, close - i - 1)), false});
          i = close + 1;
          continue;
        }
        ++i;
        continue;
      }
      if (is_alnum(static_cast<unsigned char>(text[i]))) {
        Token t;
        t.begin = i;
        while (i < text.size() && is_alnum(static_cast<unsigned char>(text[i]))) {
          t.text.push_back(lower(text[i]));
          ++i;
        }
        t.end = i;
        tokens.push_back(std::move(t));
        continue;
      }
      ++i;
    }
  }

  bool has(std::string_view word) const {
    return std::any_of(tokens.begin(), tokens.end(),
                       [&](const Token& t) { return !t.used && t.text == word; });
  }

  // Index of the first unused occurrence of `seq` as consecutive tokens.
  std::vector<std::size_t> occurrences(const std::vector<std::string>& seq) const {
    std::vector<std::size_t> out;
    if (seq.empty() || seq.size() > tokens.size()) return out;
    for (std::size_t i = 0; i + seq.size() <= tokens.size(); ++i) {
      bool ok = true;
      for (std::size_t j = 0; j < seq.size() && ok; ++j) {
        ok = !tokens[i + j].used && tokens[i + j].text == seq[j];
      }
      if (ok) out.push_back(i);
    }
    return out;
  }

  void use(std::size_t from, std::size_t count) {
    for (std::size_t i = from; i < from + count && i < tokens.size(); ++i) {
      tokens[i].used = true;
    }
  }

  std::string_view raw() const { return raw_; }

  std::vector<Token> tokens;
  std::vector<Quote> quotes;

 private:
  std::string_view raw_;
};

std::optional<WidgetKind> kind_word(std::string_view w) {
  if (w == "line" || w == "trend" || w == "lines") return WidgetKind::kLine;
  if (w == "bar" || w == "bars") return WidgetKind::kBar;
  if (w == "gauge" || w == "dial") return WidgetKind::kGauge;
  if (w == "number" || w == "stat" || w == "statistic") return WidgetKind::kStat;
  if (w == "table") return WidgetKind::kTable;
  return std::nullopt;
}

std::optional<WidgetKind> take_kind(Utterance& u) {
  for (std::size_t i = 0; i < u.tokens.size(); ++i) {
    auto& t = u.tokens[i];
    if (t.used) continue;
    // "widget number 3" names a position, not a stat widget.
    if (t.text == "number" && i > 0 && u.tokens[i - 1].text == "widget") continue;
    if (auto k = kind_word(t.text)) {
      t.used = true;
      if (i + 1 < u.tokens.size() &&
          (u.tokens[i + 1].text == "chart" || u.tokens[i + 1].text == "graph")) {
        u.tokens[i + 1].used = true;
      }
      return k;
    }
  }
  return std::nullopt;
}

bool mentions_kind(const Utterance& u, std::size_t from) {
  for (std::size_t i = from; i < u.tokens.size(); ++i) {
    if (!u.tokens[i].used && kind_word(u.tokens[i].text)) return true;
  }
  return false;
}

std::optional<std::string> color_word(std::string_view w) {
  if (w == "grey") return std::string("gray");
  if (dashboard::is_named_color(w)) return std::string(w);
  return std::nullopt;
}

struct SourceMatch {
  SourceRef ref;
  std::size_t start = 0;
  std::size_t length = 0;
};

enum class Candidate {
  kAdd,
  kShowOrAdd,
  kShowValue,
  kRemove,
  kMove,
  kResize,
  kRetitle,
  kRecolor,
};

std::optional<Candidate> detect_intent(const Utterance& u) {
  static constexpr std::array<std::string_view, 5> kAdd = {"add", "create", "insert",
                                                           "plot", "draw"};
  static constexpr std::array<std::string_view, 2> kShow = {"show", "display"};
  static constexpr std::array<std::string_view, 3> kAsk = {"what", "whats", "tell"};
  static constexpr std::array<std::string_view, 3> kRemove = {"remove", "delete", "drop"};
  static constexpr std::array<std::string_view, 2> kRename = {"rename", "retitle"};
  static constexpr std::array<std::string_view, 5> kColor = {"recolor", "recolour", "paint",
                                                             "color", "colour"};
  static constexpr std::array<std::string_view, 3> kModify = {"set", "change", "make"};

  for (std::size_t i = 0; i < u.tokens.size(); ++i) {
    const auto& t = u.tokens[i].text;
    if (one_of(t, kAdd)) return Candidate::kAdd;
    if (one_of(t, kShow)) return Candidate::kShowOrAdd;
    if (one_of(t, kAsk)) return Candidate::kShowValue;
    if (one_of(t, kRemove)) return Candidate::kRemove;
    if (t == "move") return Candidate::kMove;
    if (t == "resize") return Candidate::kResize;
    if (one_of(t, kRename)) return Candidate::kRetitle;
    if (one_of(t, kColor)) return Candidate::kRecolor;
    if (one_of(t, kModify)) {
      for (std::size_t j = i + 1; j < u.tokens.size(); ++j) {
        const auto& r = u.tokens[j].text;
        if (r == "color" || r == "colour" || color_word(r)) return Candidate::kRecolor;
        if (r == "title" || r == "name") return Candidate::kRetitle;
        if (r == "size" || r == "width" || r == "height" || r == "wide" || r == "tall") {
          return Candidate::kResize;
        }
        if (r == "position" || r == "row" || r == "column") return Candidate::kMove;
      }
      if (t == "make" && mentions_kind(u, i + 1)) return Candidate::kAdd;
    }
  }
  return std::nullopt;
}

std::vector<SourceMatch> match_sources(const Utterance& u, const GrammarContext& ctx) {
  std::vector<SourceMatch> all;
  for (const auto& ref : ctx.sources) {
    auto seq = words_of(ref.name);
    for (auto start : u.occurrences(seq)) all.push_back({ref, start, seq.size()});
  }
  // Drop matches strictly inside a longer one ("air quality" inside
  // "air quality hourly").
  std::vector<SourceMatch> kept;
  for (const auto& m : all) {
    bool inside = std::any_of(all.begin(), all.end(), [&](const SourceMatch& o) {
      return o.length > m.length && o.start <= m.start &&
             m.start + m.length <= o.start + o.length;
    });
    if (!inside) kept.push_back(m);
  }
  return kept;
}

std::vector<std::string> source_names(const std::vector<SourceMatch>& matches) {
  std::set<std::string> names;
  for (const auto& m : matches) names.insert(m.ref.to_string());
  return {names.begin(), names.end()};
}

// Resolves the source slot. Returns NoMatch on none or ambiguity.
std::variant<SourceRef, NoMatch> take_source(Utterance& u, const GrammarContext& ctx) {
  auto matches = match_sources(u, ctx);
  if (matches.empty()) {
    NoMatch nm{"no known data source or KPI mentioned", {}};
    for (const auto& s : ctx.sources) nm.suggestions.push_back(s.to_string());
    return nm;
  }
  auto names = source_names(matches);
  if (names.size() > 1) {
    // "kpi" or "data" in the utterance may settle a kpi/datasource clash.
    auto only = [&](SourceRef::Type type) -> std::optional<SourceMatch> {
      std::optional<SourceMatch> found;
      for (const auto& m : matches) {
        if (m.ref.type != type) continue;
        if (found && found->ref != m.ref) return std::nullopt;
        found = m;
      }
      return found;
    };
    std::optional<SourceMatch> pick;
    if (u.has("kpi")) pick = only(SourceRef::Type::kKpi);
    if (!pick && (u.has("datasource") || u.has("data"))) {
      pick = only(SourceRef::Type::kDatasource);
    }
    if (!pick) return NoMatch{"ambiguous source", names};
    matches = {*pick};
  }
  for (const auto& m : matches) u.use(m.start, m.length);
  return matches.front().ref;
}

std::optional<dsl::Duration> take_window(Utterance& u) {
  auto& tk = u.tokens;
  for (std::size_t i = 0; i < tk.size(); ++i) {
    if (tk[i].used || (tk[i].text != "last" && tk[i].text != "past")) continue;
    std::size_t j = i + 1;
    std::int64_t magnitude = 1;
    std::optional<dsl::DurationUnit> unit;
    if (j < tk.size() && is_number(tk[j].text)) {
      magnitude = to_int(tk[j].text);
      ++j;
    } else if (j < tk.size() && tk[j].text.size() > 1 && is_number(tk[j].text.substr(0, tk[j].text.size() - 1))) {
      // "last 24h"
      auto d = dsl::Duration::parse(tk[j].text);
      if (d) {
        u.use(i, j - i + 1);
        return d;
      }
    }
    if (j >= tk.size()) continue;
    const auto& w = tk[j].text;
    if (w == "minute" || w == "minutes" || w == "min" || w == "mins") {
      unit = dsl::DurationUnit::kMinute;
    } else if (w == "hour" || w == "hours") {
      unit = dsl::DurationUnit::kHour;
    } else if (w == "day" || w == "days") {
      unit = dsl::DurationUnit::kDay;
    } else if (w == "week" || w == "weeks") {
      unit = dsl::DurationUnit::kWeek;
    }
    if (!unit || magnitude < 1) continue;
    u.use(i, j - i + 1);
    return dsl::Duration{magnitude, *unit};
  }
  return std::nullopt;
}

std::optional<std::string> take_group_by(Utterance& u, const GrammarContext& ctx) {
  auto& tk = u.tokens;
  for (std::size_t i = 0; i < tk.size(); ++i) {
    if (tk[i].used) continue;
    std::size_t after = 0;
    if ((tk[i].text == "grouped" || tk[i].text == "group" || tk[i].text == "broken") &&
        i + 1 < tk.size()) {
      std::size_t j = i + 1;
      if (tk[i].text == "broken" && j < tk.size() && tk[j].text == "down") ++j;
      if (j < tk.size() && tk[j].text == "by") after = j + 1;
    } else if (tk[i].text == "per" || tk[i].text == "by") {
      after = i + 1;
    }
    if (after == 0 || after >= tk.size()) continue;
    // Longest categorical field whose words follow.
    std::optional<std::string> best;
    std::size_t best_len = 0;
    for (const auto& f : ctx.group_fields) {
      auto seq = words_of(f);
      if (seq.size() <= best_len || after + seq.size() > tk.size()) continue;
      bool ok = true;
      for (std::size_t k = 0; k < seq.size() && ok; ++k) {
        ok = !tk[after + k].used && tk[after + k].text == seq[k];
      }
      if (ok) {
        best = f;
        best_len = seq.size();
      }
    }
    if (best) {
      u.use(i, after - i + best_len);
      return best;
    }
    // Explicit "grouped by" with an unknown word still fills the slot.
    if (tk[i].text != "per" && tk[i].text != "by" && !tk[after].used) {
      u.use(i, after - i + 1);
      return tk[after].text;
    }
  }
  return std::nullopt;
}

std::optional<WidgetRef> take_widget_ref(Utterance& u, const GrammarContext& ctx,
                                         bool quote_may_be_new_title) {
  auto& tk = u.tokens;
  // "widget 3", "widget #3", "widget number 3", "the second widget"
  for (std::size_t i = 0; i < tk.size(); ++i) {
    if (tk[i].used) continue;
    if (tk[i].text == "widget") {
      std::size_t j = i + 1;
      if (j < tk.size() && (tk[j].text == "number" || tk[j].text == "no")) ++j;
      if (j < tk.size() && is_number(tk[j].text)) {
        u.use(i, j - i + 1);
        return WidgetRef{to_int(tk[j].text), std::nullopt};
      }
    }
    auto ord = std::find(kOrdinals.begin(), kOrdinals.end(), tk[i].text);
    if (ord != kOrdinals.end() && i + 1 < tk.size() && tk[i + 1].text == "widget") {
      u.use(i, 2);
      return WidgetRef{static_cast<int>(ord - kOrdinals.begin()) + 1, std::nullopt};
    }
  }
  // A quoted known title.
  auto same = [](std::string_view a, std::string_view b) {
    return a.size() == b.size() &&
           std::equal(a.begin(), a.end(), b.begin(),
                      [](char x, char y) { return lower(x) == lower(y); });
  };
  for (auto& q : u.quotes) {
    if (q.used) continue;
    for (const auto& title : ctx.widget_titles) {
      if (same(q.text, title)) {
        q.used = true;
        return WidgetRef{std::nullopt, title};
      }
    }
  }
  // Known title spelled out in the text; the longest wins.
  std::optional<std::string> best;
  std::size_t best_len = 0, best_start = 0;
  for (const auto& title : ctx.widget_titles) {
    auto seq = words_of(title);
    if (seq.size() <= best_len) continue;
    auto occ = u.occurrences(seq);
    if (!occ.empty()) {
      best = title;
      best_len = seq.size();
      best_start = occ.front();
    }
  }
  if (best) {
    u.use(best_start, best_len);
    return WidgetRef{std::nullopt, best};
  }
  // Unknown quoted title: the first quote names the widget unless it is the
  // only quote and may be the new title instead.
  std::size_t unused = 0;
  for (const auto& q : u.quotes) unused += q.used ? 0 : 1;
  if (unused >= (quote_may_be_new_title ? 2u : 1u)) {
    for (auto& q : u.quotes) {
      if (!q.used) {
        q.used = true;
        return WidgetRef{std::nullopt, q.text};
      }
    }
  }
  return std::nullopt;
}

NoMatch missing_widget(const GrammarContext& ctx) {
  NoMatch nm{"which widget? say \"widget N\" or use its title", {}};
  for (const auto& t : ctx.widget_titles) nm.suggestions.push_back(t);
  return nm;
}

// Labeled or positional pair of numbers after the widget reference, e.g.
// "to 6 0", "to column 6 row 4", "8x4", "width 8 height 4", "8 wide".
void take_pair(Utterance& u, std::initializer_list<std::string_view> first_labels,
               std::initializer_list<std::string_view> second_labels,
               std::initializer_list<std::string_view> first_suffix,
               std::initializer_list<std::string_view> second_suffix,
               std::optional<int>& first, std::optional<int>& second,
               bool allow_cross) {
  auto in = [](std::string_view w, std::initializer_list<std::string_view> set) {
    return std::find(set.begin(), set.end(), w) != set.end();
  };
  auto& tk = u.tokens;
  std::vector<int> loose;
  for (std::size_t i = 0; i < tk.size(); ++i) {
    if (tk[i].used) continue;
    const auto& w = tk[i].text;
    if (allow_cross) {
      auto x = w.find('x');
      if (x != std::string::npos && x > 0 && is_number(w.substr(0, x)) &&
          is_number(w.substr(x + 1))) {
        first = to_int(w.substr(0, x));
        second = to_int(w.substr(x + 1));
        tk[i].used = true;
        continue;
      }
    }
    if (i + 1 < tk.size() && is_number(tk[i + 1].text) && !tk[i + 1].used) {
      if (in(w, first_labels)) {
        first = to_int(tk[i + 1].text);
        u.use(i, 2);
        continue;
      }
      if (in(w, second_labels)) {
        second = to_int(tk[i + 1].text);
        u.use(i, 2);
        continue;
      }
    }
    if (is_number(w)) {
      if (i + 1 < tk.size() && in(tk[i + 1].text, first_suffix)) {
        first = to_int(w);
        u.use(i, 2);
        continue;
      }
      if (i + 1 < tk.size() && in(tk[i + 1].text, second_suffix)) {
        second = to_int(w);
        u.use(i, 2);
        continue;
      }
      loose.push_back(to_int(w));
      tk[i].used = true;
    }
  }
  std::size_t k = 0;
  if (!first && k < loose.size()) first = loose[k++];
  if (!second && k < loose.size()) second = loose[k++];
}

std::string trim_title(std::string_view s) {
  const std::string_view ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  s = s.substr(b, e - b + 1);
  while (!s.empty() && (s.back() == '.' || s.back() == '!' || s.back() == '?')) {
    s.remove_suffix(1);
  }
  while (!s.empty() && (s.back() == ' ')) s.remove_suffix(1);
  return std::string(s);
}

std::vector<std::string> example_commands() {
  return {"add a line chart of <source> for the last 7 days",
          "remove widget 2",
          "move widget 1 to 6 0",
          "resize widget 1 to 8 by 4",
          "rename widget 1 to \"New title\"",
          "set the color of widget 1 to blue",
          "what is <kpi>"};
}

}  // namespace

GrammarContext GrammarContext::from_model(const dsl::Model& model,
                                          std::vector<std::string> widget_titles) {
  GrammarContext ctx;
  for (const auto& d : model.datasources) ctx.sources.push_back(SourceRef::datasource(d.name));
  for (const auto& k : model.kpis) ctx.sources.push_back(SourceRef::kpi(k.name));
  std::set<std::string> fields;
  for (const auto& e : model.entities) {
    for (const auto& f : e.fields) {
      if (f.type.is_categorical()) fields.insert(f.name);
    }
  }
  ctx.group_fields.assign(fields.begin(), fields.end());
  ctx.widget_titles = std::move(widget_titles);
  return ctx;
}

ParseOutcome parse_utterance(std::string_view text, const GrammarContext& ctx) {
  Utterance u(text);
  if (u.tokens.empty() && u.quotes.empty()) {
    return NoMatch{"empty utterance", example_commands()};
  }
  auto candidate = detect_intent(u);
  if (!candidate) return NoMatch{"no command keyword recognized", example_commands()};

  AgentCommand cmd;
  switch (*candidate) {
    case Candidate::kAdd:
    case Candidate::kShowOrAdd:
    case Candidate::kShowValue: {
      auto source = take_source(u, ctx);
      if (auto* nm = std::get_if<NoMatch>(&source)) return *nm;
      cmd.source = std::get<SourceRef>(source);
      cmd.window = take_window(u);
      bool add = *candidate == Candidate::kAdd ||
                 (*candidate == Candidate::kShowOrAdd && mentions_kind(u, 0));
      if (!add) {
        cmd.intent = Intent::kShowValue;
        if (cmd.source->type != SourceRef::Type::kKpi) {
          NoMatch nm{"only KPIs have a single value to show", {}};
          for (const auto& s : ctx.sources) {
            if (s.type == SourceRef::Type::kKpi) nm.suggestions.push_back(s.to_string());
          }
          return nm;
        }
        return cmd;
      }
      cmd.intent = Intent::kAddWidget;
      cmd.group_by = take_group_by(u, ctx);
      cmd.kind = take_kind(u);
      if (!cmd.kind) {
        return NoMatch{"missing widget kind",
                       {"line chart", "bar chart", "gauge", "stat", "table"}};
      }
      for (auto& q : u.quotes) {
        if (!q.used) {
          cmd.title = q.text;
          q.used = true;
          break;
        }
      }
      for (auto& t : u.tokens) {
        if (t.used) continue;
        if (auto c = color_word(t.text)) {
          cmd.color = c;
          t.used = true;
          break;
        }
      }
      return cmd;
    }
    case Candidate::kRemove:
      cmd.intent = Intent::kRemoveWidget;
      cmd.widget_ref = take_widget_ref(u, ctx, false);
      if (!cmd.widget_ref) return missing_widget(ctx);
      return cmd;
    case Candidate::kMove:
      cmd.intent = Intent::kMove;
      cmd.widget_ref = take_widget_ref(u, ctx, false);
      if (!cmd.widget_ref) return missing_widget(ctx);
      take_pair(u, {"x", "column", "col"}, {"y", "row"}, {}, {}, cmd.x, cmd.y, false);
      if (!cmd.x && !cmd.y) {
        return NoMatch{"missing target position", {"move widget 1 to 6 0"}};
      }
      return cmd;
    case Candidate::kResize:
      cmd.intent = Intent::kResize;
      cmd.widget_ref = take_widget_ref(u, ctx, false);
      if (!cmd.widget_ref) return missing_widget(ctx);
      take_pair(u, {"width", "w"}, {"height", "h"}, {"wide", "columns", "cols"},
                {"tall", "high", "rows"}, cmd.w, cmd.h, true);
      if (!cmd.w || !cmd.h) {
        return NoMatch{"missing target size", {"resize widget 1 to 8 by 4"}};
      }
      return cmd;
    case Candidate::kRetitle: {
      cmd.intent = Intent::kRetitle;
      cmd.widget_ref = take_widget_ref(u, ctx, true);
      if (!cmd.widget_ref) return missing_widget(ctx);
      for (auto& q : u.quotes) {
        if (!q.used) {
          cmd.title = q.text;
          q.used = true;
          break;
        }
      }
      if (!cmd.title) {
        // Everything after the last unused "to"/"as", in original case.
        for (auto it = u.tokens.rbegin(); it != u.tokens.rend(); ++it) {
          if (!it->used && (it->text == "to" || it->text == "as")) {
            auto title = trim_title(u.raw().substr(it->end));
            if (!title.empty()) cmd.title = title;
            break;
          }
        }
      }
      if (!cmd.title) {
        return NoMatch{"missing new title", {"rename widget 1 to \"New title\""}};
      }
      return cmd;
    }
    case Candidate::kRecolor:
      cmd.intent = Intent::kRecolor;
      cmd.widget_ref = take_widget_ref(u, ctx, false);
      if (!cmd.widget_ref) return missing_widget(ctx);
      for (auto& t : u.tokens) {
        if (t.used) continue;
        if (auto c = color_word(t.text)) {
          cmd.color = c;
          t.used = true;
          break;
        }
      }
      if (!cmd.color) {
        NoMatch nm{"missing color", {}};
        for (auto c : dashboard::named_colors()) nm.suggestions.emplace_back(c);
        return nm;
      }
      return cmd;
  }
  return NoMatch{"no command keyword recognized", example_commands()};
}

nlohmann::ordered_json AgentCommand::to_json() const {
  nlohmann::ordered_json j;
  j["intent"] = to_string(intent);
  if (kind) j["kind"] = dashboard::to_string(*kind);
  if (source) j["source"] = source->to_string();
  if (window) j["window"] = window->to_string();
  if (group_by) j["group_by"] = *group_by;
  if (widget_ref) {
    nlohmann::ordered_json r;
    if (widget_ref->index) r["index"] = *widget_ref->index;
    if (widget_ref->title) r["title"] = *widget_ref->title;
    j["widget_ref"] = std::move(r);
  }
  if (x) j["x"] = *x;
  if (y) j["y"] = *y;
  if (w) j["w"] = *w;
  if (h) j["h"] = *h;
  if (title) j["title"] = *title;
  if (color) j["color"] = *color;
  return j;
}

AgentCommand AgentCommand::from_json(const nlohmann::json& j) {
  auto bad = [](const std::string& what) { throw Error(ErrorKind::kInvalid, what); };
  if (!j.is_object() || !j.contains("intent") || !j["intent"].is_string()) {
    bad("command needs an 'intent'");
  }
  AgentCommand c;
  auto intent = parse_intent(j["intent"].get<std::string>());
  if (!intent) bad("unknown intent");
  c.intent = *intent;
  auto str = [&](const char* key) -> std::optional<std::string> {
    if (!j.contains(key)) return std::nullopt;
    if (!j[key].is_string()) bad(std::string(key) + " must be a string");
    return j[key].get<std::string>();
  };
  auto num = [&](const char* key) -> std::optional<int> {
    if (!j.contains(key)) return std::nullopt;
    if (!j[key].is_number_integer()) bad(std::string(key) + " must be an integer");
    return j[key].get<int>();
  };
  if (auto k = str("kind")) {
    c.kind = dashboard::parse_widget_kind(*k);
    if (!c.kind) bad("unknown kind");
  }
  if (auto s = str("source")) {
    c.source = SourceRef::parse(*s);
    if (!c.source) bad("bad source");
  }
  if (auto w = str("window")) {
    c.window = dsl::Duration::parse(*w);
    if (!c.window) bad("bad window");
  }
  c.group_by = str("group_by");
  if (j.contains("widget_ref")) {
    const auto& r = j["widget_ref"];
    if (!r.is_object()) bad("widget_ref must be an object");
    WidgetRef ref;
    if (r.contains("index")) ref.index = r["index"].get<int>();
    if (r.contains("title")) ref.title = r["title"].get<std::string>();
    c.widget_ref = ref;
  }
  c.x = num("x");
  c.y = num("y");
  c.w = num("w");
  c.h = num("h");
  c.title = str("title");
  c.color = str("color");
  return c;
}

nlohmann::ordered_json NoMatch::to_json() const {
  return {{"no_match", true}, {"reason", reason}, {"suggestions", suggestions}};
}

}  // namespace climadash::agent

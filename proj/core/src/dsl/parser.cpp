// Copyright 2026 The ClimaDash Authors
// SPDX-License-Identifier: Apache-2.0

#include "climadash/dsl/parser.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "climadash/error.hpp"

namespace climadash::dsl {

namespace {

enum class Tok {
  kIdent,
  kNumber,
  kDuration,
  kString,
  kLBrace,
  kRBrace,
  kLParen,
  kRParen,
  kColon,
  kComma,
  kSemicolon,
  kPlus,
  kMinus,
  kStar,
  kSlash,
  kCmp,
  kEnd,
};

struct Token {
  Tok kind = Tok::kEnd;
  std::string text;  // identifier, number/duration text, decoded string, cmp
  double number = 0.0;
  SourceLoc loc;
};

std::string_view describe(Tok kind) {
  switch (kind) {
    case Tok::kIdent:
      return "identifier";
    case Tok::kNumber:
      return "number";
    case Tok::kDuration:
      return "duration";
    case Tok::kString:
      return "string";
    case Tok::kLBrace:
      return "'{'";
    case Tok::kRBrace:
      return "'}'";
    case Tok::kLParen:
      return "'('";
    case Tok::kRParen:
      return "')'";
    case Tok::kColon:
      return "':'";
    case Tok::kComma:
      return "','";
    case Tok::kSemicolon:
      return "';'";
    case Tok::kPlus:
      return "'+'";
    case Tok::kMinus:
      return "'-'";
    case Tok::kStar:
      return "'*'";
    case Tok::kSlash:
      return "'/'";
    case Tok::kCmp:
      return "comparator";
    case Tok::kEnd:
      return "end of input";
  }
  return "token";
}

constexpr std::size_t kMaxDiagnostics = 100;
constexpr int kMaxExprDepth = 64;

bool is_ident_start(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
bool is_ident_char(unsigned char c) {
  return is_ident_start(c) || (c >= '0' && c <= '9');
}
bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }

class Lexer {
 public:
  Lexer(std::string_view src, ValidationReport& report)
      : src_(src), report_(report) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_trivia();
      if (pos_ >= src_.size()) break;
      if (report_.diagnostics.size() >= kMaxDiagnostics) break;
      Token t;
      t.loc = loc();
      unsigned char c = static_cast<unsigned char>(src_[pos_]);
      if (is_ident_start(c)) {
        std::size_t start = pos_;
        while (pos_ < src_.size() &&
               is_ident_char(static_cast<unsigned char>(src_[pos_]))) {
          advance();
        }
        t.kind = Tok::kIdent;
        t.text = std::string(src_.substr(start, pos_ - start));
      } else if (is_digit(c)) {
        if (!lex_number(t)) continue;
      } else if (c == '"') {
        if (!lex_string(t)) continue;
      } else {
        if (!lex_punct(t)) continue;
      }
      out.push_back(std::move(t));
    }
    Token end;
    end.kind = Tok::kEnd;
    end.loc = loc();
    out.push_back(end);
    return out;
  }

 private:
  SourceLoc loc() const { return {line_, col_}; }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void error(SourceLoc at, std::string message) {
    report_.diagnostics.push_back(
        {std::string(codes::kLex), Severity::kError, at, std::move(message)});
  }

  void skip_trivia() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  bool lex_number(Token& t) {
    std::size_t start = pos_;
    bool plain_integer = true;
    while (pos_ < src_.size() && is_digit(src_[pos_])) advance();
    if (pos_ + 1 < src_.size() && src_[pos_] == '.' && is_digit(src_[pos_ + 1])) {
      plain_integer = false;
      advance();
      while (pos_ < src_.size() && is_digit(src_[pos_])) advance();
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
      if (look < src_.size() && is_digit(src_[look])) {
        plain_integer = false;
        while (pos_ < look) advance();
        while (pos_ < src_.size() && is_digit(src_[pos_])) advance();
      }
    }
    // Duration: integer immediately followed by a unit letter.
    if (plain_integer && pos_ < src_.size()) {
      char u = src_[pos_];
      bool unit = u == 'm' || u == 'h' || u == 'd' || u == 'w';
      bool tail_clear =
          pos_ + 1 >= src_.size() ||
          !is_ident_char(static_cast<unsigned char>(src_[pos_ + 1]));
      if (unit && tail_clear) {
        advance();
        t.kind = Tok::kDuration;
        t.text = std::string(src_.substr(start, pos_ - start));
        if (!Duration::parse(t.text)) {
          error(t.loc, "invalid duration '" + t.text +
                           "' (magnitude must be between 1 and 1000000)");
          return false;
        }
        return true;
      }
    }
    if (pos_ < src_.size() &&
        is_ident_char(static_cast<unsigned char>(src_[pos_]))) {
      while (pos_ < src_.size() &&
             is_ident_char(static_cast<unsigned char>(src_[pos_]))) {
        advance();
      }
      error(t.loc,
            "malformed number '" + std::string(src_.substr(start, pos_ - start)) + "'");
      return false;
    }
    t.kind = Tok::kNumber;
    t.text = std::string(src_.substr(start, pos_ - start));
    double value = 0.0;
    auto [ptr, ec] =
        std::from_chars(t.text.data(), t.text.data() + t.text.size(), value);
    if (ec != std::errc() || !std::isfinite(value)) {
      error(t.loc, "number out of range '" + t.text + "'");
      return false;
    }
    t.number = value;
    return true;
  }

  bool lex_string(Token& t) {
    advance();  // opening quote
    std::string value;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '"') {
        advance();
        t.kind = Tok::kString;
        t.text = std::move(value);
        return true;
      }
      if (c == '\n') break;
      if (c == '\\') {
        if (pos_ + 1 >= src_.size()) break;
        char e = src_[pos_ + 1];
        SourceLoc at = loc();
        advance();
        advance();
        switch (e) {
          case '"':
            value.push_back('"');
            break;
          case '\\':
            value.push_back('\\');
            break;
          case 'n':
            value.push_back('\n');
            break;
          case 't':
            value.push_back('\t');
            break;
          default:
            error(at, std::string("unknown escape '\\") + e + "' in string");
        }
        continue;
      }
      value.push_back(c);
      advance();
    }
    error(t.loc, "unterminated string");
    return false;
  }

  bool lex_punct(Token& t) {
    char c = src_[pos_];
    char n = pos_ + 1 < src_.size() ? src_[pos_ + 1] : '\0';
    auto single = [&](Tok kind) {
      t.kind = kind;
      t.text = std::string(1, c);
      advance();
      return true;
    };
    switch (c) {
      case '{':
        return single(Tok::kLBrace);
      case '}':
        return single(Tok::kRBrace);
      case '(':
        return single(Tok::kLParen);
      case ')':
        return single(Tok::kRParen);
      case ':':
        return single(Tok::kColon);
      case ',':
        return single(Tok::kComma);
      case ';':
        return single(Tok::kSemicolon);
      case '+':
        return single(Tok::kPlus);
      case '-':
        return single(Tok::kMinus);
      case '*':
        return single(Tok::kStar);
      case '/':
        return single(Tok::kSlash);
      case '<':
      case '>':
        if (n == '=') {
          t.kind = Tok::kCmp;
          t.text = std::string{c, '='};
          advance();
          advance();
          return true;
        }
        return single(Tok::kCmp);
      case '=':
        if (n == '=') {
          t.kind = Tok::kCmp;
          t.text = "==";
          advance();
          advance();
          return true;
        }
        break;
      default:
        break;
    }
    SourceLoc at = loc();
    unsigned char uc = static_cast<unsigned char>(c);
    std::string shown;
    if (uc >= 0x20 && uc < 0x7f) {
      shown = std::string("'") + c + "'";
    } else {
      char buf[8];
      std::snprintf(buf, sizeof buf, "0x%02X", uc);
      shown = buf;
    }
    advance();
    // Swallow the rest of a multi-byte UTF-8 sequence so it yields one error.
    while (uc >= 0xC0 && pos_ < src_.size() &&
           (static_cast<unsigned char>(src_[pos_]) & 0xC0) == 0x80) {
      advance();
    }
    error(at, "unexpected character " + shown);
    return false;
  }

  std::string_view src_;
  ValidationReport& report_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

struct SyntaxError {
  SourceLoc loc;
  std::string message;
  std::string_view code = codes::kSyntax;
};

class Parser {
 public:
  Parser(std::vector<Token> tokens, ValidationReport& report)
      : toks_(std::move(tokens)), report_(report) {}

  Model run() {
    Model model;
    while (peek().kind != Tok::kEnd) {
      if (report_.diagnostics.size() >= kMaxDiagnostics) break;
      depth_ = 0;
      try {
        parse_decl(model);
      } catch (const SyntaxError& e) {
        report_.diagnostics.push_back(
            {std::string(e.code), Severity::kError, e.loc, e.message});
        synchronize();
      }
    }
    return model;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = pos_ + ahead;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }

  const Token& next() {
    const Token& t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    if (t.kind == Tok::kLBrace) ++depth_;
    if (t.kind == Tok::kRBrace) --depth_;
    return t;
  }

  bool peek_word(std::string_view word, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == Tok::kIdent && t.text == word;
  }

  [[noreturn]] void fail(const Token& at, std::string message) {
    throw SyntaxError{at.loc, std::move(message)};
  }

  [[noreturn]] void unexpected(const Token& at, std::string_view wanted) {
    std::string got = at.kind == Tok::kEnd ? "end of input"
                                           : "'" + at.text + "'";
    fail(at, "expected " + std::string(wanted) + ", found " + got);
  }

  const Token& expect(Tok kind) {
    if (peek().kind != kind) unexpected(peek(), describe(kind));
    return next();
  }

  void expect_word(std::string_view word) {
    if (!peek_word(word)) unexpected(peek(), "'" + std::string(word) + "'");
    next();
  }

  void skip_separator() {
    while (peek().kind == Tok::kSemicolon || peek().kind == Tok::kComma) next();
  }

  static bool is_decl_keyword(const Token& t) {
    return t.kind == Tok::kIdent &&
           (t.text == "entity" || t.text == "datasource" || t.text == "kpi");
  }

  // Panic-mode recovery: skip to the next top-level declaration keyword.
  void synchronize() {
    while (peek().kind != Tok::kEnd) {
      if (depth_ <= 0 && is_decl_keyword(peek())) return;
      Tok k = peek().kind;
      next();
      if (k == Tok::kRBrace && depth_ <= 0) {
        depth_ = 0;
        return;
      }
    }
  }

  void parse_decl(Model& model) {
    const Token& t = peek();
    if (peek_word("entity")) {
      model.entities.push_back(parse_entity());
    } else if (peek_word("datasource")) {
      model.datasources.push_back(parse_datasource());
    } else if (peek_word("kpi")) {
      model.kpis.push_back(parse_kpi());
    } else {
      unexpected(t, "'entity', 'datasource' or 'kpi'");
    }
  }

  Entity parse_entity() {
    Entity e;
    e.loc = peek().loc;
    expect_word("entity");
    e.name = expect(Tok::kIdent).text;
    expect(Tok::kLBrace);
    skip_separator();
    while (peek().kind != Tok::kRBrace) {
      e.fields.push_back(parse_field());
      skip_separator();
    }
    expect(Tok::kRBrace);
    return e;
  }

  Field parse_field() {
    Field f;
    f.loc = peek().loc;
    if (peek().kind != Tok::kIdent) unexpected(peek(), "field name or '}'");
    f.name = next().text;
    expect(Tok::kColon);
    f.type = parse_type();
    if (peek_word("unit") && peek(1).kind == Tok::kString) {
      next();
      f.unit = next().text;
    }
    if (peek_word("optional") && peek(1).kind != Tok::kColon) {
      next();
      f.optional = true;
    }
    return f;
  }

  FieldType parse_type() {
    const Token& t = peek();
    if (t.kind != Tok::kIdent) unexpected(t, "type");
    FieldType type;
    if (t.text == "string") {
      type.kind = FieldKind::kString;
    } else if (t.text == "int") {
      type.kind = FieldKind::kInt;
    } else if (t.text == "float") {
      type.kind = FieldKind::kFloat;
    } else if (t.text == "bool") {
      type.kind = FieldKind::kBool;
    } else if (t.text == "datetime") {
      type.kind = FieldKind::kDatetime;
    } else if (t.text == "enum") {
      type.kind = FieldKind::kEnum;
      next();
      expect(Tok::kLParen);
      type.enum_values.push_back(expect(Tok::kIdent).text);
      while (peek().kind == Tok::kComma) {
        next();
        type.enum_values.push_back(expect(Tok::kIdent).text);
      }
      expect(Tok::kRParen);
      return type;
    } else {
      fail(t, "unknown type '" + t.text +
                  "' (expected string, int, float, bool, datetime or enum)");
    }
    next();
    return type;
  }

  Datasource parse_datasource() {
    Datasource d;
    d.loc = peek().loc;
    expect_word("datasource");
    d.name = expect(Tok::kIdent).text;
    expect(Tok::kColon);
    d.entity = expect(Tok::kIdent).text;
    return d;
  }

  double parse_signed_number() {
    bool negative = false;
    if (peek().kind == Tok::kMinus) {
      next();
      negative = true;
    }
    double v = expect(Tok::kNumber).number;
    return negative ? -v : v;
  }

  KpiDef parse_kpi() {
    KpiDef k;
    k.loc = peek().loc;
    expect_word("kpi");
    const Token& name = expect(Tok::kIdent);
    k.name = name.text;
    expect(Tok::kLBrace);
    bool has_source = false;
    bool has_expr = false;
    std::vector<std::string> seen;
    skip_separator();
    while (peek().kind != Tok::kRBrace) {
      const Token& attr = peek();
      if (attr.kind != Tok::kIdent) unexpected(attr, "KPI attribute or '}'");
      for (const auto& s : seen) {
        if (s == attr.text) fail(attr, "duplicate attribute '" + attr.text + "'");
      }
      std::string key = attr.text;
      if (key == "source") {
        next();
        expect(Tok::kColon);
        k.source = expect(Tok::kIdent).text;
        has_source = true;
      } else if (key == "expr") {
        next();
        expect(Tok::kColon);
        k.expr = parse_expr(0);
        has_expr = true;
      } else if (key == "window") {
        next();
        expect(Tok::kColon);
        k.window = Duration::parse(expect(Tok::kDuration).text);
      } else if (key == "unit") {
        next();
        expect(Tok::kColon);
        k.unit = expect(Tok::kString).text;
      } else if (key == "target") {
        next();
        expect(Tok::kColon);
        const Token& cmp = expect(Tok::kCmp);
        Target target;
        if (cmp.text == "<=") {
          target.cmp = Comparator::kLe;
        } else if (cmp.text == ">=") {
          target.cmp = Comparator::kGe;
        } else if (cmp.text == "<") {
          target.cmp = Comparator::kLt;
        } else if (cmp.text == ">") {
          target.cmp = Comparator::kGt;
        } else {
          target.cmp = Comparator::kEq;
        }
        target.bound = parse_signed_number();
        k.target = target;
      } else if (key == "baseline") {
        next();
        expect(Tok::kColon);
        k.baseline = parse_signed_number();
      } else if (key == "group_by") {
        next();
        expect(Tok::kColon);
        k.group_by = expect(Tok::kIdent).text;
      } else {
        fail(attr, "unknown KPI attribute '" + key +
                       "' (expected source, expr, window, unit, target, "
                       "baseline or group_by)");
      }
      seen.push_back(std::move(key));
      skip_separator();
    }
    expect(Tok::kRBrace);
    if (!has_source || !has_expr) {
      throw SyntaxError{name.loc,
                        "kpi '" + k.name + "' is missing required attribute '" +
                            (has_source ? "expr" : "source") + "'",
                        codes::kKpiMissing};
    }
    return k;
  }

  Expr parse_expr(int depth) {
    if (depth > kMaxExprDepth) fail(peek(), "expression nested too deeply");
    Expr lhs = parse_term(depth);
    while (peek().kind == Tok::kPlus || peek().kind == Tok::kMinus) {
      const Token& op = next();
      Expr rhs = parse_term(depth);
      SourceLoc at = op.loc;
      lhs = Expr::binary(op.kind == Tok::kPlus ? BinOp::kAdd : BinOp::kSub,
                         std::move(lhs), std::move(rhs));
      lhs.loc = at;
    }
    return lhs;
  }

  Expr parse_term(int depth) {
    Expr lhs = parse_factor(depth);
    while (peek().kind == Tok::kStar || peek().kind == Tok::kSlash) {
      const Token& op = next();
      Expr rhs = parse_factor(depth);
      SourceLoc at = op.loc;
      lhs = Expr::binary(op.kind == Tok::kStar ? BinOp::kMul : BinOp::kDiv,
                         std::move(lhs), std::move(rhs));
      lhs.loc = at;
    }
    return lhs;
  }

  Expr parse_factor(int depth) {
    const Token& t = peek();
    if (t.kind == Tok::kNumber) {
      next();
      Expr e = Expr::literal(t.number);
      e.loc = t.loc;
      return e;
    }
    if (t.kind == Tok::kLParen) {
      next();
      Expr inner = parse_expr(depth + 1);
      expect(Tok::kRParen);
      return inner;
    }
    if (t.kind == Tok::kIdent) {
      static constexpr std::pair<std::string_view, AggFn> kFns[] = {
          {"sum", AggFn::kSum},     {"avg", AggFn::kAvg},
          {"min", AggFn::kMin},     {"max", AggFn::kMax},
          {"first", AggFn::kFirst}, {"last", AggFn::kLast},
          {"count", AggFn::kCount}};
      for (const auto& [word, fn] : kFns) {
        if (t.text != word) continue;
        SourceLoc at = t.loc;
        next();
        expect(Tok::kLParen);
        Expr e;
        if (fn == AggFn::kCount) {
          if (peek().kind != Tok::kRParen) {
            fail(peek(), "count() takes no argument");
          }
          e = Expr::aggregate(AggFn::kCount);
        } else {
          e = Expr::aggregate(fn, expect(Tok::kIdent).text);
        }
        expect(Tok::kRParen);
        e.loc = at;
        return e;
      }
      if (peek(1).kind == Tok::kLParen) {
        fail(t, "unknown aggregate function '" + t.text +
                    "' (expected sum, avg, min, max, first, last or count)");
      }
      fail(t, "bare field '" + t.text +
                  "' in expression; wrap it in an aggregate such as avg(" +
                  t.text + ")");
    }
    unexpected(t, "number, aggregate call or '('");
  }

  std::vector<Token> toks_;
  ValidationReport& report_;
  std::size_t pos_ = 0;
  int depth_ = 0;
};

}  // namespace

std::size_t ValidationReport::error_count() const noexcept {
  std::size_t n = 0;
  for (const auto& d : diagnostics) {
    if (d.severity == Severity::kError) ++n;
  }
  return n;
}

bool ValidationReport::contains(std::string_view code) const noexcept {
  for (const auto& d : diagnostics) {
    if (d.code == code) return true;
  }
  return false;
}

std::string ValidationReport::format(std::string_view file_name) const {
  std::ostringstream out;
  for (const auto& d : diagnostics) {
    if (!file_name.empty()) out << file_name << ':';
    out << d.loc.line << ':' << d.loc.column << ": "
        << (d.severity == Severity::kError ? "error" : "warning") << ' '
        << d.code << ": " << d.message << '\n';
  }
  return out.str();
}

ParseResult parse_model(std::string_view text) {
  ParseResult result;
  Lexer lexer(text, result.report);
  auto tokens = lexer.run();
  Parser parser(std::move(tokens), result.report);
  Model model = parser.run();
  if (result.report.empty()) {
    model.source_hash = content_hash(text);
    result.model = std::move(model);
  }
  return result;
}

ParseResult load_model(std::string_view text) {
  ParseResult parsed = parse_model(text);
  if (!parsed.ok()) return parsed;
  parsed.report = validate_model(*parsed.model);
  if (!parsed.report.empty()) parsed.model.reset();
  return parsed;
}

ParseResult load_model_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::kIo, "cannot read model file '" + path.string() + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_model(buf.str());
}

}  // namespace climadash::dsl

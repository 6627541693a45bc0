// Copyright 2026 The ClimaDash Authors
// SPDX-License-Identifier: Apache-2.0

#include "climadash/agent/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_set>

#include "climadash/error.hpp"

namespace climadash::agent {

namespace fs = std::filesystem;

namespace {

bool token_char(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
         c >= 0x80;
}

struct Span {
  std::size_t begin;
  std::size_t end;
};

std::vector<Span> token_spans(std::string_view text) {
  std::vector<Span> out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!token_char(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    std::size_t b = i;
    while (i < text.size() && token_char(static_cast<unsigned char>(text[i]))) ++i;
    out.push_back({b, i});
  }
  return out;
}

std::string_view trim(std::string_view s) {
  const std::string_view ws = " \t\r\n\f\v";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

bool blank(std::string_view line) { return trim(line).empty(); }

// Paragraph blocks separated by one or more blank lines.
std::vector<std::string_view> blocks_of(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t pos = 0, start = std::string_view::npos, last_end = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    std::size_t end = nl == std::string_view::npos ? text.size() : nl;
    auto line = text.substr(pos, end - pos);
    if (blank(line)) {
      if (start != std::string_view::npos) {
        out.push_back(text.substr(start, last_end - start));
        start = std::string_view::npos;
      }
    } else {
      if (start == std::string_view::npos) start = pos;
      last_end = end;
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  if (start != std::string_view::npos) out.push_back(text.substr(start, last_end - start));
  return out;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  for (auto s : token_spans(text)) {
    std::string t(text.substr(s.begin, s.end - s.begin));
    for (auto& c : t) {
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<std::string> split_document(std::string_view text, std::size_t max_tokens) {
  if (max_tokens == 0) throw Error(ErrorKind::kInvalid, "max_tokens must be positive");
  // One passage per paragraph; longer paragraphs are cut at token starts.
  struct Piece {
    std::string_view text;
    std::size_t tokens;
  };
  std::vector<Piece> pieces;
  for (auto block : blocks_of(text)) {
    auto spans = token_spans(block);
    if (spans.size() <= max_tokens) {
      pieces.push_back({trim(block), spans.size()});
      continue;
    }
    std::size_t from = 0;
    for (std::size_t i = max_tokens; i < spans.size(); i += max_tokens) {
      pieces.push_back({trim(block.substr(from, spans[i].begin - from)), max_tokens});
      from = spans[i].begin;
    }
    auto tail = trim(block.substr(from));
    pieces.push_back({tail, token_spans(tail).size()});
  }

  std::vector<std::string> out;
  for (const auto& p : pieces) {
    if (p.tokens > 0) out.emplace_back(p.text);
  }
  return out;
}

RetrievalIndex RetrievalIndex::from_passages(std::vector<Passage> passages, Bm25Params params,
                                             std::vector<std::string> warnings) {
  RetrievalIndex idx;
  idx.params_ = params;
  idx.passages_ = std::move(passages);
  idx.warnings_ = std::move(warnings);
  double total = 0.0;
  for (std::size_t i = 0; i < idx.passages_.size(); ++i) {
    auto& p = idx.passages_[i];
    auto tokens = tokenize(p.text);
    p.token_count = tokens.size();
    total += static_cast<double>(tokens.size());
    std::map<std::string, std::uint32_t> tf;
    for (auto& t : tokens) ++tf[std::move(t)];
    for (auto& [term, n] : tf) {
      idx.postings_[term].push_back({static_cast<std::uint32_t>(i), n});
    }
  }
  idx.avgdl_ = idx.passages_.empty() ? 0.0 : total / static_cast<double>(idx.passages_.size());
  return idx;
}

RetrievalIndex RetrievalIndex::from_documents(
    const std::vector<std::pair<std::string, std::string>>& docs, Bm25Params params) {
  std::vector<Passage> passages;
  for (const auto& [id, text] : docs) {
    int ordinal = 0;
    for (auto& chunk : split_document(text)) {
      passages.push_back({id, ordinal++, std::move(chunk), 0});
    }
  }
  return from_passages(std::move(passages), params);
}

RetrievalIndex RetrievalIndex::build(const fs::path& dir, Bm25Params params) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    throw Error(ErrorKind::kIo, "corpus directory " + dir.string() + " not found");
  }
  std::vector<fs::path> files;
  std::vector<std::string> warnings;
  for (auto it = fs::recursive_directory_iterator(
           dir, fs::directory_options::skip_permission_denied, ec);
       !ec && it != fs::recursive_directory_iterator(); it.increment(ec)) {
    auto ext = it->path().extension().string();
    if (it->is_regular_file() && (ext == ".txt" || ext == ".md")) files.push_back(it->path());
  }
  if (ec) warnings.push_back(dir.string() + ": " + ec.message());
  std::sort(files.begin(), files.end());

  std::vector<std::pair<std::string, std::string>> docs;
  for (const auto& f : files) {
    std::ifstream in(f, std::ios::binary);
    std::ostringstream buf;
    if (in) buf << in.rdbuf();
    if (!in || in.bad()) {
      warnings.push_back(f.string() + ": unreadable, skipped");
      continue;
    }
    docs.emplace_back(fs::relative(f, dir).generic_string(), buf.str());
  }
  auto idx = from_documents(docs, params);
  idx.warnings_ = std::move(warnings);
  return idx;
}

std::size_t RetrievalIndex::doc_frequency(std::string_view term) const {
  auto it = postings_.find(std::string(term));
  return it == postings_.end() ? 0 : it->second.size();
}

double RetrievalIndex::idf(std::string_view term) const {
  double n = static_cast<double>(doc_frequency(term));
  double total = static_cast<double>(passages_.size());
  return std::log(1.0 + (total - n + 0.5) / (n + 0.5));
}

std::vector<ScoredPassage> RetrievalIndex::answer(std::string_view question, int k) const {
  if (k < 1) throw Error(ErrorKind::kInvalid, "k must be at least 1");
  if (passages_.empty()) return {};
  std::vector<double> scores(passages_.size(), 0.0);
  std::unordered_set<std::string> seen;
  for (auto& term : tokenize(question)) {
    if (!seen.insert(term).second) continue;
    auto it = postings_.find(term);
    if (it == postings_.end()) continue;
    double w = idf(term);
    for (const auto& post : it->second) {
      double f = post.tf;
      double len = static_cast<double>(passages_[post.passage].token_count);
      double norm = params_.k1 * (1.0 - params_.b + params_.b * len / avgdl_);
      scores[post.passage] += w * f * (params_.k1 + 1.0) / (f + norm);
    }
  }
  std::vector<std::size_t> hits;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i] > 0.0) hits.push_back(i);
  }
  auto before = [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    const auto& pa = passages_[a];
    const auto& pb = passages_[b];
    if (pa.doc_id != pb.doc_id) return pa.doc_id < pb.doc_id;
    return pa.ordinal < pb.ordinal;
  };
  auto top = std::min(hits.size(), static_cast<std::size_t>(k));
  std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(top), hits.end(),
                    before);
  std::vector<ScoredPassage> out;
  out.reserve(top);
  for (std::size_t i = 0; i < top; ++i) out.push_back({passages_[hits[i]], scores[hits[i]]});
  return out;
}

nlohmann::ordered_json RetrievalIndex::to_json() const {
  nlohmann::ordered_json j;
  j["format"] = "climadash-index/1";
  j["params"] = {{"k1", params_.k1}, {"b", params_.b}};
  j["passage_count"] = passages_.size();
  j["avgdl"] = avgdl_;
  j["warnings"] = warnings_;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& p : passages_) {
    arr.push_back({{"doc_id", p.doc_id},
                   {"ordinal", p.ordinal},
                   {"token_count", p.token_count},
                   {"text", p.text}});
  }
  j["passages"] = std::move(arr);
  return j;
}

RetrievalIndex RetrievalIndex::from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "climadash-index/1") {
      throw Error(ErrorKind::kInvalid, "unsupported index format");
    }
    Bm25Params params{j.at("params").at("k1").get<double>(), j.at("params").at("b").get<double>()};
    std::vector<Passage> passages;
    for (const auto& p : j.at("passages")) {
      passages.push_back({p.at("doc_id").get<std::string>(), p.at("ordinal").get<int>(),
                          p.at("text").get<std::string>(), 0});
    }
    std::vector<std::string> warnings;
    if (j.contains("warnings")) warnings = j["warnings"].get<std::vector<std::string>>();
    return from_passages(std::move(passages), params, std::move(warnings));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kInvalid, std::string("malformed index: ") + e.what());
  }
}

void RetrievalIndex::save(const fs::path& file) const {
  std::error_code ec;
  if (file.has_parent_path()) fs::create_directories(file.parent_path(), ec);
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  out << to_json().dump() << '\n';
  out.close();
  if (!out) throw Error(ErrorKind::kIo, "write " + file.string() + " failed");
}

RetrievalIndex RetrievalIndex::load(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + file.string());
  auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorKind::kInvalid, file.string() + " is not JSON");
  return from_json(j);
}

std::string ExtractiveSynthesizer::synthesize(std::string_view,
                                              const std::vector<ScoredPassage>& passages) const {
  if (passages.empty()) return "No relevant passage found.";
  return passages.front().passage.text;
}

nlohmann::ordered_json to_json(const std::vector<ScoredPassage>& results) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : results) {
    arr.push_back({{"doc_id", r.passage.doc_id},
                   {"ordinal", r.passage.ordinal},
                   {"score", r.score},
                   {"token_count", r.passage.token_count},
                   {"text", r.passage.text}});
  }
  return arr;
}

}  // namespace climadash::agent

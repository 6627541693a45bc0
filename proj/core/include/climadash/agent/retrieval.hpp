// Copyright 2026 The ClimaDash Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace climadash::agent {

inline constexpr std::size_t kMaxPassageTokens = 160;

// Lowercased alphanumeric runs. Bytes >= 0x80 count as token characters so
// UTF-8 words stay whole.
std::vector<std::string> tokenize(std::string_view text);

// One passage per blank-line separated block. Blocks over kMaxPassageTokens
// tokens are cut at token boundaries; blocks without tokens are dropped.
std::vector<std::string> split_document(std::string_view text,
                                        std::size_t max_tokens = kMaxPassageTokens);

struct Passage {
  std::string doc_id;  // path relative to the corpus root
  int ordinal = 0;     // position within the document
  std::string text;
  std::size_t token_count = 0;

  bool operator==(const Passage&) const = default;
};

struct ScoredPassage {
  Passage passage;
  double score = 0.0;
};

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
};

// Immutable once built; safe for concurrent answer() calls.
class RetrievalIndex {
 public:
  RetrievalIndex() = default;

  // Every .txt / .md file under `dir`, recursively, in path order.
  // Unreadable files are skipped and listed in warnings().
  static RetrievalIndex build(const std::filesystem::path& dir, Bm25Params params = {});
  static RetrievalIndex from_passages(std::vector<Passage> passages, Bm25Params params = {},
                                      std::vector<std::string> warnings = {});
  // Passage list of one in-memory document per entry (doc_id, text).
  static RetrievalIndex from_documents(
      const std::vector<std::pair<std::string, std::string>>& docs, Bm25Params params = {});

  // BM25 top-k with score > 0; ties broken by (doc_id, ordinal).
  // Throws Error(kInvalid) when k < 1.
  std::vector<ScoredPassage> answer(std::string_view question, int k = 3) const;

  double idf(std::string_view term) const;
  std::size_t doc_frequency(std::string_view term) const;

  std::size_t size() const noexcept { return passages_.size(); }
  double avgdl() const noexcept { return avgdl_; }
  const std::vector<Passage>& passages() const noexcept { return passages_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }
  const Bm25Params& params() const noexcept { return params_; }

  nlohmann::ordered_json to_json() const;
  static RetrievalIndex from_json(const nlohmann::json& j);
  void save(const std::filesystem::path& file) const;
  static RetrievalIndex load(const std::filesystem::path& file);

 private:
  struct Posting {
    std::uint32_t passage;
    std::uint32_t tf;
  };

  Bm25Params params_;
  std::vector<Passage> passages_;
  std::vector<std::string> warnings_;
  std::unordered_map<std::string, std::vector<Posting>> postings_;
  double avgdl_ = 0.0;
};

// Hook for turning retrieved passages into an answer; a generative model can
// slot in here later.
class AnswerSynthesizer {
 public:
  virtual ~AnswerSynthesizer() = default;
  virtual std::string synthesize(std::string_view question,
                                 const std::vector<ScoredPassage>& passages) const = 0;
};

// Returns the best passage verbatim.
class ExtractiveSynthesizer final : public AnswerSynthesizer {
 public:
  std::string synthesize(std::string_view question,
                         const std::vector<ScoredPassage>& passages) const override;
};

nlohmann::ordered_json to_json(const std::vector<ScoredPassage>& results);

}  // namespace climadash::agent

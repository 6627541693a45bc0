// Copyright 2026 The ClimaDash Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>
#include <string>

#include "climadash/dsl/parser.hpp"

namespace cdtest {

inline std::filesystem::path data_path(const std::string& name) {
  return std::filesystem::path(CLIMADASH_TEST_DATA_DIR) / name;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
}

// Parses a model that is known to be valid.
inline std::shared_ptr<const climadash::dsl::Model> model_from(const std::string& text) {
  auto r = climadash::dsl::load_model(text);
  if (!r.ok()) throw std::runtime_error("test model rejected:\n" + r.report.format());
  return std::make_shared<const climadash::dsl::Model>(std::move(*r.model));
}

inline std::shared_ptr<const climadash::dsl::Model> model_file(const std::string& name) {
  return model_from(read_file(data_path(name)));
}

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<unsigned> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("climadash-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace cdtest

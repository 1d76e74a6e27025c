#pragma once

#include <unistd.h>

#include <gtest/gtest.h>

#include <filesystem>
#include <functional>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "senti/corpus.hpp"
#include "senti/preprocess.hpp"

namespace senti::testing {

/// Runs fn and returns the code of the senti::Error it throws.
inline ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected senti::Error";
  return ErrorCode::Empty;
}

inline std::filesystem::path data_path(const std::string& name) {
  return std::filesystem::path(SENTI_DATA_DIR) / name;
}

inline Corpus demo_corpus() { return load_corpus(data_path("demo_corpus.csv")); }

inline PreprocessConfig default_preprocess() { return {load_stopwords(data_path("stopwords_id.txt")), true}; }

/// Corpus of n short documents with alternating labels.
inline Corpus numbered_corpus(std::size_t n) {
  std::vector<LabeledDocument> docs;
  for (std::size_t i = 0; i < n; ++i)
    docs.push_back({"d" + std::to_string(i), "dokumen nomor " + std::to_string(i),
                    i % 2 == 0 ? Label::Positive : Label::Negative});
  return Corpus(std::move(docs));
}

/// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("senti-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

  std::filesystem::path write(const std::string& name, const std::string& contents) const {
    auto p = path_ / name;
    std::ofstream(p, std::ios::binary) << contents;
    return p;
  }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace senti::testing

#pragma once

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "senti/error.hpp"
#include "senti/label.hpp"
#include "senti/random.hpp"

namespace senti {

struct LabeledDocument {
  std::string id;
  std::string text;
  Label label = Label::Negative;

  bool operator==(const LabeledDocument&) const = default;
};

/// Ordered, immutable-by-convention collection of labeled documents.
class Corpus {
 public:
  Corpus() = default;

  /// Rejects duplicate ids and empty texts.
  explicit Corpus(std::vector<LabeledDocument> documents) : documents_(std::move(documents)) {
    std::unordered_set<std::string> seen;
    for (const auto& doc : documents_) {
      if (doc.text.empty()) throw Error(ErrorCode::MalformedRow, "empty text for id " + doc.id);
      if (!seen.insert(doc.id).second) throw Error(ErrorCode::DuplicateId, doc.id);
    }
  }

  const std::vector<LabeledDocument>& documents() const noexcept { return documents_; }
  std::size_t size() const noexcept { return documents_.size(); }
  bool empty() const noexcept { return documents_.empty(); }
  const LabeledDocument& operator[](std::size_t i) const { return documents_[i]; }
  auto begin() const noexcept { return documents_.begin(); }
  auto end() const noexcept { return documents_.end(); }

  std::size_t count(Label label) const {
    return static_cast<std::size_t>(std::count_if(
        documents_.begin(), documents_.end(), [label](const auto& d) { return d.label == label; }));
  }

  std::vector<Label> labels() const {
    std::vector<Label> out;
    out.reserve(documents_.size());
    for (const auto& d : documents_) out.push_back(d.label);
    return out;
  }

 private:
  std::vector<LabeledDocument> documents_;
};

enum class CorpusFormat { Csv, Jsonl };

inline CorpusFormat parse_corpus_format(std::string_view name) {
  if (name == "csv") return CorpusFormat::Csv;
  if (name == "jsonl") return CorpusFormat::Jsonl;
  throw Error(ErrorCode::InvalidConfig, "unknown corpus format '" + std::string(name) + "'");
}

/// Picks the format from the file extension; anything but .jsonl is CSV.
inline CorpusFormat guess_corpus_format(const std::filesystem::path& path) {
  return path.extension() == ".jsonl" ? CorpusFormat::Jsonl : CorpusFormat::Csv;
}

namespace detail {

struct CsvRecord {
  std::size_t line = 0;  // 1-based line on which the record starts
  std::vector<std::string> fields;
};

// RFC 4180 reader: quoted fields may hold commas, doubled quotes and line
// breaks. CRLF and LF endings are both accepted.
inline std::vector<CsvRecord> read_csv(std::string_view data) {
  std::vector<CsvRecord> records;
  std::size_t line = 1;
  std::size_t pos = 0;
  if (data.substr(0, 3) == "\xEF\xBB\xBF") pos = 3;

  while (pos < data.size()) {
    CsvRecord record;
    record.line = line;
    std::string field;
    bool in_quotes = false;
    bool was_quoted = false;
    bool done = false;
    while (!done) {
      if (pos >= data.size()) {
        if (in_quotes) throw Error(ErrorCode::MalformedRow, "line " + std::to_string(record.line) + ": unterminated quote");
        record.fields.push_back(std::move(field));
        break;
      }
      const char c = data[pos];
      if (in_quotes) {
        if (c == '"') {
          if (pos + 1 < data.size() && data[pos + 1] == '"') {
            field += '"';
            pos += 2;
          } else {
            in_quotes = false;
            ++pos;
          }
        } else {
          if (c == '\n') ++line;
          field += c;
          ++pos;
        }
        continue;
      }
      switch (c) {
        case '"':
          if (!field.empty() || was_quoted)
            throw Error(ErrorCode::MalformedRow, "line " + std::to_string(line) + ": stray quote");
          in_quotes = was_quoted = true;
          ++pos;
          break;
        case ',':
          record.fields.push_back(std::move(field));
          field.clear();
          was_quoted = false;
          ++pos;
          break;
        case '\r':
          ++pos;
          break;
        case '\n':
          record.fields.push_back(std::move(field));
          ++line;
          ++pos;
          done = true;
          break;
        default:
          if (was_quoted)
            throw Error(ErrorCode::MalformedRow, "line " + std::to_string(line) + ": text after closing quote");
          field += c;
          ++pos;
      }
    }
    const bool blank = record.fields.size() == 1 && record.fields[0].empty();
    if (!blank) records.push_back(std::move(record));
  }
  return records;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) throw Error(ErrorCode::MissingFile, path.string());
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingFile, path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline std::string row_error(std::size_t line, std::string_view what) {
  return "line " + std::to_string(line) + ": " + std::string(what);
}

inline Corpus corpus_from_csv(std::string_view data) {
  const auto records = read_csv(data);
  if (records.empty()) throw Error(ErrorCode::MalformedRow, row_error(1, "empty corpus"));

  const auto& header = records.front();
  std::optional<std::size_t> id_col, text_col, label_col;
  for (std::size_t i = 0; i < header.fields.size(); ++i) {
    if (header.fields[i] == "id") id_col = i;
    else if (header.fields[i] == "text") text_col = i;
    else if (header.fields[i] == "label") label_col = i;
  }
  if (!id_col || !text_col || !label_col)
    throw Error(ErrorCode::MalformedRow, row_error(header.line, "header must name id,text,label"));
  if (records.size() == 1) throw Error(ErrorCode::MalformedRow, row_error(header.line, "empty corpus"));

  std::vector<LabeledDocument> docs;
  std::unordered_set<std::string> seen;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != header.fields.size())
      throw Error(ErrorCode::MalformedRow, row_error(rec.line, "expected " + std::to_string(header.fields.size()) +
                                                                   " fields, got " + std::to_string(rec.fields.size())));
    LabeledDocument doc{rec.fields[*id_col], rec.fields[*text_col], parse_label(rec.fields[*label_col])};
    if (doc.id.empty()) throw Error(ErrorCode::MalformedRow, row_error(rec.line, "empty id"));
    if (doc.text.empty()) throw Error(ErrorCode::MalformedRow, row_error(rec.line, "empty text"));
    if (!seen.insert(doc.id).second) throw Error(ErrorCode::DuplicateId, doc.id);
    docs.push_back(std::move(doc));
  }
  return Corpus(std::move(docs));
}

inline Corpus corpus_from_jsonl(std::string_view data) {
  std::vector<LabeledDocument> docs;
  std::unordered_set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= data.size()) {
    auto end = data.find('\n', start);
    if (end == std::string_view::npos) end = data.size();
    auto line = data.substr(start, end - start);
    ++line_no;
    start = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) {
      if (end == data.size()) break;
      continue;
    }

    nlohmann::json row;
    try {
      row = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
      throw Error(ErrorCode::MalformedRow, row_error(line_no, "invalid JSON"));
    }
    if (!row.is_object() || !row.contains("id") || !row.contains("text") || !row.contains("label"))
      throw Error(ErrorCode::MalformedRow, row_error(line_no, "object must carry id, text and label"));
    const auto& id = row["id"];
    if (!(id.is_string() || id.is_number_integer()) || !row["text"].is_string() || !row["label"].is_string())
      throw Error(ErrorCode::MalformedRow, row_error(line_no, "wrong field types"));

    LabeledDocument doc{id.is_string() ? id.get<std::string>() : std::to_string(id.get<long long>()),
                        row["text"].get<std::string>(), parse_label(row["label"].get<std::string>())};
    if (doc.id.empty()) throw Error(ErrorCode::MalformedRow, row_error(line_no, "empty id"));
    if (doc.text.empty()) throw Error(ErrorCode::MalformedRow, row_error(line_no, "empty text"));
    if (!seen.insert(doc.id).second) throw Error(ErrorCode::DuplicateId, doc.id);
    docs.push_back(std::move(doc));
    if (end == data.size()) break;
  }
  if (docs.empty()) throw Error(ErrorCode::MalformedRow, row_error(1, "empty corpus"));
  return Corpus(std::move(docs));
}

}  // namespace detail

inline Corpus parse_corpus(std::string_view data, CorpusFormat format) {
  return format == CorpusFormat::Csv ? detail::corpus_from_csv(data) : detail::corpus_from_jsonl(data);
}

inline Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format) {
  return parse_corpus(detail::read_file(path), format);
}

inline Corpus load_corpus(const std::filesystem::path& path) { return load_corpus(path, guess_corpus_format(path)); }

/// Lowercase hex SHA-256 over the canonical form of the corpus: one
/// `id \x1f text \x1f label \n` record per document, in corpus order. The
/// same documents yield the same fingerprint whether read from CSV or JSONL.
inline std::string fingerprint(const Corpus& corpus) {
  std::string canonical;
  for (const auto& doc : corpus) {
    canonical += doc.id;
    canonical += '\x1f';
    canonical += doc.text;
    canonical += '\x1f';
    canonical += to_string(doc.label);
    canonical += '\n';
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(canonical.data(), canonical.size(), digest.data(), &length, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorCode::IoError, "SHA-256 digest failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < length; ++i) {
    hex += kHex[digest[i] >> 4];
    hex += kHex[digest[i] & 0xF];
  }
  return hex;
}

struct DataSplit {
  Corpus train;
  Corpus test;
  double train_fraction = 0.0;
  std::uint64_t seed = 0;
};

struct SplitOptions {
  /// Shuffle and cut each label class separately instead of the whole corpus.
  bool stratified = false;
};

/// round-half-up(f * n), kept inside [1, n-1] so both partitions are non-empty.
inline std::size_t train_size(double train_fraction, std::size_t n) {
  auto k = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(n) + 0.5 + 1e-9));
  return std::clamp<std::size_t>(k, 1, n - 1);
}

inline void check_fraction(double f) {
  if (!(f > 0.0 && f < 1.0)) throw Error(ErrorCode::FractionOutOfRange, std::to_string(f));
}

/// Seeded random partition. The chosen indices are a prefix of a seeded
/// permutation; within each partition documents keep their corpus order.
inline DataSplit split(const Corpus& corpus, double train_fraction, std::uint64_t seed, SplitOptions options = {}) {
  check_fraction(train_fraction);
  const std::size_t n = corpus.size();
  if (n < 2) throw Error(ErrorCode::CorpusTooSmall, std::to_string(n) + " documents");

  Rng rng(seed);
  std::vector<bool> in_train(n, false);
  if (!options.stratified) {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    rng.shuffle(order);
    const auto k = train_size(train_fraction, n);
    for (std::size_t i = 0; i < k; ++i) in_train[order[i]] = true;
  } else {
    for (Label cls : {Label::Negative, Label::Positive}) {
      std::vector<std::size_t> members;
      for (std::size_t i = 0; i < n; ++i)
        if (corpus[i].label == cls) members.push_back(i);
      rng.shuffle(members);
      if (members.empty()) continue;
      std::size_t k = members.size() == 1
                          ? 1
                          : train_size(train_fraction, members.size());
      for (std::size_t i = 0; i < k; ++i) in_train[members[i]] = true;
    }
    // A single-member class can leave the test side empty.
    if (std::all_of(in_train.begin(), in_train.end(), [](bool b) { return b; }))
      throw Error(ErrorCode::CorpusTooSmall, "stratified split leaves no test documents");
  }

  std::vector<LabeledDocument> train, test;
  for (std::size_t i = 0; i < n; ++i) (in_train[i] ? train : test).push_back(corpus[i]);
  return DataSplit{Corpus(std::move(train)), Corpus(std::move(test)), train_fraction, seed};
}

/// The fractions start, start+step, ..., end (end included within 1e-9).
/// Values are snapped to 12 decimals so 0.25 + 3 * 0.05 prints as 0.4.
inline std::vector<double> sweep_fractions(double start, double end, double step) {
  if (!(step > 0.0)) throw Error(ErrorCode::FractionOutOfRange, "step must be positive");
  if (start > end + 1e-9) throw Error(ErrorCode::EmptySweep, "start exceeds end");
  std::vector<double> out;
  for (std::size_t i = 0;; ++i) {
    const double f = start + static_cast<double>(i) * step;
    if (f > end + 1e-9) break;
    const double snapped = std::round(f * 1e12) / 1e12;
    check_fraction(snapped);
    out.push_back(snapped);
  }
  if (out.empty()) throw Error(ErrorCode::EmptySweep, "no fractions in range");
  return out;
}

/// Split i of the sweep is seeded with seed ^ i.
inline std::vector<DataSplit> sweep_splits(const Corpus& corpus, double start, double end, double step,
                                           std::uint64_t seed, SplitOptions options = {}) {
  std::vector<DataSplit> splits;
  const auto fractions = sweep_fractions(start, end, step);
  for (std::size_t i = 0; i < fractions.size(); ++i)
    splits.push_back(split(corpus, fractions[i], seed ^ static_cast<std::uint64_t>(i), options));
  return splits;
}

}  // namespace senti

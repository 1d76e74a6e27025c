#pragma once

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <filesystem>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "senti/corpus.hpp"
#include "senti/error.hpp"

namespace senti {

// Stages of the preprocessing pipeline, applied in this order:
//   punctuation removal -> case folding -> tokenizing -> stopword filtering.

namespace detail {

inline icu::UnicodeString to_unicode(std::string_view utf8) {
  return icu::UnicodeString::fromUTF8(icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
}

inline std::string to_utf8(const icu::UnicodeString& text) {
  std::string out;
  text.toUTF8String(out);
  return out;
}

inline bool is_punctuation_or_symbol(UChar32 c) {
  return (U_GET_GC_MASK(c) & (U_GC_P_MASK | U_GC_S_MASK)) != 0;
}

}  // namespace detail

inline std::string nfc_normalize(std::string_view text) {
  UErrorCode status = U_ZERO_ERROR;
  const auto* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error(ErrorCode::IoError, "ICU NFC normalizer unavailable");
  auto normalized = nfc->normalize(detail::to_unicode(text), status);
  if (U_FAILURE(status)) throw Error(ErrorCode::IoError, "NFC normalization failed");
  return detail::to_utf8(normalized);
}

/// Replaces each Unicode punctuation (P*) or symbol (S*) code point, including
/// '@' and '#', with one space. Everything else is copied through.
inline std::string remove_punctuation(std::string_view text) {
  const auto in = detail::to_unicode(text);
  icu::UnicodeString out;
  for (int32_t i = 0; i < in.length();) {
    const UChar32 c = in.char32At(i);
    out.append(detail::is_punctuation_or_symbol(c) ? UChar32{' '} : c);
    i += U16_LENGTH(c);
  }
  return detail::to_utf8(out);
}

inline std::string case_fold(std::string_view text) {
  auto u = detail::to_unicode(text);
  u.toLower(icu::Locale::getRoot());
  return detail::to_utf8(u);
}

/// Splits on runs of Unicode whitespace; never yields empty tokens.
inline std::vector<std::string> tokenize(std::string_view text) {
  const auto in = detail::to_unicode(text);
  std::vector<std::string> tokens;
  icu::UnicodeString current;
  for (int32_t i = 0; i < in.length();) {
    const UChar32 c = in.char32At(i);
    if (u_isUWhiteSpace(c)) {
      if (!current.isEmpty()) {
        tokens.push_back(detail::to_utf8(current));
        current.remove();
      }
    } else {
      current.append(c);
    }
    i += U16_LENGTH(c);
  }
  if (!current.isEmpty()) tokens.push_back(detail::to_utf8(current));
  return tokens;
}

/// Collapses whitespace runs to one space and trims both ends.
inline std::string normalize_whitespace(std::string_view text) {
  std::string out;
  for (const auto& token : tokenize(text)) {
    if (!out.empty()) out += ' ';
    out += token;
  }
  return out;
}

class StopwordList {
 public:
  StopwordList() = default;

  /// Entries must already be lowercase single tokens.
  explicit StopwordList(std::set<std::string> words) : words_(std::move(words)) {
    for (const auto& w : words_) {
      if (w.empty() || tokenize(w).size() != 1 || tokenize(w).front() != w)
        throw Error(ErrorCode::InvalidConfig, "stopword '" + w + "' is not a single token");
      if (case_fold(w) != w) throw Error(ErrorCode::InvalidConfig, "stopword '" + w + "' is not lowercase");
    }
  }

  bool contains(const std::string& token) const { return words_.count(token) != 0; }
  bool empty() const noexcept { return words_.empty(); }
  std::size_t size() const noexcept { return words_.size(); }
  const std::set<std::string>& words() const noexcept { return words_; }

 private:
  std::set<std::string> words_;
};

/// One token per line; blank lines and lines starting with '#' are skipped.
/// Entries are NFC-normalized and case-folded on the way in.
inline StopwordList parse_stopwords(std::string_view data) {
  std::set<std::string> words;
  std::istringstream in{std::string(data)};
  std::string line;
  while (std::getline(in, line)) {
    const auto trimmed = normalize_whitespace(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    words.insert(case_fold(nfc_normalize(trimmed)));
  }
  return StopwordList(std::move(words));
}

inline StopwordList load_stopwords(const std::filesystem::path& path) {
  return parse_stopwords(detail::read_file(path));
}

inline std::vector<std::string> filter_stopwords(const std::vector<std::string>& tokens,
                                                 const StopwordList& stopwords) {
  if (stopwords.empty()) throw Error(ErrorCode::EmptyStopwordList, "stopword filtering needs a non-empty list");
  std::vector<std::string> kept;
  kept.reserve(tokens.size());
  for (const auto& t : tokens)
    if (!stopwords.contains(t)) kept.push_back(t);
  return kept;
}

struct PreprocessConfig {
  StopwordList stopwords;
  bool filter_stopwords = true;
};

struct TokenizedDocument {
  std::string id;
  std::vector<std::string> tokens;

  bool operator==(const TokenizedDocument&) const = default;
};

inline std::vector<std::string> preprocess_text(std::string_view text, const PreprocessConfig& config) {
  auto tokens = tokenize(case_fold(remove_punctuation(nfc_normalize(text))));
  if (config.filter_stopwords) tokens = filter_stopwords(tokens, config.stopwords);
  return tokens;
}

inline TokenizedDocument preprocess(const LabeledDocument& doc, const PreprocessConfig& config) {
  return TokenizedDocument{doc.id, preprocess_text(doc.text, config)};
}

inline std::vector<TokenizedDocument> preprocess(const Corpus& corpus, const PreprocessConfig& config) {
  std::vector<TokenizedDocument> out;
  out.reserve(corpus.size());
  for (const auto& doc : corpus) out.push_back(preprocess(doc, config));
  return out;
}

}  // namespace senti

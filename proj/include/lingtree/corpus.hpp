#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace lingtree {

enum class TextEncoding { Utf8, Latin1 };

struct TokenizerConfig {
  // Tokens are maximal runs of ASCII letters, lowercased. An apostrophe
  // (' or the typographic U+2019) is kept when it sits between two
  // letters; digits, punctuation and anything non-ASCII separate tokens.
  bool keep_apostrophes = true;
  // Optional user-supplied exclusion list, applied after lowercasing.
  std::unordered_set<std::string> stopwords;
};

struct ManifestEntry {
  std::string id;
  int year = 0;
  std::vector<std::filesystem::path> paths;  // resolved against the manifest dir
};

struct CorpusManifest {
  std::vector<ManifestEntry> entries;  // in file order
  TextEncoding encoding = TextEncoding::Utf8;
};

struct TokenStream {
  std::string corpus_id;
  std::vector<std::string> tokens;
  std::size_t token_count() const { return tokens.size(); }
};

struct FrequencyTable {
  std::string corpus_id;
  std::unordered_map<std::string, std::uint64_t> counts;
  std::uint64_t total = 0;
};

// Manifest grammar (line oriented, '#' comments, blank lines ignored):
//
//   encoding utf-8            # optional, utf-8 (default) or latin1
//   corpus <id>               # opens a corpus block
//     year <integer>
//     path <file>             # one or more, relative to the manifest
//
// Throws data_error with a line number on parse failures, duplicate ids,
// or text files that do not resolve to a readable file.
CorpusManifest load_manifest(const std::filesystem::path& path);

// Reads a whole file and returns UTF-8 text. In Latin1 mode every byte is
// transcoded; in Utf8 mode malformed sequences raise data_error naming the
// byte offset.
std::string read_text_file(const std::filesystem::path& path, TextEncoding encoding);

// Deterministic for fixed (text, config). Validates UTF-8 as it scans and
// reports the byte offset of the first malformed sequence.
TokenStream tokenize(std::string_view raw_text, const TokenizerConfig& config = {},
                     std::string corpus_id = {});

FrequencyTable count_frequencies(const TokenStream& stream);

// Reads, decodes and tokenizes every file of one manifest entry, in order.
TokenStream load_corpus(const ManifestEntry& entry, TextEncoding encoding,
                        const TokenizerConfig& config = {});

}  // namespace lingtree

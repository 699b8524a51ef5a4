#include "lingtree/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "lingtree/errors.hpp"

namespace lingtree {
namespace {

bool is_ascii_letter(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

char to_lower_ascii(unsigned char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c);
}

std::string trim(std::string_view s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

// Returns the byte length of a valid UTF-8 sequence starting at `pos`,
// or 0 if the sequence is malformed.
std::size_t utf8_sequence_length(std::string_view s, std::size_t pos) {
  unsigned char c0 = s[pos];
  if (c0 < 0x80) return 1;
  std::size_t len;
  std::uint32_t cp;
  if ((c0 & 0xE0) == 0xC0) {
    len = 2;
    cp = c0 & 0x1F;
  } else if ((c0 & 0xF0) == 0xE0) {
    len = 3;
    cp = c0 & 0x0F;
  } else if ((c0 & 0xF8) == 0xF0) {
    len = 4;
    cp = c0 & 0x07;
  } else {
    return 0;
  }
  if (pos + len > s.size()) return 0;
  for (std::size_t i = 1; i < len; ++i) {
    unsigned char c = s[pos + i];
    if ((c & 0xC0) != 0x80) return 0;
    cp = (cp << 6) | (c & 0x3F);
  }
  // Reject overlong encodings and surrogate range.
  static constexpr std::uint32_t kMin[5] = {0, 0, 0x80, 0x800, 0x10000};
  if (cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return 0;
  return len;
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path, TextEncoding encoding) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open text file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw data_error("I/O failure reading: " + path.string());
  std::string raw = std::move(buf).str();
  if (encoding == TextEncoding::Utf8) {
    for (std::size_t i = 0; i < raw.size();) {
      std::size_t len = utf8_sequence_length(raw, i);
      if (len == 0)
        throw data_error(path.string() + ": invalid UTF-8 at byte offset " + std::to_string(i));
      i += len;
    }
    return raw;
  }
  // Latin1: transcode each byte to its code point.
  std::string out;
  out.reserve(raw.size());
  for (unsigned char c : raw) {
    if (c < 0x80) {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back(static_cast<char>(0xC0 | (c >> 6)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    }
  }
  return out;
}

TokenStream tokenize(std::string_view raw_text, const TokenizerConfig& config,
                     std::string corpus_id) {
  TokenStream stream;
  stream.corpus_id = std::move(corpus_id);
  std::string current;
  const bool filter = !config.stopwords.empty();

  auto flush = [&] {
    if (current.empty()) return;
    if (!filter || !config.stopwords.count(current)) stream.tokens.push_back(current);
    current.clear();
  };

  const std::size_t n = raw_text.size();
  for (std::size_t i = 0; i < n;) {
    unsigned char c = raw_text[i];
    if (is_ascii_letter(c)) {
      current.push_back(to_lower_ascii(c));
      ++i;
      continue;
    }
    // Apostrophe joins only with letters on both sides. U+2019 counts too.
    std::size_t apos_len = 0;
    if (c == '\'') {
      apos_len = 1;
    } else if (c == 0xE2 && i + 2 < n && static_cast<unsigned char>(raw_text[i + 1]) == 0x80 &&
               static_cast<unsigned char>(raw_text[i + 2]) == 0x99) {
      apos_len = 3;
    }
    if (apos_len > 0) {
      if (config.keep_apostrophes && !current.empty() && i + apos_len < n &&
          is_ascii_letter(static_cast<unsigned char>(raw_text[i + apos_len]))) {
        current.push_back('\'');
      } else {
        flush();
      }
      i += apos_len;
      continue;
    }
    std::size_t len = utf8_sequence_length(raw_text, i);
    if (len == 0)
      throw data_error("invalid UTF-8 at byte offset " + std::to_string(i));
    // Any other code point, ASCII or not, separates tokens.
    flush();
    i += len;
  }
  flush();
  return stream;
}

FrequencyTable count_frequencies(const TokenStream& stream) {
  FrequencyTable table;
  table.corpus_id = stream.corpus_id;
  for (const auto& tok : stream.tokens) ++table.counts[tok];
  table.total = stream.token_count();
  return table;
}

CorpusManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open manifest: " + path.string());
  const std::filesystem::path base = path.has_parent_path() ? path.parent_path() : ".";

  CorpusManifest manifest;
  std::unordered_set<std::string> seen_ids;
  ManifestEntry* current = nullptr;
  std::string line;
  int lineno = 0;

  auto fail = [&](const std::string& msg) {
    throw data_error(path.string() + ":" + std::to_string(lineno) + ": " + msg);
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::string text = trim(line);
    if (text.empty()) continue;

    std::istringstream ls(text);
    std::string key;
    ls >> key;
    std::string rest = trim(text.substr(key.size()));

    if (key == "encoding") {
      if (current) fail("'encoding' must appear before the first corpus block");
      if (rest == "utf-8" || rest == "utf8")
        manifest.encoding = TextEncoding::Utf8;
      else if (rest == "latin1" || rest == "latin-1")
        manifest.encoding = TextEncoding::Latin1;
      else
        fail("unknown encoding '" + rest + "' (expected utf-8 or latin1)");
    } else if (key == "corpus") {
      if (rest.empty()) fail("corpus block needs an id");
      if (rest.find_first_of(" \t") != std::string::npos) fail("corpus id must not contain whitespace");
      if (!seen_ids.insert(rest).second) fail("duplicate corpus id '" + rest + "'");
      manifest.entries.push_back(ManifestEntry{rest, 0, {}});
      current = &manifest.entries.back();
    } else if (key == "year") {
      if (!current) fail("'year' outside a corpus block");
      try {
        std::size_t used = 0;
        current->year = std::stoi(rest, &used);
        if (used != rest.size()) throw std::invalid_argument(rest);
      } catch (const std::exception&) {
        fail("invalid year '" + rest + "'");
      }
    } else if (key == "path") {
      if (!current) fail("'path' outside a corpus block");
      if (rest.empty()) fail("empty path");
      std::filesystem::path p(rest);
      if (p.is_relative()) p = base / p;
      if (!std::filesystem::is_regular_file(p)) fail("text file not found: " + p.string());
      current->paths.push_back(std::move(p));
    } else {
      fail("unknown key '" + key + "'");
    }
  }
  if (in.bad()) throw data_error("I/O failure reading manifest: " + path.string());

  if (manifest.entries.empty()) throw data_error(path.string() + ": manifest lists no corpora");
  for (const auto& e : manifest.entries)
    if (e.paths.empty())
      throw data_error(path.string() + ": corpus '" + e.id + "' lists no text files");
  return manifest;
}

TokenStream load_corpus(const ManifestEntry& entry, TextEncoding encoding,
                        const TokenizerConfig& config) {
  TokenStream stream;
  stream.corpus_id = entry.id;
  for (const auto& p : entry.paths) {
    TokenStream part = tokenize(read_text_file(p, encoding), config, entry.id);
    stream.tokens.insert(stream.tokens.end(), std::make_move_iterator(part.tokens.begin()),
                         std::make_move_iterator(part.tokens.end()));
  }
  return stream;
}

}  // namespace lingtree

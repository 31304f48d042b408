#include "courserec/content.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>

#include "courserec/errors.hpp"
#include "parallel.hpp"

namespace courserec {

namespace {

// Minimal UTF-8 decoding: returns the codepoint at `pos` and advances it.
// Malformed bytes decode to U+FFFD one byte at a time.
uint32_t next_codepoint(const std::string& s, size_t& pos) {
  const auto byte = [&](size_t i) { return static_cast<unsigned char>(s[i]); };
  const unsigned char b0 = byte(pos);
  size_t len = 1;
  uint32_t cp = 0xFFFD;
  if (b0 < 0x80) {
    cp = b0;
  } else if ((b0 >> 5) == 0x6 && pos + 1 < s.size()) {
    cp = (b0 & 0x1Fu) << 6 | (byte(pos + 1) & 0x3Fu);
    len = 2;
  } else if ((b0 >> 4) == 0xE && pos + 2 < s.size()) {
    cp = (b0 & 0x0Fu) << 12 | (byte(pos + 1) & 0x3Fu) << 6 | (byte(pos + 2) & 0x3Fu);
    len = 3;
  } else if ((b0 >> 3) == 0x1E && pos + 3 < s.size()) {
    cp = (b0 & 0x07u) << 18 | (byte(pos + 1) & 0x3Fu) << 12 |
         (byte(pos + 2) & 0x3Fu) << 6 | (byte(pos + 3) & 0x3Fu);
    len = 4;
  }
  pos += len;
  return cp;
}

void append_utf8(std::string& out, uint32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

// ASCII alphanumerics, Latin-1 letters, and everything from U+0100 up count
// as word characters; Latin-1 punctuation (¿ ¡ « » etc.) does not.
bool is_word_char(uint32_t cp) {
  if (cp < 0x80)
    return (cp >= '0' && cp <= '9') || (cp >= 'A' && cp <= 'Z') || (cp >= 'a' && cp <= 'z');
  if (cp < 0xC0) return false;
  if (cp == 0xD7 || cp == 0xF7) return false;  // × ÷
  return cp != 0xFFFD;
}

uint32_t lower(uint32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;  // À..Þ -> à..þ
  return cp;
}

std::string lower_token(const std::string& token) {
  std::string out;
  out.reserve(token.size());
  size_t pos = 0;
  while (pos < token.size()) append_utf8(out, lower(next_codepoint(token, pos)));
  return out;
}

}  // namespace

TokenFrequency tokenize(const std::string& document, const StopwordSet& stopwords) {
  TokenFrequency counts;
  std::string token;
  int token_len = 0;  // codepoints
  const auto flush = [&] {
    if (token_len >= 2 && !stopwords.contains(token)) ++counts[token];
    token.clear();
    token_len = 0;
  };
  size_t pos = 0;
  while (pos < document.size()) {
    const uint32_t cp = next_codepoint(document, pos);
    if (is_word_char(cp)) {
      append_utf8(token, lower(cp));
      ++token_len;
    } else {
      flush();
    }
  }
  flush();
  return counts;
}

StopwordSet load_stopwords(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open stopword file " + path);
  StopwordSet words;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto begin = line.find_first_not_of(" \t");
    if (begin == std::string::npos) continue;
    auto end = line.find_last_not_of(" \t");
    line = line.substr(begin, end - begin + 1);
    if (line.empty() || line[0] == '#') continue;
    words.insert(lower_token(line));
  }
  return words;
}

double content_similarity(const TokenFrequency& a, const TokenFrequency& b) {
  if (a.empty() || b.empty()) return 0.0;
  double total_a = 0.0, total_b = 0.0;
  for (const auto& [_, c] : a) total_a += c;
  for (const auto& [_, c] : b) total_b += c;
  // Relative frequencies over the union vocabulary; tokens missing from one
  // map contribute zero components.
  double dot = 0.0, norm_a = 0.0, norm_b = 0.0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() || ib != b.end()) {
    double fa = 0.0, fb = 0.0;
    if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
      fa = ia->second / total_a;
      ++ia;
    } else if (ia == a.end() || ib->first < ia->first) {
      fb = ib->second / total_b;
      ++ib;
    } else {
      fa = ia->second / total_a;
      fb = ib->second / total_b;
      ++ia;
      ++ib;
    }
    dot += fa * fb;
    norm_a += fa * fa;
    norm_b += fb * fb;
  }
  if (norm_a == 0.0 || norm_b == 0.0) return 0.0;
  const double cos = dot / (std::sqrt(norm_a) * std::sqrt(norm_b));
  return std::clamp(cos, 0.0, 1.0);
}

SimilarityMatrix content_similarity_matrix(const std::vector<TokenFrequency>& docs,
                                           int threads) {
  const int n = static_cast<int>(docs.size());
  SimilarityMatrix m(n);
  parallel_for(n, threads, [&](int i) {
    for (int j = i + 1; j < n; ++j) m.set(i, j, content_similarity(docs[i], docs[j]));
  });
  return m;
}

}  // namespace courserec

#pragma once

#include <map>
#include <string>
#include <unordered_set>
#include <vector>

#include "courserec/similarity.hpp"

namespace courserec {

// Lower-cased token -> occurrence count; stopwords never appear as keys.
using TokenFrequency = std::map<std::string, int>;

using StopwordSet = std::unordered_set<std::string>;

/// Splits UTF-8 text on non-letter/non-digit boundaries, lower-cases
/// (ASCII and Latin-1 letters), drops stopwords and tokens shorter than two
/// codepoints, and counts what remains. Codepoints beyond Latin-1 are kept
/// verbatim and treated as letters.
TokenFrequency tokenize(const std::string& document, const StopwordSet& stopwords);

/// Loads a stopword file: one token per line, lines starting with '#'
/// ignored, entries lower-cased. Throws IoError when unreadable.
StopwordSet load_stopwords(const std::string& path);

/// Cosine similarity of the two frequency vectors over their union
/// vocabulary, each l1-normalized first. Returns 0 when either map is empty.
/// Nonnegative counts keep the result in [0,1].
double content_similarity(const TokenFrequency& a, const TokenFrequency& b);

/// Pairwise content similarity table over a course collection.
SimilarityMatrix content_similarity_matrix(const std::vector<TokenFrequency>& docs,
                                           int threads = 1);

}  // namespace courserec

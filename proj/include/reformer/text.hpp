#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace reformer {

// Shared tokenizer for question masking and BLEU scoring.
// Splits on whitespace, then peels leading/trailing punctuation off each
// chunk into separate tokens. Original casing is preserved; callers
// lowercase where they need folded forms.
std::vector<std::string> tokenize(const std::string& text);

std::string to_lower(std::string s);

bool is_punctuation_token(const std::string& tok);
bool is_number_token(const std::string& tok);

std::string trim(const std::string& s);

// Truncate at the first sentence terminal (., !, ?) followed by more text.
std::string first_sentence(const std::string& s);

std::string join(const std::vector<std::string>& parts, const std::string& sep);

// Stable 128-bit FNV-1a digest rendered as 32 hex chars. Used for cache
// filenames and tree hashing; not cryptographic.
std::string hex_digest(const std::string& data);

}  // namespace reformer

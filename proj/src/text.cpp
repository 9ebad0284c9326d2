#include "reformer/text.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace reformer {

namespace {

bool is_punct_char(char c) {
  return std::ispunct(static_cast<unsigned char>(c)) != 0;
}

}  // namespace

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream iss(text);
  std::string chunk;
  while (iss >> chunk) {
    size_t begin = 0;
    size_t end = chunk.size();
    std::vector<std::string> leading;
    while (begin < end && is_punct_char(chunk[begin])) {
      leading.push_back(std::string(1, chunk[begin]));
      ++begin;
    }
    std::vector<std::string> trailing;
    while (end > begin && is_punct_char(chunk[end - 1])) {
      trailing.insert(trailing.begin(), std::string(1, chunk[end - 1]));
      --end;
    }
    for (auto& t : leading) out.push_back(std::move(t));
    if (end > begin) out.push_back(chunk.substr(begin, end - begin));
    for (auto& t : trailing) out.push_back(std::move(t));
  }
  return out;
}

std::string to_lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

bool is_punctuation_token(const std::string& tok) {
  return !tok.empty() &&
         std::all_of(tok.begin(), tok.end(), [](char c) { return is_punct_char(c); });
}

bool is_number_token(const std::string& tok) {
  if (tok.empty()) return false;
  bool digit_seen = false;
  bool dot_seen = false;
  for (size_t i = 0; i < tok.size(); ++i) {
    char c = tok[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digit_seen = true;
    } else if (c == '.' && !dot_seen) {
      dot_seen = true;
    } else {
      return false;
    }
  }
  return digit_seen;
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string first_sentence(const std::string& s) {
  std::string t = trim(s);
  for (size_t i = 0; i < t.size(); ++i) {
    char c = t[i];
    if (c == '.' || c == '!' || c == '?') {
      // Keep decimal points and abbreviations glued to digits.
      if (c == '.' && i + 1 < t.size() &&
          std::isdigit(static_cast<unsigned char>(t[i + 1]))) {
        continue;
      }
      return trim(t.substr(0, i + 1));
    }
    if (c == '\n') return trim(t.substr(0, i));
  }
  return t;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string hex_digest(const std::string& data) {
  auto fnv = [&](uint64_t offset) {
    uint64_t h = offset;
    for (unsigned char c : data) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    return h;
  };
  uint64_t a = fnv(0xcbf29ce484222325ULL);
  uint64_t b = fnv(0x84222325cbf29ce4ULL);
  char buf[33];
  std::snprintf(buf, sizeof(buf), "%016llx%016llx",
                static_cast<unsigned long long>(a),
                static_cast<unsigned long long>(b));
  return std::string(buf);
}

}  // namespace reformer

#include "fyp/common/text.h"

#include <cctype>
#include <cstdio>

namespace fyp {
namespace {

bool IsWordChar(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

char Fold(char c) {
  return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
}

}  // namespace

std::string ToLower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = Fold(c);
  return out;
}

bool ContainsPhrase(std::string_view text, std::string_view phrase) {
  if (phrase.empty() || phrase.size() > text.size()) return false;
  const std::size_t last = text.size() - phrase.size();
  for (std::size_t i = 0; i <= last; ++i) {
    if (i > 0 && IsWordChar(text[i - 1])) continue;
    std::size_t j = 0;
    while (j < phrase.size() && Fold(text[i + j]) == Fold(phrase[j])) ++j;
    if (j != phrase.size()) continue;
    const std::size_t end = i + phrase.size();
    if (end < text.size() && IsWordChar(text[end])) continue;
    return true;
  }
  return false;
}

std::string Join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out.append(sep);
    out.append(parts[i]);
  }
  return out;
}

std::vector<std::string> Split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    auto pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string FormatExact(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

}  // namespace fyp

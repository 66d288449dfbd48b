#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace fyp {

std::string ToLower(std::string_view s);

// True iff `phrase` occurs in `text` case-insensitively with non-alphanumeric
// characters (or string ends) on both sides. "recipes" matches "#recipes!"
// but not "recipesbook".
bool ContainsPhrase(std::string_view text, std::string_view phrase);

std::string Join(const std::vector<std::string>& parts, std::string_view sep);

std::vector<std::string> Split(std::string_view s, char sep);

// Shortest round-trippable rendering of a double ("%.17g"), used wherever
// floating state is serialized so digests are bit-exact.
std::string FormatExact(double value);

}  // namespace fyp

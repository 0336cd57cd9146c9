#ifndef SENSEBRIDGE_TEXT_HPP
#define SENSEBRIDGE_TEXT_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace sensebridge {

// Lowercases ASCII letters and the Cyrillic ranges used by the Russian data
// (А-Я -> а-я, Ё -> ё). Other codepoints pass through unchanged.
std::string lowercase(std::string_view text);

// Splits on ASCII whitespace runs. No punctuation handling; tokens are kept
// verbatim (use lowercase() first where case must not matter).
std::vector<std::string> whitespace_tokens(std::string_view text);

// Replaces every run of whitespace (including tabs and newlines) with a
// single space and trims the ends. Output is safe to embed in a TSV field.
std::string collapse_whitespace(std::string_view text);

// FNV-1a over the raw bytes.
std::uint64_t fnv1a(std::string_view text);

} // namespace sensebridge

#endif

#pragma once

#include <string>
#include <string_view>
#include <vector>

// Small UTF-8 text layer shared by the tokenizer, the title matcher and the
// parsers. Unicode-aware pieces (compatibility normalization, case folding,
// punctuation classes) are backed by ICU; everything else is plain byte work.
namespace biomt::text {

// NFKC. Invalid UTF-8 is replaced with U+FFFD.
std::string compat_normalize(std::string_view utf8);

// NFKC + full case folding in one pass (accents survive, case does not).
std::string compat_fold(std::string_view utf8);

// Splits normalized UTF-8 into tokens: runs of non-space, non-punctuation
// codepoints, with every punctuation/symbol codepoint emitted as its own
// token. Whitespace only separates.
std::vector<std::string> split_tokens(std::string_view normalized_utf8);

// Replaces punctuation/symbol codepoints with spaces, collapses whitespace
// runs to single ASCII spaces and trims the ends.
std::string strip_punct_collapse_ws(std::string_view normalized_utf8);

// ASCII-whitespace trim; enough for line-oriented corpus data.
std::string_view trim(std::string_view s);

std::vector<std::string> split(std::string_view s, char delim);

bool is_blank(std::string_view s);

} // namespace biomt::text

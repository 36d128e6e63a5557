#include "biomt/text.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include "biomt/errors.hpp"

namespace biomt::text {
namespace {

const icu::Normalizer2& nfkc_instance() {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* n = icu::Normalizer2::getNFKCInstance(status);
    if (U_FAILURE(status) || n == nullptr) {
        throw InternalError("ICU NFKC normalizer unavailable");
    }
    return *n;
}

const icu::Normalizer2& nfkc_casefold_instance() {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* n = icu::Normalizer2::getNFKCCasefoldInstance(status);
    if (U_FAILURE(status) || n == nullptr) {
        throw InternalError("ICU NFKC_Casefold normalizer unavailable");
    }
    return *n;
}

std::string run_normalizer(const icu::Normalizer2& norm, std::string_view utf8) {
    icu::UnicodeString input = icu::UnicodeString::fromUTF8(
        icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
    UErrorCode status = U_ZERO_ERROR;
    icu::UnicodeString output;
    norm.normalize(input, output, status);
    if (U_FAILURE(status)) {
        throw InternalError("ICU normalization failed");
    }
    std::string result;
    output.toUTF8String(result);
    return result;
}

bool is_separator_cp(UChar32 cp) {
    // Punctuation and symbols both count: MT tokenization splits "$5" and
    // "x=y" the same way it splits "end."
    return (U_GET_GC_MASK(cp) & (U_GC_P_MASK | U_GC_S_MASK)) != 0;
}

bool is_space_cp(UChar32 cp) {
    return u_isUWhiteSpace(cp) || cp == 0x0009 || cp == 0x000B || cp == 0x000C;
}

void append_cp(std::string& out, UChar32 cp) {
    char buf[U8_MAX_LENGTH];
    int32_t len = 0;
    UBool err = false;
    U8_APPEND(reinterpret_cast<uint8_t*>(buf), len, U8_MAX_LENGTH, cp, err);
    if (!err) out.append(buf, static_cast<std::size_t>(len));
}

template <typename Fn>
void for_each_cp(std::string_view utf8, Fn&& fn) {
    const auto* s = reinterpret_cast<const uint8_t*>(utf8.data());
    int32_t i = 0;
    const auto length = static_cast<int32_t>(utf8.size());
    while (i < length) {
        UChar32 cp;
        U8_NEXT(s, i, length, cp);
        if (cp < 0) cp = 0xFFFD;
        fn(cp);
    }
}

} // namespace

std::string compat_normalize(std::string_view utf8) {
    return run_normalizer(nfkc_instance(), utf8);
}

std::string compat_fold(std::string_view utf8) {
    return run_normalizer(nfkc_casefold_instance(), utf8);
}

std::vector<std::string> split_tokens(std::string_view normalized_utf8) {
    std::vector<std::string> tokens;
    std::string current;
    for_each_cp(normalized_utf8, [&](UChar32 cp) {
        if (is_space_cp(cp)) {
            if (!current.empty()) {
                tokens.push_back(std::move(current));
                current.clear();
            }
        } else if (is_separator_cp(cp)) {
            if (!current.empty()) {
                tokens.push_back(std::move(current));
                current.clear();
            }
            std::string punct;
            append_cp(punct, cp);
            tokens.push_back(std::move(punct));
        } else {
            append_cp(current, cp);
        }
    });
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

std::string strip_punct_collapse_ws(std::string_view normalized_utf8) {
    std::string out;
    bool pending_space = false;
    for_each_cp(normalized_utf8, [&](UChar32 cp) {
        if (is_space_cp(cp) || is_separator_cp(cp)) {
            pending_space = true;
            return;
        }
        if (pending_space && !out.empty()) out.push_back(' ');
        pending_space = false;
        append_cp(out, cp);
    });
    return out;
}

std::string_view trim(std::string_view s) {
    const char* ws = " \t\r\n\v\f";
    auto begin = s.find_first_not_of(ws);
    if (begin == std::string_view::npos) return {};
    auto end = s.find_last_not_of(ws);
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(std::string_view s, char delim) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        auto pos = s.find(delim, start);
        if (pos == std::string_view::npos) {
            parts.emplace_back(s.substr(start));
            break;
        }
        parts.emplace_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return parts;
}

bool is_blank(std::string_view s) {
    return trim(s).empty();
}

} // namespace biomt::text

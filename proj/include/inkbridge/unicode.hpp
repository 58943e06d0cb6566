#pragma once

#include <string>
#include <string_view>

namespace inkbridge::unicode {

/// Strict UTF-8 decode; throws ValidationError on malformed input, overlong
/// forms, surrogates, or code points above U+10FFFF.
std::u32string decode_utf8(std::string_view text);

std::string encode_utf8(std::u32string_view text);
std::string encode_utf8(char32_t c);

bool is_whitespace(char32_t c) noexcept;
bool is_ascii_punctuation(char32_t c) noexcept;
/// CJK and full-width punctuation: CJK Symbols and Punctuation block, full-width
/// ASCII punctuation, and the curly quotes, dashes, ellipsis and middle dot used
/// in Chinese typesetting.
bool is_cjk_punctuation(char32_t c) noexcept;

} // namespace inkbridge::unicode

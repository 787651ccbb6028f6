#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace ade::uni {

// Decodes UTF-8 into Unicode scalar values. Throws ade::Error on malformed
// input (overlong forms, surrogates, truncated sequences).
std::vector<char32_t> decode_utf8(const std::string& text);

// Returns empty and sets ok=false instead of throwing.
std::vector<char32_t> decode_utf8(const std::string& text, bool& ok);

std::string encode_utf8(const std::vector<char32_t>& scalars);
void append_utf8(std::string& out, char32_t cp);

// Number of bytes in the UTF-8 encoding of cp.
std::size_t utf8_len(char32_t cp);

// byte_offsets[i] = byte index of scalar i; one extra entry = total bytes.
std::vector<std::size_t> scalar_byte_offsets(const std::vector<char32_t>& scalars);

std::size_t scalar_length(const std::string& text);

// Substring by scalar indices [start, end).
std::string substr_scalars(const std::string& text, std::size_t start, std::size_t end);

// Character classes used by the pre-tokenizer (Unicode L*, N*, python-\s).
bool is_letter(char32_t cp);
bool is_number(char32_t cp);
bool is_space(char32_t cp);

// ASCII word characters [A-Za-z0-9_]; used by the tweet entity patterns.
bool is_word_char(char32_t cp);

}  // namespace ade::uni

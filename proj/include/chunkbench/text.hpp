#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace chunkbench {

// utf-8 string with a codepoint index. Every span in this library is a pair of
// codepoint offsets into one of these, so size parameters stay language-fair.
class Utf8Text {
public:
    Utf8Text() = default;
    explicit Utf8Text(std::string bytes);  // throws ValidationError on invalid utf-8

    std::size_t size() const { return offsets_.size(); }
    bool empty() const { return offsets_.empty(); }
    char32_t at(std::size_t i) const;

    // bytes of codepoints [cp_start, cp_end); view into the owned buffer
    std::string_view slice(std::size_t cp_start, std::size_t cp_end) const;
    std::string slice_str(std::size_t cp_start, std::size_t cp_end) const;

    const std::string& bytes() const { return bytes_; }

private:
    std::string bytes_;
    std::vector<std::uint32_t> offsets_;  // byte offset of each codepoint
};

// canonical composition; applied to all corpus text on load
std::string nfc_normalize(std::string_view utf8);

bool is_space_cp(char32_t c);
bool is_punct_cp(char32_t c);
bool is_upper_cp(char32_t c);
bool is_digit_cp(char32_t c);
char32_t lower_cp(char32_t c);
std::string lowercase_utf8(std::string_view utf8);
std::string encode_cp(char32_t c);

}  // namespace chunkbench

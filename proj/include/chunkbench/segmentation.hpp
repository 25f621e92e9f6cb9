#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "chunkbench/text.hpp"

namespace chunkbench {

// half-open codepoint range [start, end)
struct Span {
    std::size_t start = 0;
    std::size_t end = 0;
    std::size_t length() const { return end - start; }
    bool operator==(const Span&) const = default;
};

struct Token {
    std::string text;
    Span char_span;
};

struct TokenSequence {
    std::vector<Token> tokens;
    std::size_t size() const { return tokens.size(); }
    bool empty() const { return tokens.empty(); }
};

// sentence or paragraph; spans are trimmed of surrounding whitespace and the
// unit text is always non-empty
struct Unit {
    std::string text;
    Span char_span;
    std::size_t index = 0;
};

// words are maximal runs of non-whitespace non-punctuation codepoints; every
// punctuation codepoint is its own single-codepoint token, so all non-space
// characters land in exactly one token span
TokenSequence tokenize(const Utf8Text& text);
TokenSequence tokenize(std::string_view utf8);

std::vector<std::string> default_abbreviations();
// one entry per line; blank lines and lines starting with '#' are skipped
std::vector<std::string> load_abbreviations(const std::filesystem::path& p);

// paragraphs are separated by at least one blank line (whitespace-only lines
// count as blank); empty paragraphs are dropped
std::vector<Unit> split_paragraphs(const Utf8Text& text);
std::vector<Unit> split_paragraphs(std::string_view utf8);

// sentence boundaries fire after '.', '!' or '?' followed by whitespace and
// an uppercase letter or digit, or at end of text; a '.' whose preceding word
// is on the abbreviation list does not split. Paragraph breaks always split,
// so every sentence nests inside one paragraph.
std::vector<Unit> split_sentences(const Utf8Text& text);
std::vector<Unit> split_sentences(const Utf8Text& text, const std::vector<std::string>& abbreviations);
std::vector<Unit> split_sentences(std::string_view utf8);

// fixed-size windows at a fixed stride over n items; enumeration stops as soon
// as a window reaches the end, so no window is contained in its predecessor
std::vector<Span> enumerate_windows(std::size_t n, std::size_t window, std::size_t stride);

}  // namespace chunkbench

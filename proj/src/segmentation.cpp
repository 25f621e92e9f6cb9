#include "chunkbench/segmentation.hpp"

#include <unordered_set>

#include "chunkbench/errors.hpp"
#include "chunkbench/util.hpp"

namespace chunkbench {

TokenSequence tokenize(const Utf8Text& text) {
    TokenSequence seq;
    const std::size_t n = text.size();
    std::size_t i = 0;
    while (i < n) {
        char32_t c = text.at(i);
        if (is_space_cp(c)) {
            ++i;
            continue;
        }
        if (is_punct_cp(c)) {
            seq.tokens.push_back({text.slice_str(i, i + 1), {i, i + 1}});
            ++i;
            continue;
        }
        std::size_t start = i;
        while (i < n) {
            char32_t d = text.at(i);
            if (is_space_cp(d) || is_punct_cp(d)) break;
            ++i;
        }
        seq.tokens.push_back({text.slice_str(start, i), {start, i}});
    }
    return seq;
}

TokenSequence tokenize(std::string_view utf8) { return tokenize(Utf8Text{std::string(utf8)}); }

std::vector<std::string> default_abbreviations() {
    return {"mr",  "mrs", "ms",  "dr",   "prof", "sr",   "jr",   "st",   "vs",
            "etc", "e.g", "i.e", "cf",   "al",   "fig",  "eq",   "eqs",  "approx",
            "inc", "ltd", "co",  "corp", "dept", "univ", "jan",  "feb",  "mar",
            "apr", "jun", "jul", "aug",  "sep",  "sept", "oct",  "nov",  "dec"};
}

std::vector<std::string> load_abbreviations(const std::filesystem::path& p) {
    std::vector<std::string> out;
    for (auto& line : read_lines(p)) {
        std::string_view v = line;
        while (!v.empty() && (v.front() == ' ' || v.front() == '\t')) v.remove_prefix(1);
        while (!v.empty() && (v.back() == ' ' || v.back() == '\t')) v.remove_suffix(1);
        if (v.empty() || v.front() == '#') continue;
        out.push_back(lowercase_utf8(v));
    }
    return out;
}

namespace {

// trims [start, end) to the whitespace-free core; returns false if empty
bool trim_span(const Utf8Text& text, std::size_t& start, std::size_t& end) {
    while (start < end && is_space_cp(text.at(start))) ++start;
    while (end > start && is_space_cp(text.at(end - 1))) --end;
    return start < end;
}

void emit_unit(const Utf8Text& text, std::size_t start, std::size_t end, std::vector<Unit>& out) {
    if (!trim_span(text, start, end)) return;
    out.push_back({text.slice_str(start, end), {start, end}, out.size()});
}

using GuardSet = std::unordered_set<std::string>;

// lowercased non-whitespace run immediately before the period at `dot`,
// with leading punctuation stripped so "(cf." still matches "cf"
std::string word_before(const Utf8Text& text, std::size_t lo, std::size_t dot) {
    std::size_t b = dot;
    while (b > lo && !is_space_cp(text.at(b - 1))) --b;
    while (b < dot && is_punct_cp(text.at(b))) ++b;
    std::string w;
    for (std::size_t i = b; i < dot; ++i) w += encode_cp(lower_cp(text.at(i)));
    return w;
}

void split_sentences_in(const Utf8Text& text, std::size_t lo, std::size_t hi, const GuardSet& guard,
                        std::vector<Unit>& out) {
    std::size_t cur = lo;
    std::size_t i = lo;
    while (i < hi) {
        char32_t c = text.at(i);
        if (c == U'.' || c == U'!' || c == U'?') {
            std::size_t k = i + 1;
            while (k < hi && is_space_cp(text.at(k))) ++k;
            if (k >= hi) {
                emit_unit(text, cur, hi, out);
                return;
            }
            bool starts_sentence = (k > i + 1) && (is_upper_cp(text.at(k)) || is_digit_cp(text.at(k)));
            bool guarded = c == U'.' && guard.count(word_before(text, lo, i)) > 0;
            if (starts_sentence && !guarded) {
                emit_unit(text, cur, i + 1, out);
                cur = k;
                i = k;
                continue;
            }
        }
        ++i;
    }
    emit_unit(text, cur, hi, out);
}

}  // namespace

std::vector<Unit> split_paragraphs(const Utf8Text& text) {
    std::vector<Unit> out;
    const std::size_t n = text.size();
    std::size_t cur = 0;
    std::size_t i = 0;
    while (i < n) {
        if (text.at(i) == U'\n') {
            std::size_t j = i + 1;
            while (j < n) {
                char32_t c = text.at(j);
                if (c == U'\n') break;
                if (!is_space_cp(c)) break;
                ++j;
            }
            if (j < n && text.at(j) == U'\n') {
                emit_unit(text, cur, i, out);
                std::size_t k = j + 1;
                while (k < n && is_space_cp(text.at(k))) ++k;
                cur = k;
                i = k;
                continue;
            }
        }
        ++i;
    }
    emit_unit(text, cur, n, out);
    return out;
}

std::vector<Unit> split_paragraphs(std::string_view utf8) {
    return split_paragraphs(Utf8Text{std::string(utf8)});
}

std::vector<Unit> split_sentences(const Utf8Text& text, const std::vector<std::string>& abbreviations) {
    GuardSet guard(abbreviations.begin(), abbreviations.end());
    std::vector<Unit> out;
    for (const Unit& para : split_paragraphs(text))
        split_sentences_in(text, para.char_span.start, para.char_span.end, guard, out);
    for (std::size_t i = 0; i < out.size(); ++i) out[i].index = i;
    return out;
}

std::vector<Unit> split_sentences(const Utf8Text& text) {
    return split_sentences(text, default_abbreviations());
}

std::vector<Unit> split_sentences(std::string_view utf8) {
    return split_sentences(Utf8Text{std::string(utf8)});
}

std::vector<Span> enumerate_windows(std::size_t n, std::size_t window, std::size_t stride) {
    if (window < 1 || stride < 1) throw ContractError("window and stride must be >= 1");
    std::vector<Span> spans;
    if (n == 0) return spans;
    for (std::size_t start = 0;; start += stride) {
        std::size_t end = std::min(start + window, n);
        spans.push_back({start, end});
        if (end >= n) break;
    }
    return spans;
}

}  // namespace chunkbench

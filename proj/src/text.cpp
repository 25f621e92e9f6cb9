#include "chunkbench/text.hpp"

#include <unicode/uchar.h>
#include <unicode/unorm2.h>
#include <unicode/ustring.h>

#include "chunkbench/errors.hpp"

namespace chunkbench {

namespace {

// decodes one codepoint at byte offset i; returns the codepoint and advances i.
// rejects overlong forms, surrogates, and truncated sequences.
char32_t decode_one(const std::string& s, std::size_t& i) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    auto cont = [&](std::size_t k) {
        if (i + k >= s.size()) return false;
        return (static_cast<unsigned char>(s[i + k]) & 0xC0) == 0x80;
    };
    if (b0 < 0x80) {
        ++i;
        return b0;
    }
    if ((b0 & 0xE0) == 0xC0) {
        if (!cont(1)) throw ValidationError("invalid utf-8: truncated 2-byte sequence");
        char32_t cp = ((b0 & 0x1Fu) << 6) | (static_cast<unsigned char>(s[i + 1]) & 0x3Fu);
        if (cp < 0x80) throw ValidationError("invalid utf-8: overlong encoding");
        i += 2;
        return cp;
    }
    if ((b0 & 0xF0) == 0xE0) {
        if (!cont(1) || !cont(2)) throw ValidationError("invalid utf-8: truncated 3-byte sequence");
        char32_t cp = ((b0 & 0x0Fu) << 12) | ((static_cast<unsigned char>(s[i + 1]) & 0x3Fu) << 6) |
                      (static_cast<unsigned char>(s[i + 2]) & 0x3Fu);
        if (cp < 0x800) throw ValidationError("invalid utf-8: overlong encoding");
        if (cp >= 0xD800 && cp <= 0xDFFF) throw ValidationError("invalid utf-8: surrogate codepoint");
        i += 3;
        return cp;
    }
    if ((b0 & 0xF8) == 0xF0) {
        if (!cont(1) || !cont(2) || !cont(3))
            throw ValidationError("invalid utf-8: truncated 4-byte sequence");
        char32_t cp = ((b0 & 0x07u) << 18) | ((static_cast<unsigned char>(s[i + 1]) & 0x3Fu) << 12) |
                      ((static_cast<unsigned char>(s[i + 2]) & 0x3Fu) << 6) |
                      (static_cast<unsigned char>(s[i + 3]) & 0x3Fu);
        if (cp < 0x10000) throw ValidationError("invalid utf-8: overlong encoding");
        if (cp > 0x10FFFF) throw ValidationError("invalid utf-8: codepoint out of range");
        i += 4;
        return cp;
    }
    throw ValidationError("invalid utf-8: bad lead byte");
}

}  // namespace

Utf8Text::Utf8Text(std::string bytes) : bytes_(std::move(bytes)) {
    offsets_.reserve(bytes_.size());
    std::size_t i = 0;
    while (i < bytes_.size()) {
        offsets_.push_back(static_cast<std::uint32_t>(i));
        decode_one(bytes_, i);
    }
}

char32_t Utf8Text::at(std::size_t i) const {
    std::size_t pos = offsets_[i];
    return decode_one(bytes_, pos);
}

std::string_view Utf8Text::slice(std::size_t cp_start, std::size_t cp_end) const {
    if (cp_start > cp_end || cp_end > size()) throw ContractError("slice out of bounds");
    std::size_t b0 = cp_start < size() ? offsets_[cp_start] : bytes_.size();
    std::size_t b1 = cp_end < size() ? offsets_[cp_end] : bytes_.size();
    return std::string_view(bytes_).substr(b0, b1 - b0);
}

std::string Utf8Text::slice_str(std::size_t cp_start, std::size_t cp_end) const {
    return std::string(slice(cp_start, cp_end));
}

std::string nfc_normalize(std::string_view utf8) {
    if (utf8.empty()) return {};
    UErrorCode ec = U_ZERO_ERROR;
    const UNormalizer2* norm = unorm2_getNFCInstance(&ec);
    if (U_FAILURE(ec)) throw Error("icu: cannot obtain nfc normalizer");

    int32_t ulen = 0;
    ec = U_ZERO_ERROR;
    u_strFromUTF8(nullptr, 0, &ulen, utf8.data(), static_cast<int32_t>(utf8.size()), &ec);
    if (ec != U_BUFFER_OVERFLOW_ERROR && U_FAILURE(ec))
        throw ValidationError("invalid utf-8 input");
    std::vector<UChar> u16(static_cast<std::size_t>(ulen) + 1);
    ec = U_ZERO_ERROR;
    u_strFromUTF8(u16.data(), ulen + 1, nullptr, utf8.data(), static_cast<int32_t>(utf8.size()), &ec);
    if (U_FAILURE(ec)) throw ValidationError("invalid utf-8 input");

    ec = U_ZERO_ERROR;
    int32_t nlen = unorm2_normalize(norm, u16.data(), ulen, nullptr, 0, &ec);
    if (ec != U_BUFFER_OVERFLOW_ERROR && U_FAILURE(ec)) throw Error("icu: nfc preflight failed");
    std::vector<UChar> out16(static_cast<std::size_t>(nlen) + 1);
    ec = U_ZERO_ERROR;
    unorm2_normalize(norm, u16.data(), ulen, out16.data(), nlen + 1, &ec);
    if (U_FAILURE(ec)) throw Error("icu: nfc normalization failed");

    int32_t blen = 0;
    ec = U_ZERO_ERROR;
    u_strToUTF8(nullptr, 0, &blen, out16.data(), nlen, &ec);
    if (ec != U_BUFFER_OVERFLOW_ERROR && U_FAILURE(ec)) throw Error("icu: utf-8 preflight failed");
    std::string out(static_cast<std::size_t>(blen), '\0');
    ec = U_ZERO_ERROR;
    u_strToUTF8(out.data(), blen + 1, nullptr, out16.data(), nlen, &ec);
    if (U_FAILURE(ec)) throw Error("icu: utf-8 conversion failed");
    return out;
}

// Unicode White_Space property, so no-break spaces separate words too
bool is_space_cp(char32_t c) { return u_isUWhiteSpace(static_cast<UChar32>(c)) != 0; }
bool is_punct_cp(char32_t c) { return u_ispunct(static_cast<UChar32>(c)) != 0; }
bool is_upper_cp(char32_t c) { return u_isupper(static_cast<UChar32>(c)) != 0; }
bool is_digit_cp(char32_t c) { return u_isdigit(static_cast<UChar32>(c)) != 0; }
char32_t lower_cp(char32_t c) {
    return static_cast<char32_t>(u_tolower(static_cast<UChar32>(c)));
}

std::string encode_cp(char32_t c) {
    std::string out;
    if (c < 0x80) {
        out.push_back(static_cast<char>(c));
    } else if (c < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (c >> 6)));
        out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else if (c < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (c >> 12)));
        out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (c >> 18)));
        out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    }
    return out;
}

std::string lowercase_utf8(std::string_view utf8) {
    Utf8Text t{std::string(utf8)};
    std::string out;
    out.reserve(utf8.size());
    for (std::size_t i = 0; i < t.size(); ++i) out += encode_cp(lower_cp(t.at(i)));
    return out;
}

}  // namespace chunkbench

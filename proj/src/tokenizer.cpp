#include "sfbow/embedding_store.hpp"

namespace sfbow {
namespace {

struct CodePoint {
  char32_t value;
  std::size_t length;
};

// Invalid sequences decode as U+FFFD consuming one byte; such bytes are kept.
CodePoint decode_utf8(std::string_view s, std::size_t pos) {
  auto byte = [&](std::size_t i) { return static_cast<unsigned char>(s[i]); };
  unsigned char lead = byte(pos);
  if (lead < 0x80) return {lead, 1};
  std::size_t len = (lead >> 5) == 0x6 ? 2 : (lead >> 4) == 0xE ? 3 : (lead >> 3) == 0x1E ? 4 : 0;
  if (len == 0 || pos + len > s.size()) return {0xFFFD, 1};
  char32_t cp = lead & (0x7F >> len);
  for (std::size_t i = 1; i < len; ++i) {
    if ((byte(pos + i) & 0xC0) != 0x80) return {0xFFFD, 1};
    cp = (cp << 6) | (byte(pos + i) & 0x3F);
  }
  return {cp, len};
}

// Length of the code point ending at `end` (exclusive).
std::size_t last_code_point_length(std::string_view s, std::size_t end) {
  std::size_t start = end - 1;
  while (start > 0 && end - start < 4 && (static_cast<unsigned char>(s[start]) & 0xC0) == 0x80)
    --start;
  CodePoint cp = decode_utf8(s, start);
  return start + cp.length == end ? cp.length : 1;
}

bool is_space(char32_t c) {
  return c == ' ' || (c >= 0x09 && c <= 0x0D) || c == 0x85 || c == 0xA0 || c == 0x1680 ||
         (c >= 0x2000 && c <= 0x200A) || c == 0x2028 || c == 0x2029 || c == 0x202F ||
         c == 0x205F || c == 0x3000;
}

bool is_punct(char32_t c) {
  if (c < 0x80) {
    return (c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) || (c >= 0x5B && c <= 0x60) ||
           (c >= 0x7B && c <= 0x7E);
  }
  return c == 0xA1 || c == 0xA7 || c == 0xAB || c == 0xB6 || c == 0xB7 || c == 0xBB ||
         c == 0xBF || (c >= 0x2010 && c <= 0x2027) || (c >= 0x2030 && c <= 0x205E) ||
         (c >= 0x3001 && c <= 0x3003) || (c >= 0x3008 && c <= 0x3011);
}

void append_lower(std::string& out, std::string_view bytes, char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') {
    out.push_back(static_cast<char>(cp + 32));
  } else if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) {
    // Latin-1 uppercase letters map to lowercase by +0x20; both are 2-byte UTF-8.
    char32_t lower = cp + 0x20;
    out.push_back(static_cast<char>(0xC0 | (lower >> 6)));
    out.push_back(static_cast<char>(0x80 | (lower & 0x3F)));
  } else {
    out.append(bytes);
  }
}

void flush_token(std::string& raw, std::vector<std::string>& tokens) {
  std::string_view view(raw);
  while (!view.empty()) {
    CodePoint cp = decode_utf8(view, 0);
    if (!is_punct(cp.value)) break;
    view.remove_prefix(cp.length);
  }
  while (!view.empty()) {
    std::size_t len = last_code_point_length(view, view.size());
    if (!is_punct(decode_utf8(view, view.size() - len).value)) break;
    view.remove_suffix(len);
  }
  if (!view.empty()) tokens.emplace_back(view);
  raw.clear();
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  std::size_t pos = 0;
  while (pos < text.size()) {
    CodePoint cp = decode_utf8(text, pos);
    if (is_space(cp.value)) {
      flush_token(current, tokens);
    } else {
      append_lower(current, text.substr(pos, cp.length), cp.value);
    }
    pos += cp.length;
  }
  flush_token(current, tokens);
  return tokens;
}

}  // namespace sfbow

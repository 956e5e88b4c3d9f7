#include "finsler/spec_file.hpp"

#include <cctype>
#include <charconv>

#include "finsler/errors.hpp"

namespace finsler {

namespace {

class TomlReader {
public:
  explicit TomlReader(std::string_view text) : text_(text) {}

  nlohmann::json document() {
    nlohmann::json doc = nlohmann::json::object();
    while (true) {
      skip_blank_lines();
      if (pos_ >= text_.size()) break;
      if (text_[pos_] == '[') fail("tables are not supported");
      const std::string key = bare_key();
      skip_inline();
      expect('=');
      skip_inline();
      if (doc.contains(key)) fail("duplicate key '" + key + "'");
      doc[key] = value();
      skip_inline();
      if (pos_ < text_.size() && text_[pos_] == '#') skip_comment();
      if (pos_ < text_.size() && text_[pos_] != '\n' && text_[pos_] != '\r') fail("expected end of line");
    }
    return doc;
  }

private:
  [[noreturn]] void fail(const std::string& message) const { throw ParseError("spec file: " + message, pos_); }

  void skip_inline() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }

  void skip_comment() {
    while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
  }

  void skip_blank_lines() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c)))
        ++pos_;
      else if (c == '#')
        skip_comment();
      else
        break;
    }
  }

  void expect(char c) {
    if (pos_ >= text_.size() || text_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string bare_key() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_' || text_[pos_] == '-'))
      ++pos_;
    if (start == pos_) fail("expected key");
    return std::string(text_.substr(start, pos_ - start));
  }

  nlohmann::json value() {
    if (pos_ >= text_.size()) fail("expected value");
    const char c = text_[pos_];
    if (c == '"') return basic_string();
    if (c == '\'') return literal_string();
    if (c == '[') return array();
    if (text_.substr(pos_, 4) == "true") {
      pos_ += 4;
      return true;
    }
    if (text_.substr(pos_, 5) == "false") {
      pos_ += 5;
      return false;
    }
    return number();
  }

  nlohmann::json basic_string() {
    ++pos_;
    std::string s;
    while (true) {
      if (pos_ >= text_.size() || text_[pos_] == '\n') fail("unterminated string");
      const char c = text_[pos_++];
      if (c == '"') break;
      if (c == '\\') {
        if (pos_ >= text_.size()) fail("unterminated escape");
        const char e = text_[pos_++];
        switch (e) {
        case 'n': s += '\n'; break;
        case 't': s += '\t'; break;
        case '"': s += '"'; break;
        case '\\': s += '\\'; break;
        default: fail(std::string("unsupported escape '\\") + e + "'");
        }
      } else {
        s += c;
      }
    }
    return s;
  }

  nlohmann::json literal_string() {
    ++pos_;
    const std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != '\'' && text_[pos_] != '\n') ++pos_;
    if (pos_ >= text_.size() || text_[pos_] != '\'') fail("unterminated string");
    std::string s(text_.substr(start, pos_ - start));
    ++pos_;
    return s;
  }

  nlohmann::json array() {
    ++pos_;
    nlohmann::json arr = nlohmann::json::array();
    while (true) {
      skip_blank_lines();
      if (pos_ < text_.size() && text_[pos_] == ']') {
        ++pos_;
        return arr;
      }
      arr.push_back(value());
      skip_blank_lines();
      if (pos_ < text_.size() && text_[pos_] == ',') {
        ++pos_;
        continue;
      }
      skip_blank_lines();
      expect(']');
      return arr;
    }
  }

  nlohmann::json number() {
    std::size_t start = pos_;
    if (pos_ < text_.size() && text_[pos_] == '+') start = ++pos_;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + text_.size(), v);
    if (ec != std::errc() || ptr == text_.data() + start) fail("expected value");
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    return v;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

} // namespace

nlohmann::json parse_toml_document(std::string_view text) { return TomlReader(text).document(); }

} // namespace finsler

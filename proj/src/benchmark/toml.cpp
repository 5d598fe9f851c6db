#include <cctype>
#include <charconv>

#include "disambig/benchmark.hpp"

namespace disambig::benchmark {

using nlohmann::json;

namespace {

class TomlReader {
 public:
  explicit TomlReader(std::string_view text) : text_(text) {}

  json read() {
    json root = json::object();
    json* table = &root;
    while (!at_end()) {
      skip_space();
      if (eat('\n') || eat_comment()) continue;
      if (at_end()) break;
      if (peek() == '[') {
        table = header(root);
      } else {
        auto key = read_key();
        skip_space();
        expect('=');
        skip_space();
        if (table->contains(key)) fail("duplicate key '" + key + "'");
        (*table)[key] = read_value();
      }
      end_line();
    }
    return root;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ManifestError("line " + std::to_string(line_) + ": " + msg);
  }

  bool eat(char c) {
    if (peek() != c) return false;
    ++pos_;
    if (c == '\n') ++line_;
    return true;
  }

  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }

  void skip_space() {
    while (peek() == ' ' || peek() == '\t' || peek() == '\r') ++pos_;
  }

  bool eat_comment() {
    if (peek() != '#') return false;
    while (!at_end() && peek() != '\n') ++pos_;
    return true;
  }

  void end_line() {
    skip_space();
    eat_comment();
    if (!at_end() && !eat('\n')) fail("unexpected text after value");
  }

  std::string read_key() {
    if (peek() == '"') return read_basic_string();
    if (peek() == '\'') return read_literal_string();
    std::size_t start = pos_;
    while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-') {
      ++pos_;
    }
    if (start == pos_) fail("expected a key");
    return std::string(text_.substr(start, pos_ - start));
  }

  json* header(json& root) {
    expect('[');
    bool array = eat('[');
    skip_space();
    auto key = read_key();
    skip_space();
    expect(']');
    if (array) expect(']');
    if (array) {
      json& arr = root[key];
      if (arr.is_null()) arr = json::array();
      if (!arr.is_array()) fail("'" + key + "' is not an array of tables");
      arr.push_back(json::object());
      return &arr.back();
    }
    if (root.contains(key)) fail("table '" + key + "' defined twice");
    root[key] = json::object();
    return &root[key];
  }

  std::string read_basic_string() {
    expect('"');
    std::string out;
    for (;;) {
      if (at_end() || peek() == '\n') fail("unterminated string");
      char c = text_[pos_++];
      if (c == '"') return out;
      if (c != '\\') {
        out += c;
        continue;
      }
      if (at_end()) fail("unterminated string");
      char e = text_[pos_++];
      switch (e) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        default: fail(std::string("unsupported escape \\") + e);
      }
    }
  }

  std::string read_literal_string() {
    expect('\'');
    std::size_t start = pos_;
    while (!at_end() && peek() != '\'' && peek() != '\n') ++pos_;
    if (peek() != '\'') fail("unterminated string");
    std::string out(text_.substr(start, pos_ - start));
    ++pos_;
    return out;
  }

  json read_value() {
    char c = peek();
    if (c == '"') return read_basic_string();
    if (c == '\'') return read_literal_string();
    if (c == '[') {
      ++pos_;
      json arr = json::array();
      for (;;) {
        skip_space();
        if (eat(']')) return arr;
        arr.push_back(read_value());
        skip_space();
        if (eat(',')) continue;
        expect(']');
        return arr;
      }
    }
    std::size_t start = pos_;
    while (!at_end() && peek() != ',' && peek() != ']' && peek() != '\n' && peek() != '#' &&
           peek() != ' ' && peek() != '\t' && peek() != '\r') {
      ++pos_;
    }
    std::string tok(text_.substr(start, pos_ - start));
    if (tok.empty()) fail("expected a value");
    if (tok == "true") return true;
    if (tok == "false") return false;
    std::string digits;
    for (char ch : tok) {
      if (ch != '_') digits += ch;
    }
    const char* b = digits.data();
    const char* e = b + digits.size();
    if (*b == '+') ++b;
    std::int64_t i = 0;
    if (auto r = std::from_chars(b, e, i); r.ec == std::errc() && r.ptr == e) return i;
    double d = 0;
    if (auto r = std::from_chars(b, e, d); r.ec == std::errc() && r.ptr == e) return d;
    fail("cannot read value '" + tok + "'");
  }
};

}  // namespace

json parse_toml(std::string_view text) { return TomlReader(text).read(); }

}  // namespace disambig::benchmark

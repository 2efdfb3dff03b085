#include "nullsteer/json_locator.hpp"

#include <algorithm>
#include <cctype>

namespace nullsteer {

namespace {

class Scanner {
 public:
  Scanner(const std::string& text, std::map<std::string, int>& out) : t_(text), out_(out) {}

  void value(const std::string& pointer) {
    ws();
    if (i_ >= t_.size()) return;
    out_.emplace(pointer, line_);
    const char c = t_[i_];
    if (c == '{') {
      ++i_;
      ws();
      if (peek('}')) return;
      while (i_ < t_.size()) {
        ws();
        const std::string key = string_token();
        ws();
        if (peek(':')) value(pointer + "/" + escape(key));
        ws();
        if (peek(',')) continue;
        if (peek('}')) return;
        return;
      }
    } else if (c == '[') {
      ++i_;
      ws();
      if (peek(']')) return;
      for (std::size_t k = 0; i_ < t_.size(); ++k) {
        value(pointer + "/" + std::to_string(k));
        ws();
        if (peek(',')) continue;
        if (peek(']')) return;
        return;
      }
    } else if (c == '"') {
      string_token();
    } else {
      while (i_ < t_.size() && !std::isspace(static_cast<unsigned char>(t_[i_])) && t_[i_] != ',' &&
             t_[i_] != '}' && t_[i_] != ']') {
        ++i_;
      }
    }
  }

 private:
  static std::string escape(const std::string& key) {
    std::string out;
    for (char c : key) {
      if (c == '~') out += "~0";
      else if (c == '/') out += "~1";
      else out += c;
    }
    return out;
  }

  void ws() {
    while (i_ < t_.size() && std::isspace(static_cast<unsigned char>(t_[i_]))) {
      if (t_[i_] == '\n') ++line_;
      ++i_;
    }
  }

  bool peek(char c) {
    if (i_ < t_.size() && t_[i_] == c) {
      ++i_;
      return true;
    }
    return false;
  }

  std::string string_token() {
    std::string s;
    if (!peek('"')) return s;
    while (i_ < t_.size() && t_[i_] != '"') {
      if (t_[i_] == '\\' && i_ + 1 < t_.size()) ++i_;
      s += t_[i_++];
    }
    ++i_;
    return s;
  }

  const std::string& t_;
  std::map<std::string, int>& out_;
  std::size_t i_ = 0;
  int line_ = 1;
};

}  // namespace

std::map<std::string, int> locate_json_values(const std::string& text) {
  std::map<std::string, int> out;
  Scanner(text, out).value("");
  return out;
}

int line_of_offset(const std::string& text, std::size_t pos) {
  pos = std::min(pos, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

}  // namespace nullsteer

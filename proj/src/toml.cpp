#include "pavel/toml.hpp"

#include <cctype>
#include <fstream>
#include <limits>
#include <sstream>

#include "pavel/errors.hpp"

namespace pavel {

namespace {

struct Cursor {
  const std::string& s;
  size_t pos = 0;
  int line = 1;

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("config line " + std::to_string(line) + ": " + what);
  }
  bool eof() const { return pos >= s.size(); }
  char peek() const { return s[pos]; }
  void skip_ws(bool newlines) {
    while (!eof()) {
      char c = s[pos];
      if (c == '#') {
        while (!eof() && s[pos] != '\n') ++pos;
      } else if (c == '\n') {
        if (!newlines) return;
        ++line;
        ++pos;
      } else if (c == ' ' || c == '\t' || c == '\r') {
        ++pos;
      } else {
        return;
      }
    }
  }
};

nlohmann::json parse_value(Cursor& c);

std::string parse_string(Cursor& c) {
  char quote = c.peek();
  ++c.pos;
  std::string out;
  while (!c.eof() && c.peek() != quote) {
    char ch = c.peek();
    if (ch == '\n') c.fail("unterminated string");
    if (quote == '"' && ch == '\\') {
      ++c.pos;
      if (c.eof()) c.fail("dangling escape");
      switch (c.peek()) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        default: c.fail("unsupported escape sequence");
      }
    } else {
      out += ch;
    }
    ++c.pos;
  }
  if (c.eof()) c.fail("unterminated string");
  ++c.pos;
  return out;
}

nlohmann::json parse_array(Cursor& c) {
  ++c.pos;  // consume [
  auto arr = nlohmann::json::array();
  c.skip_ws(true);
  while (!c.eof() && c.peek() != ']') {
    arr.push_back(parse_value(c));
    c.skip_ws(true);
    if (!c.eof() && c.peek() == ',') {
      ++c.pos;
      c.skip_ws(true);
    }
  }
  if (c.eof()) c.fail("unterminated array");
  ++c.pos;
  return arr;
}

nlohmann::json parse_scalar(Cursor& c) {
  size_t start = c.pos;
  while (!c.eof() && !std::isspace(static_cast<unsigned char>(c.peek())) && c.peek() != ',' &&
         c.peek() != ']' && c.peek() != '#')
    ++c.pos;
  std::string tok = c.s.substr(start, c.pos - start);
  if (tok.empty()) c.fail("expected a value");
  if (tok == "true") return true;
  if (tok == "false") return false;
  if (tok.find_first_of(".eE") != std::string::npos &&
      tok.find_first_not_of("+-0123456789.eE") == std::string::npos) {
    try {
      size_t used;
      double d = std::stod(tok, &used);
      if (used == tok.size()) return d;
    } catch (...) {
    }
  }
  if (tok.find_first_not_of("+-0123456789_") == std::string::npos) {
    std::string digits;
    for (char ch : tok)
      if (ch != '_') digits += ch;
    try {
      size_t used;
      int64_t v = std::stoll(digits, &used);
      if (used == digits.size()) return v;
    } catch (...) {
    }
  }
  if (tok == "inf" || tok == "+inf") return std::numeric_limits<double>::infinity();
  if (tok == "-inf") return -std::numeric_limits<double>::infinity();
  c.fail("cannot parse value '" + tok + "'");
}

nlohmann::json parse_value(Cursor& c) {
  if (c.eof()) c.fail("expected a value");
  char ch = c.peek();
  if (ch == '"' || ch == '\'') return parse_string(c);
  if (ch == '[') return parse_array(c);
  return parse_scalar(c);
}

std::string parse_key(Cursor& c) {
  if (!c.eof() && (c.peek() == '"' || c.peek() == '\'')) return parse_string(c);
  size_t start = c.pos;
  while (!c.eof() &&
         (std::isalnum(static_cast<unsigned char>(c.peek())) || c.peek() == '_' || c.peek() == '-'))
    ++c.pos;
  if (c.pos == start) c.fail("expected a key");
  return c.s.substr(start, c.pos - start);
}

}  // namespace

nlohmann::json parse_toml(const std::string& text) {
  nlohmann::json root = nlohmann::json::object();
  nlohmann::json* table = &root;
  Cursor c{text};
  for (;;) {
    c.skip_ws(true);
    if (c.eof()) break;
    if (c.peek() == '[') {
      ++c.pos;
      table = &root;
      for (;;) {
        c.skip_ws(false);
        std::string part = parse_key(c);
        table = &(*table)[part];
        if (!table->is_object() && !table->is_null())
          c.fail("section [" + part + "] conflicts with an existing key");
        if (table->is_null()) *table = nlohmann::json::object();
        c.skip_ws(false);
        if (!c.eof() && c.peek() == '.') {
          ++c.pos;
          continue;
        }
        break;
      }
      if (c.eof() || c.peek() != ']') c.fail("expected ']' after section name");
      ++c.pos;
      continue;
    }
    std::string key = parse_key(c);
    c.skip_ws(false);
    if (c.eof() || c.peek() != '=') c.fail("expected '=' after key '" + key + "'");
    ++c.pos;
    c.skip_ws(false);
    (*table)[key] = parse_value(c);
    c.skip_ws(false);
    if (!c.eof() && c.peek() != '\n' && c.peek() != '#')
      c.fail("unexpected trailing characters after value for '" + key + "'");
  }
  return root;
}

nlohmann::json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
    try {
      return nlohmann::json::parse(ss.str());
    } catch (const std::exception& e) {
      throw ConfigError(std::string("invalid JSON config: ") + e.what());
    }
  }
  return parse_toml(ss.str());
}

}  // namespace pavel

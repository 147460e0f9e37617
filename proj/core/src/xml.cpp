#include "scenoforge/xml.hpp"

#include <fmt/format.h>

#include <cctype>

namespace scenoforge::xml {

const Attribute* Element::find_attribute(std::string_view name) const {
  for (const auto& attr : attributes) {
    if (attr.name == name) return &attr;
  }
  return nullptr;
}

std::optional<std::string> Element::attribute(std::string_view name) const {
  const Attribute* attr = find_attribute(name);
  if (!attr) return std::nullopt;
  return attr->value;
}

std::vector<const Element*> Element::child_elements() const {
  std::vector<const Element*> out;
  for (const auto& item : children) {
    if (item.kind == Item::Kind::element) out.push_back(&item.element);
  }
  return out;
}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  ParseResult run() {
    skip_prolog();
    skip_misc();
    if (failed_) return result();
    if (eof()) return fail("document contains no root element");
    Element root;
    if (!parse_element(root)) return result();
    skip_misc();
    if (failed_) return result();
    if (!eof()) return fail("trailing content after the root element");
    ParseResult ok;
    ok.root = std::move(root);
    return ok;
  }

 private:
  bool eof() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }
  bool has(std::string_view token) const {
    return text_.substr(pos_, token.size()) == token;
  }

  void advance() {
    if (text_[pos_] == '\n') ++line_;
    ++pos_;
  }

  void skip_whitespace() {
    while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) advance();
  }

  void skip_prolog() {
    skip_whitespace();
    if (has("<?xml")) {
      while (!eof() && !has("?>")) advance();
      if (eof()) {
        fail("unterminated XML declaration");
        return;
      }
      pos_ += 2;
    }
  }

  // Whitespace and comments between top-level constructs.
  void skip_misc() {
    while (true) {
      skip_whitespace();
      if (has("<!--")) {
        std::string ignored;
        if (!parse_comment(ignored)) return;
        continue;
      }
      return;
    }
  }

  ParseResult fail(std::string message) {
    if (!failed_) {
      failed_ = true;
      error_ = {std::move(message), line_, pos_};
    }
    return result();
  }

  ParseResult result() const {
    ParseResult r;
    r.error = error_;
    return r;
  }

  bool parse_comment(std::string& out) {
    pos_ += 4;  // "<!--"
    const std::size_t start = pos_;
    while (!eof()) {
      if (has("-->")) {
        out = std::string(text_.substr(start, pos_ - start));
        pos_ += 3;
        return true;
      }
      advance();
    }
    fail("unterminated comment");
    return false;
  }

  bool parse_name(std::string& out) {
    const std::size_t start = pos_;
    while (!eof()) {
      const char c = peek();
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
          c == '.' || c == ':') {
        advance();
      } else {
        break;
      }
    }
    if (pos_ == start) {
      fail("expected a name");
      return false;
    }
    out = std::string(text_.substr(start, pos_ - start));
    return true;
  }

  bool decode_entities(std::string_view raw, std::string& out) {
    out.clear();
    out.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (raw[i] != '&') {
        out.push_back(raw[i]);
        continue;
      }
      const std::size_t end = raw.find(';', i);
      if (end == std::string_view::npos) {
        fail("unterminated entity reference");
        return false;
      }
      const std::string_view entity = raw.substr(i + 1, end - i - 1);
      if (entity == "amp") out.push_back('&');
      else if (entity == "lt") out.push_back('<');
      else if (entity == "gt") out.push_back('>');
      else if (entity == "quot") out.push_back('"');
      else if (entity == "apos") out.push_back('\'');
      else {
        fail(fmt::format("unsupported entity reference '&{};'", entity));
        return false;
      }
      i = end;
    }
    return true;
  }

  bool parse_attributes(Element& element) {
    while (true) {
      skip_whitespace();
      if (eof()) {
        fail(fmt::format("unterminated start tag <{}>", element.name));
        return false;
      }
      const char c = peek();
      if (c == '>' || c == '/' || c == '?') return true;
      Attribute attr;
      if (!parse_name(attr.name)) return false;
      skip_whitespace();
      if (eof() || peek() != '=') {
        fail(fmt::format("attribute '{}' is missing '='", attr.name));
        return false;
      }
      advance();
      skip_whitespace();
      if (eof() || (peek() != '"' && peek() != '\'')) {
        fail(fmt::format("attribute '{}' value must be quoted", attr.name));
        return false;
      }
      const char quote = peek();
      advance();
      const std::size_t start = pos_;
      while (!eof() && peek() != quote) {
        if (peek() == '<') {
          fail(fmt::format("raw '<' inside value of attribute '{}'", attr.name));
          return false;
        }
        advance();
      }
      if (eof()) {
        fail(fmt::format("unterminated value for attribute '{}'", attr.name));
        return false;
      }
      if (!decode_entities(text_.substr(start, pos_ - start), attr.value)) return false;
      advance();  // closing quote
      for (const auto& existing : element.attributes) {
        if (existing.name == attr.name) {
          fail(fmt::format("attribute '{}' appears twice on <{}>", attr.name,
                           element.name));
          return false;
        }
      }
      element.attributes.push_back(std::move(attr));
    }
  }

  bool parse_element(Element& out) {
    if (eof() || peek() != '<') {
      fail("expected '<'");
      return false;
    }
    out.line = line_;
    advance();
    if (!parse_name(out.name)) return false;
    if (!parse_attributes(out)) return false;
    if (has("/>")) {
      pos_ += 2;
      return true;
    }
    if (peek() != '>') {
      fail(fmt::format("malformed start tag <{}>", out.name));
      return false;
    }
    advance();
    // Children until the matching end tag.
    std::string pending_text;
    auto flush_text = [&]() {
      std::string trimmed;
      bool only_space = true;
      for (char c : pending_text) {
        if (!std::isspace(static_cast<unsigned char>(c))) only_space = false;
      }
      if (!only_space) {
        Item item;
        item.kind = Item::Kind::text;
        item.text = pending_text;
        out.children.push_back(std::move(item));
      }
      pending_text.clear();
    };
    while (true) {
      if (eof()) {
        fail(fmt::format("element <{}> is never closed", out.name));
        return false;
      }
      if (has("</")) {
        flush_text();
        pos_ += 2;
        std::string close_name;
        if (!parse_name(close_name)) return false;
        skip_whitespace();
        if (eof() || peek() != '>') {
          fail(fmt::format("malformed end tag </{}>", close_name));
          return false;
        }
        advance();
        if (close_name != out.name) {
          fail(fmt::format("mismatched end tag: expected </{}>, found </{}>",
                           out.name, close_name));
          return false;
        }
        return true;
      }
      if (has("<!--")) {
        flush_text();
        Item item;
        item.kind = Item::Kind::comment;
        if (!parse_comment(item.text)) return false;
        out.children.push_back(std::move(item));
        continue;
      }
      if (has("<!")) {
        fail("DTD and CDATA sections are not supported");
        return false;
      }
      if (peek() == '<') {
        flush_text();
        Item item;
        item.kind = Item::Kind::element;
        if (!parse_element(item.element)) return false;
        out.children.push_back(std::move(item));
        continue;
      }
      if (peek() == '&') {
        const std::size_t end = text_.find(';', pos_);
        if (end == std::string_view::npos) {
          fail("unterminated entity reference");
          return false;
        }
        std::string decoded;
        if (!decode_entities(text_.substr(pos_, end - pos_ + 1), decoded)) return false;
        pending_text += decoded;
        while (pos_ <= end) advance();
        continue;
      }
      pending_text.push_back(peek());
      advance();
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  bool failed_ = false;
  std::optional<ParseError> error_;
};

}  // namespace

ParseResult parse(std::string_view text) { return Parser(text).run(); }

std::string escape_attribute(std::string_view value) {
  std::string out;
  out.reserve(value.size());
  for (char c : value) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string escape_comment(std::string_view value) {
  std::string out;
  out.reserve(value.size());
  for (std::size_t i = 0; i < value.size(); ++i) {
    if (value[i] == '-' && i + 1 < value.size() && value[i + 1] == '-') {
      out += "- ";
      continue;
    }
    out.push_back(value[i]);
  }
  return out;
}

}  // namespace scenoforge::xml

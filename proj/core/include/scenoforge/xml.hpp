#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace scenoforge::xml {

struct Attribute {
  std::string name;
  std::string value;
};

struct Item;

struct Element {
  std::string name;
  std::vector<Attribute> attributes;
  std::vector<Item> children;
  int line = 0;

  const Attribute* find_attribute(std::string_view name) const;
  std::optional<std::string> attribute(std::string_view name) const;
  // Child elements only, in document order.
  std::vector<const Element*> child_elements() const;
};

struct Item {
  enum class Kind { element, comment, text };
  Kind kind = Kind::element;
  Element element;   // kind == element
  std::string text;  // comment or text payload
};

struct ParseError {
  std::string message;
  int line = 1;
  std::size_t offset = 0;
};

// Minimal strict XML reader for the SUMO-style subset this project emits
// and consumes: one root element, attributes, comments, character data.
// No DTD, CDATA, processing instructions (other than an optional leading
// <?xml ... ?>), or namespaces. All failures carry line information.
struct ParseResult {
  std::optional<Element> root;
  std::optional<ParseError> error;

  bool ok() const { return root.has_value(); }
};

ParseResult parse(std::string_view text);

// Attribute-value escaping for writers ('&', '<', '>', '"').
std::string escape_attribute(std::string_view value);
// Comment payloads cannot contain "--"; writers replace it.
std::string escape_comment(std::string_view value);

}  // namespace scenoforge::xml

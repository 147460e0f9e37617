#include <string>

#include "doctest.h"
#include "scenoforge/xml.hpp"

using namespace scenoforge;

TEST_CASE("well-formed document with attributes, children and comments") {
  const auto result = xml::parse(
      "<?xml version=\"1.0\"?>\n"
      "<!-- header -->\n"
      "<root a=\"1\" b='two'>\n"
      "  <!-- note -->\n"
      "  <child x=\"-3.5\"/>\n"
      "  <child x=\"4\">text</child>\n"
      "</root>\n");
  REQUIRE(result.ok());
  const xml::Element& root = *result.root;
  CHECK(root.name == "root");
  REQUIRE(root.attributes.size() == 2);
  CHECK(root.attributes[0].name == "a");
  CHECK(root.attributes[1].value == "two");
  const auto children = root.child_elements();
  REQUIRE(children.size() == 2);
  CHECK(children[0]->attribute("x") == "-3.5");
  bool saw_comment = false;
  bool saw_text = false;
  for (const auto& item : root.children) {
    if (item.kind == xml::Item::Kind::comment) saw_comment = true;
  }
  for (const auto& item : children[1]->children) {
    if (item.kind == xml::Item::Kind::text && item.text == "text") saw_text = true;
  }
  CHECK(saw_comment);
  CHECK(saw_text);
}

TEST_CASE("attribute entities decode and re-encode") {
  const auto result = xml::parse("<e v=\"a &amp; b &lt;&gt; &quot;c&quot;\"/>");
  REQUIRE(result.ok());
  CHECK(result.root->attribute("v") == "a & b <> \"c\"");
  CHECK(xml::escape_attribute("a & b <> \"c\"") ==
        "a &amp; b &lt;&gt; &quot;c&quot;");
}

TEST_CASE("malformed inputs are rejected") {
  SUBCASE("unclosed element") {
    CHECK(!xml::parse("<a>\n<b>\n</a>").ok());
  }
  SUBCASE("mismatched end tag") {
    const auto result = xml::parse("<a>\n</b>");
    REQUIRE(!result.ok());
    CHECK(result.error->line == 2);
  }
  SUBCASE("unterminated comment") {
    CHECK(!xml::parse("<a><!-- oops </a>").ok());
  }
  SUBCASE("unquoted attribute") {
    CHECK(!xml::parse("<a x=1/>").ok());
  }
  SUBCASE("duplicate attribute") {
    CHECK(!xml::parse("<a x=\"1\" x=\"2\"/>").ok());
  }
  SUBCASE("trailing garbage") {
    CHECK(!xml::parse("<a/> trailing").ok());
  }
  SUBCASE("two roots") {
    CHECK(!xml::parse("<a/><b/>").ok());
  }
  SUBCASE("empty input") {
    CHECK(!xml::parse("   ").ok());
  }
  SUBCASE("unknown entity") {
    CHECK(!xml::parse("<a v=\"x &unknown; y\"/>").ok());
  }
}

TEST_CASE("nested structures keep document order") {
  const auto result =
      xml::parse("<net><edge id=\"e\"><lane id=\"e_0\"/><lane id=\"e_1\"/></edge>"
                 "<junction id=\"j\"/></net>");
  REQUIRE(result.ok());
  const auto children = result.root->child_elements();
  REQUIRE(children.size() == 2);
  CHECK(children[0]->name == "edge");
  CHECK(children[1]->name == "junction");
  CHECK(children[0]->child_elements().size() == 2);
  CHECK(children[0]->child_elements()[1]->attribute("id") == "e_1");
}

TEST_CASE("comment escaping never emits a double hyphen") {
  const std::string escaped = xml::escape_comment("a -- b");
  CHECK(escaped.find("--") == std::string::npos);
  CHECK(xml::parse("<a><!--" + escaped + "--></a>").ok());
}

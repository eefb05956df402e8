// Copyright 2026 The xmlseal Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <random>

#include "support.hpp"
#include "xmlseal/c14n.hpp"
#include "xmlseal/error.hpp"

namespace xmlseal {
namespace {

std::string canon(std::string_view text, const xml::NodePath& subtree = {},
                  const std::optional<xml::NodePath>& exclude = std::nullopt) {
  return c14n::canonicalize(xml::parse(text), subtree, exclude).bytes;
}

TEST(C14n, SortsDeclarationsThenAttributes) {
  EXPECT_EQ(canon("<r xmlns:b=\"urn:b\" xmlns:a=\"urn:a\" z=\"1\" b:y=\"2\" a:x=\"3\"/>"),
            "<r xmlns:a=\"urn:a\" xmlns:b=\"urn:b\" z=\"1\" a:x=\"3\" b:y=\"2\"></r>");
}

TEST(C14n, ExpandsEmptyElementsAndDropsComments) {
  EXPECT_EQ(canon("<r><!-- gone --><e/>t<!-- gone --></r>"), "<r><e></e>t</r>");
}

TEST(C14n, EscapesTextAndAttributes) {
  const auto doc = xml::Document([] {
    auto e = xml::make_element("", "", "r", "a&b<c>d\r\"'");
    e.set_attribute("v", "\"\t\n\r<&>'");
    return e;
  }());
  EXPECT_EQ(c14n::canonicalize(doc).bytes,
            "<r v=\"&quot;&#x9;&#xA;&#xD;&lt;&amp;>'\">a&amp;b&lt;c&gt;d&#xD;\"'</r>");
}

TEST(C14n, ApexCarriesInheritedNamespaces) {
  const std::string doc =
      "<r xmlns=\"urn:d\" xmlns:p=\"urn:p\"><p:c x=\"1\"><d xmlns:q=\"urn:q\"/></p:c></r>";
  EXPECT_EQ(canon(doc, {0}),
            "<p:c xmlns=\"urn:d\" xmlns:p=\"urn:p\" x=\"1\"><d xmlns:q=\"urn:q\"></d></p:c>");
}

TEST(C14n, ExcludesSubtree) {
  EXPECT_EQ(canon("<r><a>1</a><sig>x</sig><b/></r>", {}, xml::NodePath{1}),
            "<r><a>1</a><b></b></r>");
  // An exclusion outside the canonicalized subtree is ignored.
  EXPECT_EQ(canon("<r><a>1</a><b/></r>", {0}, xml::NodePath{1}), "<a>1</a>");
}

TEST(C14n, RejectsUnresolvedPaths) {
  EXPECT_THROW(canon("<r/>", {4}), Error);
  EXPECT_THROW(canon("<r><a/></r>", {}, xml::NodePath{7}), Error);
}

TEST(C14n, AdvertisesInclusiveC14nIdentifier) {
  EXPECT_EQ(c14n::canonicalize(xml::parse("<r/>")).algorithm,
            "http://www.w3.org/TR/2001/REC-xml-c14n-20010315");
}

TEST(C14n, PermutationInvariant) {
  testing::DocGenerator gen(7);
  std::mt19937_64 rng(7);
  for (int i = 0; i < 100; ++i) {
    const auto doc = gen.next();
    const auto expected = c14n::canonicalize(doc).bytes;
    for (int k = 0; k < 3; ++k) {
      EXPECT_EQ(c14n::canonicalize(testing::permute(doc, rng)).bytes, expected);
    }
  }
}

TEST(C14n, IdempotentOnCorpus) {
  for (const auto& entry : std::filesystem::directory_iterator(testing::corpus_dir())) {
    SCOPED_TRACE(entry.path().filename().string());
    const auto once = c14n::canonicalize(xml::parse(testing::read_text(entry.path()))).bytes;
    EXPECT_EQ(c14n::canonicalize(xml::parse(once)).bytes, once);
  }
}

TEST(C14n, EquivalentSerializationsAgree) {
  EXPECT_EQ(canon("<r b='2' a=\"1\"><e></e></r>"), canon("<r  a=\"1\"\n b=\"2\"><e/></r>"));
  EXPECT_EQ(canon("<r>&#x41;&amp;<![CDATA[<]]></r>"), canon("<r>A&amp;&lt;</r>"));
}

}  // namespace
}  // namespace xmlseal

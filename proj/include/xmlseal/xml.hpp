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

// Namespace-aware XML tree for the subset the toolkit accepts: elements,
// attributes, namespace declarations, character data and comments.
// DTDs, processing instructions and entity declarations are rejected at
// parse time; CDATA sections become ordinary text.
//
// All operations are value-semantic: mutators return a new Document and
// never touch their input.

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace xmlseal::xml {

inline constexpr std::string_view kXmlNamespace =
    "http://www.w3.org/XML/1998/namespace";
inline constexpr std::string_view kWsuNamespace =
    "http://docs.oasis-open.org/wss/2004/01/"
    "oasis-200401-wss-wssecurity-utility-1.0.xsd";

struct Attribute {
  std::string prefix;     // empty when unprefixed
  std::string namespace_uri;  // empty when in no namespace
  std::string local_name;
  std::string value;

  std::string qualified_name() const {
    return prefix.empty() ? local_name : prefix + ":" + local_name;
  }
};

struct NamespaceDecl {
  std::string prefix;  // empty for the default namespace
  std::string uri;     // empty for an undeclaration (xmlns="")
};

struct Node;

struct Element {
  std::string prefix;
  std::string namespace_uri;
  std::string local_name;
  std::vector<NamespaceDecl> namespaces;
  std::vector<Attribute> attributes;
  std::vector<Node> children;

  std::string qualified_name() const {
    return prefix.empty() ? local_name : prefix + ":" + local_name;
  }

  bool is(std::string_view ns, std::string_view local) const {
    return namespace_uri == ns && local_name == local;
  }

  const Attribute* find_attribute(std::string_view ns,
                                  std::string_view local) const;
  /// Value of the unqualified attribute `local`, if present.
  std::optional<std::string> attribute(std::string_view local) const;
  /// Sets (or replaces) an unqualified attribute.
  void set_attribute(std::string_view local, std::string value);
  /// The element's `Id` or `wsu:Id` value.
  std::optional<std::string> id() const;

  /// Element children in order, skipping text and comments.
  std::vector<const Element*> element_children() const;
  const Element* first_child(std::string_view ns,
                             std::string_view local) const;
  /// Concatenated text of direct text children.
  std::string text() const;
};

struct Text {
  std::string value;
};

/// Comments survive parsing so that callers can see them, but canonical
/// forms skip them.
struct Comment {
  std::string value;
};

struct Node {
  std::variant<Element, Text, Comment> value;

  Node(Element e) : value(std::move(e)) {}
  Node(Text t) : value(std::move(t)) {}
  Node(Comment c) : value(std::move(c)) {}

  const Element* element() const { return std::get_if<Element>(&value); }
  Element* element() { return std::get_if<Element>(&value); }
  const Text* text() const { return std::get_if<Text>(&value); }
  const Comment* comment() const { return std::get_if<Comment>(&value); }
};

inline Element make_element(std::string_view prefix, std::string_view ns,
                            std::string_view local) {
  Element e;
  e.prefix = prefix;
  e.namespace_uri = ns;
  e.local_name = local;
  return e;
}

inline Element make_element(std::string_view prefix, std::string_view ns,
                            std::string_view local, std::string text) {
  Element e = make_element(prefix, ns, local);
  if (!text.empty()) e.children.emplace_back(Text{std::move(text)});
  return e;
}

/// Child indices from the root (over all child nodes, not just elements).
/// The empty path names the root element.
using NodePath = std::vector<std::size_t>;

class Document {
 public:
  explicit Document(Element root);

  const Element& root() const { return root_; }

  /// Throws PathUnresolved unless `path` lands on an element.
  const Element& at(const NodePath& path) const;
  const Element* try_at(const NodePath& path) const;

  /// Prefix-to-URI bindings visible at `path`, including the element's own
  /// declarations. Undeclared default namespace maps to "".
  std::vector<NamespaceDecl> in_scope_namespaces(const NodePath& path) const;

 private:
  Element root_;
};

/// Parses a complete document. Errors: MalformedXml, DuplicateId,
/// ForbiddenConstruct, BadEncoding.
Document parse(std::string_view input);

/// Parses a sequence of nodes as they would appear inside an element whose
/// in-scope namespaces are `context`. Used to restore decrypted content.
std::vector<Node> parse_fragment(std::string_view input,
                                 const std::vector<NamespaceDecl>& context);

std::string serialize(const Document& doc);
/// Exact serialization of one element (its own declarations only).
std::string serialize(const Element& element);
std::string serialize(const std::vector<Node>& nodes);

std::string escape_text(std::string_view text);
std::string escape_attribute(std::string_view value);

/// Equality that ignores attribute and namespace-declaration order, merges
/// adjacent text nodes, and drops empty text nodes.
bool structurally_equal(const Element& a, const Element& b);
bool structurally_equal(const Document& a, const Document& b);

const Element* find_by_id(const Document& doc, std::string_view id);
std::optional<NodePath> path_of_id(const Document& doc, std::string_view id);

/// Every path whose element matches (ns, local), in document order.
std::vector<NodePath> find_all(const Document& doc, std::string_view ns,
                               std::string_view local);

/// Throws DuplicateId if two elements share an Id.
void check_unique_ids(const Element& root);

Document replace_element(const Document& doc, const NodePath& at,
                         Element with);
/// Replaces the element at `at` with an arbitrary node sequence.
Document replace_with_nodes(const Document& doc, const NodePath& at,
                            std::vector<Node> nodes);
/// Replaces every child of the element at `at`.
Document replace_children(const Document& doc, const NodePath& at,
                          std::vector<Node> children);
/// Inserts `child` under the element at `parent`; appends when `index` is
/// absent. Errors: PathUnresolved.
Document insert_child(const Document& doc, const NodePath& parent,
                      Element child,
                      std::optional<std::size_t> index = std::nullopt);
Document remove_child(const Document& doc, const NodePath& parent,
                      std::size_t index);

bool is_ncname(std::string_view name);

}  // namespace xmlseal::xml

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

#include "xmlseal/c14n.hpp"

#include <algorithm>
#include <tuple>

namespace xmlseal::c14n {

namespace {

using xml::Attribute;
using xml::Element;
using xml::NamespaceDecl;
using xml::NodePath;

std::string escape_text(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '\r': out += "&#xD;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string escape_attribute(std::string_view value) {
  std::string out;
  out.reserve(value.size());
  for (char c : value) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '"': out += "&quot;"; break;
      case '\t': out += "&#x9;"; break;
      case '\n': out += "&#xA;"; break;
      case '\r': out += "&#xD;"; break;
      default: out += c;
    }
  }
  return out;
}

class Writer {
 public:
  explicit Writer(const std::optional<NodePath>& exclude) : exclude_(exclude) {}

  void element(const Element& e, NodePath& path,
               std::vector<NamespaceDecl> namespaces) {
    if (exclude_ && *exclude_ == path) return;
    std::sort(namespaces.begin(), namespaces.end(),
              [](const NamespaceDecl& a, const NamespaceDecl& b) {
                return a.prefix < b.prefix;
              });
    std::vector<const Attribute*> attrs;
    attrs.reserve(e.attributes.size());
    for (const auto& a : e.attributes) attrs.push_back(&a);
    std::sort(attrs.begin(), attrs.end(),
              [](const Attribute* a, const Attribute* b) {
                return std::tie(a->namespace_uri, a->local_name) <
                       std::tie(b->namespace_uri, b->local_name);
              });

    const std::string name = e.qualified_name();
    out_ += '<';
    out_ += name;
    for (const auto& ns : namespaces) {
      out_ += ns.prefix.empty() ? " xmlns" : " xmlns:" + ns.prefix;
      out_ += "=\"";
      out_ += escape_attribute(ns.uri);
      out_ += '"';
    }
    for (const auto* a : attrs) {
      out_ += ' ';
      out_ += a->qualified_name();
      out_ += "=\"";
      out_ += escape_attribute(a->value);
      out_ += '"';
    }
    out_ += '>';
    for (std::size_t i = 0; i < e.children.size(); ++i) {
      const auto& child = e.children[i];
      if (const auto* ce = child.element()) {
        path.push_back(i);
        element(*ce, path, ce->namespaces);
        path.pop_back();
      } else if (const auto* t = child.text()) {
        out_ += escape_text(t->value);
      }
    }
    out_ += "</";
    out_ += name;
    out_ += '>';
  }

  std::string take() { return std::move(out_); }

 private:
  const std::optional<NodePath>& exclude_;
  std::string out_;
};

}  // namespace

CanonicalForm canonicalize(const xml::Document& doc,
                           const xml::NodePath& subtree,
                           const std::optional<xml::NodePath>& exclude) {
  const Element& apex = doc.at(subtree);
  if (exclude) doc.at(*exclude);
  Writer writer(exclude);
  NodePath path = subtree;
  writer.element(apex, path, doc.in_scope_namespaces(subtree));
  return CanonicalForm{writer.take()};
}

}  // namespace xmlseal::c14n

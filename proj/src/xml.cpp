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

#include "xmlseal/xml.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>
#include <unordered_set>

#include "xmlseal/error.hpp"

namespace xmlseal::xml {

namespace {

constexpr std::size_t kMaxDepth = 512;

using Scope = std::map<std::string, std::string>;

[[noreturn]] void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

bool is_name_start(unsigned char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_' ||
         c >= 0x80;
}

bool is_name_char(unsigned char c) {
  return is_name_start(c) || (c >= '0' && c <= '9') || c == '-' || c == '.';
}

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r';
}

bool is_xml_char(char32_t cp) {
  return cp == 0x9 || cp == 0xA || cp == 0xD || (cp >= 0x20 && cp <= 0xD7FF) ||
         (cp >= 0xE000 && cp <= 0xFFFD) || (cp >= 0x10000 && cp <= 0x10FFFF);
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

// Validates UTF-8 and XML character ranges, and normalizes CR / CRLF to LF.
std::string normalize_input(std::string_view in) {
  if (in.substr(0, 3) == "\xEF\xBB\xBF") in.remove_prefix(3);
  std::string out;
  out.reserve(in.size());
  for (std::size_t i = 0; i < in.size();) {
    const auto c = static_cast<unsigned char>(in[i]);
    char32_t cp;
    std::size_t len;
    if (c < 0x80) {
      cp = c;
      len = 1;
    } else if ((c & 0xE0) == 0xC0) {
      cp = c & 0x1F;
      len = 2;
    } else if ((c & 0xF0) == 0xE0) {
      cp = c & 0x0F;
      len = 3;
    } else if ((c & 0xF8) == 0xF0) {
      cp = c & 0x07;
      len = 4;
    } else {
      fail(ErrorCode::BadEncoding, "invalid UTF-8 lead byte");
    }
    if (i + len > in.size()) fail(ErrorCode::BadEncoding, "truncated UTF-8");
    for (std::size_t k = 1; k < len; ++k) {
      const auto cc = static_cast<unsigned char>(in[i + k]);
      if ((cc & 0xC0) != 0x80) fail(ErrorCode::BadEncoding, "invalid UTF-8");
      cp = (cp << 6) | (cc & 0x3F);
    }
    static constexpr char32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < kMin[len] || (cp >= 0xD800 && cp <= 0xDFFF) || cp > 0x10FFFF) {
      fail(ErrorCode::BadEncoding, "overlong or out-of-range UTF-8");
    }
    if (!is_xml_char(cp)) {
      fail(ErrorCode::MalformedXml, "character not allowed in XML");
    }
    if (cp == '\r') {
      out += '\n';
      if (i + 1 < in.size() && in[i + 1] == '\n') ++i;
    } else {
      out.append(in.substr(i, len));
    }
    i += len;
  }
  return out;
}

struct RawAttribute {
  std::string qname;
  std::string value;
};

std::pair<std::string, std::string> split_qname(const std::string& qname) {
  const auto colon = qname.find(':');
  if (colon == std::string::npos) return {"", qname};
  return {qname.substr(0, colon), qname.substr(colon + 1)};
}

class Parser {
 public:
  explicit Parser(std::string text) : text_(std::move(text)) {}

  Element parse_document() {
    skip_xml_declaration();
    skip_misc();
    if (eof() || peek() != '<') fail(ErrorCode::MalformedXml, "no root element");
    Scope scope;
    Element root = parse_element(scope, 0);
    skip_misc();
    if (!eof()) fail(ErrorCode::MalformedXml, "content after root element");
    return root;
  }

  std::vector<Node> parse_fragment(const Scope& scope) {
    std::vector<Node> nodes;
    parse_content(nodes, scope, 0, nullptr);
    return nodes;
  }

 private:
  bool eof() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }
  bool starts_with(std::string_view s) const {
    return std::string_view(text_).substr(pos_, s.size()) == s;
  }
  void expect(std::string_view s) {
    if (!starts_with(s)) {
      fail(ErrorCode::MalformedXml,
           "expected '" + std::string(s) + "' at offset " + std::to_string(pos_));
    }
    pos_ += s.size();
  }
  void skip_space() {
    while (!eof() && is_space(peek())) ++pos_;
  }

  void skip_xml_declaration() {
    if (!starts_with("<?xml") || pos_ + 5 >= text_.size() ||
        !is_space(text_[pos_ + 5])) {
      return;
    }
    const auto end = text_.find("?>", pos_);
    if (end == std::string::npos) fail(ErrorCode::MalformedXml, "unterminated XML declaration");
    const std::string decl = text_.substr(pos_, end - pos_);
    pos_ = end + 2;
    const auto enc = decl.find("encoding");
    if (enc == std::string::npos) return;
    const auto q = decl.find_first_of("\"'", enc);
    if (q == std::string::npos) fail(ErrorCode::MalformedXml, "bad encoding declaration");
    const auto q2 = decl.find(decl[q], q + 1);
    if (q2 == std::string::npos) fail(ErrorCode::MalformedXml, "bad encoding declaration");
    std::string name = decl.substr(q + 1, q2 - q - 1);
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char c) { return std::toupper(c); });
    if (name != "UTF-8" && name != "UTF8") {
      fail(ErrorCode::BadEncoding, "only UTF-8 documents are accepted");
    }
  }

  // Whitespace and comments outside the root element. Comments there are
  // dropped since the Document holds a single root.
  void skip_misc() {
    for (;;) {
      skip_space();
      if (starts_with("<!--")) {
        read_comment();
      } else if (starts_with("<!DOCTYPE") || starts_with("<!ENTITY")) {
        fail(ErrorCode::ForbiddenConstruct, "DTDs are not accepted");
      } else if (starts_with("<?")) {
        fail(ErrorCode::ForbiddenConstruct,
             "processing instructions are not accepted");
      } else {
        return;
      }
    }
  }

  std::string read_comment() {
    expect("<!--");
    const auto end = text_.find("--", pos_);
    if (end == std::string::npos) fail(ErrorCode::MalformedXml, "unterminated comment");
    if (end + 2 >= text_.size() || text_[end + 2] != '>') {
      fail(ErrorCode::MalformedXml, "'--' inside comment");
    }
    std::string body = text_.substr(pos_, end - pos_);
    pos_ = end + 3;
    return body;
  }

  std::string read_name() {
    const auto start = pos_;
    if (eof() || !is_name_start(static_cast<unsigned char>(peek()))) {
      fail(ErrorCode::MalformedXml, "bad name at offset " + std::to_string(pos_));
    }
    while (!eof() && (is_name_char(static_cast<unsigned char>(peek())) ||
                      peek() == ':')) {
      ++pos_;
    }
    std::string name = text_.substr(start, pos_ - start);
    const auto [prefix, local] = split_qname(name);
    if ((!prefix.empty() && !is_ncname(prefix)) || !is_ncname(local) ||
        (name.find(':') != std::string::npos && prefix.empty())) {
      fail(ErrorCode::MalformedXml, "bad name '" + name + "'");
    }
    return name;
  }

  void read_reference(std::string& out) {
    expect("&");
    const auto end = text_.find(';', pos_);
    if (end == std::string::npos || end - pos_ > 32) {
      fail(ErrorCode::MalformedXml, "unterminated entity reference");
    }
    const std::string name = text_.substr(pos_, end - pos_);
    pos_ = end + 1;
    if (name == "lt") {
      out += '<';
    } else if (name == "gt") {
      out += '>';
    } else if (name == "amp") {
      out += '&';
    } else if (name == "quot") {
      out += '"';
    } else if (name == "apos") {
      out += '\'';
    } else if (!name.empty() && name[0] == '#') {
      const bool hex = name.size() > 1 && name[1] == 'x';
      const std::string digits = name.substr(hex ? 2 : 1);
      if (digits.empty() || digits.size() > 8) {
        fail(ErrorCode::MalformedXml, "bad character reference");
      }
      char32_t cp = 0;
      for (char d : digits) {
        int v;
        if (d >= '0' && d <= '9') {
          v = d - '0';
        } else if (hex && d >= 'a' && d <= 'f') {
          v = d - 'a' + 10;
        } else if (hex && d >= 'A' && d <= 'F') {
          v = d - 'A' + 10;
        } else {
          fail(ErrorCode::MalformedXml, "bad character reference");
        }
        cp = cp * (hex ? 16 : 10) + static_cast<char32_t>(v);
      }
      if (!is_xml_char(cp)) fail(ErrorCode::MalformedXml, "bad character reference");
      append_utf8(out, cp);
    } else {
      fail(ErrorCode::ForbiddenConstruct, "undeclared entity '&" + name + ";'");
    }
  }

  std::string read_attribute_value() {
    if (eof() || (peek() != '"' && peek() != '\'')) {
      fail(ErrorCode::MalformedXml, "expected quoted attribute value");
    }
    const char quote = text_[pos_++];
    std::string value;
    for (;;) {
      if (eof()) fail(ErrorCode::MalformedXml, "unterminated attribute value");
      const char c = peek();
      if (c == quote) {
        ++pos_;
        return value;
      }
      if (c == '<') fail(ErrorCode::MalformedXml, "'<' in attribute value");
      if (c == '&') {
        read_reference(value);
      } else {
        value += (c == '\t' || c == '\n') ? ' ' : c;
        ++pos_;
      }
    }
  }

  Element parse_element(const Scope& parent_scope, std::size_t depth) {
    if (depth > kMaxDepth) fail(ErrorCode::MalformedXml, "nesting too deep");
    expect("<");
    const std::string qname = read_name();
    std::vector<RawAttribute> raw;
    bool self_closing = false;
    for (;;) {
      const bool had_space = !eof() && is_space(peek());
      skip_space();
      if (eof()) fail(ErrorCode::MalformedXml, "unterminated start tag");
      if (starts_with("/>")) {
        pos_ += 2;
        self_closing = true;
        break;
      }
      if (peek() == '>') {
        ++pos_;
        break;
      }
      if (!had_space) fail(ErrorCode::MalformedXml, "missing space before attribute");
      RawAttribute a;
      a.qname = read_name();
      skip_space();
      expect("=");
      skip_space();
      a.value = read_attribute_value();
      for (const auto& other : raw) {
        if (other.qname == a.qname) {
          fail(ErrorCode::MalformedXml, "duplicate attribute '" + a.qname + "'");
        }
      }
      raw.push_back(std::move(a));
    }

    Element e;
    Scope scope = parent_scope;
    for (const auto& a : raw) {
      const auto [prefix, local] = split_qname(a.qname);
      if (a.qname == "xmlns") {
        e.namespaces.push_back({"", a.value});
        scope[""] = a.value;
      } else if (prefix == "xmlns") {
        if (local == "xmlns" || (local == "xml" && a.value != kXmlNamespace) ||
            a.value.empty()) {
          fail(ErrorCode::MalformedXml, "illegal namespace declaration");
        }
        e.namespaces.push_back({local, a.value});
        scope[local] = a.value;
      }
    }
    std::tie(e.prefix, e.local_name) = split_qname(qname);
    e.namespace_uri = resolve(scope, e.prefix, true);
    for (const auto& a : raw) {
      const auto [prefix, local] = split_qname(a.qname);
      if (a.qname == "xmlns" || prefix == "xmlns") continue;
      Attribute attr{prefix, prefix.empty() ? "" : resolve(scope, prefix, false),
                     local, a.value};
      if (e.find_attribute(attr.namespace_uri, attr.local_name) != nullptr) {
        fail(ErrorCode::MalformedXml, "duplicate attribute '" + a.qname + "'");
      }
      e.attributes.push_back(std::move(attr));
    }
    const bool plain_id = e.find_attribute("", "Id") != nullptr;
    const bool wsu_id = e.find_attribute(kWsuNamespace, "Id") != nullptr;
    if (plain_id && wsu_id) {
      fail(ErrorCode::DuplicateId, "element carries both Id and wsu:Id");
    }
    if (!self_closing) parse_content(e.children, scope, depth, &qname);
    return e;
  }

  static std::string resolve(const Scope& scope, const std::string& prefix,
                             bool use_default) {
    if (prefix == "xml") return std::string(kXmlNamespace);
    if (prefix.empty() && !use_default) return "";
    const auto it = scope.find(prefix);
    if (it == scope.end()) {
      if (prefix.empty()) return "";
      fail(ErrorCode::MalformedXml, "unbound prefix '" + prefix + "'");
    }
    return it->second;
  }

  static void push_text(std::vector<Node>& out, std::string text) {
    if (text.empty()) return;
    if (!out.empty()) {
      if (const Text* prev = out.back().text()) {
        out.back() = Text{prev->value + text};
        return;
      }
    }
    out.emplace_back(Text{std::move(text)});
  }

  // Reads child nodes until the end tag `close` (or end of input when
  // `close` is null, for fragments).
  void parse_content(std::vector<Node>& out, const Scope& scope,
                     std::size_t depth, const std::string* close) {
    std::string text;
    for (;;) {
      if (eof()) {
        if (close != nullptr) {
          fail(ErrorCode::MalformedXml, "missing end tag for '" + *close + "'");
        }
        push_text(out, std::move(text));
        return;
      }
      const char c = peek();
      if (c == '&') {
        read_reference(text);
        continue;
      }
      if (c != '<') {
        if (starts_with("]]>")) fail(ErrorCode::MalformedXml, "']]>' in text");
        text += c;
        ++pos_;
        continue;
      }
      if (starts_with("<![CDATA[")) {
        pos_ += 9;
        const auto end = text_.find("]]>", pos_);
        if (end == std::string::npos) fail(ErrorCode::MalformedXml, "unterminated CDATA");
        text += text_.substr(pos_, end - pos_);
        pos_ = end + 3;
        continue;
      }
      push_text(out, std::move(text));
      text.clear();
      if (starts_with("</")) {
        if (close == nullptr) fail(ErrorCode::MalformedXml, "unexpected end tag");
        pos_ += 2;
        const std::string name = read_name();
        if (name != *close) {
          fail(ErrorCode::MalformedXml,
               "tag mismatch: '" + *close + "' closed by '" + name + "'");
        }
        skip_space();
        expect(">");
        return;
      }
      if (starts_with("<!--")) {
        out.emplace_back(Comment{read_comment()});
      } else if (starts_with("<!")) {
        fail(ErrorCode::ForbiddenConstruct, "markup declarations are not accepted");
      } else if (starts_with("<?")) {
        fail(ErrorCode::ForbiddenConstruct,
             "processing instructions are not accepted");
      } else {
        out.emplace_back(parse_element(scope, depth + 1));
      }
    }
  }

  std::string text_;
  std::size_t pos_ = 0;
};

void write_element(std::string& out, const Element& e);

void write_nodes(std::string& out, const std::vector<Node>& nodes) {
  for (const auto& n : nodes) {
    if (const auto* el = n.element()) {
      write_element(out, *el);
    } else if (const auto* t = n.text()) {
      out += escape_text(t->value);
    } else if (const auto* c = n.comment()) {
      out += "<!--";
      out += c->value;
      out += "-->";
    }
  }
}

void write_element(std::string& out, const Element& e) {
  out += '<';
  out += e.qualified_name();
  for (const auto& ns : e.namespaces) {
    out += ns.prefix.empty() ? " xmlns" : " xmlns:" + ns.prefix;
    out += "=\"";
    out += escape_attribute(ns.uri);
    out += '"';
  }
  for (const auto& a : e.attributes) {
    out += ' ';
    out += a.qualified_name();
    out += "=\"";
    out += escape_attribute(a.value);
    out += '"';
  }
  if (e.children.empty()) {
    out += "/>";
    return;
  }
  out += '>';
  write_nodes(out, e.children);
  out += "</";
  out += e.qualified_name();
  out += '>';
}

// Children with adjacent text merged and empty text removed.
std::vector<const Node*> normalized_children(const Element& e,
                                             std::vector<std::string>& merged) {
  std::vector<const Node*> out;
  merged.reserve(e.children.size());
  for (const auto& n : e.children) {
    if (const auto* t = n.text()) {
      if (t->value.empty()) continue;
      if (!out.empty() && out.back() == nullptr) {
        merged.back() += t->value;
      } else {
        out.push_back(nullptr);
        merged.push_back(t->value);
      }
    } else {
      out.push_back(&n);
    }
  }
  return out;
}

using AttrKey = std::tuple<std::string, std::string, std::string, std::string>;

std::multiset<AttrKey> attribute_set(const Element& e) {
  std::multiset<AttrKey> s;
  for (const auto& a : e.attributes) {
    s.emplace(a.namespace_uri, a.local_name, a.prefix, a.value);
  }
  return s;
}

std::multiset<std::pair<std::string, std::string>> namespace_set(const Element& e) {
  std::multiset<std::pair<std::string, std::string>> s;
  for (const auto& ns : e.namespaces) s.emplace(ns.prefix, ns.uri);
  return s;
}

void collect_ids(const Element& e, std::unordered_set<std::string>& seen) {
  if (auto id = e.id()) {
    if (!seen.insert(*id).second) {
      fail(ErrorCode::DuplicateId, "Id '" + *id + "' is not unique");
    }
  }
  for (const auto& n : e.children) {
    if (const auto* c = n.element()) collect_ids(*c, seen);
  }
}

bool find_id_path(const Element& e, std::string_view id, NodePath& path) {
  if (auto own = e.id(); own && *own == id) return true;
  for (std::size_t i = 0; i < e.children.size(); ++i) {
    if (const auto* c = e.children[i].element()) {
      path.push_back(i);
      if (find_id_path(*c, id, path)) return true;
      path.pop_back();
    }
  }
  return false;
}

void find_all_impl(const Element& e, std::string_view ns,
                   std::string_view local, NodePath& path,
                   std::vector<NodePath>& out) {
  if (e.is(ns, local)) out.push_back(path);
  for (std::size_t i = 0; i < e.children.size(); ++i) {
    if (const auto* c = e.children[i].element()) {
      path.push_back(i);
      find_all_impl(*c, ns, local, path, out);
      path.pop_back();
    }
  }
}

Element* mutable_at(Element& root, const NodePath& path) {
  Element* cur = &root;
  for (auto idx : path) {
    if (idx >= cur->children.size()) return nullptr;
    cur = cur->children[idx].element();
    if (cur == nullptr) return nullptr;
  }
  return cur;
}

[[noreturn]] void unresolved(const NodePath& path) {
  std::string s;
  for (auto i : path) s += "/" + std::to_string(i);
  fail(ErrorCode::PathUnresolved, "no element at path '" + s + "'");
}

}  // namespace

bool is_ncname(std::string_view name) {
  if (name.empty() || !is_name_start(static_cast<unsigned char>(name[0]))) {
    return false;
  }
  return std::all_of(name.begin(), name.end(), [](char c) {
    return is_name_char(static_cast<unsigned char>(c));
  });
}

const Attribute* Element::find_attribute(std::string_view ns,
                                         std::string_view local) const {
  for (const auto& a : attributes) {
    if (a.namespace_uri == ns && a.local_name == local) return &a;
  }
  return nullptr;
}

std::optional<std::string> Element::attribute(std::string_view local) const {
  if (const auto* a = find_attribute("", local)) return a->value;
  return std::nullopt;
}

void Element::set_attribute(std::string_view local, std::string value) {
  for (auto& a : attributes) {
    if (a.namespace_uri.empty() && a.local_name == local) {
      a.value = std::move(value);
      return;
    }
  }
  attributes.push_back({"", "", std::string(local), std::move(value)});
}

std::optional<std::string> Element::id() const {
  if (const auto* a = find_attribute("", "Id")) return a->value;
  if (const auto* a = find_attribute(kWsuNamespace, "Id")) return a->value;
  return std::nullopt;
}

std::vector<const Element*> Element::element_children() const {
  std::vector<const Element*> out;
  for (const auto& n : children) {
    if (const auto* e = n.element()) out.push_back(e);
  }
  return out;
}

const Element* Element::first_child(std::string_view ns,
                                    std::string_view local) const {
  for (const auto& n : children) {
    if (const auto* e = n.element(); e != nullptr && e->is(ns, local)) return e;
  }
  return nullptr;
}

std::string Element::text() const {
  std::string out;
  for (const auto& n : children) {
    if (const auto* t = n.text()) out += t->value;
  }
  return out;
}

Document::Document(Element root) : root_(std::move(root)) {}

const Element* Document::try_at(const NodePath& path) const {
  const Element* cur = &root_;
  for (auto idx : path) {
    if (idx >= cur->children.size()) return nullptr;
    cur = cur->children[idx].element();
    if (cur == nullptr) return nullptr;
  }
  return cur;
}

const Element& Document::at(const NodePath& path) const {
  const Element* e = try_at(path);
  if (e == nullptr) unresolved(path);
  return *e;
}

std::vector<NamespaceDecl> Document::in_scope_namespaces(
    const NodePath& path) const {
  Scope scope;
  const Element* cur = &root_;
  for (std::size_t depth = 0;; ++depth) {
    for (const auto& ns : cur->namespaces) scope[ns.prefix] = ns.uri;
    if (depth == path.size()) break;
    const auto idx = path[depth];
    if (idx >= cur->children.size() || cur->children[idx].element() == nullptr) {
      unresolved(path);
    }
    cur = cur->children[idx].element();
  }
  std::vector<NamespaceDecl> out;
  for (const auto& [prefix, uri] : scope) {
    if (prefix.empty() && uri.empty()) continue;
    out.push_back({prefix, uri});
  }
  return out;
}

Document parse(std::string_view input) {
  Parser p(normalize_input(input));
  Element root = p.parse_document();
  check_unique_ids(root);
  return Document(std::move(root));
}

std::vector<Node> parse_fragment(std::string_view input,
                                 const std::vector<NamespaceDecl>& context) {
  Scope scope;
  for (const auto& ns : context) scope[ns.prefix] = ns.uri;
  Parser p(normalize_input(input));
  return p.parse_fragment(scope);
}

std::string serialize(const Document& doc) { return serialize(doc.root()); }

std::string serialize(const Element& element) {
  std::string out;
  write_element(out, element);
  return out;
}

std::string serialize(const std::vector<Node>& nodes) {
  std::string out;
  write_nodes(out, nodes);
  return out;
}

std::string escape_text(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '\r': out += "&#13;"; break;
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
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\t': out += "&#9;"; break;
      case '\n': out += "&#10;"; break;
      case '\r': out += "&#13;"; break;
      default: out += c;
    }
  }
  return out;
}

bool structurally_equal(const Element& a, const Element& b) {
  if (a.namespace_uri != b.namespace_uri || a.local_name != b.local_name ||
      a.prefix != b.prefix) {
    return false;
  }
  if (attribute_set(a) != attribute_set(b)) return false;
  if (namespace_set(a) != namespace_set(b)) return false;
  std::vector<std::string> ta;
  std::vector<std::string> tb;
  const auto ca = normalized_children(a, ta);
  const auto cb = normalized_children(b, tb);
  if (ca.size() != cb.size()) return false;
  std::size_t ia = 0;
  std::size_t ib = 0;
  for (std::size_t i = 0; i < ca.size(); ++i) {
    if ((ca[i] == nullptr) != (cb[i] == nullptr)) return false;
    if (ca[i] == nullptr) {
      if (ta[ia++] != tb[ib++]) return false;
      continue;
    }
    const auto* ea = ca[i]->element();
    const auto* eb = cb[i]->element();
    if ((ea == nullptr) != (eb == nullptr)) return false;
    if (ea != nullptr) {
      if (!structurally_equal(*ea, *eb)) return false;
    } else if (ca[i]->comment()->value != cb[i]->comment()->value) {
      return false;
    }
  }
  return true;
}

bool structurally_equal(const Document& a, const Document& b) {
  return structurally_equal(a.root(), b.root());
}

const Element* find_by_id(const Document& doc, std::string_view id) {
  if (auto path = path_of_id(doc, id)) return &doc.at(*path);
  return nullptr;
}

std::optional<NodePath> path_of_id(const Document& doc, std::string_view id) {
  NodePath path;
  if (find_id_path(doc.root(), id, path)) return path;
  return std::nullopt;
}

std::vector<NodePath> find_all(const Document& doc, std::string_view ns,
                               std::string_view local) {
  std::vector<NodePath> out;
  NodePath path;
  find_all_impl(doc.root(), ns, local, path, out);
  return out;
}

void check_unique_ids(const Element& root) {
  std::unordered_set<std::string> seen;
  collect_ids(root, seen);
}

Document replace_element(const Document& doc, const NodePath& at,
                         Element with) {
  if (at.empty()) {
    check_unique_ids(with);
    return Document(std::move(with));
  }
  return replace_with_nodes(doc, at, {Node(std::move(with))});
}

Document replace_with_nodes(const Document& doc, const NodePath& at,
                            std::vector<Node> nodes) {
  if (doc.try_at(at) == nullptr) unresolved(at);
  if (at.empty()) {
    const Element* only = nullptr;
    for (const auto& n : nodes) {
      if (const auto* e = n.element()) {
        if (only != nullptr) fail(ErrorCode::MalformedXml, "multiple roots");
        only = e;
      }
    }
    if (only == nullptr) fail(ErrorCode::MalformedXml, "no root element");
    return replace_element(doc, at, *only);
  }
  Element root = doc.root();
  const NodePath parent_path(at.begin(), at.end() - 1);
  Element* parent = mutable_at(root, parent_path);
  auto& kids = parent->children;
  const auto pos = kids.begin() + static_cast<std::ptrdiff_t>(at.back());
  const auto inserted = kids.erase(pos);
  kids.insert(inserted, std::make_move_iterator(nodes.begin()),
              std::make_move_iterator(nodes.end()));
  check_unique_ids(root);
  return Document(std::move(root));
}

Document replace_children(const Document& doc, const NodePath& at,
                          std::vector<Node> children) {
  Element root = doc.root();
  Element* target = mutable_at(root, at);
  if (target == nullptr) unresolved(at);
  target->children = std::move(children);
  check_unique_ids(root);
  return Document(std::move(root));
}

Document insert_child(const Document& doc, const NodePath& parent,
                      Element child, std::optional<std::size_t> index) {
  Element root = doc.root();
  Element* target = mutable_at(root, parent);
  if (target == nullptr) unresolved(parent);
  const auto pos = index.value_or(target->children.size());
  if (pos > target->children.size()) {
    NodePath p = parent;
    p.push_back(pos);
    unresolved(p);
  }
  target->children.insert(
      target->children.begin() + static_cast<std::ptrdiff_t>(pos),
      Node(std::move(child)));
  check_unique_ids(root);
  return Document(std::move(root));
}

Document remove_child(const Document& doc, const NodePath& parent,
                      std::size_t index) {
  Element root = doc.root();
  Element* target = mutable_at(root, parent);
  if (target == nullptr || index >= target->children.size()) {
    NodePath p = parent;
    p.push_back(index);
    unresolved(p);
  }
  target->children.erase(target->children.begin() +
                         static_cast<std::ptrdiff_t>(index));
  return Document(std::move(root));
}

}  // namespace xmlseal::xml

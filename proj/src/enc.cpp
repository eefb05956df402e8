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

#include "xmlseal/enc.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <iterator>
#include <set>

#include "xmlseal/dsig.hpp"
#include "xmlseal/error.hpp"

namespace xmlseal::enc {

namespace fs = std::filesystem;

namespace {

using crypto::Bytes;
using crypto::KeyKind;
using crypto::KeyMaterial;
using xml::Element;
using xml::NodePath;

constexpr std::string_view kPrefix = "xenc";
constexpr std::size_t kMaxDecryptRounds = 4096;

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorCode::MalformedEncryptedData, what);
}

Element xenc(std::string_view local, std::string text = {}) {
  return xml::make_element(kPrefix, kNamespace, local, std::move(text));
}

Element ds(std::string_view local, std::string text = {}) {
  return xml::make_element("ds", dsig::kNamespace, local, std::move(text));
}

void declare_xenc(Element& e) {
  e.namespaces.push_back({std::string(kPrefix), std::string(kNamespace)});
}

std::vector<const Element*> element_children(const Element& e) {
  std::vector<const Element*> out;
  for (const auto& n : e.children) {
    if (const auto* t = n.text()) {
      if (t->value.find_first_not_of(" \t\n") != std::string::npos) {
        malformed("unexpected text inside " + e.local_name);
      }
    } else if (const auto* c = n.element()) {
      out.push_back(c);
    }
  }
  return out;
}

Bytes decode(std::string_view text, std::string_view what) {
  try {
    return crypto::base64_decode(text);
  } catch (const Error&) {
    malformed("invalid base64 in " + std::string(what));
  }
}

Element cipher_data_element(const std::optional<Bytes>& value,
                            const std::optional<std::string>& reference) {
  Element cd = xenc("CipherData");
  if (value) {
    cd.children.emplace_back(xenc("CipherValue", crypto::base64_encode(*value)));
  } else if (reference) {
    Element cr = xenc("CipherReference");
    cr.set_attribute("URI", *reference);
    cd.children.emplace_back(std::move(cr));
  }
  return cd;
}

void read_cipher_data(const Element& cd, std::optional<Bytes>& value,
                      std::optional<std::string>& reference) {
  const auto kids = element_children(cd);
  if (kids.size() != 1) malformed("CipherData must hold one CipherValue or CipherReference");
  if (kids[0]->is(kNamespace, "CipherValue")) {
    value = decode(kids[0]->text(), "CipherValue");
  } else if (kids[0]->is(kNamespace, "CipherReference")) {
    auto uri = kids[0]->attribute("URI");
    if (!uri) malformed("CipherReference without URI");
    reference = *uri;
  } else {
    malformed("unexpected " + kids[0]->local_name + " in CipherData");
  }
}

std::string fresh_id(const xml::Document& doc) {
  for (;;) {
    std::string id = "ed-" + crypto::random_hex(8);
    if (xml::find_by_id(doc, id) == nullptr) return id;
  }
}

NodePath resolve_target(const xml::Document& doc, const Target& target) {
  if (const auto* id = std::get_if<std::string>(&target)) {
    auto path = xml::path_of_id(doc, *id);
    if (!path) throw Error(ErrorCode::TargetUnresolved, "no element with Id '" + *id + "'");
    return *path;
  }
  const auto& path = std::get<NodePath>(target);
  if (doc.try_at(path) == nullptr) {
    throw Error(ErrorCode::TargetUnresolved, "target path does not name an element");
  }
  return path;
}

std::string_view method_for(const KeyMaterial& cek) {
  if (cek.kind() != KeyKind::Aes) {
    throw Error(ErrorCode::WrongKeyKind, "content encryption needs an AES key");
  }
  return cek.bits() == 256 ? kAes256Cbc : kAes128Cbc;
}

std::size_t key_bytes_for(std::string_view method) {
  return method == kAes256Cbc ? 32 : 16;
}

EncryptResult encrypt_impl(const xml::Document& doc, const Target& target, Mode mode,
                           const KeyMaterial& cek,
                           const std::function<void(EncryptedData&, const std::string&)>& key_info) {
  const NodePath path = resolve_target(doc, target);
  if (mode == Mode::Element && path.empty()) {
    throw Error(ErrorCode::RootElementEncryptionUnsupported,
                "element mode cannot replace the root; use content mode");
  }
  const Element& element = doc.at(path);
  const std::string plaintext =
      mode == Mode::Element ? xml::serialize(element) : xml::serialize(element.children);

  EncryptedData ed;
  ed.id = fresh_id(doc);
  ed.type = mode;
  ed.method = std::string(method_for(cek));
  ed.cipher_value = crypto::sym_encrypt(cek, crypto::as_bytes(plaintext));
  if (key_info) key_info(ed, *ed.id);

  EncryptResult out{mode == Mode::Element
                        ? xml::replace_element(doc, path, ed.to_element())
                        : xml::replace_children(doc, path, {xml::Node(ed.to_element())}),
                    *ed.id};
  return out;
}

KeyMaterial private_key(const crypto::Keystore& keys, const std::string& name) {
  try {
    return keys.resolve(name, KeyKind::RsaPrivate);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::KindMismatch) {
      throw Error(ErrorCode::UnknownKey, "no private key named '" + name + "' in the keystore");
    }
    throw;
  }
}

KeyMaterial unwrap_for(const EncryptedKey& ek, const crypto::Keystore& keys,
                       std::string_view method) {
  const KeyMaterial recipient = private_key(keys, ek.recipient);
  KeyMaterial cek = crypto::unwrap_key(recipient, ek.wrapped);
  if (cek.secret().size() != key_bytes_for(method)) {
    throw Error(ErrorCode::UnwrapFailed, "content key size does not match EncryptionMethod");
  }
  return cek;
}

// The EncryptedKey elsewhere in the document that lists `id`.
std::optional<EncryptedKey> referencing_key(const xml::Document& doc, const std::string& id) {
  for (const auto& path : xml::find_all(doc, kNamespace, "EncryptedKey")) {
    auto ek = EncryptedKey::from_element(doc.at(path));
    const auto& refs = ek.data_references;
    if (std::find(refs.begin(), refs.end(), id) != refs.end()) return ek;
  }
  return std::nullopt;
}

xml::Document decrypt_one(const xml::Document& doc, const NodePath& path,
                          const crypto::Keystore& keys, const DecryptOptions& options) {
  if (path.empty()) malformed("EncryptedData cannot be the document root");
  const auto ed = EncryptedData::from_element(doc.at(path));

  std::optional<KeyMaterial> cek;
  if (ed.encrypted_key) {
    cek = unwrap_for(*ed.encrypted_key, keys, ed.method);
  } else if (ed.key_name) {
    cek = keys.resolve(*ed.key_name, KeyKind::Aes);
    if (cek->secret().size() != key_bytes_for(ed.method)) {
      throw Error(ErrorCode::PaddingOrKeyError,
                  "key '" + *ed.key_name + "' does not match EncryptionMethod");
    }
  } else {
    if (!ed.id) malformed("EncryptedData names no key and has no Id");
    auto ek = referencing_key(doc, *ed.id);
    if (!ek) malformed("no EncryptedKey references '" + *ed.id + "'");
    cek = unwrap_for(*ek, keys, ed.method);
  }

  Bytes ciphertext;
  if (ed.cipher_value) {
    ciphertext = *ed.cipher_value;
  } else {
    if (!options.cipher_base) {
      throw Error(ErrorCode::ReferenceOutsideBase,
                  "CipherReference needs a base directory");
    }
    ciphertext = resolve_cipher_reference(*ed.cipher_reference, *options.cipher_base);
  }
  const Bytes plaintext = crypto::sym_decrypt(*cek, ciphertext);

  const NodePath parent(path.begin(), path.end() - 1);
  std::vector<xml::Node> nodes;
  try {
    nodes = xml::parse_fragment(crypto::to_string(plaintext), doc.in_scope_namespaces(parent));
  } catch (const Error& e) {
    throw Error(ErrorCode::MalformedCipherPayload,
                std::string("decrypted bytes are not well-formed XML (") + e.what() + ")");
  }
  if (ed.type == Mode::Element) {
    std::size_t elements = 0;
    for (const auto& n : nodes) {
      if (n.element() != nullptr) {
        ++elements;
      } else if (const auto* t = n.text(); t == nullptr || !t->value.empty()) {
        elements = 2;
      }
    }
    if (elements != 1) {
      throw Error(ErrorCode::MalformedCipherPayload,
                  "element-type payload must decrypt to exactly one element");
    }
  }
  return xml::replace_with_nodes(doc, path, std::move(nodes));
}

bool has_descendant(const NodePath& ancestor, const std::vector<NodePath>& all) {
  return std::any_of(all.begin(), all.end(), [&](const NodePath& p) {
    return p.size() > ancestor.size() &&
           std::equal(ancestor.begin(), ancestor.end(), p.begin());
  });
}

}  // namespace

EncryptedKey EncryptedKey::from_element(const Element& e) {
  if (!e.is(kNamespace, "EncryptedKey")) malformed("not an xenc:EncryptedKey");
  EncryptedKey ek;
  if (auto id = e.attribute("Id")) ek.id = *id;
  if (auto r = e.attribute("Recipient")) ek.recipient = *r;
  bool have_method = false;
  bool have_cipher = false;
  for (const auto* c : element_children(e)) {
    if (c->is(kNamespace, "EncryptionMethod")) {
      if (c->attribute("Algorithm").value_or("") != kRsaOaep) {
        malformed("unsupported key transport algorithm");
      }
      for (const auto* p : element_children(*c)) {
        if (!p->is(dsig::kNamespace, "DigestMethod") ||
            p->attribute("Algorithm").value_or("") != dsig::kSha256) {
          malformed("key transport only supports the SHA-256 OAEP digest");
        }
      }
      have_method = true;
    } else if (c->is(dsig::kNamespace, "KeyInfo")) {
      for (const auto* k : element_children(*c)) {
        if (!k->is(dsig::kNamespace, "KeyName")) {
          throw Error(ErrorCode::UnsupportedKeyInfo,
                      "EncryptedKey KeyInfo only supports KeyName");
        }
        ek.recipient = k->text();
      }
    } else if (c->is(kNamespace, "CipherData")) {
      std::optional<Bytes> value;
      std::optional<std::string> reference;
      read_cipher_data(*c, value, reference);
      if (!value) malformed("EncryptedKey needs an inline CipherValue");
      ek.wrapped = std::move(*value);
      have_cipher = true;
    } else if (c->is(kNamespace, "ReferenceList")) {
      for (const auto* d : element_children(*c)) {
        auto uri = d->attribute("URI");
        if (!d->is(kNamespace, "DataReference") || !uri || uri->size() < 2 ||
            (*uri)[0] != '#') {
          malformed("ReferenceList holds only DataReference URI=\"#id\"");
        }
        ek.data_references.push_back(uri->substr(1));
      }
    } else {
      malformed("unexpected " + c->local_name + " in EncryptedKey");
    }
  }
  if (!have_method || !have_cipher || ek.recipient.empty()) {
    malformed("EncryptedKey needs EncryptionMethod, CipherData and a recipient");
  }
  return ek;
}

Element EncryptedKey::to_element() const {
  Element e = xenc("EncryptedKey");
  declare_xenc(e);
  if (id) e.set_attribute("Id", *id);
  e.set_attribute("Recipient", recipient);
  Element method = xenc("EncryptionMethod");
  method.set_attribute("Algorithm", std::string(kRsaOaep));
  e.children.emplace_back(std::move(method));
  e.children.emplace_back(cipher_data_element(wrapped, std::nullopt));
  if (!data_references.empty()) {
    Element list = xenc("ReferenceList");
    for (const auto& ref : data_references) {
      Element d = xenc("DataReference");
      d.set_attribute("URI", "#" + ref);
      list.children.emplace_back(std::move(d));
    }
    e.children.emplace_back(std::move(list));
  }
  return e;
}

EncryptedData EncryptedData::from_element(const Element& e) {
  if (!e.is(kNamespace, "EncryptedData")) malformed("not an xenc:EncryptedData");
  EncryptedData ed;
  if (auto id = e.attribute("Id")) ed.id = *id;
  if (auto type = e.attribute("Type")) {
    if (*type == kTypeElement) {
      ed.type = Mode::Element;
    } else if (*type == kTypeContent) {
      ed.type = Mode::Content;
    } else {
      malformed("unsupported Type '" + *type + "'");
    }
  }
  const auto kids = element_children(e);
  std::size_t i = 0;
  if (i < kids.size() && kids[i]->is(kNamespace, "EncryptionMethod")) {
    ed.method = kids[i]->attribute("Algorithm").value_or("");
    ++i;
  } else {
    malformed("EncryptedData without EncryptionMethod");
  }
  if (ed.method != kAes128Cbc && ed.method != kAes256Cbc) {
    malformed("unsupported EncryptionMethod '" + ed.method + "'");
  }
  if (i < kids.size() && kids[i]->is(dsig::kNamespace, "KeyInfo")) {
    for (const auto* k : element_children(*kids[i])) {
      if (k->is(dsig::kNamespace, "KeyName") && !ed.key_name && !ed.encrypted_key) {
        ed.key_name = k->text();
      } else if (k->is(kNamespace, "EncryptedKey") && !ed.key_name && !ed.encrypted_key) {
        ed.encrypted_key = EncryptedKey::from_element(*k);
      } else {
        throw Error(ErrorCode::UnsupportedKeyInfo,
                    "KeyInfo supports a single KeyName or EncryptedKey, found " +
                        k->qualified_name());
      }
    }
    ++i;
  }
  if (i >= kids.size() || !kids[i]->is(kNamespace, "CipherData")) {
    malformed("EncryptedData without CipherData");
  }
  read_cipher_data(*kids[i], ed.cipher_value, ed.cipher_reference);
  for (++i; i < kids.size(); ++i) ed.opaque.push_back(*kids[i]);
  return ed;
}

Element EncryptedData::to_element() const {
  Element e = xenc("EncryptedData");
  declare_xenc(e);
  if (id) e.set_attribute("Id", *id);
  if (type) {
    e.set_attribute("Type", std::string(*type == Mode::Element ? kTypeElement : kTypeContent));
  }
  Element method_el = xenc("EncryptionMethod");
  method_el.set_attribute("Algorithm", method);
  e.children.emplace_back(std::move(method_el));
  if (key_name || encrypted_key) {
    Element ki = ds("KeyInfo");
    ki.namespaces.push_back({"ds", std::string(dsig::kNamespace)});
    if (key_name) ki.children.emplace_back(ds("KeyName", *key_name));
    if (encrypted_key) ki.children.emplace_back(encrypted_key->to_element());
    e.children.emplace_back(std::move(ki));
  }
  e.children.emplace_back(cipher_data_element(cipher_value, cipher_reference));
  for (const auto& o : opaque) e.children.emplace_back(o);
  return e;
}

xml::Document encrypt_element(const xml::Document& doc, const Target& target, Mode mode,
                              const KeyMaterial& recipient) {
  if (recipient.kind() == KeyKind::Aes) {
    return encrypt_impl(doc, target, mode, recipient,
                        [&](EncryptedData& ed, const std::string&) {
                          ed.key_name = recipient.name();
                        })
        .doc;
  }
  const KeyMaterial cek = crypto::keygen(KeyKind::Aes, 128, "cek");
  return encrypt_impl(doc, target, mode, cek,
                      [&](EncryptedData& ed, const std::string&) {
                        EncryptedKey ek;
                        ek.recipient = recipient.name();
                        ek.wrapped = crypto::wrap_key(recipient, cek);
                        ed.encrypted_key = std::move(ek);
                      })
      .doc;
}

EncryptResult encrypt_with_key(const xml::Document& doc, const Target& target, Mode mode,
                               const KeyMaterial& cek) {
  return encrypt_impl(doc, target, mode, cek, nullptr);
}

Element make_encrypted_key(const KeyMaterial& recipient, const KeyMaterial& cek,
                           const std::vector<std::string>& data_ids) {
  EncryptedKey ek;
  ek.recipient = recipient.name();
  ek.wrapped = crypto::wrap_key(recipient, cek);
  ek.data_references = data_ids;
  return ek.to_element();
}

std::vector<NodePath> find_encrypted_data(const xml::Document& doc) {
  return xml::find_all(doc, kNamespace, "EncryptedData");
}

xml::Document decrypt(const xml::Document& doc, const crypto::Keystore& keys,
                      const DecryptOptions& options) {
  auto pending = find_encrypted_data(doc);
  if (pending.empty()) throw Error(ErrorCode::NoEncryptedData, "document has no EncryptedData");

  xml::Document current = doc;
  std::set<std::string> opened;
  for (std::size_t round = 0; !pending.empty(); ++round) {
    if (round == kMaxDecryptRounds) malformed("too many nested EncryptedData elements");
    // Innermost: the last one in document order with no EncryptedData below it.
    auto it = std::find_if(pending.rbegin(), pending.rend(), [&](const NodePath& p) {
      return !has_descendant(p, pending);
    });
    if (auto id = current.at(*it).attribute("Id")) opened.insert(*id);
    current = decrypt_one(current, *it, keys, options);
    pending = find_encrypted_data(current);
  }

  // Standalone EncryptedKeys whose data are all open have served their purpose.
  auto key_paths = xml::find_all(current, kNamespace, "EncryptedKey");
  for (auto it = key_paths.rbegin(); it != key_paths.rend(); ++it) {
    const auto ek = EncryptedKey::from_element(current.at(*it));
    const bool spent =
        !ek.data_references.empty() &&
        std::all_of(ek.data_references.begin(), ek.data_references.end(),
                    [&](const std::string& id) { return opened.count(id) != 0; });
    if (spent && !it->empty()) {
      const NodePath parent(it->begin(), it->end() - 1);
      current = xml::remove_child(current, parent, it->back());
    }
  }
  return current;
}

Bytes resolve_cipher_reference(std::string_view name, const fs::path& base) {
  const std::string n(name);
  if (n.empty() || n.find("://") != std::string::npos || n.find(':') != std::string::npos ||
      fs::path(n).is_absolute()) {
    throw Error(ErrorCode::ReferenceOutsideBase,
                "CipherReference '" + n + "' is not a relative file name");
  }
  std::error_code ec;
  const fs::path root = fs::weakly_canonical(base, ec);
  const fs::path full = fs::weakly_canonical(base / n, ec);
  if (ec) throw Error(ErrorCode::NotFound, "cannot resolve CipherReference '" + n + "'");
  const fs::path rel = full.lexically_relative(root);
  if (rel.empty() || *rel.begin() == ".." || rel.is_absolute()) {
    throw Error(ErrorCode::ReferenceOutsideBase,
                "CipherReference '" + n + "' escapes the base directory");
  }
  std::ifstream in(full, std::ios::binary);
  if (!fs::is_regular_file(full, ec) || !in) {
    throw Error(ErrorCode::NotFound, "CipherReference '" + n + "' not found");
  }
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::pair<xml::Document, Bytes> detach_cipher_value(const xml::Document& doc,
                                                    std::string_view data_id,
                                                    std::string_view name) {
  auto path = xml::path_of_id(doc, data_id);
  if (!path || !doc.at(*path).is(kNamespace, "EncryptedData")) {
    throw Error(ErrorCode::TargetUnresolved,
                "no EncryptedData with Id '" + std::string(data_id) + "'");
  }
  auto ed = EncryptedData::from_element(doc.at(*path));
  if (!ed.cipher_value) malformed("EncryptedData already uses a CipherReference");
  Bytes bytes = std::move(*ed.cipher_value);
  ed.cipher_value.reset();
  ed.cipher_reference = std::string(name);
  return {xml::replace_element(doc, *path, ed.to_element()), std::move(bytes)};
}

}  // namespace xmlseal::enc

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

#include "xmlseal/wsse.hpp"

#include "xmlseal/enc.hpp"

namespace xmlseal::wsse {

namespace {

using xml::Element;
using xml::NodePath;

[[noreturn]] void not_soap(const std::string& what) {
  throw Error(ErrorCode::NotSoapEnvelope, what);
}

NodePath child_path(const NodePath& parent, std::size_t index) {
  NodePath p = parent;
  p.push_back(index);
  return p;
}

// Index of the first element child matching (ns, local), or npos.
std::size_t child_index(const Element& e, std::string_view ns, std::string_view local) {
  for (std::size_t i = 0; i < e.children.size(); ++i) {
    if (const auto* c = e.children[i].element(); c && c->is(ns, local)) return i;
  }
  return std::string::npos;
}

std::string fresh_body_id(const xml::Document& doc) {
  for (;;) {
    std::string id = "body-" + crypto::random_hex(8);
    if (xml::find_by_id(doc, id) == nullptr) return id;
  }
}

Element security_element() {
  Element sec = xml::make_element("wsse", kWsseNamespace, "Security");
  sec.namespaces.push_back({"wsse", std::string(kWsseNamespace)});
  return sec;
}

// Adds a wsu:Id to the Body when it has none.
SoapEnvelope with_body_id(const SoapEnvelope& env) {
  if (env.body_id()) return env;
  Element body = env.body();
  const std::string id = fresh_body_id(env.document());
  body.namespaces.push_back({"wsu", std::string(xml::kWsuNamespace)});
  body.attributes.push_back({"wsu", std::string(xml::kWsuNamespace), "Id", id});
  return SoapEnvelope::from_document(
      xml::replace_element(env.document(), env.body_path(), std::move(body)));
}

// The signature must cover exactly the Body that the receiver will read;
// anything else is a relocated or substituted fragment.
void check_body_reference(dsig::VerificationReport& report, const SoapEnvelope& env) {
  const auto id = env.body_id();
  const NodePath body = env.body_path();
  bool covered = false;
  for (auto& ref : report.references) {
    if (id && ref.uri == "#" + *id && ref.resolved && *ref.resolved == body) {
      covered = true;
    } else if (ref.digest_ok) {
      ref.digest_ok = false;
      ref.detail = "reference does not resolve to the envelope Body";
    }
  }
  if (!covered) {
    if (report.references.empty()) report.references.push_back({});
    report.references.front().digest_ok = false;
    if (report.references.front().detail.empty()) {
      report.references.front().detail = "signature does not cover the envelope Body";
    }
  }
}

// The ds:Signature that is a direct child of Security, if any.
std::optional<NodePath> clear_signature(const SoapEnvelope& env) {
  const auto sec = env.security_path();
  if (!sec) return std::nullopt;
  const std::size_t i = child_index(env.document().at(*sec), dsig::kNamespace, "Signature");
  if (i == std::string::npos) return std::nullopt;
  return child_path(*sec, i);
}

SoapEnvelope strip_security(const SoapEnvelope& env) {
  const auto sec = env.security_path();
  if (!sec) return env;
  return SoapEnvelope::from_document(
      xml::remove_child(env.document(), env.header_path(), sec->back()));
}

NodePath require_security(const SoapEnvelope& env) {
  const auto sec = env.security_path();
  if (!sec || env.document().at(*sec).element_children().empty()) {
    throw Error(ErrorCode::NotProtected, "envelope has no Security material");
  }
  return *sec;
}

}  // namespace

std::string_view to_string(ProtectionOrder order) {
  return order == ProtectionOrder::SignThenEncrypt ? "sign-then-encrypt" : "encrypt-then-sign";
}

ProtectionOrder parse_order(std::string_view text) {
  if (text == "sign-then-encrypt") return ProtectionOrder::SignThenEncrypt;
  if (text == "encrypt-then-sign") return ProtectionOrder::EncryptThenSign;
  throw Error(ErrorCode::UnsupportedAlgorithm, "unknown protection order '" + std::string(text) + "'");
}

SoapEnvelope SoapEnvelope::from_document(xml::Document doc) {
  const Element& root = doc.root();
  if (!root.is(kSoapNamespace, "Envelope")) not_soap("root is not soap:Envelope");
  std::size_t headers = 0;
  std::size_t bodies = 0;
  for (const auto* c : root.element_children()) {
    if (c->is(kSoapNamespace, "Header")) {
      if (headers++ || bodies) not_soap("misplaced or repeated soap:Header");
      std::size_t securities = 0;
      for (const auto* h : c->element_children()) securities += h->is(kWsseNamespace, "Security");
      if (securities > 1) not_soap("more than one Security header");
    } else if (c->is(kSoapNamespace, "Body")) {
      ++bodies;
    } else {
      not_soap("unexpected " + c->qualified_name() + " in soap:Envelope");
    }
  }
  if (bodies != 1) not_soap("soap:Envelope needs exactly one soap:Body");
  if (headers == 0) {
    const std::size_t body = child_index(root, kSoapNamespace, "Body");
    doc = xml::insert_child(doc, {}, xml::make_element(root.prefix, kSoapNamespace, "Header"),
                            body);
  }
  return SoapEnvelope(std::move(doc));
}

NodePath SoapEnvelope::header_path() const {
  return {child_index(doc_.root(), kSoapNamespace, "Header")};
}

NodePath SoapEnvelope::body_path() const {
  return {child_index(doc_.root(), kSoapNamespace, "Body")};
}

std::optional<std::string> SoapEnvelope::body_id() const {
  if (const auto* a = body().find_attribute(xml::kWsuNamespace, "Id")) return a->value;
  return std::nullopt;
}

std::optional<NodePath> SoapEnvelope::security_path() const {
  const NodePath header = header_path();
  const std::size_t i = child_index(doc_.at(header), kWsseNamespace, "Security");
  if (i == std::string::npos) return std::nullopt;
  return child_path(header, i);
}

SoapEnvelope wrap_soap(const Element& payload) {
  Element env = xml::make_element("soap", kSoapNamespace, "Envelope");
  env.namespaces.push_back({"soap", std::string(kSoapNamespace)});
  env.children.emplace_back(xml::make_element("soap", kSoapNamespace, "Header"));
  Element body = xml::make_element("soap", kSoapNamespace, "Body");
  body.children.emplace_back(payload);
  env.children.emplace_back(std::move(body));
  return with_body_id(SoapEnvelope::from_document(xml::Document(std::move(env))));
}

Element extract_payload(const SoapEnvelope& env) {
  const auto kids = env.body().element_children();
  if (kids.size() != 1) not_soap("soap:Body must hold exactly one element");
  return *kids.front();
}

SoapEnvelope protect(const SoapEnvelope& input, ProtectionOrder order,
                     const crypto::KeyMaterial& signer, const crypto::KeyMaterial& recipient) {
  if (input.security_path()) {
    throw Error(ErrorCode::AlreadyProtected, "envelope already carries a Security header");
  }
  if (signer.kind() != crypto::KeyKind::RsaPrivate) {
    throw Error(ErrorCode::WrongKeyKind, "signer must be an rsa-private key");
  }
  if (recipient.kind() == crypto::KeyKind::Aes) {
    throw Error(ErrorCode::WrongKeyKind, "recipient must be an RSA key");
  }
  const SoapEnvelope env = with_body_id(input);
  const std::string body_id = *env.body_id();
  const NodePath body = env.body_path();
  xml::Document doc = xml::insert_child(env.document(), env.header_path(), security_element());
  const NodePath security = *SoapEnvelope::from_document(doc).security_path();
  const auto cek = crypto::keygen(crypto::KeyKind::Aes, 128, "cek");

  if (order == ProtectionOrder::SignThenEncrypt) {
    doc = dsig::sign_references(doc, security, {body_id}, signer);
    const NodePath signature = child_path(security, doc.at(security).children.size() - 1);
    auto content = enc::encrypt_with_key(doc, body, enc::Mode::Content, cek);
    auto hidden = enc::encrypt_with_key(content.doc, signature, enc::Mode::Element, cek);
    doc = xml::insert_child(hidden.doc, security,
                            enc::make_encrypted_key(recipient, cek,
                                                    {content.data_id, hidden.data_id}),
                            0);
  } else {
    auto content = enc::encrypt_with_key(doc, body, enc::Mode::Content, cek);
    doc = xml::insert_child(content.doc, security,
                            enc::make_encrypted_key(recipient, cek, {content.data_id}), 0);
    doc = dsig::sign_references(doc, security, {body_id}, signer);
  }
  return SoapEnvelope::from_document(std::move(doc));
}

SignatureRejected::SignatureRejected(dsig::VerificationReport report, ProtectionOrder order)
    : Error(ErrorCode::InvalidSignature, "envelope signature rejected: " + report.reason()),
      report_(std::move(report)),
      order_(order) {}

dsig::VerificationReport verify_envelope(const SoapEnvelope& env, const crypto::Keystore& keys) {
  require_security(env);
  const auto signature = clear_signature(env);
  if (!signature) {
    throw Error(ErrorCode::NoSignatureFound,
                "no clear Signature in the Security header; it may be encrypted");
  }
  auto report = dsig::verify_at(env.document(), *signature, keys);
  check_body_reference(report, env);
  return report;
}

Unprotected unprotect(const SoapEnvelope& env, const crypto::Keystore& keys) {
  require_security(env);
  if (clear_signature(env)) {
    // Encrypt-then-sign: the signature is checked on the ciphertext first.
    auto report = verify_envelope(env, keys);
    if (!report.valid()) throw SignatureRejected(std::move(report), ProtectionOrder::EncryptThenSign);
    auto opened = SoapEnvelope::from_document(enc::decrypt(env.document(), keys));
    return {strip_security(opened), std::move(report), ProtectionOrder::EncryptThenSign};
  }

  if (enc::find_encrypted_data(env.document()).empty()) {
    throw Error(ErrorCode::NotProtected, "Security header holds neither Signature nor encrypted data");
  }
  auto opened = SoapEnvelope::from_document(enc::decrypt(env.document(), keys));
  const auto signature = clear_signature(opened);
  if (!signature) {
    throw Error(ErrorCode::NoSignatureFound, "decrypted Security header holds no Signature");
  }
  auto report = dsig::verify_at(opened.document(), *signature, keys);
  check_body_reference(report, opened);
  if (!report.valid()) throw SignatureRejected(std::move(report), ProtectionOrder::SignThenEncrypt);
  return {strip_security(opened), std::move(report), ProtectionOrder::SignThenEncrypt};
}

}  // namespace xmlseal::wsse

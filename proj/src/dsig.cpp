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

#include "xmlseal/dsig.hpp"

#include <algorithm>
#include <cctype>

#include "xmlseal/c14n.hpp"
#include "xmlseal/error.hpp"

namespace xmlseal::dsig {

namespace {

using crypto::Bytes;
using crypto::DigestAlg;
using crypto::KeyMaterial;
using xml::Element;
using xml::NodePath;

constexpr std::string_view kPrefix = "ds";

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorCode::MalformedSignatureBlock, what);
}

Element ds(std::string_view local, std::string text = {}) {
  return xml::make_element(kPrefix, kNamespace, local, std::move(text));
}

Element ds_algorithm(std::string_view local, std::string_view uri) {
  Element e = ds(local);
  e.set_attribute("Algorithm", std::string(uri));
  return e;
}

std::string_view digest_uri(DigestAlg alg) {
  return alg == DigestAlg::Sha1 ? kSha1 : kSha256;
}

DigestAlg digest_from_uri(std::string_view uri) {
  if (uri == kSha256) return DigestAlg::Sha256;
  if (uri == kSha1) return DigestAlg::Sha1;
  malformed("unsupported DigestMethod '" + std::string(uri) + "'");
}

DigestAlg signature_digest(std::string_view uri) {
  if (uri == kRsaSha256) return DigestAlg::Sha256;
  if (uri == kRsaSha1) return DigestAlg::Sha1;
  malformed("unsupported SignatureMethod '" + std::string(uri) + "'");
}

Bytes decode(std::string_view text, std::string_view what) {
  try {
    return crypto::base64_decode(text);
  } catch (const Error&) {
    malformed("invalid base64 in " + std::string(what));
  }
}

// Element children in the DSig namespace; anything else but whitespace
// and comments makes the block malformed.
std::vector<const Element*> ds_children(const Element& e) {
  std::vector<const Element*> out;
  for (const auto& n : e.children) {
    if (const auto* t = n.text()) {
      if (t->value.find_first_not_of(" \t\n") != std::string::npos) {
        malformed("unexpected text inside " + e.local_name);
      }
    } else if (const auto* c = n.element()) {
      if (c->namespace_uri != kNamespace) {
        malformed("unexpected element " + c->qualified_name() + " inside " +
                  e.local_name);
      }
      out.push_back(c);
    }
  }
  return out;
}

std::string required_algorithm(const Element& e) {
  auto alg = e.attribute("Algorithm");
  if (!alg) malformed(e.local_name + " lacks an Algorithm attribute");
  return *alg;
}

bool is_bare_name(std::string_view uri) {
  if (uri.empty() || uri.front() == '.') return false;
  return std::all_of(uri.begin(), uri.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' ||
           c == '-';
  });
}

Reference parse_reference(const Element& e) {
  Reference ref;
  auto uri = e.attribute("URI");
  if (!uri) malformed("Reference without URI");
  ref.uri = *uri;
  if (!(ref.uri.empty() || (ref.uri.size() > 1 && ref.uri[0] == '#') ||
        is_bare_name(ref.uri))) {
    malformed("unsupported Reference URI '" + ref.uri + "'");
  }
  auto kids = ds_children(e);
  std::size_t i = 0;
  if (i < kids.size() && kids[i]->local_name == "Transforms") {
    for (const auto* t : ds_children(*kids[i])) {
      if (t->local_name != "Transform") malformed("unexpected " + t->local_name);
      auto alg = required_algorithm(*t);
      if (alg != kEnvelopedTransform) {
        malformed("unsupported Transform '" + alg + "'");
      }
      ref.transforms.push_back(std::move(alg));
    }
    ++i;
  }
  if (i + 2 != kids.size() || kids[i]->local_name != "DigestMethod" ||
      kids[i + 1]->local_name != "DigestValue") {
    malformed("Reference must hold DigestMethod then DigestValue");
  }
  ref.digest_alg = digest_from_uri(required_algorithm(*kids[i]));
  ref.digest_value = decode(kids[i + 1]->text(), "DigestValue");
  if (ref.digest_value.size() != crypto::digest_size(ref.digest_alg)) {
    malformed("DigestValue length does not match DigestMethod");
  }
  return ref;
}

KeyInfo parse_key_info(const Element& e) {
  KeyInfo info;
  for (const auto* k : ds_children(e)) {
    if (k->local_name == "KeyName") {
      if (info.key_name) malformed("multiple KeyName elements");
      info.key_name = k->text();
    } else if (k->local_name == "KeyValue") {
      const auto kv = ds_children(*k);
      if (kv.size() != 1 || kv[0]->local_name != "RSAKeyValue") {
        malformed("KeyValue must hold one RSAKeyValue");
      }
      const auto parts = ds_children(*kv[0]);
      if (parts.size() != 2 || parts[0]->local_name != "Modulus" ||
          parts[1]->local_name != "Exponent") {
        malformed("RSAKeyValue must hold Modulus then Exponent");
      }
      try {
        info.embedded = KeyMaterial::rsa_public_from_components(
            "embedded", decode(parts[0]->text(), "Modulus"),
            decode(parts[1]->text(), "Exponent"));
      } catch (const Error& err) {
        if (err.code() == ErrorCode::MalformedSignatureBlock) throw;
        malformed("unusable RSAKeyValue");
      }
    } else {
      malformed("unsupported KeyInfo child " + k->local_name);
    }
  }
  return info;
}

std::size_t signed_info_index(const Element& signature) {
  for (std::size_t i = 0; i < signature.children.size(); ++i) {
    if (const auto* e = signature.children[i].element();
        e != nullptr && e->is(kNamespace, "SignedInfo")) {
      return i;
    }
  }
  malformed("Signature without SignedInfo");
}

bool is_prefix(const NodePath& prefix, const NodePath& path) {
  return prefix.size() <= path.size() &&
         std::equal(prefix.begin(), prefix.end(), path.begin());
}

// Recomputes one Reference digest from the current document.
struct Recomputed {
  std::optional<Bytes> digest;
  std::optional<NodePath> resolved;
  std::string detail;
};

Recomputed recompute(const xml::Document& doc, const NodePath& signature,
                     const Reference& ref,
                     const std::optional<Bytes>& detached_target) {
  Recomputed out;
  if (is_bare_name(ref.uri)) {
    if (!detached_target) {
      throw Error(ErrorCode::DetachedTargetMissing,
                  "detached target '" + ref.uri + "' was not supplied");
    }
    out.digest = crypto::digest(ref.digest_alg, *detached_target);
    return out;
  }
  NodePath subtree;
  if (!ref.uri.empty()) {
    auto path = xml::path_of_id(doc, std::string_view(ref.uri).substr(1));
    if (!path) {
      out.detail = "reference target " + ref.uri + " not found";
      return out;
    }
    subtree = *path;
  }
  std::optional<NodePath> exclude;
  if (ref.enveloped() && is_prefix(subtree, signature)) exclude = signature;
  out.resolved = subtree;
  out.digest = crypto::digest(
      ref.digest_alg, crypto::as_bytes(c14n::canonicalize(doc, subtree, exclude).bytes));
  return out;
}

std::string new_object_id(const Element& payload) {
  const xml::Document probe(payload);
  for (;;) {
    std::string id = "obj-" + crypto::random_hex(8);
    if (xml::find_by_id(probe, id) == nullptr) return id;
  }
}

SignatureBlock new_block(const KeyMaterial& signer, const SignOptions& options) {
  if (signer.kind() != crypto::KeyKind::RsaPrivate) {
    throw Error(ErrorCode::WrongKeyKind, "signing requires an rsa-private key");
  }
  SignatureBlock block;
  block.signed_info.c14n_alg = std::string(c14n::kAlgorithm);
  block.signed_info.signature_alg = std::string(kRsaSha256);
  KeyInfo info;
  info.key_name = options.key_name.empty() ? signer.name() : options.key_name;
  if (options.embed_public_key) info.embedded = signer.public_key();
  block.key_info = std::move(info);
  return block;
}

Reference new_reference(std::string uri, bool enveloped) {
  Reference ref;
  ref.uri = std::move(uri);
  if (enveloped) ref.transforms.emplace_back(kEnvelopedTransform);
  ref.digest_value.assign(crypto::digest_size(ref.digest_alg), 0);
  return ref;
}

// `doc` already contains the Signature rendered from `block` at `at`.
// Fills in digests and the signature value.
xml::Document complete_signature(xml::Document doc, const NodePath& at,
                                 SignatureBlock block, const KeyMaterial& signer,
                                 const std::optional<Bytes>& detached_target) {
  for (auto& ref : block.signed_info.references) {
    auto r = recompute(doc, at, ref, detached_target);
    if (!r.digest) throw Error(ErrorCode::TargetUnresolved, r.detail);
    ref.digest_value = std::move(*r.digest);
  }
  doc = xml::replace_element(doc, at, block.to_element());
  NodePath si = at;
  si.push_back(signed_info_index(doc.at(at)));
  const auto canonical = c14n::canonicalize(doc, si);
  block.signature_value =
      crypto::sign(signer, DigestAlg::Sha256, crypto::as_bytes(canonical.bytes));
  return xml::replace_element(doc, at, block.to_element());
}

}  // namespace

std::string_view to_string(Topology t) {
  switch (t) {
    case Topology::Enveloped: return "enveloped";
    case Topology::Enveloping: return "enveloping";
    case Topology::Detached: return "detached";
  }
  return "unknown";
}

bool Reference::enveloped() const {
  return std::find(transforms.begin(), transforms.end(), kEnvelopedTransform) !=
         transforms.end();
}

SignatureBlock SignatureBlock::from_element(const Element& signature) {
  if (!signature.is(kNamespace, "Signature")) malformed("not a ds:Signature");
  SignatureBlock block;
  if (auto id = signature.attribute("Id")) block.id = *id;
  const auto kids = ds_children(signature);
  std::size_t i = 0;
  if (i >= kids.size() || kids[i]->local_name != "SignedInfo") {
    malformed("Signature must start with SignedInfo");
  }
  {
    const auto si = ds_children(*kids[i]);
    if (si.size() < 3 || si[0]->local_name != "CanonicalizationMethod" ||
        si[1]->local_name != "SignatureMethod") {
      malformed("SignedInfo must hold CanonicalizationMethod, SignatureMethod, Reference+");
    }
    block.signed_info.c14n_alg = required_algorithm(*si[0]);
    if (block.signed_info.c14n_alg != c14n::kAlgorithm) {
      malformed("unsupported CanonicalizationMethod '" + block.signed_info.c14n_alg + "'");
    }
    block.signed_info.signature_alg = required_algorithm(*si[1]);
    signature_digest(block.signed_info.signature_alg);
    for (std::size_t k = 2; k < si.size(); ++k) {
      if (si[k]->local_name != "Reference") malformed("unexpected " + si[k]->local_name);
      block.signed_info.references.push_back(parse_reference(*si[k]));
    }
    ++i;
  }
  if (i >= kids.size() || kids[i]->local_name != "SignatureValue") {
    malformed("SignedInfo must be followed by SignatureValue");
  }
  block.signature_value = decode(kids[i]->text(), "SignatureValue");
  ++i;
  if (i < kids.size() && kids[i]->local_name == "KeyInfo") {
    block.key_info = parse_key_info(*kids[i]);
    ++i;
  }
  for (; i < kids.size(); ++i) {
    if (kids[i]->local_name != "Object") malformed("unexpected " + kids[i]->local_name);
    block.objects.push_back(*kids[i]);
  }
  return block;
}

Element SignatureBlock::to_element() const {
  Element sig = ds("Signature");
  sig.namespaces.push_back({std::string(kPrefix), std::string(kNamespace)});
  if (id) sig.set_attribute("Id", *id);

  Element si = ds("SignedInfo");
  si.children.emplace_back(ds_algorithm("CanonicalizationMethod", signed_info.c14n_alg));
  si.children.emplace_back(ds_algorithm("SignatureMethod", signed_info.signature_alg));
  for (const auto& ref : signed_info.references) {
    Element r = ds("Reference");
    r.set_attribute("URI", ref.uri);
    if (!ref.transforms.empty()) {
      Element ts = ds("Transforms");
      for (const auto& t : ref.transforms) ts.children.emplace_back(ds_algorithm("Transform", t));
      r.children.emplace_back(std::move(ts));
    }
    r.children.emplace_back(ds_algorithm("DigestMethod", digest_uri(ref.digest_alg)));
    r.children.emplace_back(ds("DigestValue", crypto::base64_encode(ref.digest_value)));
    si.children.emplace_back(std::move(r));
  }
  sig.children.emplace_back(std::move(si));
  sig.children.emplace_back(ds("SignatureValue", crypto::base64_encode(signature_value)));

  if (key_info) {
    Element ki = ds("KeyInfo");
    if (key_info->key_name) ki.children.emplace_back(ds("KeyName", *key_info->key_name));
    if (key_info->embedded) {
      Element rsa = ds("RSAKeyValue");
      rsa.children.emplace_back(
          ds("Modulus", crypto::base64_encode(key_info->embedded->modulus())));
      rsa.children.emplace_back(
          ds("Exponent", crypto::base64_encode(key_info->embedded->public_exponent())));
      Element kv = ds("KeyValue");
      kv.children.emplace_back(std::move(rsa));
      ki.children.emplace_back(std::move(kv));
    }
    sig.children.emplace_back(std::move(ki));
  }
  for (const auto& obj : objects) sig.children.emplace_back(obj);
  return sig;
}

bool VerificationReport::valid() const {
  return signature_ok && !references.empty() &&
         std::all_of(references.begin(), references.end(),
                     [](const ReferenceResult& r) { return r.digest_ok; });
}

std::string VerificationReport::reason() const {
  for (const auto& r : references) {
    if (!r.digest_ok) {
      return "reference '" + r.uri + "': " +
             (r.detail.empty() ? "digest mismatch" : r.detail);
    }
  }
  if (references.empty()) return "no references";
  if (!signature_ok) return "SignatureValue does not verify";
  return {};
}

xml::Document sign_enveloped(const xml::Document& doc, const KeyMaterial& signer,
                             const SignOptions& options,
                             const std::vector<std::string>& ids) {
  SignatureBlock block = new_block(signer, options);
  if (ids.empty()) {
    block.signed_info.references.push_back(new_reference("", true));
  }
  for (const auto& id : ids) {
    if (xml::find_by_id(doc, id) == nullptr) {
      throw Error(ErrorCode::TargetUnresolved, "no element with Id '" + id + "'");
    }
    block.signed_info.references.push_back(new_reference("#" + id, true));
  }
  auto placed = xml::insert_child(doc, {}, block.to_element());
  const NodePath at{placed.root().children.size() - 1};
  return complete_signature(std::move(placed), at, std::move(block), signer, std::nullopt);
}

xml::Document sign_enveloping(const Element& payload, const KeyMaterial& signer,
                              const SignOptions& options) {
  SignatureBlock block = new_block(signer, options);
  const std::string id = new_object_id(payload);
  Element object = ds("Object");
  object.set_attribute("Id", id);
  object.children.emplace_back(payload);
  block.objects.push_back(std::move(object));
  block.signed_info.references.push_back(new_reference("#" + id, false));
  xml::Document doc(block.to_element());
  xml::check_unique_ids(doc.root());
  return complete_signature(std::move(doc), {}, std::move(block), signer, std::nullopt);
}

xml::Document sign_detached(crypto::ByteView target, std::string_view target_name,
                            const KeyMaterial& signer, const SignOptions& options) {
  if (target_name.empty()) {
    throw Error(ErrorCode::EmptyTargetName, "detached target name is empty");
  }
  if (!is_bare_name(target_name)) {
    throw Error(ErrorCode::EmptyTargetName,
                "detached target name must be a plain file name: '" +
                    std::string(target_name) + "'");
  }
  SignatureBlock block = new_block(signer, options);
  block.signed_info.references.push_back(new_reference(std::string(target_name), false));
  xml::Document doc(block.to_element());
  return complete_signature(std::move(doc), {}, std::move(block), signer,
                            Bytes(target.begin(), target.end()));
}

xml::Document sign_references(const xml::Document& doc, const NodePath& parent,
                              const std::vector<std::string>& ids,
                              const KeyMaterial& signer, const SignOptions& options) {
  if (ids.empty()) throw Error(ErrorCode::TargetUnresolved, "nothing to sign");
  SignatureBlock block = new_block(signer, options);
  for (const auto& id : ids) {
    if (xml::find_by_id(doc, id) == nullptr) {
      throw Error(ErrorCode::TargetUnresolved, "no element with Id '" + id + "'");
    }
    block.signed_info.references.push_back(new_reference("#" + id, false));
  }
  auto placed = xml::insert_child(doc, parent, block.to_element());
  NodePath at = parent;
  at.push_back(placed.at(parent).children.size() - 1);
  return complete_signature(std::move(placed), at, std::move(block), signer, std::nullopt);
}

Element extract_payload(const xml::Document& signed_doc) {
  const auto block = SignatureBlock::from_element(signed_doc.root());
  if (block.objects.empty()) malformed("signature has no Object");
  // The payload is the Object the signature actually references, not
  // whichever Object happens to come first.
  const auto& refs = block.signed_info.references;
  for (const auto& obj : block.objects) {
    const auto id = obj.id();
    const bool referenced = id && std::any_of(refs.begin(), refs.end(), [&](const Reference& r) {
                              return r.uri == "#" + *id;
                            });
    if (!referenced) continue;
    const auto kids = obj.element_children();
    if (kids.size() != 1) malformed("Object must hold exactly one element");
    return *kids.front();
  }
  malformed("no Object is referenced by the signature");
}

std::vector<NodePath> find_signatures(const xml::Document& doc) {
  return xml::find_all(doc, kNamespace, "Signature");
}

VerificationReport verify(const xml::Document& doc, const crypto::Keystore& keys,
                          const VerifyOptions& options) {
  const auto found = find_signatures(doc);
  if (found.empty()) throw Error(ErrorCode::NoSignatureFound, "document carries no Signature");
  if (found.size() > 1) {
    throw Error(ErrorCode::MultipleSignatures,
                "document carries " + std::to_string(found.size()) + " Signature elements");
  }
  if (found.front().size() > 1) {
    malformed("Signature must be the root or a direct child of the root");
  }
  return verify_at(doc, found.front(), keys, options);
}

VerificationReport verify_at(const xml::Document& doc, const NodePath& signature,
                             const crypto::Keystore& keys, const VerifyOptions& options) {
  const auto found = find_signatures(doc);
  if (found.empty()) throw Error(ErrorCode::NoSignatureFound, "document carries no Signature");
  if (found.size() > 1) {
    throw Error(ErrorCode::MultipleSignatures,
                "document carries " + std::to_string(found.size()) + " Signature elements");
  }
  if (found.front() != signature) malformed("no Signature at the given location");

  const auto block = SignatureBlock::from_element(doc.at(signature));
  const auto& refs = block.signed_info.references;
  const bool any_enveloped = std::any_of(refs.begin(), refs.end(),
                                         [](const Reference& r) { return r.enveloped(); });
  const bool all_enveloped = std::all_of(refs.begin(), refs.end(),
                                         [](const Reference& r) { return r.enveloped(); });
  VerificationReport report;
  if (any_enveloped) {
    if (!all_enveloped) malformed("enveloped transform must appear on every Reference");
    if (signature.empty()) malformed("enveloped Signature cannot be the document root");
    if (!block.objects.empty()) malformed("enveloped Signature must not carry Objects");
    report.topology = Topology::Enveloped;
  } else if (!block.objects.empty()) {
    if (!signature.empty()) malformed("Objects are only allowed in an enveloping Signature");
    report.topology = Topology::Enveloping;
  } else {
    report.topology = Topology::Detached;
  }

  // Key resolution first: an unknown key is an error, not a verdict.
  std::optional<KeyMaterial> key;
  if (block.key_info && block.key_info->key_name && keys.contains(*block.key_info->key_name)) {
    key = keys.resolve(*block.key_info->key_name, crypto::KeyKind::RsaPublic);
    report.key_used = *block.key_info->key_name;
  } else if (block.key_info && block.key_info->embedded && options.trust_embedded_keys) {
    key = *block.key_info->embedded;
    report.key_used = "embedded";
  } else if (block.key_info && block.key_info->key_name) {
    throw Error(ErrorCode::UnknownKey,
                "no key named '" + *block.key_info->key_name + "' in the keystore");
  } else if (block.key_info && block.key_info->embedded) {
    throw Error(ErrorCode::UnknownKey,
                "signature only carries an embedded key, which is not trusted");
  } else {
    throw Error(ErrorCode::UnknownKey, "signature does not identify its key");
  }

  for (const auto& ref : refs) {
    ReferenceResult result;
    result.uri = ref.uri;
    auto r = recompute(doc, signature, ref, options.detached_target);
    result.resolved = r.resolved;
    result.detail = r.detail;
    result.digest_ok = r.digest && *r.digest == ref.digest_value;
    if (report.topology == Topology::Enveloping && result.digest_ok &&
        !(r.resolved && is_prefix(signature, *r.resolved))) {
      result.digest_ok = false;
      result.detail = "enveloping reference points outside the Signature";
    }
    report.references.push_back(std::move(result));
  }
  if (report.topology == Topology::Enveloping) {
    // An Object no Reference covers is attacker real estate.
    const Element& sig = doc.at(signature);
    for (std::size_t i = 0; i < sig.children.size(); ++i) {
      const auto* obj = sig.children[i].element();
      if (obj == nullptr || !obj->is(kNamespace, "Object")) continue;
      NodePath at = signature;
      at.push_back(i);
      const bool covered =
          std::any_of(report.references.begin(), report.references.end(),
                      [&](const ReferenceResult& r) { return r.resolved && is_prefix(at, *r.resolved); });
      if (!covered) {
        ReferenceResult stray;
        stray.uri = obj->id() ? "#" + *obj->id() : std::string();
        stray.detail = "Object is not covered by any Reference";
        report.references.push_back(std::move(stray));
      }
    }
  }

  NodePath si = signature;
  si.push_back(signed_info_index(doc.at(signature)));
  const auto canonical = c14n::canonicalize(doc, si);
  report.signature_ok =
      crypto::verify(*key, signature_digest(block.signed_info.signature_alg),
                     crypto::as_bytes(canonical.bytes), block.signature_value);
  return report;
}

}  // namespace xmlseal::dsig

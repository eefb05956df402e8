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

// XML Signature: building and verifying <ds:Signature> elements in the
// enveloped, enveloping and detached layouts.
//
// Wire form (whitespace-free, `ds` bound to the XML-DSig namespace):
//
//   <ds:Signature>
//     <ds:SignedInfo>
//       <ds:CanonicalizationMethod Algorithm=".."/>
//       <ds:SignatureMethod Algorithm=".."/>
//       <ds:Reference URI="..">            (one or more)
//         <ds:Transforms>..</ds:Transforms>  (enveloped layout only)
//         <ds:DigestMethod Algorithm=".."/>
//         <ds:DigestValue>base64</ds:DigestValue>
//       </ds:Reference>
//     </ds:SignedInfo>
//     <ds:SignatureValue>base64</ds:SignatureValue>
//     <ds:KeyInfo>..</ds:KeyInfo>          (optional)
//     <ds:Object Id="obj-..">..</ds:Object> (enveloping layout only)
//   </ds:Signature>
//
// Reference URIs are restricted to "" (whole document), "#id" (same
// document element) and bare names (detached target). Nothing is ever
// fetched from outside the caller-supplied inputs.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "xmlseal/crypto.hpp"
#include "xmlseal/keystore.hpp"
#include "xmlseal/xml.hpp"

namespace xmlseal::dsig {

inline constexpr std::string_view kNamespace = "http://www.w3.org/2000/09/xmldsig#";
inline constexpr std::string_view kRsaSha256 =
    "http://www.w3.org/2001/04/xmldsig-more#rsa-sha256";
inline constexpr std::string_view kRsaSha1 = "http://www.w3.org/2000/09/xmldsig#rsa-sha1";
inline constexpr std::string_view kSha256 = "http://www.w3.org/2001/04/xmlenc#sha256";
inline constexpr std::string_view kSha1 = "http://www.w3.org/2000/09/xmldsig#sha1";
inline constexpr std::string_view kEnvelopedTransform =
    "http://www.w3.org/2000/09/xmldsig#enveloped-signature";

enum class Topology { Enveloped, Enveloping, Detached };

std::string_view to_string(Topology t);

struct Reference {
  std::string uri;
  std::vector<std::string> transforms;
  crypto::DigestAlg digest_alg = crypto::DigestAlg::Sha256;
  crypto::Bytes digest_value;

  bool enveloped() const;
};

struct SignedInfo {
  std::string c14n_alg;
  std::string signature_alg;
  std::vector<Reference> references;
};

struct KeyInfo {
  std::optional<std::string> key_name;
  /// RSAKeyValue carried in the signature. Only used for verification
  /// when the caller explicitly trusts embedded keys.
  std::optional<crypto::KeyMaterial> embedded;
};

/// In-memory form of a <ds:Signature> element.
struct SignatureBlock {
  std::optional<std::string> id;  // ignored during verification
  SignedInfo signed_info;
  crypto::Bytes signature_value;
  std::optional<KeyInfo> key_info;
  /// Complete <ds:Object> elements.
  std::vector<xml::Element> objects;

  /// Errors: MalformedSignatureBlock.
  static SignatureBlock from_element(const xml::Element& signature);
  xml::Element to_element() const;
};

struct SignOptions {
  /// KeyName written into KeyInfo; empty means the signer's key name.
  std::string key_name;
  bool embed_public_key = false;
};

struct VerifyOptions {
  bool trust_embedded_keys = false;
  std::optional<crypto::Bytes> detached_target;
};

struct ReferenceResult {
  std::string uri;
  bool digest_ok = false;
  /// Where a same-document reference resolved to.
  std::optional<xml::NodePath> resolved;
  std::string detail;
};

struct VerificationReport {
  Topology topology = Topology::Enveloped;
  std::vector<ReferenceResult> references;
  bool signature_ok = false;
  std::string key_used;

  /// True iff every reference digest and the SignatureValue check out.
  bool valid() const;
  /// Empty when valid; otherwise the first failure.
  std::string reason() const;
};

/// Appends a Signature as the last child of the root. With no `ids` the
/// single Reference covers the whole document (URI ""); otherwise one
/// Reference per Id. Every Reference carries the enveloped transform.
xml::Document sign_enveloped(const xml::Document& doc,
                             const crypto::KeyMaterial& signer,
                             const SignOptions& options = {},
                             const std::vector<std::string>& ids = {});

/// Returns a document whose root is the Signature and whose Object holds
/// `payload`.
xml::Document sign_enveloping(const xml::Element& payload,
                              const crypto::KeyMaterial& signer,
                              const SignOptions& options = {});

/// Signature over raw bytes identified by `target_name`.
/// Errors: EmptyTargetName.
xml::Document sign_detached(crypto::ByteView target, std::string_view target_name,
                            const crypto::KeyMaterial& signer,
                            const SignOptions& options = {});

/// Inserts a Signature under `parent` covering the elements with the given
/// Ids (no transforms). Used for header-carried signatures.
xml::Document sign_references(const xml::Document& doc, const xml::NodePath& parent,
                              const std::vector<std::string>& ids,
                              const crypto::KeyMaterial& signer,
                              const SignOptions& options = {});

/// The payload of an enveloping signature document.
xml::Element extract_payload(const xml::Document& signed_doc);

/// Paths of every ds:Signature element, in document order.
std::vector<xml::NodePath> find_signatures(const xml::Document& doc);

/// Verifies the single Signature of `doc`, which must be the root or a
/// direct child of the root.
/// Errors: NoSignatureFound, MultipleSignatures, UnknownKey,
/// MalformedSignatureBlock, DetachedTargetMissing.
VerificationReport verify(const xml::Document& doc, const crypto::Keystore& keys,
                          const VerifyOptions& options = {});

/// Verifies the Signature at an explicit location. The document must still
/// contain exactly one Signature.
VerificationReport verify_at(const xml::Document& doc, const xml::NodePath& signature,
                             const crypto::Keystore& keys,
                             const VerifyOptions& options = {});

}  // namespace xmlseal::dsig

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

// SOAP 1.1 envelopes with a WS-Security header.
//
//   <soap:Envelope>
//     <soap:Header>
//       <wsse:Security>
//         <xenc:EncryptedKey Recipient="bob">..</xenc:EncryptedKey>
//         <ds:Signature>..</ds:Signature>      (or its EncryptedData)
//       </wsse:Security>
//     </soap:Header>
//     <soap:Body wsu:Id="body-..">payload or EncryptedData</soap:Body>
//   </soap:Envelope>
//
// Sign-then-encrypt hides the Signature under the same content key as the
// Body, so verifying needs the recipient's private key. Encrypt-then-sign
// leaves the Signature in the clear over the ciphertext, so anyone holding
// the signer's public key can check it without decrypting.
//
// No timestamps, nonces or replay protection.

#pragma once

#include <string>
#include <string_view>

#include "xmlseal/crypto.hpp"
#include "xmlseal/dsig.hpp"
#include "xmlseal/error.hpp"
#include "xmlseal/keystore.hpp"
#include "xmlseal/xml.hpp"

namespace xmlseal::wsse {

inline constexpr std::string_view kSoapNamespace = "http://schemas.xmlsoap.org/soap/envelope/";
inline constexpr std::string_view kWsseNamespace =
    "http://docs.oasis-open.org/wss/2004/01/oasis-200401-wss-wssecurity-secext-1.0.xsd";

enum class ProtectionOrder { SignThenEncrypt, EncryptThenSign };

/// "sign-then-encrypt" or "encrypt-then-sign".
std::string_view to_string(ProtectionOrder order);
/// Errors: UnsupportedAlgorithm for anything else.
ProtectionOrder parse_order(std::string_view text);

class SoapEnvelope {
 public:
  /// Validates the framing: a soap:Envelope root with an optional Header
  /// followed by exactly one Body, and at most one Security header. A
  /// missing Header is added.
  /// Errors: NotSoapEnvelope.
  static SoapEnvelope from_document(xml::Document doc);

  const xml::Document& document() const { return doc_; }
  const xml::Element& body() const { return doc_.at(body_path()); }
  xml::NodePath header_path() const;
  xml::NodePath body_path() const;
  /// The Body's wsu:Id, if any.
  std::optional<std::string> body_id() const;
  std::optional<xml::NodePath> security_path() const;

 private:
  explicit SoapEnvelope(xml::Document doc) : doc_(std::move(doc)) {}
  xml::Document doc_;
};

/// Empty Header, payload inside a Body whose wsu:Id is unique.
SoapEnvelope wrap_soap(const xml::Element& payload);

/// The single element inside the Body. Errors: NotSoapEnvelope.
xml::Element extract_payload(const SoapEnvelope& env);

/// Signs and encrypts the Body for `recipient`.
/// Errors: AlreadyProtected, WrongKeyKind.
SoapEnvelope protect(const SoapEnvelope& env, ProtectionOrder order,
                     const crypto::KeyMaterial& signer, const crypto::KeyMaterial& recipient);

struct Unprotected {
  SoapEnvelope envelope;
  dsig::VerificationReport report;
  ProtectionOrder order;
};

/// Thrown by unprotect() when the signature does not hold; carries the
/// report so callers can show which part failed.
class SignatureRejected : public Error {
 public:
  SignatureRejected(dsig::VerificationReport report, ProtectionOrder order);
  const dsig::VerificationReport& report() const { return report_; }
  ProtectionOrder order() const { return order_; }

 private:
  dsig::VerificationReport report_;
  ProtectionOrder order_;
};

/// Detects the order, decrypts and verifies, and strips the Security
/// header. With encrypt-then-sign the signature is checked before any
/// decryption is attempted.
/// Errors: NotProtected, UnknownKey, InvalidSignature (as
/// SignatureRejected), NoSignatureFound, and any decryption error.
Unprotected unprotect(const SoapEnvelope& env, const crypto::Keystore& keys);

/// Verifies a clear Signature in the Security header without decrypting.
/// Only possible for encrypt-then-sign envelopes.
/// Errors: NotProtected, NoSignatureFound, UnknownKey.
dsig::VerificationReport verify_envelope(const SoapEnvelope& env, const crypto::Keystore& keys);

}  // namespace xmlseal::wsse

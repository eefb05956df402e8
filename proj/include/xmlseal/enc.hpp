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

// XML Encryption of elements and element content.
//
//   <xenc:EncryptedData Id=".." Type="..#Element|..#Content">
//     <xenc:EncryptionMethod Algorithm="..#aes128-cbc"/>
//     <ds:KeyInfo>                       (optional)
//       <ds:KeyName>shared</ds:KeyName>      symmetric key by name, or
//       <xenc:EncryptedKey Recipient="bob">  content key wrapped for bob
//     </ds:KeyInfo>
//     <xenc:CipherData>
//       <xenc:CipherValue>base64(IV || AES-CBC)</xenc:CipherValue>
//       or <xenc:CipherReference URI="file-name"/>
//     </xenc:CipherData>
//   </xenc:EncryptedData>
//
// An EncryptedData without KeyInfo is decrypted with whichever
// EncryptedKey elsewhere in the document lists it in its ReferenceList.
//
// CBC carries no MAC: a tampered ciphertext is detected only when the
// padding or the decrypted markup fails to parse. Ciphertext integrity
// comes from signing after encrypting.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "xmlseal/crypto.hpp"
#include "xmlseal/keystore.hpp"
#include "xmlseal/xml.hpp"

namespace xmlseal::enc {

inline constexpr std::string_view kNamespace = "http://www.w3.org/2001/04/xmlenc#";
inline constexpr std::string_view kTypeElement = "http://www.w3.org/2001/04/xmlenc#Element";
inline constexpr std::string_view kTypeContent = "http://www.w3.org/2001/04/xmlenc#Content";
inline constexpr std::string_view kAes128Cbc = "http://www.w3.org/2001/04/xmlenc#aes128-cbc";
inline constexpr std::string_view kAes256Cbc = "http://www.w3.org/2001/04/xmlenc#aes256-cbc";
inline constexpr std::string_view kRsaOaep = "http://www.w3.org/2001/04/xmlenc#rsa-oaep-mgf1p";

enum class Mode { Element, Content };

/// A content-encryption key wrapped for one recipient.
struct EncryptedKey {
  std::optional<std::string> id;
  std::string recipient;
  crypto::Bytes wrapped;
  /// Ids (without '#') of the EncryptedData elements this key opens.
  std::vector<std::string> data_references;

  /// Errors: MalformedEncryptedData.
  static EncryptedKey from_element(const xml::Element& e);
  xml::Element to_element() const;
};

struct EncryptedData {
  std::optional<std::string> id;
  std::optional<Mode> type;
  std::string method{kAes128Cbc};
  std::optional<std::string> key_name;
  std::optional<EncryptedKey> encrypted_key;
  std::optional<crypto::Bytes> cipher_value;
  std::optional<std::string> cipher_reference;
  /// EncryptionProperties and other trailing children, kept verbatim.
  std::vector<xml::Element> opaque;

  /// Errors: MalformedEncryptedData, UnsupportedKeyInfo.
  static EncryptedData from_element(const xml::Element& e);
  xml::Element to_element() const;
};

/// An element addressed by Id or by path.
using Target = std::variant<std::string, xml::NodePath>;

/// Replaces the target (element mode) or its children (content mode) with
/// an EncryptedData. An RSA recipient gets a fresh AES-128 content key
/// carried in an EncryptedKey; an AES recipient is referenced by KeyName.
/// Errors: TargetUnresolved, RootElementEncryptionUnsupported, WrongKeyKind.
xml::Document encrypt_element(const xml::Document& doc, const Target& target,
                              Mode mode, const crypto::KeyMaterial& recipient);

struct EncryptResult {
  xml::Document doc;
  std::string data_id;
};

/// Encrypts under `cek` and emits no KeyInfo; pair with
/// make_encrypted_key() to deliver the key elsewhere in the document.
EncryptResult encrypt_with_key(const xml::Document& doc, const Target& target, Mode mode,
                               const crypto::KeyMaterial& cek);

/// EncryptedKey element wrapping `cek` for `recipient`, listing `data_ids`.
xml::Element make_encrypted_key(const crypto::KeyMaterial& recipient,
                                const crypto::KeyMaterial& cek,
                                const std::vector<std::string>& data_ids);

struct DecryptOptions {
  /// Directory that CipherReference names resolve against. Without one,
  /// CipherReference is refused.
  std::optional<std::filesystem::path> cipher_base;
};

/// Replaces every EncryptedData by its plaintext, innermost first, and
/// drops standalone EncryptedKey elements whose data were all decrypted.
/// Errors: NoEncryptedData, UnknownKey, UnwrapFailed, PaddingOrKeyError,
/// MalformedCipherPayload, MalformedEncryptedData, ReferenceOutsideBase,
/// NotFound.
xml::Document decrypt(const xml::Document& doc, const crypto::Keystore& keys,
                      const DecryptOptions& options = {});

/// Reads `name` relative to `base`, refusing anything that escapes it.
/// Errors: ReferenceOutsideBase, NotFound.
crypto::Bytes resolve_cipher_reference(std::string_view name,
                                       const std::filesystem::path& base);

/// Moves the CipherValue of EncryptedData `data_id` out of the document,
/// leaving a CipherReference to `name`. Returns the new document and the
/// ciphertext the caller should store under that name.
std::pair<xml::Document, crypto::Bytes> detach_cipher_value(const xml::Document& doc,
                                                            std::string_view data_id,
                                                            std::string_view name);

std::vector<xml::NodePath> find_encrypted_data(const xml::Document& doc);

}  // namespace xmlseal::enc

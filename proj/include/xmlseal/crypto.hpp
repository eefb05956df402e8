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

// Cryptographic primitives behind signing and encryption. OpenSSL does the
// arithmetic; this layer fixes the parameter choices:
//   signatures    RSA PKCS#1 v1.5 over SHA-256 (SHA-1 accepted to verify)
//   content       AES-CBC, PKCS#7 padding, random IV prepended
//   key transport RSA-OAEP with SHA-256 label hash and MGF1-SHA-1

#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

typedef struct evp_pkey_st EVP_PKEY;

namespace xmlseal::crypto {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

inline ByteView as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}
inline std::string to_string(ByteView b) {
  return {reinterpret_cast<const char*>(b.data()), b.size()};
}

/// MD5 is deliberately absent.
enum class DigestAlg { Sha256, Sha1 };

std::size_t digest_size(DigestAlg alg);
Bytes digest(DigestAlg alg, ByteView data);

enum class KeyKind { RsaPrivate, RsaPublic, Aes };

std::string_view to_string(KeyKind kind);

/// A named key. RSA keys share an immutable OpenSSL handle; AES keys hold
/// raw bytes. There is deliberately no stream operator: secret material
/// is only reachable through `secret()` and the PEM encoders.
class KeyMaterial {
 public:
  static KeyMaterial rsa(std::string name, std::shared_ptr<EVP_PKEY> key,
                         bool is_private);
  static KeyMaterial aes(std::string name, Bytes secret);

  const std::string& name() const { return name_; }
  KeyKind kind() const { return kind_; }
  int bits() const { return bits_; }

  /// The public half of an RSA key (identity for RsaPublic).
  KeyMaterial public_key() const;
  /// Same key material under another name.
  KeyMaterial renamed(std::string name) const;

  EVP_PKEY* pkey() const { return pkey_.get(); }
  const Bytes& secret() const { return secret_; }

  /// PKCS#8 for private keys, SubjectPublicKeyInfo for public keys.
  std::string to_pem() const;
  /// Modulus and public exponent, big-endian.
  Bytes modulus() const;
  Bytes public_exponent() const;
  static KeyMaterial rsa_public_from_components(std::string name,
                                                ByteView modulus,
                                                ByteView exponent);
  static KeyMaterial from_pem(std::string name, std::string_view pem);

  bool same_public_key(const KeyMaterial& other) const;

 private:
  KeyMaterial() = default;

  std::string name_;
  KeyKind kind_ = KeyKind::Aes;
  int bits_ = 0;
  std::shared_ptr<EVP_PKEY> pkey_;
  Bytes secret_;
};

/// RSA: 2048 or 3072 bits. AES: 128 or 256 bits. Errors: BadKeySize.
KeyMaterial keygen(KeyKind kind, int bits, std::string name);

/// PKCS#1 v1.5 signature over digest(alg, data). Signing with SHA-1 is
/// refused (UnsupportedAlgorithm). Errors: WrongKeyKind.
Bytes sign(const KeyMaterial& key, DigestAlg alg, ByteView data);

/// Accepts RsaPrivate keys too (their public half is used). Returns false
/// for every kind of mismatch. Errors: WrongKeyKind.
bool verify(const KeyMaterial& key, DigestAlg alg, ByteView data,
            ByteView signature);

/// IV (16 random bytes) || AES-CBC(PKCS#7). Errors: WrongKeyKind.
Bytes sym_encrypt(const KeyMaterial& key, ByteView plaintext);
/// Errors: WrongKeyKind, MalformedCiphertext, PaddingOrKeyError.
Bytes sym_decrypt(const KeyMaterial& key, ByteView ciphertext);

/// RSA-OAEP key transport. Output length equals the modulus length.
Bytes wrap_key(const KeyMaterial& recipient, const KeyMaterial& cek);
/// Errors: WrongKeyKind, UnwrapFailed.
KeyMaterial unwrap_key(const KeyMaterial& recipient, ByteView wrapped,
                       std::string cek_name = "cek");

void random_bytes(std::span<std::uint8_t> out);
Bytes random_bytes(std::size_t n);
std::string random_hex(std::size_t n_bytes);

/// Routes every OpenSSL random draw (keys, IVs, OAEP seeds, Ids) through a
/// deterministic generator seeded with `seed`. Test fixtures only: output
/// is predictable to anyone who knows the seed.
void install_seeded_rng(std::uint64_t seed);

std::string base64_encode(ByteView data);
/// Ignores embedded whitespace. Errors: MalformedCiphertext on bad input.
Bytes base64_decode(std::string_view text);
std::string hex_encode(ByteView data);
Bytes hex_decode(std::string_view text);

}  // namespace xmlseal::crypto

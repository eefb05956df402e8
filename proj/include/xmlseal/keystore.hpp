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

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "xmlseal/crypto.hpp"

namespace xmlseal::crypto {

/// Named keys loaded from a flat directory:
///   NAME.pem  RSA key, PKCS#8 private or SubjectPublicKeyInfo public
///   NAME.key  raw AES key, 16 or 32 bytes
/// Subdirectories and other files are ignored. Immutable after loading.
class Keystore {
 public:
  Keystore() = default;
  explicit Keystore(std::vector<KeyMaterial> keys);

  /// Errors: BadKeyFile (unreadable file or two files for one name), Io.
  static Keystore load(const std::filesystem::path& dir);

  /// Asking for RsaPublic also succeeds on an RsaPrivate entry, which
  /// yields its public half. Errors: UnknownKey, KindMismatch.
  KeyMaterial resolve(const std::string& name, KeyKind kind) const;
  const KeyMaterial* find(const std::string& name) const;
  bool contains(const std::string& name) const { return find(name) != nullptr; }

  std::vector<std::string> names() const;
  /// Public halves of every RSA entry.
  std::vector<KeyMaterial> public_keys() const;

  /// Keystore with only the public halves of RSA keys (AES keys dropped).
  Keystore public_only() const;

 private:
  std::map<std::string, KeyMaterial> keys_;
};

/// Writes `key` into `dir` in keystore format; for RSA private keys the
/// public half also goes to `dir/public/NAME.pem`. Creates directories.
/// Returns the paths written.
std::vector<std::filesystem::path> write_key(const std::filesystem::path& dir,
                                             const KeyMaterial& key);

}  // namespace xmlseal::crypto

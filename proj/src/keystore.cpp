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

#include "xmlseal/keystore.hpp"

#include <fstream>
#include <iterator>
#include <sys/stat.h>

#include "xmlseal/error.hpp"

namespace xmlseal::crypto {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const fs::path& path, std::string_view data, bool secret) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  out.close();
  if (secret) ::chmod(path.c_str(), 0600);
}

}  // namespace

Keystore::Keystore(std::vector<KeyMaterial> keys) {
  for (auto& k : keys) {
    const std::string name = k.name();
    if (!keys_.emplace(name, std::move(k)).second) {
      throw Error(ErrorCode::BadKeyFile, "duplicate key name '" + name + "'");
    }
  }
}

Keystore Keystore::load(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    throw Error(ErrorCode::Io, "keystore directory not found: " + dir.string());
  }
  std::vector<KeyMaterial> keys;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto ext = entry.path().extension().string();
    const auto name = entry.path().stem().string();
    if (ext == ".pem") {
      keys.push_back(KeyMaterial::from_pem(name, read_file(entry.path())));
    } else if (ext == ".key") {
      const std::string raw = read_file(entry.path());
      if (raw.size() != 16 && raw.size() != 32) {
        throw Error(ErrorCode::BadKeyFile,
                    "AES key file '" + entry.path().filename().string() +
                        "' must hold 16 or 32 bytes");
      }
      keys.push_back(KeyMaterial::aes(name, Bytes(raw.begin(), raw.end())));
    }
  }
  return Keystore(std::move(keys));
}

const KeyMaterial* Keystore::find(const std::string& name) const {
  const auto it = keys_.find(name);
  return it == keys_.end() ? nullptr : &it->second;
}

KeyMaterial Keystore::resolve(const std::string& name, KeyKind kind) const {
  const KeyMaterial* k = find(name);
  if (k == nullptr) throw Error(ErrorCode::UnknownKey, "no key named '" + name + "'");
  if (k->kind() == kind) return *k;
  if (kind == KeyKind::RsaPublic && k->kind() == KeyKind::RsaPrivate) {
    return k->public_key();
  }
  throw Error(ErrorCode::KindMismatch,
              "key '" + name + "' is " + std::string(to_string(k->kind())) +
                  ", expected " + std::string(to_string(kind)));
}

std::vector<std::string> Keystore::names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : keys_) out.push_back(name);
  return out;
}

std::vector<KeyMaterial> Keystore::public_keys() const {
  std::vector<KeyMaterial> out;
  for (const auto& [_, key] : keys_) {
    if (key.kind() != KeyKind::Aes) out.push_back(key.public_key());
  }
  return out;
}

Keystore Keystore::public_only() const { return Keystore(public_keys()); }

std::vector<fs::path> write_key(const fs::path& dir, const KeyMaterial& key) {
  fs::create_directories(dir);
  std::vector<fs::path> written;
  if (key.kind() == KeyKind::Aes) {
    const auto path = dir / (key.name() + ".key");
    write_file(path, to_string(key.secret()), true);
    written.push_back(path);
    return written;
  }
  const auto path = dir / (key.name() + ".pem");
  write_file(path, key.to_pem(), key.kind() == KeyKind::RsaPrivate);
  written.push_back(path);
  if (key.kind() == KeyKind::RsaPrivate) {
    fs::create_directories(dir / "public");
    const auto pub = dir / "public" / (key.name() + ".pem");
    write_file(pub, key.public_key().to_pem(), false);
    written.push_back(pub);
  }
  return written;
}

}  // namespace xmlseal::crypto

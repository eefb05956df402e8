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

// Shared helpers for the unit tests and the acceptance runner.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "xmlseal/crypto.hpp"
#include "xmlseal/keystore.hpp"
#include "xmlseal/xml.hpp"

namespace xmlseal::testing {

std::filesystem::path fixtures_dir();
std::filesystem::path corpus_dir();

/// alice, bob, carol and dave (RSA-2048 private) plus `shared` (AES-256).
const crypto::Keystore& fixture_keys();
std::string read_text(const std::filesystem::path& path);

/// Random documents of depth <= 6 and at most 40 nodes, mixing default and
/// prefixed namespaces, attributes, Ids, escapable text and comments.
class DocGenerator {
 public:
  explicit DocGenerator(std::uint64_t seed) : rng_(seed) {}
  xml::Document next();

 private:
  struct Scope {
    bool has_q = false;
  };
  xml::Element element(int depth, Scope scope);
  std::string text();
  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }

  std::mt19937_64 rng_;
  int budget_ = 0;
  int next_id_ = 0;
};

/// Shuffles attribute and namespace-declaration order on every element.
xml::Document permute(const xml::Document& doc, std::mt19937_64& rng);

enum class Mutation { Text, Attribute, Swap, Rename };
inline constexpr Mutation kAllMutations[] = {Mutation::Text, Mutation::Attribute, Mutation::Swap,
                                             Mutation::Rename};

/// Applies one mutation to an element under `scope`, never inside a
/// ds:Signature below it. Swap falls back to Rename when no parent has two
/// children that canonicalize differently.
xml::Document mutate(const xml::Document& doc, const xml::NodePath& scope, Mutation kind,
                     std::mt19937_64& rng);

/// Flips one bit of the first CipherValue at or below `path`.
xml::Document flip_cipher_bit(const xml::Document& doc, const xml::NodePath& path,
                              std::size_t bit);

struct Counterfeit {
  std::string name;
  /// Runs the verifier against the forged input; true iff it was refused
  /// (an error or an invalid report).
  std::function<bool()> refused;
};

/// Hand-built forgeries: relocated signed subtree, duplicate Id injection,
/// second Signature injection, Object substitution, detached target swap,
/// SOAP Body wrapping and a re-digested SignedInfo.
std::vector<Counterfeit> counterfeits();

}  // namespace xmlseal::testing

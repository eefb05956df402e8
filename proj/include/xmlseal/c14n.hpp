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

// Canonical byte form used for every digest and signature.
//
// The rules are a fixed simplification of inclusive Canonical XML:
//   - comments are dropped;
//   - empty elements are written as a start/end tag pair;
//   - namespace declarations come first, sorted by prefix (default first),
//     then attributes sorted by (namespace URI, local name);
//   - the apex of a canonicalized subtree carries every namespace binding
//     in scope at that point, descendants carry only their own;
//   - text escapes & < > and CR; attribute values escape & < " TAB LF CR;
//   - no whitespace is added or removed.
// The wire identifier is the W3C C14N 1.0 URI, but the bytes are only
// guaranteed to match W3C output for documents without inherited
// namespace subtleties.

#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "xmlseal/xml.hpp"

namespace xmlseal::c14n {

inline constexpr std::string_view kAlgorithm =
    "http://www.w3.org/TR/2001/REC-xml-c14n-20010315";

struct CanonicalForm {
  std::string bytes;
  std::string algorithm{kAlgorithm};
};

/// Canonicalizes the element at `subtree` (the root when empty). When
/// `exclude` names an element inside the subtree, that element and its
/// descendants contribute nothing. Errors: PathUnresolved.
CanonicalForm canonicalize(const xml::Document& doc,
                           const xml::NodePath& subtree = {},
                           const std::optional<xml::NodePath>& exclude =
                               std::nullopt);

}  // namespace xmlseal::c14n

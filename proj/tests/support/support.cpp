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

#include "support.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <stdexcept>

#include "xmlseal/c14n.hpp"
#include "xmlseal/dsig.hpp"
#include "xmlseal/enc.hpp"
#include "xmlseal/error.hpp"
#include "xmlseal/wsse.hpp"

namespace xmlseal::testing {

namespace fs = std::filesystem;
using xml::Element;
using xml::NodePath;

fs::path fixtures_dir() { return XMLSEAL_FIXTURES_DIR; }
fs::path corpus_dir() { return XMLSEAL_CORPUS_DIR; }

const crypto::Keystore& fixture_keys() {
  static const crypto::Keystore keys = crypto::Keystore::load(fixtures_dir() / "keys");
  return keys;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// ---------------------------------------------------------------------------
// Random documents

namespace {

constexpr std::string_view kNsA = "urn:example:a";
constexpr std::string_view kNsB = "urn:example:b";
constexpr std::string_view kNsP = "urn:example:p";
constexpr std::string_view kNsQ = "urn:example:q";

const std::vector<std::string> kTokens = {
    "alpha", "beta", "42", " ", "  ", "&", "<", ">", "\"", "'", "\t", "\n",
    "caf\xc3\xa9", "\xe2\x82\xac", "x=y", "]]>", "--", "tail"};
const std::vector<std::string> kNames = {"item", "order", "line", "note", "price", "qty", "ref"};
const std::vector<std::string> kAttrNames = {"a", "b", "kind", "lang"};

}  // namespace

std::string DocGenerator::text() {
  std::string out;
  const std::size_t n = 1 + pick(4);
  for (std::size_t i = 0; i < n; ++i) out += kTokens[pick(kTokens.size())];
  return out;
}

Element DocGenerator::element(int depth, Scope scope) {
  Element e;
  if (depth == 0) {
    e.namespaces.push_back({"", std::string(kNsA)});
    e.namespaces.push_back({"p", std::string(kNsP)});
  } else {
    if (chance(0.2)) {
      e.namespaces.push_back({"q", std::string(kNsQ) + std::to_string(depth)});
      scope.has_q = true;
    }
    if (chance(0.1)) e.namespaces.push_back({"", std::string(kNsB)});
  }
  // Namespace URIs are resolved later by re-parsing; only the prefix matters here.
  const std::size_t which = pick(scope.has_q ? 3 : 2);
  e.prefix = which == 0 ? "" : which == 1 ? "p" : "q";
  e.local_name = kNames[pick(kNames.size())];

  std::vector<std::string> used;
  const std::size_t attrs = pick(4);
  for (std::size_t i = 0; i < attrs; ++i) {
    const std::string name = kAttrNames[pick(kAttrNames.size())];
    if (std::find(used.begin(), used.end(), name) != used.end()) continue;
    used.push_back(name);
    e.attributes.push_back({"", "", name, text()});
  }
  if (chance(0.3)) e.attributes.push_back({"p", std::string(kNsP), "flag", text()});
  if (scope.has_q && chance(0.3)) e.attributes.push_back({"q", "", "note", text()});
  if (chance(0.3)) e.attributes.push_back({"", "", "Id", "n" + std::to_string(next_id_++)});

  if (depth >= 5) {
    if (budget_ > 0 && chance(0.7)) {
      --budget_;
      e.children.emplace_back(xml::Text{text()});
    }
    return e;
  }
  const std::size_t kids = pick(5);
  bool last_text = false;
  for (std::size_t i = 0; i < kids && budget_ > 0; ++i) {
    --budget_;
    const double roll = std::uniform_real_distribution<double>(0, 1)(rng_);
    if (roll < 0.55) {
      e.children.emplace_back(element(depth + 1, scope));
      last_text = false;
    } else if (roll < 0.9 && !last_text) {
      e.children.emplace_back(xml::Text{text()});
      last_text = true;
    } else {
      e.children.emplace_back(xml::Comment{" c" + std::to_string(i) + " "});
      last_text = false;
    }
  }
  return e;
}

xml::Document DocGenerator::next() {
  budget_ = 39;  // plus the root
  next_id_ = 0;
  Element root = element(0, {});
  // Round-trip through the parser so namespace URIs are bound exactly as a
  // reader would bind them.
  return xml::parse(xml::serialize(root));
}

xml::Document permute(const xml::Document& doc, std::mt19937_64& rng) {
  std::function<void(Element&)> shuffle = [&](Element& e) {
    std::shuffle(e.attributes.begin(), e.attributes.end(), rng);
    std::shuffle(e.namespaces.begin(), e.namespaces.end(), rng);
    for (auto& c : e.children) {
      if (auto* ce = c.element()) shuffle(*ce);
    }
  };
  Element root = doc.root();
  shuffle(root);
  return xml::Document(std::move(root));
}

// ---------------------------------------------------------------------------
// Mutations

namespace {

void collect(const Element& e, NodePath& path, std::vector<NodePath>& out) {
  if (e.is(dsig::kNamespace, "Signature")) return;
  out.push_back(path);
  for (std::size_t i = 0; i < e.children.size(); ++i) {
    if (const auto* c = e.children[i].element()) {
      path.push_back(i);
      collect(*c, path, out);
      path.pop_back();
    }
  }
}

Element& mutable_at(Element& root, const NodePath& path) {
  Element* cur = &root;
  for (auto i : path) cur = cur->children[i].element();
  return *cur;
}

std::string canonical(const xml::Document& doc, NodePath path) {
  return c14n::canonicalize(doc, path).bytes;
}

}  // namespace

xml::Document mutate(const xml::Document& doc, const NodePath& scope, Mutation kind,
                     std::mt19937_64& rng) {
  std::vector<NodePath> candidates;
  NodePath cursor = scope;
  collect(doc.at(scope), cursor, candidates);
  if (candidates.empty()) throw std::logic_error("nothing to mutate");
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };

  Element root = doc.root();
  if (kind == Mutation::Swap) {
    std::vector<std::pair<NodePath, std::pair<std::size_t, std::size_t>>> swaps;
    for (const auto& path : candidates) {
      const Element& e = doc.at(path);
      std::vector<std::size_t> kids;
      for (std::size_t i = 0; i < e.children.size(); ++i) {
        const auto* c = e.children[i].element();
        if (c && !c->is(dsig::kNamespace, "Signature")) kids.push_back(i);
      }
      for (std::size_t i = 0; i + 1 < kids.size(); ++i) {
        NodePath a = path, b = path;
        a.push_back(kids[i]);
        b.push_back(kids[i + 1]);
        if (canonical(doc, a) != canonical(doc, b)) swaps.push_back({path, {kids[i], kids[i + 1]}});
      }
    }
    if (!swaps.empty()) {
      const auto& [parent, ab] = swaps[pick(swaps.size())];
      auto& children = mutable_at(root, parent).children;
      std::swap(children[ab.first], children[ab.second]);
      return xml::Document(std::move(root));
    }
    kind = Mutation::Rename;
  }

  Element& target = mutable_at(root, candidates[pick(candidates.size())]);
  switch (kind) {
    case Mutation::Text: {
      auto it = std::find_if(target.children.begin(), target.children.end(),
                             [](const xml::Node& n) { return n.text() != nullptr; });
      if (it != target.children.end()) {
        it->value = xml::Text{"#" + it->text()->value};
      } else {
        target.children.emplace_back(xml::Text{"#"});
      }
      break;
    }
    case Mutation::Attribute:
      if (target.attributes.empty()) {
        target.attributes.push_back({"", "", "mutated", "1"});
      } else {
        target.attributes[pick(target.attributes.size())].value += "#";
      }
      break;
    case Mutation::Rename:
    case Mutation::Swap:
      target.local_name += "x";
      break;
  }
  return xml::Document(std::move(root));
}

xml::Document flip_cipher_bit(const xml::Document& doc, const NodePath& path, std::size_t bit) {
  const auto values = xml::find_all(doc, enc::kNamespace, "CipherValue");
  for (const auto& v : values) {
    if (v.size() < path.size() || !std::equal(path.begin(), path.end(), v.begin())) continue;
    auto bytes = crypto::base64_decode(doc.at(v).text());
    bytes[(bit / 8) % bytes.size()] ^= static_cast<std::uint8_t>(1u << (bit % 8));
    Element replaced = doc.at(v);
    replaced.children = {xml::Text{crypto::base64_encode(bytes)}};
    return xml::replace_element(doc, v, std::move(replaced));
  }
  throw std::logic_error("no CipherValue under the given path");
}

// ---------------------------------------------------------------------------
// Counterfeits

namespace {

const char* kOrder =
    "<Order xmlns=\"urn:shop\"><Amount Id=\"amt\">100</Amount><Ship>Home</Ship></Order>";

bool refused(const std::string& text, const dsig::VerifyOptions& options = {}) {
  try {
    return !dsig::verify(xml::parse(text), fixture_keys(), options).valid();
  } catch (const Error&) {
    return true;
  }
}

std::string replace_once(std::string s, std::string_view from, std::string_view to) {
  const auto at = s.find(from);
  if (at == std::string::npos) throw std::logic_error("forgery anchor missing: " + std::string(from));
  return s.replace(at, from.size(), to);
}

std::string signed_order(const std::vector<std::string>& ids) {
  const auto alice = fixture_keys().resolve("alice", crypto::KeyKind::RsaPrivate);
  return xml::serialize(dsig::sign_enveloped(xml::parse(kOrder), alice, {}, ids));
}

}  // namespace

std::vector<Counterfeit> counterfeits() {
  std::vector<Counterfeit> out;

  // The signed Amount moves into a wrapper; a forged Amount takes its Id.
  out.push_back({"relocated-subtree-same-id", [] {
                   std::string s = signed_order({"amt"});
                   s = replace_once(s, "<Amount Id=\"amt\">100</Amount>",
                                    "<Amount Id=\"amt\">999</Amount>");
                   s = replace_once(s, "<ds:Signature",
                                    "<Wrapper><Amount Id=\"amt\">100</Amount></Wrapper><ds:Signature");
                   return refused(s);
                 }});
  // Same, but the relocated original gets a fresh Id so parsing succeeds.
  out.push_back({"relocated-subtree-renamed-id", [] {
                   std::string s = signed_order({"amt"});
                   s = replace_once(s, "<Amount Id=\"amt\">100</Amount>",
                                    "<Amount Id=\"amt\">999</Amount>");
                   s = replace_once(s, "<ds:Signature",
                                    "<Wrapper><Amount Id=\"orig\">100</Amount></Wrapper><ds:Signature");
                   return refused(s);
                 }});
  // Whole-document signature, signed element moved under a sibling.
  out.push_back({"relocated-subtree-whole-document", [] {
                   std::string s = signed_order({});
                   s = replace_once(s, "<Amount Id=\"amt\">100</Amount><Ship>Home</Ship>",
                                    "<Ship>Home<Amount Id=\"amt\">100</Amount></Ship>");
                   return refused(s);
                 }});
  out.push_back({"duplicate-id-injection", [] {
                   std::string s = signed_order({"amt"});
                   s = replace_once(s, "<Ship>Home</Ship>",
                                    "<Ship>Home<Amount Id=\"amt\">999</Amount></Ship>");
                   return refused(s);
                 }});
  // A second, genuinely signed Signature from another keystore member.
  out.push_back({"second-signature-injection", [] {
                   const auto carol = fixture_keys().resolve("carol", crypto::KeyKind::RsaPrivate);
                   const auto evil = dsig::sign_enveloped(
                       xml::parse(replace_once(kOrder, ">100<", ">999<")), carol);
                   const auto sig = dsig::find_signatures(evil).front();
                   std::string s = signed_order({});
                   s = replace_once(s, "</Order>", xml::serialize(evil.at(sig)) + "</Order>");
                   return refused(s);
                 }});
  out.push_back({"object-substitution", [] {
                   const auto alice = fixture_keys().resolve("alice", crypto::KeyKind::RsaPrivate);
                   std::string s = xml::serialize(
                       dsig::sign_enveloping(xml::parse(kOrder).root(), alice));
                   s = replace_once(s, ">100<", ">999<");
                   return refused(s);
                 }});
  // An extra unreferenced Object ahead of the genuine one.
  out.push_back({"object-prepended", [] {
                   const auto alice = fixture_keys().resolve("alice", crypto::KeyKind::RsaPrivate);
                   std::string s = xml::serialize(
                       dsig::sign_enveloping(xml::parse(kOrder).root(), alice));
                   const std::string forged =
                       "<ds:Object Id=\"evil\"><Order xmlns=\"urn:shop\"><Amount>999</Amount>"
                       "</Order></ds:Object><ds:Object";
                   s = replace_once(s, "<ds:Object", forged);
                   const bool verify_refused = refused(s);
                   // Even if a verifier were lenient, the payload reader must
                   // not hand out the forged Object.
                   const auto payload = dsig::extract_payload(xml::parse(s));
                   return verify_refused && payload.text().empty() &&
                          payload.first_child("urn:shop", "Amount")->text() == "100";
                 }});
  out.push_back({"detached-target-swap", [] {
                   const auto alice = fixture_keys().resolve("alice", crypto::KeyKind::RsaPrivate);
                   const auto sig = dsig::sign_detached(crypto::as_bytes("pay 100 to bob\n"),
                                                        "invoice.txt", alice);
                   dsig::VerifyOptions opts;
                   const auto forged = crypto::as_bytes("pay 999 to eve\n");
                   opts.detached_target = crypto::Bytes(forged.begin(), forged.end());
                   return refused(xml::serialize(sig), opts);
                 }});
  // SignedInfo re-digested over tampered content; SignatureValue left alone.
  out.push_back({"signedinfo-redigest", [] {
                   const auto alice = fixture_keys().resolve("alice", crypto::KeyKind::RsaPrivate);
                   auto doc = dsig::sign_enveloped(xml::parse(kOrder), alice);
                   const auto at = dsig::find_signatures(doc).front();
                   doc = xml::parse(replace_once(xml::serialize(doc), ">100<", ">999<"));
                   auto block = dsig::SignatureBlock::from_element(doc.at(at));
                   block.signed_info.references.front().digest_value = crypto::digest(
                       crypto::DigestAlg::Sha256,
                       crypto::as_bytes(c14n::canonicalize(doc, {}, at).bytes));
                   doc = xml::replace_element(doc, at, block.to_element());
                   return refused(xml::serialize(doc));
                 }});
  // Attacker signs with a key of their own and embeds it.
  out.push_back({"embedded-key-substitution", [] {
                   const auto mallory = crypto::keygen(crypto::KeyKind::RsaPrivate, 2048, "mallory");
                   dsig::SignOptions opts;
                   opts.embed_public_key = true;
                   const auto doc = dsig::sign_enveloped(
                       xml::parse(replace_once(kOrder, ">100<", ">999<")), mallory, opts);
                   return refused(xml::serialize(doc));
                 }});
  // Signed Body hidden in the Header, forged Body in its place.
  out.push_back({"soap-body-wrapping", [] {
                   const auto& keys = fixture_keys();
                   const auto env = wsse::protect(
                       wsse::wrap_soap(xml::parse(kOrder).root()),
                       wsse::ProtectionOrder::EncryptThenSign,
                       keys.resolve("alice", crypto::KeyKind::RsaPrivate),
                       keys.resolve("bob", crypto::KeyKind::RsaPublic));
                   Element original = env.body();
                   Element forged = xml::make_element("soap", wsse::kSoapNamespace, "Body");
                   forged.namespaces.push_back({"wsu", std::string(xml::kWsuNamespace)});
                   forged.attributes.push_back({"wsu", std::string(xml::kWsuNamespace), "Id", "body-forged"});
                   forged.children.emplace_back(xml::parse(replace_once(kOrder, ">100<", ">999<")).root());
                   Element wrapper = xml::make_element("", "", "Wrapper");
                   wrapper.children.emplace_back(std::move(original));
                   auto doc = xml::replace_element(env.document(), env.body_path(), std::move(forged));
                   doc = xml::insert_child(doc, env.header_path(), std::move(wrapper));
                   try {
                     const auto forged_env = wsse::SoapEnvelope::from_document(xml::parse(xml::serialize(doc)));
                     const bool report_refused = !wsse::verify_envelope(forged_env, keys).valid();
                     bool open_refused = false;
                     try {
                       wsse::unprotect(forged_env, keys);
                     } catch (const Error&) {
                       open_refused = true;
                     }
                     return report_refused && open_refused;
                   } catch (const Error&) {
                     return true;
                   }
                 }});
  return out;
}

}  // namespace xmlseal::testing

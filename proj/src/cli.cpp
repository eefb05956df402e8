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

#include "xmlseal/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <regex>

#include "xmlseal/c14n.hpp"
#include "xmlseal/dsig.hpp"
#include "xmlseal/enc.hpp"
#include "xmlseal/error.hpp"
#include "xmlseal/keystore.hpp"
#include "xmlseal/wsse.hpp"

namespace xmlseal::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const fs::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()))) {
    throw Error(ErrorCode::Io, "cannot write " + path.string());
  }
}

fs::path base_dir(const fs::path& file) {
  const auto parent = file.parent_path();
  return parent.empty() ? fs::path(".") : parent;
}

bool semantic_failure(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidSignature:
    case ErrorCode::UnknownKey:
    case ErrorCode::UnwrapFailed:
    case ErrorCode::PaddingOrKeyError:
    case ErrorCode::MalformedCipherPayload:
    case ErrorCode::MultipleSignatures:
      return true;
    default:
      return false;
  }
}

json report_json(const dsig::VerificationReport& report) {
  json refs = json::array();
  for (const auto& r : report.references) {
    refs.push_back({{"uri", r.uri}, {"digestOk", r.digest_ok}});
  }
  return {{"overall", report.valid() ? "valid" : "invalid"},
          {"topology", std::string(dsig::to_string(report.topology))},
          {"references", refs},
          {"signatureOk", report.signature_ok},
          {"keyUsed", report.key_used}};
}

void print_summary(std::ostream& out, const dsig::VerificationReport& report) {
  if (report.valid()) {
    out << "valid (" << dsig::to_string(report.topology) << ", key " << report.key_used << ")\n";
  } else {
    out << "invalid: " << report.reason() << "\n";
  }
}

std::optional<std::uint64_t> seed_from_env() {
  const char* raw = std::getenv("XMLSEAL_SEED");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  try {
    std::size_t used = 0;
    const auto seed = std::stoull(raw, &used, 0);
    if (raw[used] != '\0') throw std::invalid_argument(raw);
    return seed;
  } catch (const std::exception&) {
    throw Error(ErrorCode::Io, "XMLSEAL_SEED must be an unsigned integer");
  }
}

void apply_seed() {
  const auto seed = seed_from_env();
  if (!seed) return;
#ifdef XMLSEAL_ENABLE_TEST_SEED
  crypto::install_seeded_rng(*seed);
#else
  throw Error(ErrorCode::Io, "XMLSEAL_SEED is not supported by this build");
#endif
}

void check_key_name(const std::string& name) {
  static const std::regex kName("[A-Za-z0-9_-][A-Za-z0-9._-]*");
  if (!std::regex_match(name, kName)) {
    throw Error(ErrorCode::BadKeyFile, "key name '" + name + "' is not a plain file name");
  }
}

struct Options {
  std::string kind, name, keystore, in, out, target, mode, key, target_id, recipient,
      subtree_id, order, signer, report;
  int bits = 0;
  bool trust_embedded = false;
};

bool json_report(const Options& o) { return o.report == "json"; }

int cmd_keygen(const Options& o, std::ostream& out) {
  check_key_name(o.name);
  const auto kind = o.kind == "rsa" ? crypto::KeyKind::RsaPrivate : crypto::KeyKind::Aes;
  const auto key = crypto::keygen(kind, o.bits, o.name);
  for (const auto& p : crypto::write_key(o.keystore, key)) out << "wrote " << p.string() << "\n";
  return kOk;
}

int cmd_sign(const Options& o, std::ostream& out) {
  const auto keys = crypto::Keystore::load(o.keystore);
  const auto signer = keys.resolve(o.key, crypto::KeyKind::RsaPrivate);
  std::optional<xml::Document> signed_doc;
  if (o.mode == "enveloped") {
    signed_doc = dsig::sign_enveloped(xml::parse(read_file(o.in)), signer);
  } else if (o.mode == "enveloping") {
    signed_doc = dsig::sign_enveloping(xml::parse(read_file(o.in)).root(), signer);
  } else {
    const std::string name =
        fs::path(o.target.empty() ? o.in : o.target).filename().string();
    signed_doc = dsig::sign_detached(crypto::as_bytes(read_file(o.in)), name, signer);
  }
  write_file(o.out, xml::serialize(*signed_doc));
  out << "signed " << o.in << " (" << o.mode << ") -> " << o.out << "\n";
  return kOk;
}

// Detached targets come from --target, or else from a file named by the
// Reference next to the signature.
std::optional<crypto::Bytes> detached_target(const Options& o, const xml::Document& doc) {
  if (!o.target.empty()) {
    const auto bytes = read_file(o.target);
    return crypto::Bytes(bytes.begin(), bytes.end());
  }
  const auto sigs = dsig::find_signatures(doc);
  if (sigs.size() != 1) return std::nullopt;
  const auto block = dsig::SignatureBlock::from_element(doc.at(sigs.front()));
  for (const auto& ref : block.signed_info.references) {
    if (ref.uri.empty() || ref.uri[0] == '#') continue;
    const auto candidate = base_dir(o.in) / ref.uri;
    if (fs::is_regular_file(candidate)) {
      const auto bytes = read_file(candidate);
      return crypto::Bytes(bytes.begin(), bytes.end());
    }
  }
  return std::nullopt;
}

int cmd_verify(const Options& o, std::ostream& out) {
  const auto keys = crypto::Keystore::load(o.keystore);
  const auto doc = xml::parse(read_file(o.in));
  dsig::VerifyOptions vo;
  vo.trust_embedded_keys = o.trust_embedded;
  vo.detached_target = detached_target(o, doc);
  const auto report = dsig::verify(doc, keys, vo);
  if (json_report(o)) {
    out << report_json(report).dump(2) << "\n";
  } else {
    print_summary(out, report);
  }
  return report.valid() ? kOk : kRejected;
}

int cmd_encrypt(const Options& o, std::ostream& out) {
  const auto keys = crypto::Keystore::load(o.keystore);
  const auto* entry = keys.find(o.recipient);
  if (entry == nullptr) throw Error(ErrorCode::UnknownKey, "no key named '" + o.recipient + "'");
  const auto recipient = entry->kind() == crypto::KeyKind::Aes
                             ? *entry
                             : keys.resolve(o.recipient, crypto::KeyKind::RsaPublic);
  const auto mode = o.mode == "element" ? enc::Mode::Element : enc::Mode::Content;
  const auto doc = enc::encrypt_element(xml::parse(read_file(o.in)), o.target_id, mode, recipient);
  write_file(o.out, xml::serialize(doc));
  out << "encrypted #" << o.target_id << " for " << o.recipient << " -> " << o.out << "\n";
  return kOk;
}

int cmd_decrypt(const Options& o, std::ostream& out) {
  const auto keys = crypto::Keystore::load(o.keystore);
  enc::DecryptOptions opts;
  opts.cipher_base = base_dir(o.in);
  const auto doc = enc::decrypt(xml::parse(read_file(o.in)), keys, opts);
  write_file(o.out, xml::serialize(doc));
  out << "decrypted " << o.in << " -> " << o.out << "\n";
  return kOk;
}

int cmd_c14n(const Options& o, std::ostream& out) {
  const auto doc = xml::parse(read_file(o.in));
  xml::NodePath subtree;
  if (!o.subtree_id.empty()) {
    auto path = xml::path_of_id(doc, o.subtree_id);
    if (!path) throw Error(ErrorCode::TargetUnresolved, "no element with Id '" + o.subtree_id + "'");
    subtree = *path;
  }
  out << c14n::canonicalize(doc, subtree).bytes;
  return kOk;
}

int cmd_soap_secure(const Options& o, std::ostream& out) {
  const auto keys = crypto::Keystore::load(o.keystore);
  const auto signer = keys.resolve(o.signer, crypto::KeyKind::RsaPrivate);
  const auto recipient = keys.resolve(o.recipient, crypto::KeyKind::RsaPublic);
  const auto order = wsse::parse_order(o.order);
  const auto env = wsse::wrap_soap(xml::parse(read_file(o.in)).root());
  const auto secured = wsse::protect(env, order, signer, recipient);
  write_file(o.out, xml::serialize(secured.document()));
  out << "secured " << o.in << " (" << wsse::to_string(order) << ") -> " << o.out << "\n";
  return kOk;
}

int cmd_soap_open(const Options& o, std::ostream& out) {
  const auto keys = crypto::Keystore::load(o.keystore);
  const auto env = wsse::SoapEnvelope::from_document(xml::parse(read_file(o.in)));
  try {
    const auto opened = wsse::unprotect(env, keys);
    write_file(o.out, xml::serialize(opened.envelope.document()));
    if (json_report(o)) {
      auto j = report_json(opened.report);
      j["order"] = std::string(wsse::to_string(opened.order));
      out << j.dump(2) << "\n";
    } else {
      print_summary(out, opened.report);
      out << "order " << wsse::to_string(opened.order) << " -> " << o.out << "\n";
    }
    return kOk;
  } catch (const wsse::SignatureRejected& e) {
    if (json_report(o)) {
      auto j = report_json(e.report());
      j["order"] = std::string(wsse::to_string(e.order()));
      out << j.dump(2) << "\n";
    } else {
      print_summary(out, e.report());
    }
    return kRejected;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"XML signature, encryption and WS-Security toolkit", "xmlseal"};
  app.require_subcommand(1);
  Options o;

  auto* keygen = app.add_subcommand("keygen", "Generate a key into a keystore directory");
  keygen->add_option("--kind", o.kind)->required()->check(CLI::IsMember({"rsa", "aes"}));
  keygen->add_option("--bits", o.bits)->required();
  keygen->add_option("--name", o.name)->required();
  keygen->add_option("--keystore", o.keystore)->required();

  auto* sign = app.add_subcommand("sign", "Sign a document or file");
  sign->add_option("--mode", o.mode)->required()->check(
      CLI::IsMember({"enveloped", "enveloping", "detached"}));
  sign->add_option("--key", o.key)->required();
  sign->add_option("--keystore", o.keystore)->required();
  sign->add_option("--in", o.in)->required();
  sign->add_option("--target", o.target, "Reference name for detached signatures");
  sign->add_option("--out", o.out)->required();

  auto* verify = app.add_subcommand("verify", "Verify the Signature in a document");
  verify->add_option("--keystore", o.keystore)->required();
  verify->add_option("--in", o.in)->required();
  verify->add_option("--target", o.target, "Detached target file");
  verify->add_flag("--trust-embedded-keys", o.trust_embedded);
  verify->add_option("--report", o.report)->check(CLI::IsMember({"json"}));

  auto* encrypt = app.add_subcommand("encrypt", "Encrypt one element or its content");
  encrypt->add_option("--target-id", o.target_id)->required();
  encrypt->add_option("--mode", o.mode)->required()->check(CLI::IsMember({"element", "content"}));
  encrypt->add_option("--recipient", o.recipient)->required();
  encrypt->add_option("--keystore", o.keystore)->required();
  encrypt->add_option("--in", o.in)->required();
  encrypt->add_option("--out", o.out)->required();

  auto* decrypt = app.add_subcommand("decrypt", "Decrypt every EncryptedData");
  decrypt->add_option("--keystore", o.keystore)->required();
  decrypt->add_option("--in", o.in)->required();
  decrypt->add_option("--out", o.out)->required();

  auto* c14n_cmd = app.add_subcommand("c14n", "Print the canonical form");
  c14n_cmd->add_option("--in", o.in)->required();
  c14n_cmd->add_option("--subtree-id", o.subtree_id);

  auto* secure = app.add_subcommand("soap-secure", "Wrap a payload in a protected SOAP envelope");
  secure->add_option("--order", o.order)->required()->check(
      CLI::IsMember({"sign-then-encrypt", "encrypt-then-sign"}));
  secure->add_option("--signer", o.signer)->required();
  secure->add_option("--recipient", o.recipient)->required();
  secure->add_option("--keystore", o.keystore)->required();
  secure->add_option("--in", o.in)->required();
  secure->add_option("--out", o.out)->required();

  auto* open = app.add_subcommand("soap-open", "Verify and decrypt a protected SOAP envelope");
  open->add_option("--keystore", o.keystore)->required();
  open->add_option("--in", o.in)->required();
  open->add_option("--out", o.out)->required();
  open->add_option("--report", o.report)->check(CLI::IsMember({"json"}));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    apply_seed();
    if (keygen->parsed()) return cmd_keygen(o, out);
    if (sign->parsed()) return cmd_sign(o, out);
    if (verify->parsed()) return cmd_verify(o, out);
    if (encrypt->parsed()) return cmd_encrypt(o, out);
    if (decrypt->parsed()) return cmd_decrypt(o, out);
    if (c14n_cmd->parsed()) return cmd_c14n(o, out);
    if (secure->parsed()) return cmd_soap_secure(o, out);
    return cmd_soap_open(o, out);
  } catch (const Error& e) {
    err << "xmlseal: " << e.what() << "\n";
    if (json_report(o)) {
      out << json{{"overall", "error"}, {"error", std::string(to_string(e.code()))}}.dump(2)
          << "\n";
    }
    return semantic_failure(e.code()) ? kRejected : kUsage;
  } catch (const std::exception& e) {
    err << "xmlseal: " << e.what() << "\n";
    return kUsage;
  }
}

}  // namespace xmlseal::cli

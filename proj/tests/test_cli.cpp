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

#include <gtest/gtest.h>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "support.hpp"
#include "xmlseal/c14n.hpp"
#include "xmlseal/cli.hpp"
#include "xmlseal/dsig.hpp"
#include "xmlseal/enc.hpp"
#include "xmlseal/wsse.hpp"

namespace xmlseal {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const char* kDoc =
    "<invoice xmlns=\"urn:inv\"><to>bob</to><total Id=\"total\">42.00</total></invoice>";

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("xmlseal-cli-" + std::to_string(::getpid()) + "-" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    fs::copy(testing::fixtures_dir() / "keys", dir_ / "ks");
    write("doc.xml", kDoc);
    ::unsetenv("XMLSEAL_SEED");
  }
  void TearDown() override {
    ::unsetenv("XMLSEAL_SEED");
    fs::remove_all(dir_);
  }

  int run(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    for (auto& a : args) {
      if (a.rfind("@", 0) == 0) a = (dir_ / a.substr(1)).string();
    }
    return cli::run(args, out_, err_);
  }
  void write(const std::string& name, const std::string& bytes) {
    std::ofstream(dir_ / name, std::ios::binary) << bytes;
  }
  std::string read(const std::string& name) { return testing::read_text(dir_ / name); }

  fs::path dir_;
  std::ostringstream out_, err_;
};

TEST_F(Cli, SignVerifyEnveloped) {
  ASSERT_EQ(run({"sign", "--mode", "enveloped", "--key", "alice", "--keystore", "@ks", "--in",
                 "@doc.xml", "--out", "@signed.xml"}),
            0)
      << err_.str();
  ASSERT_EQ(run({"verify", "--keystore", "@ks", "--in", "@signed.xml", "--report", "json"}), 0);
  const auto report = json::parse(out_.str());
  EXPECT_EQ(report["overall"], "valid");
  EXPECT_EQ(report["signatureOk"], true);
  EXPECT_EQ(report["keyUsed"], "alice");
  EXPECT_EQ(report["references"][0]["uri"], "");
  EXPECT_EQ(report["references"][0]["digestOk"], true);
  EXPECT_FALSE(report.contains("order"));
}

TEST_F(Cli, EditedDocumentExitsOne) {
  run({"sign", "--mode", "enveloped", "--key", "alice", "--keystore", "@ks", "--in", "@doc.xml",
       "--out", "@signed.xml"});
  std::string text = read("signed.xml");
  text.replace(text.find("42.00"), 5, "99.00");
  write("edited.xml", text);
  EXPECT_EQ(run({"verify", "--keystore", "@ks", "--in", "@edited.xml", "--report", "json"}), 1);
  const auto report = json::parse(out_.str());
  EXPECT_EQ(report["overall"], "invalid");
  EXPECT_EQ(report["references"][0]["uri"], "");
  EXPECT_EQ(report["references"][0]["digestOk"], false);
  EXPECT_EQ(run({"verify", "--keystore", "@ks", "--in", "@edited.xml"}), 1);
  EXPECT_NE(out_.str().find("invalid"), std::string::npos);
}

TEST_F(Cli, EnvelopingAndDetached) {
  EXPECT_EQ(run({"sign", "--mode", "enveloping", "--key", "alice", "--keystore", "@ks", "--in",
                 "@doc.xml", "--out", "@env.xml"}),
            0);
  EXPECT_EQ(run({"verify", "--keystore", "@ks", "--in", "@env.xml"}), 0);

  write("data.bin", "raw bytes\n");
  EXPECT_EQ(run({"sign", "--mode", "detached", "--key", "alice", "--keystore", "@ks", "--in",
                 "@data.bin", "--out", "@data.sig.xml"}),
            0);
  EXPECT_NE(read("data.sig.xml").find("URI=\"data.bin\""), std::string::npos);
  EXPECT_EQ(run({"verify", "--keystore", "@ks", "--in", "@data.sig.xml"}), 0) << err_.str();
  write("other.bin", "other bytes\n");
  EXPECT_EQ(run({"verify", "--keystore", "@ks", "--in", "@data.sig.xml", "--target", "@other.bin"}),
            1);
}

TEST_F(Cli, KeygenWritesUsableKeystore) {
  EXPECT_EQ(run({"keygen", "--kind", "rsa", "--bits", "2048", "--name", "erin", "--keystore",
                 "@new"}),
            0);
  EXPECT_EQ(run({"keygen", "--kind", "aes", "--bits", "128", "--name", "sess", "--keystore",
                 "@new"}),
            0);
  EXPECT_EQ(out_.str().find("BEGIN"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir_ / "new" / "public" / "erin.pem"));
  EXPECT_EQ(run({"sign", "--mode", "enveloped", "--key", "erin", "--keystore", "@new", "--in",
                 "@doc.xml", "--out", "@s.xml"}),
            0);
  EXPECT_EQ(run({"verify", "--keystore", "@new/public", "--in", "@s.xml"}), 0);
  EXPECT_EQ(run({"keygen", "--kind", "aes", "--bits", "100", "--name", "x", "--keystore", "@new"}),
            2);
  EXPECT_EQ(run({"keygen", "--kind", "aes", "--bits", "128", "--name", "../x", "--keystore",
                 "@new"}),
            2);
}

TEST_F(Cli, EncryptDecrypt) {
  EXPECT_EQ(run({"encrypt", "--target-id", "total", "--mode", "element", "--recipient", "bob",
                 "--keystore", "@ks", "--in", "@doc.xml", "--out", "@enc.xml"}),
            0)
      << err_.str();
  EXPECT_EQ(read("enc.xml").find("42.00"), std::string::npos);
  EXPECT_EQ(run({"decrypt", "--keystore", "@ks", "--in", "@enc.xml", "--out", "@dec.xml"}), 0);
  EXPECT_TRUE(xml::structurally_equal(xml::parse(read("dec.xml")), xml::parse(kDoc)));

  fs::create_directories(dir_ / "pub");
  crypto::write_key(dir_ / "pub", testing::fixture_keys().resolve("bob", crypto::KeyKind::RsaPublic));
  EXPECT_EQ(run({"decrypt", "--keystore", "@pub", "--in", "@enc.xml", "--out", "@x.xml"}), 1);
  EXPECT_NE(err_.str().find("UnknownKey"), std::string::npos);

  EXPECT_EQ(run({"encrypt", "--target-id", "total", "--mode", "content", "--recipient", "shared",
                 "--keystore", "@ks", "--in", "@doc.xml", "--out", "@enc2.xml"}),
            0);
  EXPECT_EQ(run({"decrypt", "--keystore", "@ks", "--in", "@enc2.xml", "--out", "@dec2.xml"}), 0);
  EXPECT_EQ(run({"decrypt", "--keystore", "@ks", "--in", "@doc.xml", "--out", "@x.xml"}), 2);
}

TEST_F(Cli, C14nToStdout) {
  write("c.xml", "<r b=\"2\" a=\"1\"><e Id=\"e\"/></r>");
  EXPECT_EQ(run({"c14n", "--in", "@c.xml"}), 0);
  EXPECT_EQ(out_.str(), "<r a=\"1\" b=\"2\"><e Id=\"e\"></e></r>");
  EXPECT_EQ(run({"c14n", "--in", "@c.xml", "--subtree-id", "e"}), 0);
  EXPECT_EQ(out_.str(), "<e Id=\"e\"></e>");
}

TEST_F(Cli, SoapSecureAndOpen) {
  for (std::string order : {"sign-then-encrypt", "encrypt-then-sign"}) {
    ASSERT_EQ(run({"soap-secure", "--order", order, "--signer", "alice", "--recipient", "bob",
                   "--keystore", "@ks", "--in", "@doc.xml", "--out", "@env.xml"}),
              0)
        << err_.str();
    ASSERT_EQ(run({"soap-open", "--keystore", "@ks", "--in", "@env.xml", "--out", "@open.xml",
                   "--report", "json"}),
              0)
        << err_.str();
    const auto report = json::parse(out_.str());
    EXPECT_EQ(report["order"], order);
    EXPECT_EQ(report["overall"], "valid");
    const auto opened = wsse::SoapEnvelope::from_document(xml::parse(read("open.xml")));
    EXPECT_TRUE(xml::structurally_equal(wsse::extract_payload(opened), xml::parse(kDoc).root()));
  }
}

TEST_F(Cli, SoapOpenRejectsTamper) {
  run({"soap-secure", "--order", "encrypt-then-sign", "--signer", "alice", "--recipient", "bob",
       "--keystore", "@ks", "--in", "@doc.xml", "--out", "@env.xml"});
  const auto env = wsse::SoapEnvelope::from_document(xml::parse(read("env.xml")));
  write("bad.xml", xml::serialize(testing::flip_cipher_bit(env.document(), env.body_path(), 3)));
  EXPECT_EQ(run({"soap-open", "--keystore", "@ks", "--in", "@bad.xml", "--out", "@o.xml",
                 "--report", "json"}),
            1);
  const auto report = json::parse(out_.str());
  EXPECT_EQ(report["overall"], "invalid");
  EXPECT_EQ(report["order"], "encrypt-then-sign");
  EXPECT_FALSE(fs::exists(dir_ / "o.xml"));
}

TEST_F(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run({}), 2);
  EXPECT_EQ(run({"verify", "--keystore", "@ks", "--in", "@doc.xml", "--bogus"}), 2);
  EXPECT_EQ(run({"sign", "--mode", "sideways", "--key", "alice", "--keystore", "@ks", "--in",
                 "@doc.xml", "--out", "@o.xml"}),
            2);
  EXPECT_EQ(run({"verify", "--keystore", "@ks", "--in", "@missing.xml"}), 2);
  write("broken.xml", "<a><b></a>");
  EXPECT_EQ(run({"c14n", "--in", "@broken.xml"}), 2);
  EXPECT_EQ(run({"verify", "--keystore", "@ks", "--in", "@doc.xml"}), 2);
  EXPECT_EQ(run({"--help"}), 0);
}

#ifdef XMLSEAL_ENABLE_TEST_SEED
// The CLI adds nothing of its own: under a fixed seed it writes exactly
// what the library produces.
TEST_F(Cli, ByteEqualToLibraryUnderSeed) {
  // RSA blinding state lives on the key object, so the library side loads
  // its own keystore for every operation, exactly as each CLI run does.
  auto fresh = [&] { return crypto::Keystore::load(dir_ / "ks"); };
  const auto doc = xml::parse(kDoc);

  ::setenv("XMLSEAL_SEED", "1234", 1);
  run({"encrypt", "--target-id", "total", "--mode", "element", "--recipient", "bob", "--keystore",
       "@ks", "--in", "@doc.xml", "--out", "@enc.xml"});
  crypto::install_seeded_rng(1234);
  const auto lib_enc = enc::encrypt_element(doc, std::string("total"), enc::Mode::Element,
                                            fresh().resolve("bob", crypto::KeyKind::RsaPublic));
  EXPECT_EQ(read("enc.xml"), xml::serialize(lib_enc));

  run({"sign", "--mode", "enveloping", "--key", "alice", "--keystore", "@ks", "--in", "@doc.xml",
       "--out", "@sig.xml"});
  crypto::install_seeded_rng(1234);
  const auto lib_sig =
      dsig::sign_enveloping(doc.root(), fresh().resolve("alice", crypto::KeyKind::RsaPrivate));
  EXPECT_EQ(read("sig.xml"), xml::serialize(lib_sig));

  run({"soap-secure", "--order", "sign-then-encrypt", "--signer", "alice", "--recipient", "bob",
       "--keystore", "@ks", "--in", "@doc.xml", "--out", "@env.xml"});
  crypto::install_seeded_rng(1234);
  const auto ks = fresh();
  const auto lib_env = wsse::protect(wsse::wrap_soap(doc.root()),
                                     wsse::ProtectionOrder::SignThenEncrypt,
                                     ks.resolve("alice", crypto::KeyKind::RsaPrivate),
                                     ks.resolve("bob", crypto::KeyKind::RsaPublic));
  EXPECT_EQ(read("env.xml"), xml::serialize(lib_env.document()));

  run({"c14n", "--in", "@doc.xml"});
  EXPECT_EQ(out_.str(), c14n::canonicalize(doc).bytes);
}
#endif

}  // namespace
}  // namespace xmlseal

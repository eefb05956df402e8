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

#include "xmlseal/error.hpp"

namespace xmlseal {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MalformedXml: return "MalformedXml";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::ForbiddenConstruct: return "ForbiddenConstruct";
    case ErrorCode::BadEncoding: return "BadEncoding";
    case ErrorCode::PathUnresolved: return "PathUnresolved";
    case ErrorCode::WrongKeyKind: return "WrongKeyKind";
    case ErrorCode::UnsupportedAlgorithm: return "UnsupportedAlgorithm";
    case ErrorCode::PaddingOrKeyError: return "PaddingOrKeyError";
    case ErrorCode::MalformedCiphertext: return "MalformedCiphertext";
    case ErrorCode::UnwrapFailed: return "UnwrapFailed";
    case ErrorCode::UnknownKey: return "UnknownKey";
    case ErrorCode::KindMismatch: return "KindMismatch";
    case ErrorCode::BadKeyFile: return "BadKeyFile";
    case ErrorCode::BadKeySize: return "BadKeySize";
    case ErrorCode::NoSignatureFound: return "NoSignatureFound";
    case ErrorCode::MultipleSignatures: return "MultipleSignatures";
    case ErrorCode::MalformedSignatureBlock: return "MalformedSignatureBlock";
    case ErrorCode::EmptyTargetName: return "EmptyTargetName";
    case ErrorCode::DetachedTargetMissing: return "DetachedTargetMissing";
    case ErrorCode::TargetUnresolved: return "TargetUnresolved";
    case ErrorCode::RootElementEncryptionUnsupported:
      return "RootElementEncryptionUnsupported";
    case ErrorCode::NoEncryptedData: return "NoEncryptedData";
    case ErrorCode::MalformedCipherPayload: return "MalformedCipherPayload";
    case ErrorCode::MalformedEncryptedData: return "MalformedEncryptedData";
    case ErrorCode::UnsupportedKeyInfo: return "UnsupportedKeyInfo";
    case ErrorCode::ReferenceOutsideBase: return "ReferenceOutsideBase";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::NotSoapEnvelope: return "NotSoapEnvelope";
    case ErrorCode::AlreadyProtected: return "AlreadyProtected";
    case ErrorCode::NotProtected: return "NotProtected";
    case ErrorCode::InvalidSignature: return "InvalidSignature";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace xmlseal

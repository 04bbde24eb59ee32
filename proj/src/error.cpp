// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "odmap/error.hpp"

namespace odmap {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::Parse: return "parse error";
    case ErrorCode::Io: return "i/o error";
    case ErrorCode::UnknownIc: return "unknown interchange";
    case ErrorCode::DuplicateIc: return "duplicate interchange";
    case ErrorCode::Overflow: return "count overflow";
    case ErrorCode::BadMagic: return "bad magic";
    case ErrorCode::VersionMismatch: return "version mismatch";
    case ErrorCode::Truncated: return "truncated file";
    case ErrorCode::ChecksumMismatch: return "checksum mismatch";
    case ErrorCode::Corrupt: return "corrupt file";
    case ErrorCode::Mismatch: return "metadata mismatch";
    case ErrorCode::InvalidRange: return "invalid range";
    case ErrorCode::MissingYear: return "missing year";
  }
  return "unknown error";
}

}  // namespace odmap

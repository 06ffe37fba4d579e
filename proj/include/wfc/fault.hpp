// Copyright 2026 The wfcfuzz Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>

namespace wfc {

/// A detected fault. Two faults are the same fault iff code, endpoint and
/// context are all equal.
struct Fault {
  int code = 0;
  std::string endpoint;  // operation identity, `VERB:path`
  std::optional<std::string> context;

  friend bool operator==(const Fault&, const Fault&) = default;
  friend auto operator<=>(const Fault&, const Fault&) = default;
};

}  // namespace wfc

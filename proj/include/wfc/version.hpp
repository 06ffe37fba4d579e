// Copyright 2026 The wfcfuzz Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace wfc {

inline constexpr const char* kToolName = "wfcfuzz";
inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kReportSchemaVersion = "0.1.0";

}  // namespace wfc

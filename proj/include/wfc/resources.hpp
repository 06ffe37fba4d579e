// Copyright 2026 The wfcfuzz Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string_view>

namespace wfc::resources {

/// Files compiled into the binary at build time.
struct EmbeddedFile {
  std::string_view path;  // relative, '/'-separated
  std::string_view content;
};

std::string_view auth_schema();      // schemas/auth.yaml
std::string_view report_schema();    // schemas/report.yaml
std::string_view fault_catalog();    // schemas/fault_categories.json

/// The web report bundle (index.html, assets/...) and its launcher scripts.
std::span<const EmbeddedFile> viewer_files();

}  // namespace wfc::resources

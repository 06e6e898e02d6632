/* Copyright 2026 The wsseg Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wsseg/em.hpp"
#include "wsseg/synth.hpp"

namespace wsseg {

/// A configuration key with its default and help text.
struct ConfigKey {
  std::string name;
  std::string default_value;
  std::string help;
};

/// Every accepted key, in documentation order.
const std::vector<ConfigKey>& config_keys();

/// Validated configuration: RunConfig and corpus parameters plus the
/// resolved value of every key.
struct CliConfig {
  RunConfig run;
  SceneSpec scene;
  SeedSpec seeds;
  int images = 100;
  std::string corpus_dir;
  std::string out_dir;
  std::vector<std::pair<std::string, std::string>> resolved;
};

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Parses `key=value` lines; '#' starts a comment and blank lines are skipped.
/// Throws ConfigError on a malformed line.
KeyValues parse_key_values(std::string_view text);

/// Defaults, then `file_values`, then `overrides` (later wins). Throws
/// ConfigError naming the key for an unknown key or an out-of-range value.
CliConfig resolve_config(const KeyValues& file_values, const KeyValues& overrides = {});

inline CliConfig parse_config(std::string_view file_text, const KeyValues& overrides = {}) {
  return resolve_config(parse_key_values(file_text), overrides);
}

}  // namespace wsseg

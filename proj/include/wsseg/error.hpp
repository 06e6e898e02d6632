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

#include <stdexcept>
#include <string>
#include <utility>

namespace wsseg {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A training loop produced a non-finite loss.
class DivergenceError : public Error {
 public:
  DivergenceError(std::string stage, int iteration, const std::string& detail)
      : Error(stage + " diverged at iteration " + std::to_string(iteration) +
              ": " + detail),
        stage_(std::move(stage)),
        iteration_(iteration) {}

  const std::string& stage() const { return stage_; }
  int iteration() const { return iteration_; }

 private:
  std::string stage_;
  int iteration_;
};

/// Invalid configuration key or value.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& detail)
      : Error(key.empty() ? detail : key + ": " + detail), key_(std::move(key)) {}

  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

}  // namespace wsseg

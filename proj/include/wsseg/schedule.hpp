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

namespace wsseg {

/// Learning-rate policy: polynomial decay base * (1 - k/K)^power, or step
/// decay base * gamma^floor(k/step_size).
struct LrSchedule {
  enum class Kind { kPolynomial, kStep };

  Kind kind = Kind::kPolynomial;
  double base = 1e-3;
  double power = 0.9;
  double gamma = 0.1;
  int step_size = 20000;
  int max_iter = 20000;

  static LrSchedule polynomial(double base, double power, int max_iter) {
    return {Kind::kPolynomial, base, power, 0.1, max_iter, max_iter};
  }
  static LrSchedule step(double base, double gamma, int step_size, int max_iter) {
    return {Kind::kStep, base, 0.9, gamma, step_size, max_iter};
  }
};

/// Rate at iteration k. Throws for k outside [0, max_iter] or a malformed schedule.
double lr_at(const LrSchedule& schedule, int k);

}  // namespace wsseg

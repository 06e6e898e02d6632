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

#include "wsseg/schedule.hpp"

#include <cmath>
#include <string>

#include "wsseg/error.hpp"

namespace wsseg {

double lr_at(const LrSchedule& s, int k) {
  if (s.max_iter <= 0) throw Error("lr_at: max_iter must be positive");
  if (k < 0 || k > s.max_iter) {
    throw Error("lr_at: iteration " + std::to_string(k) + " outside [0, " +
                std::to_string(s.max_iter) + "]");
  }
  if (!(s.base > 0.0)) throw Error("lr_at: base rate must be positive");
  switch (s.kind) {
    case LrSchedule::Kind::kPolynomial:
      if (!(s.power > 0.0)) throw Error("lr_at: power must be positive");
      return s.base * std::pow(1.0 - static_cast<double>(k) / s.max_iter, s.power);
    case LrSchedule::Kind::kStep:
      if (s.step_size <= 0 || !(s.gamma > 0.0 && s.gamma <= 1.0)) {
        throw Error("lr_at: invalid step schedule");
      }
      return s.base * std::pow(s.gamma, k / s.step_size);
  }
  return 0.0;
}

}  // namespace wsseg

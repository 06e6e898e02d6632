# Copyright 2026 The wsseg Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Weakly supervised segmentation with learned affinity propagation."""

from ._wsseg import (
    ConfigError,
    DivergenceError,
    Error,
    RunResult,
    default_config,
    laplacian_energy,
    make_corpus,
    propagate,
    run,
    segment,
)

__all__ = [
    "ConfigError",
    "DivergenceError",
    "Error",
    "RunResult",
    "default_config",
    "laplacian_energy",
    "make_corpus",
    "propagate",
    "run",
    "segment",
]

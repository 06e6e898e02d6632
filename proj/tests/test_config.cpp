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

#include <gtest/gtest.h>

#include "wsseg/config.hpp"
#include "wsseg/error.hpp"

namespace wsseg {
namespace {

TEST(Config, EmptyInputGivesDocumentedDefaults) {
  const auto cfg = parse_config("");
  EXPECT_DOUBLE_EQ(cfg.run.mining_threshold, 0.7);
  EXPECT_EQ(cfg.run.max_steps, 5);
  EXPECT_DOUBLE_EQ(cfg.run.lambda_smooth, 0.1);
  EXPECT_DOUBLE_EQ(cfg.run.vote_majority, 0.8);
  EXPECT_EQ(cfg.run.seed, 42u);
  EXPECT_EQ(cfg.images, 100);
  EXPECT_EQ(cfg.scene.width, 64);
  EXPECT_EQ(cfg.scene.height, 64);
  EXPECT_TRUE(cfg.run.mining);
  EXPECT_TRUE(cfg.run.pairwise);
}

TEST(Config, FlagOverridesFile) {
  const auto cfg = parse_config("steps=3\n", {{"steps", "7"}});
  EXPECT_EQ(cfg.run.max_steps, 7);
  EXPECT_EQ(parse_config("steps = 3 # comment\n").run.max_steps, 3);
}

TEST(Config, OutOfRangeThresholdNamesTheKey) {
  try {
    parse_config("", {{"mining_threshold", "1.5"}});
    FAIL() << "expected a ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "mining_threshold");
  }
}

TEST(Config, UnknownKeyRejected) {
  try {
    parse_config("colour=red\n");
    FAIL() << "expected a ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "colour");
  }
}

TEST(Config, MalformedValuesRejected) {
  EXPECT_THROW(parse_config("steps=abc\n"), ConfigError);
  EXPECT_THROW(parse_config("steps=0\n"), ConfigError);
  EXPECT_THROW(parse_config("mining=maybe\n"), ConfigError);
  EXPECT_THROW(parse_config("just a line\n"), ConfigError);
  EXPECT_THROW(parse_config("seed_flip_rate=0.5\n"), ConfigError);
  EXPECT_THROW(parse_config("mining_threshold=0.2\n"), ConfigError);
}

TEST(Config, EveryKeyHasHelpAndParsesItsOwnDefault) {
  KeyValues all;
  for (const auto& k : config_keys()) {
    EXPECT_FALSE(k.help.empty()) << k.name;
    all.emplace_back(k.name, k.default_value);
  }
  EXPECT_NO_THROW(resolve_config(all));
}

TEST(Config, SeedFeedsSceneAndSeedMaps) {
  const auto cfg = parse_config("seed=7\n");
  EXPECT_EQ(cfg.scene.seed, 7u);
  EXPECT_EQ(cfg.seeds.seed, 7u);
  EXPECT_EQ(cfg.run.seed, 7u);
}

}  // namespace
}  // namespace wsseg

// Copyright 2026 The Minpaint Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <fstream>

#include "minpaint/config.h"
#include "test_util.h"

using namespace minpaint;

TEST_CASE("defaults are a valid configuration") {
  RunConfig cfg;
  CHECK(cfg.Validate().empty());
  CHECK(cfg.resolution == 256);
  CHECK(cfg.learning_rate == doctest::Approx(1e-5));
  CHECK(cfg.batch_size == 2);
  CHECK(cfg.lambda_rec == doctest::Approx(10.0));
  CHECK(cfg.lambda_hrfpl == doctest::Approx(5.0));
}

TEST_CASE("parsing handles comments, whitespace, quotes, and types") {
  RunConfig cfg = RunConfig::FromString(
      "# a comment\n"
      "resolution = 64   # trailing comment\n"
      "\n"
      "  seed=42\n"
      "augment_flip = off\n"
      "parser = \"ellipse\"\n"
      "learning_rate = 2e-4\n");
  CHECK(cfg.resolution == 64);
  CHECK(cfg.seed == 42);
  CHECK(cfg.augment_flip == false);
  CHECK(cfg.parser == "ellipse");
  CHECK(cfg.learning_rate == doctest::Approx(2e-4));
}

TEST_CASE("unknown keys, bad values, and bad lines are all reported together") {
  try {
    RunConfig::FromString(
        "bogus_key = 1\n"
        "resolution = not_a_number\n"
        "this line has no equals\n");
    FAIL("expected a throw");
  } catch (const std::runtime_error& e) {
    std::string msg = e.what();
    CHECK(msg.find("bogus_key") != std::string::npos);
    CHECK(msg.find("resolution") != std::string::npos);
    CHECK(msg.find("line 3") != std::string::npos);
  }
}

TEST_CASE("semantic validation catches out-of-range settings") {
  CHECK_THROWS(RunConfig::FromString("resolution = 100\n"));     // not a power of 2
  CHECK_THROWS(RunConfig::FromString("resolution = 16\n"));      // too small
  CHECK_THROWS(RunConfig::FromString("split_ratio = 1.5\n"));
  CHECK_THROWS(RunConfig::FromString("batch_size = 0\n"));
  CHECK_THROWS(RunConfig::FromString("learning_rate = 0\n"));
  CHECK_THROWS(RunConfig::FromString("lambda_rec = -1\n"));
  CHECK_THROWS(RunConfig::FromString("base_resolution = 256\n"));  // >= resolution
  CHECK_THROWS(RunConfig::FromString("r1_interval = 0\n"));
}

TEST_CASE("config echo round-trips through the parser") {
  RunConfig cfg;
  cfg.resolution = 64;
  cfg.seed = 1234567890123ull;
  cfg.learning_rate = 3.5e-4;
  cfg.parser = "bisenet";
  cfg.parser_assets = "/data/parse maps";  // value with a space, quoted in echo
  cfg.augment_flip = false;
  std::string echo = cfg.ToString();
  RunConfig back = RunConfig::FromString(echo);
  CHECK(back.ToString() == echo);
  CHECK(back.seed == cfg.seed);
  CHECK(back.parser_assets == cfg.parser_assets);
  CHECK(back.learning_rate == cfg.learning_rate);
}

TEST_CASE("file loading works and missing files fail") {
  testutil::TempDir tmp("config");
  const std::string path = tmp.str() + "/run.cfg";
  std::ofstream(path) << "resolution = 32\nbase_resolution = 8\n";
  RunConfig cfg = RunConfig::FromFile(path);
  CHECK(cfg.resolution == 32);
  CHECK_THROWS(RunConfig::FromFile(tmp.str() + "/nope.cfg"));
}

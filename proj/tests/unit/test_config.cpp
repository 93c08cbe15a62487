#include <doctest.h>

#include <algorithm>

#include "nextcrop/app/commands.hpp"
#include "nextcrop/app/config.hpp"
#include "nextcrop/bytes.hpp"
#include "nextcrop/image.hpp"
#include "nextcrop/checkpoint.hpp"
#include "nextcrop/ptok.hpp"
#include "support.hpp"

using namespace nextcrop;
using nextcrop::app::RunConfig;
using testing::error_code_of;

TEST_CASE("config INI round trip") {
  RunConfig c;
  c.seed = 99;
  c.prompt = "a beach, at dusk";
  c.stride = "1/2";
  c.lr = 0.1;
  c.parallel = true;
  c.strides = "1,1/2";
  RunConfig back;
  back.merge_ini(c.to_ini());
  CHECK(back.to_ini() == c.to_ini());
  CHECK(back.prompt == "a beach, at dusk");
  CHECK(back.strides == "1,1/2");
  CHECK(back.lr == 0.1);
  CHECK(back.parallel);
}

TEST_CASE("config merge overrides only given keys") {
  RunConfig c;
  c.merge_ini("[plan]\nside = 8\n\n[run]\nmode = vertical\n");
  CHECK(c.side == 8);
  CHECK(c.mode == "vertical");
  CHECK(c.width == 5120);
  CHECK(error_code_of([] { RunConfig().merge_ini("[plan]\nwidth = wide\n"); }) == "config");
  CHECK(error_code_of([] { RunConfig().merge_ini("[plan]\ncolour = 3\n"); }) == "config");
  CHECK(error_code_of([] { RunConfig().merge_ini("[run]\nparallel = maybe\n"); }) == "config");
}

TEST_CASE("default config derives the reference plan") {
  const RunConfig c;
  const auto plan = c.plan();
  CHECK(plan.mode == ExpansionMode::horizontal);
  CHECK(plan.cols_per_iter == 24);
  CHECK(plan.final_cols() * c.patch == 5120);
  CHECK(c.eval().crop_side == 512);
  RunConfig v;
  v.mode = "vertical";
  v.height = 2048;
  CHECK(v.plan().final_rows() * v.patch == 2048);
  RunConfig bad;
  bad.stride = "1/3";
  CHECK(error_code_of([&] { bad.plan(); }) == "plan");
}

TEST_CASE("generate command writes consistent artifacts") {
  testing::TempDir dir("cmd");
  RunConfig c;
  c.side = 8;
  c.width = 8 * 16 * 3;
  c.stride = "1/2";
  c.codebook_size = 64;
  c.seed = 5;
  c.out = (dir / "a").string();
  const auto result = app::cmd_generate(c);
  CHECK(result.files.size() == 5);
  const auto ptok = read_ptok(dir / "a/panorama.ptok");
  CHECK(ptok.grid.cols() == 24);
  const auto png = read_file(dir / "a/panorama.png");
  CHECK(encode_png(decode_tokens(ptok.grid, read_pcbk(dir / "a/codebook.pcbk"))) == png);

  // Re-running the archived configuration reproduces the outputs.
  RunConfig again;
  again.merge_ini_file(dir / "a/run.ini");
  again.out = (dir / "b").string();
  app::cmd_generate(again);
  CHECK(read_file(dir / "b/panorama.ptok") == read_file(dir / "a/panorama.ptok"));
  CHECK(read_file(dir / "b/panorama.png") == png);

  RunConfig eval = c;
  eval.out = (dir / "e").string();
  app::cmd_evaluate(eval, dir / "a/panorama.png");
  const auto csv = read_file(dir / "e/seams.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 2);
}

TEST_CASE("train-tiny with zero epochs writes the initialisation") {
  testing::TempDir dir("train");
  RunConfig c;
  c.codebook_size = 16;
  c.window = 8;
  c.dim = 4;
  c.epochs = 0;
  c.synthetic = 3;
  c.out = dir.path().string();
  app::cmd_train_tiny(c);
  const auto ck = read_pmdl(dir / "model.pmdl");
  REQUIRE(std::holds_alternative<TinyCausalModel>(ck));
  CHECK(std::get<TinyCausalModel>(ck) == TinyCausalModel::random({8, 16, 4}, c.seed));
}

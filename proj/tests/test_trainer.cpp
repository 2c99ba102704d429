#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>

#include "sageforge/trainer.hpp"
#include "support.hpp"

using namespace sageforge;
using namespace sageforge::trainer;
using sageforge::testing::fixture_files;
using sageforge::testing::fixture_functions;
using sageforge::testing::fixture_tokenizer;
using sageforge::testing::scratch_dir;

namespace {

const std::vector<denoiser::Stage1Item>& stage1_items() {
  static const auto items = [] {
    std::vector<denoiser::Stage1Item> out;
    for (const auto& fn : fixture_functions()) {
      out.push_back(denoiser::prepare_stage1_item(fn.source_text, Language::Python, fixture_tokenizer()));
      if (out.size() == 64) break;
    }
    return out;
  }();
  return items;
}

const std::vector<corpus::BimodalPair>& stage2_pairs() {
  static const auto pairs = corpus::build_pair_dataset(fixture_files(), fixture_tokenizer()).pairs;
  return pairs;
}

TrainConfig quick(Stage stage, std::size_t steps) {
  auto c = TrainConfig::defaults(stage);
  c.steps = steps;
  c.warmup_steps = steps / 4;
  c.batch_size = 8;
  c.max_len = 128;
  c.seed = 3;
  return c;
}

}  // namespace

TEST_CASE("learning rate warms up and decays linearly") {
  CHECK(lr_schedule(0, 100, 10, 1e-3) == 0);
  CHECK(lr_schedule(5, 100, 10, 1e-3) == doctest::Approx(5e-4));
  CHECK(lr_schedule(10, 100, 10, 1e-3) == doctest::Approx(1e-3));
  CHECK(lr_schedule(55, 100, 10, 1e-3) == doctest::Approx(5e-4));
  CHECK(lr_schedule(100, 100, 10, 1e-3) == 0);
  CHECK(lr_schedule(3, 10, 0, 1.0) == doctest::Approx(0.7));
  double prev = 1;
  for (std::size_t s = 10; s <= 100; ++s) {
    const double lr = lr_schedule(s, 100, 10, 1e-3);
    CHECK(lr <= prev);
    prev = lr;
  }
}

TEST_CASE("adamw leaves parameters alone on zero gradients without decay") {
  std::vector<float> p{1.0F, -2.0F, 0.5F};
  const std::vector<float> g(3, 0.0F);
  AdamWState st;
  CHECK(optimizer_step(p, g, {}, st, 0.1, 0.0));
  CHECK(p == std::vector<float>{1.0F, -2.0F, 0.5F});
  CHECK(st.m == std::vector<float>(3, 0.0F));
  CHECK(st.v == std::vector<float>(3, 0.0F));
  CHECK(st.t == 1);
}

TEST_CASE("decoupled decay shrinks parameters by lr times decay") {
  std::vector<float> p{1.0F, -2.0F};
  const std::vector<float> g(2, 0.0F);
  const std::vector<std::uint8_t> mask{1, 0};
  AdamWState st;
  optimizer_step(p, g, mask, st, 0.1, 0.01);
  CHECK(p[0] == doctest::Approx(1.0 * (1 - 0.1 * 0.01)));
  CHECK(p[1] == -2.0F);
}

TEST_CASE("adamw matches a hand computed two-step scalar update") {
  std::vector<float> p{1.0F};
  AdamWState st;
  optimizer_step(p, std::vector<float>{0.5F}, {}, st, 0.1, 0.01);
  // m = 0.05, v = 2.5e-4, both bias corrections give the raw gradient back
  CHECK(p[0] == doctest::Approx(0.899000002).epsilon(1e-7));
  optimizer_step(p, std::vector<float>{-0.2F}, {}, st, 0.1, 0.01);
  CHECK(st.m[0] == doctest::Approx(0.025).epsilon(1e-6));
  CHECK(st.v[0] == doctest::Approx(0.00028975).epsilon(1e-6));
  CHECK(p[0] == doctest::Approx(0.8635404181).epsilon(1e-6));
}

TEST_CASE("non-finite gradients skip the step") {
  std::vector<float> p{1.0F, 2.0F};
  AdamWState st;
  const std::vector<float> bad{0.1F, std::numeric_limits<float>::quiet_NaN()};
  CHECK_FALSE(optimizer_step(p, bad, {}, st, 0.1, 0.01));
  CHECK(p == std::vector<float>{1.0F, 2.0F});
  CHECK(st.skipped == 1);
  CHECK(st.t == 0);
  const std::vector<float> inf{std::numeric_limits<float>::infinity(), 0.0F};
  CHECK_FALSE(optimizer_step(p, inf, {}, st, 0.1, 0.01));
  CHECK(st.skipped == 2);
  CHECK_THROWS_AS(optimizer_step(p, std::vector<float>{1.0F}, {}, st, 0.1, 0.0), std::invalid_argument);
}

TEST_CASE("gradient clipping and decay mask") {
  std::vector<float> g{3.0F, 4.0F};
  CHECK(clip_global_norm(g, 1.0) == doctest::Approx(5.0));
  CHECK(g[0] == doctest::Approx(0.6));
  CHECK(g[1] == doctest::Approx(0.8));
  std::vector<float> small{0.3F, 0.4F};
  clip_global_norm(small, 1.0);
  CHECK(small == std::vector<float>{0.3F, 0.4F});

  auto ec = encoder::EncoderConfig::preset("tiny", 500, 32);
  const encoder::Params<float> params(ec);
  const auto mask = decay_mask(params);
  CHECK(mask[params.layout()[params.tok_emb].offset] == 1);
  CHECK(mask[params.layout()[params.lnf_g].offset] == 0);
  CHECK(mask[params.layout()[params.mlm_bias].offset] == 0);
  CHECK(mask[params.layout()[params.blocks[0].b1].offset] == 0);
  CHECK(mask[params.layout()[params.blocks[1].w2].offset] == 1);
}

TEST_CASE("configuration validation") {
  CHECK(parse_stage("1") == Stage::Stage1);
  CHECK(parse_stage("2") == Stage::Stage2);
  CHECK(parse_stage("2-scratch") == Stage::Stage2FromScratch);
  CHECK_THROWS_AS(parse_stage("3"), ConfigError);

  const auto s1 = TrainConfig::defaults(Stage::Stage1);
  CHECK(s1.batch_size == 32);
  CHECK(s1.base_lr == doctest::Approx(3e-4));
  CHECK(s1.warmup_steps * 10 == s1.steps);
  const auto s2 = TrainConfig::defaults(Stage::Stage2);
  CHECK(s2.batch_size == 64);
  CHECK(s2.base_lr == doctest::Approx(1e-4));
  CHECK(s2.tau == doctest::Approx(0.05));

  auto c = s1;
  c.warmup_steps = c.steps + 1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = s2;
  c.batch_size = 1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = s1;
  c.base_lr = -1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("sequence wrapping and padding") {
  const auto& tok = fixture_tokenizer();
  const std::vector<TokenId> ids{10, 11, 12, 13, 14};
  auto w = wrap_sequence(ids, tok, 16);
  CHECK(w == std::vector<TokenId>{tok.cls_id(), 10, 11, 12, 13, 14, tok.sep_id()});
  w = wrap_sequence(ids, tok, 4);
  CHECK(w == std::vector<TokenId>{tok.cls_id(), 10, 11, tok.sep_id()});

  const auto b = pad_batch({{1, 2, 3}, {4}}, tok.pad_id());
  CHECK(b.rows == 2);
  CHECK(b.width == 3);
  CHECK(b.input == std::vector<TokenId>{1, 2, 3, 4, tok.pad_id(), tok.pad_id()});
  CHECK(b.attention == std::vector<std::uint8_t>{1, 1, 1, 1, 0, 0});
}

TEST_CASE("zero steps return the initialization") {
  const auto& tok = fixture_tokenizer();
  const auto dir = scratch_dir("trainer-zero");
  auto c = quick(Stage::Stage1, 0);
  c.out_dir = dir.string();
  const auto r = train_stage1(c, tok, stage1_items());
  auto ec = encoder::EncoderConfig::preset("tiny", tok.vocab_size(), c.max_len);
  ec.dropout = c.dropout;
  ec.seed = c.seed;
  const auto init = encoder::init_params<float>(ec, Rng(c.seed).fork(1).next());
  CHECK(r.params.data() == init.data());
  CHECK(r.report.losses.empty());
  REQUIRE(std::filesystem::exists(dir / "stage1-final.ckpt"));
  CHECK(encoder::load_checkpoint((dir / "stage1-final.ckpt").string()).params.data() == init.data());

  auto c2 = quick(Stage::Stage2, 0);
  const auto r2 = train_stage2(c2, tok, stage2_pairs(), &init);
  CHECK(r2.params.data() == init.data());
}

TEST_CASE("stage one runs are deterministic and finite") {
  const auto& tok = fixture_tokenizer();
  const auto dir = scratch_dir("trainer-s1");
  auto c = quick(Stage::Stage1, 4);
  c.checkpoint_every = 2;
  c.out_dir = (dir / "a").string();
  const auto a = train_stage1(c, tok, stage1_items());
  c.out_dir = (dir / "b").string();
  const auto b = train_stage1(c, tok, stage1_items());
  CHECK(a.params.data() == b.params.data());
  CHECK(a.report.losses == b.report.losses);
  CHECK(read_file((dir / "a" / "stage1-final.ckpt").string()) == read_file((dir / "b" / "stage1-final.ckpt").string()));
  CHECK(std::filesystem::exists(dir / "a" / "stage1-step2.ckpt"));
  CHECK(std::filesystem::exists(dir / "a" / "stage1-step4.ckpt"));

  REQUIRE(a.report.losses.size() == 4);
  CHECK(a.report.learning_rates.size() == 4);
  CHECK(a.report.skipped_steps == 0);
  for (double l : a.report.losses) CHECK(std::isfinite(l));
  // small initial weights give nearly uniform predictions
  CHECK(std::abs(a.report.losses[0] - std::log(static_cast<double>(tok.vocab_size()))) < 0.2);
  CHECK(a.params.all_finite());

  auto other = quick(Stage::Stage1, 4);
  other.seed = 4;
  CHECK(train_stage1(other, tok, stage1_items()).params.data() != a.params.data());

  const auto j = a.report.to_json();
  CHECK(j["stage"] == "1");
  CHECK(j["steps"] == 4);
  CHECK(j["losses"].size() == 4);
  CHECK_FALSE(j.contains("in_batch_accuracy"));
  const auto csv = a.report.loss_csv();
  CHECK(csv.rfind("step,loss,lr\n1,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);

  CHECK_THROWS_AS(train_stage1(c, tok, std::span<const denoiser::Stage1Item>{}), std::runtime_error);
}

TEST_CASE("stage two logs accuracy and respects the init contract") {
  const auto& tok = fixture_tokenizer();
  auto c = quick(Stage::Stage2FromScratch, 3);
  const auto a = train_stage2(c, tok, stage2_pairs(), nullptr);
  const auto b = train_stage2(c, tok, stage2_pairs(), nullptr);
  CHECK(a.params.data() == b.params.data());
  REQUIRE(a.report.accuracies.size() == 3);
  for (double x : a.report.accuracies) {
    CHECK(x >= 0);
    CHECK(x <= 1);
  }
  for (double l : a.report.losses) CHECK(std::isfinite(l));
  const auto j = a.report.to_json();
  CHECK(j["chance_accuracy"].get<double>() == doctest::Approx(1.0 / 15));
  CHECK(a.report.loss_csv().rfind("step,loss,lr,in_batch_accuracy\n", 0) == 0);

  CHECK_THROWS_AS(train_stage2(c, tok, stage2_pairs(), &a.params), ConfigError);
  auto staged = quick(Stage::Stage2, 3);
  CHECK_THROWS_AS(train_stage2(staged, tok, stage2_pairs(), nullptr), ConfigError);
  const auto cont = train_stage2(staged, tok, stage2_pairs(), &a.params);
  CHECK(cont.params.data() != a.params.data());
  CHECK_THROWS_AS(train_stage1(staged, tok, stage1_items()), ConfigError);
}

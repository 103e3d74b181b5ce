#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "helpers.hpp"
#include "slrkit/checkpoint.hpp"
#include "slrkit/errors.hpp"
#include "slrkit/grad_check.hpp"
#include "slrkit/model.hpp"

using namespace slrkit;
using nn::Mode;
using nn::Tensor;

namespace {

struct TempPath {
  std::filesystem::path path;
  explicit TempPath(const std::string& name)
      : path(std::filesystem::temp_directory_path() / ("slrkit_model_test_" + name)) {
    std::filesystem::remove(path);
  }
  ~TempPath() { std::filesystem::remove(path); }
};

ModelConfig tiny_config() {
  ModelConfig c;
  c.input_width_override = 6;
  c.d_embed = 8;
  c.block_widths = {10, 9, 8, 8};
  c.layers = 1;
  c.heads = 2;
  c.ff_ratio = 2;
  c.dropout_p = 0.0;
  c.classes = 3;
  return c;
}

Tensor random_frames(size_t t, size_t width, Rng& rng) {
  Tensor x({t, width});
  for (size_t i = 0; i < x.size(); ++i) x[i] = rng.uniform(-1.0, 1.0);
  return x;
}

std::vector<char> slurp_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return std::vector<char>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("parameter registry carries the full documented name contract") {
  ModelConfig c;  // defaults: mediapipe 2D input, 128 wide, 4 layers
  c.classes = 5;
  PtnModel model(c, 1);
  const size_t in_w = 67 * 2;

  auto shape_of = [&](const std::string& name) {
    const nn::Param* p = model.find(name);
    REQUIRE_MESSAGE(p != nullptr, name);
    return p->value.shape();
  };
  using S = std::vector<size_t>;
  CHECK(shape_of("pose_embed.block1.linear.weight") == S{in_w, 128});
  CHECK(shape_of("pose_embed.block1.linear.bias") == S{128});
  CHECK(shape_of("pose_embed.block1.norm.gain") == S{128});
  CHECK(shape_of("pose_embed.block1.norm.bias") == S{128});
  CHECK(shape_of("pose_embed.block4.linear.weight") == S{128, 128});
  CHECK(shape_of("pose_embed.residual.weight") == S{in_w, 128});
  CHECK(model.find("pose_embed.residual.bias") == nullptr);  // projection has no bias
  CHECK(shape_of("seq_embed.cls") == S{1, 128});  // one learned row, CLS position
  for (const char* n : {"attn.wq", "attn.wk", "attn.wv", "attn.wo"})
    CHECK(shape_of(std::string("seq_embed.layer0.") + n) == S{128, 128});
  CHECK(shape_of("seq_embed.layer3.ff.w1") == S{128, 512});
  CHECK(shape_of("seq_embed.layer3.ff.w2") == S{512, 128});
  CHECK(shape_of("seq_embed.layer2.norm1.gain") == S{128});
  CHECK(shape_of("seq_embed.layer2.norm2.bias") == S{128});
  CHECK(shape_of("classifier.weight") == S{128, 5});
  CHECK(shape_of("classifier.bias") == S{5});
  CHECK(model.find("seq_embed.layer4.attn.wq") == nullptr);  // only 4 layers
}

TEST_CASE("count_params total matches an independently summed formula") {
  ModelConfig c = tiny_config();
  PtnModel model(c, 7);
  const size_t w = *c.input_width_override, d = c.d_embed, ff = c.ff_ratio * d;
  const auto& bw = c.block_widths;

  size_t expect = 0;
  size_t prev = w;
  for (size_t i = 0; i < 4; ++i) {
    expect += prev * bw[i] + bw[i];  // linear
    expect += 2 * bw[i];             // norm gain + bias
    prev = bw[i];
  }
  expect += w * d;  // residual projection
  expect += d;      // cls
  expect += c.layers * (4 * (d * d + d)        // q/k/v/o projections
                        + 4 * d                // two layer norms
                        + d * ff + ff          // ff in
                        + ff * d + d);         // ff out
  expect += d * c.classes + c.classes;         // classifier

  const ParamCountTable table = model.count_params();
  CHECK(table.total == expect);
  CHECK(table.trainable_total == expect);

  size_t row_sum = 0;
  size_t layer_rows = 0;
  for (const auto& row : table.rows) {
    row_sum += row.count;
    if (row.name.rfind("seq_embed.layer", 0) == 0) ++layer_rows;
  }
  CHECK(row_sum == expect);
  CHECK(layer_rows == c.layers * 16);
}

TEST_CASE("default-width model parameter budget is in the single-digit millions") {
  ModelConfig c;
  c.classes = 100;
  PtnModel model(c, 1);
  const size_t total = model.count_params().total;
  CHECK(total > 500'000);
  CHECK(total < 5'000'000);
}

TEST_CASE("pose embedding is bounded by the saturating block until the residual adds range") {
  ModelConfig c = tiny_config();
  PtnModel model(c, 3);
  Rng rng(9);
  const Tensor frames = random_frames(5, 6, rng);

  // zero the residual projection: output is pure tanh, inside (-1, 1)
  Tensor zero_w({6, 8});
  model.set_param("pose_embed.residual.weight", zero_w);
  const Tensor bounded = model.pose_embed(frames, Mode::eval);
  for (size_t i = 0; i < bounded.size(); ++i) CHECK(std::abs(bounded[i]) < 1.0);

  // a large residual pushes past the saturation bound
  Tensor big_w({6, 8});
  big_w.fill(2.0);
  model.set_param("pose_embed.residual.weight", big_w);
  const Tensor open = model.pose_embed(frames, Mode::eval);
  double furthest = 0.0;
  for (size_t i = 0; i < open.size(); ++i) furthest = std::max(furthest, std::abs(open[i]));
  CHECK(furthest > 1.0);
}

TEST_CASE("classifier logits ignore padding completely") {
  ModelConfig c = tiny_config();
  PtnModel model(c, 11);
  Rng rng(12);
  const size_t t_real = 4, width = 6;
  const Tensor real = random_frames(t_real, width, rng);

  Tensor padded({t_real + 6, width});
  for (size_t i = 0; i < real.size(); ++i) padded[i] = real[i];
  std::vector<uint8_t> mask(t_real + 6, 0);
  for (size_t i = 0; i < t_real; ++i) mask[i] = 1;

  const Tensor a = model.forward(real, {}, Mode::eval);
  const Tensor b = model.forward(padded, mask, Mode::eval);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);  // bit-identical
}

TEST_CASE("without positional encoding the logits are order-invariant; with it they are not") {
  ModelConfig c = tiny_config();
  const Tensor frames = [] {
    Rng rng(13);
    return random_frames(6, 6, rng);
  }();
  Tensor reversed(frames.shape());
  for (size_t t = 0; t < 6; ++t) {
    for (size_t j = 0; j < 6; ++j) reversed.at(5 - t, j) = frames.at(t, j);
  }

  PtnModel plain(c, 21);
  const Tensor y1 = plain.forward(frames, {}, Mode::eval);
  const Tensor y2 = plain.forward(reversed, {}, Mode::eval);
  double diff = 0.0;
  for (size_t i = 0; i < y1.size(); ++i) diff = std::max(diff, std::abs(y1[i] - y2[i]));
  CHECK(diff < 1e-9);

  c.positional_encoding = true;
  PtnModel positional(c, 21);  // same seed: identical weights, only the flag differs
  const Tensor z1 = positional.forward(frames, {}, Mode::eval);
  const Tensor z2 = positional.forward(reversed, {}, Mode::eval);
  double pdiff = 0.0;
  for (size_t i = 0; i < z1.size(); ++i) pdiff = std::max(pdiff, std::abs(z1[i] - z2[i]));
  CHECK(pdiff > 1e-6);
}

TEST_CASE("forward is deterministic: eval always, train under a fixed seed") {
  ModelConfig c = tiny_config();
  c.dropout_p = 0.25;
  PtnModel model(c, 31);
  Rng data(14);
  const Tensor frames = random_frames(5, 6, data);

  const Tensor e1 = model.forward(frames, {}, Mode::eval);
  const Tensor e2 = model.forward(frames, {}, Mode::eval);
  CHECK(e1 == e2);

  Rng r1(7), r2(7), r3(8);
  const Tensor t1 = model.forward(frames, {}, Mode::train, &r1);
  const Tensor t2 = model.forward(frames, {}, Mode::train, &r2);
  const Tensor t3 = model.forward(frames, {}, Mode::train, &r3);
  CHECK(t1 == t2);
  CHECK(t1 != t3);  // different dropout draw
  CHECK_THROWS_AS(model.forward(frames, {}, Mode::train), ContractError);  // rng required
}

TEST_CASE("forward_sequence contract: full presence unless partial input is allowed") {
  const auto& layout = layout_for(EstimatorFamily::mediapipe);
  ModelConfig c;
  c.family = EstimatorFamily::mediapipe;
  c.input_dims = 3;
  c.d_embed = 8;
  c.block_widths = {8, 8, 8, 8};
  c.layers = 1;
  c.heads = 2;
  c.dropout_p = 0.0;
  c.classes = 2;
  PtnModel model(c, 41);

  Rng rng(15);
  KeypointSequence seq = testing::random_sequence(layout, 4, rng);
  CHECK(model.forward_sequence(seq, Mode::eval).size() == 2);

  seq.set_present(1, 30, false);
  for (size_t k = layout.group(GroupName::left_hand).begin;
       k < layout.group(GroupName::left_hand).end; ++k)
    seq.set_present(1, k, false);
  CHECK_THROWS_AS(model.forward_sequence(seq, Mode::eval), ContractError);
  CHECK(model.forward_sequence(seq, Mode::eval, nullptr, nullptr, true).size() == 2);

  // width mismatch: 2D model fed a 3D-widths sequence
  ModelConfig c2 = c;
  c2.input_dims = 2;
  PtnModel narrow(c2, 41);
  CHECK_THROWS_AS(narrow.forward_sequence(seq, Mode::eval, nullptr, nullptr, true),
                  ContractError);
}

TEST_CASE("whole-model gradients check numerically through the loss") {
  ModelConfig c = tiny_config();
  PtnModel model(c, 51);
  Rng data(16);
  const Tensor frames = random_frames(3, 6, data);
  const std::vector<uint8_t> mask = {1, 1, 0};
  const size_t label = 1;

  model.zero_grads();
  PtnCache cache;
  const Tensor logits = model.forward(frames, mask, Mode::eval, nullptr, &cache);
  const auto ce = nn::softmax_cross_entropy(logits, label);
  model.backward(cache, ce.grad_logits);

  auto loss_with = [&](nn::Param* p, std::span<const double> v) {
    Tensor t(p->value.shape(), std::vector<double>(v.begin(), v.end()));
    const Tensor saved = p->value;
    p->value = t;
    const Tensor out = model.forward(frames, mask, Mode::eval);
    const double loss = nn::softmax_cross_entropy(out, label).loss;
    p->value = saved;
    return loss;
  };

  for (const char* name :
       {"pose_embed.block1.linear.weight", "pose_embed.block2.norm.gain",
        "pose_embed.block4.linear.bias", "pose_embed.residual.weight", "seq_embed.cls",
        "seq_embed.layer0.attn.wq", "seq_embed.layer0.attn.bo", "seq_embed.layer0.norm1.gain",
        "seq_embed.layer0.ff.w2", "classifier.weight", "classifier.bias"}) {
    nn::Param* p = model.find(name);
    REQUIRE(p != nullptr);
    auto f = [&](std::span<const double> v) { return loss_with(p, v); };
    const auto r = nn::grad_check(f, p->value.values(), p->grad.values());
    INFO(name, " rel err ", r.max_rel_error);
    CHECK(r.max_rel_error < 1e-5);
  }
}

TEST_CASE("gradients accumulate across backward calls until zeroed") {
  ModelConfig c = tiny_config();
  PtnModel model(c, 61);
  Rng data(17);
  const Tensor frames = random_frames(3, 6, data);

  auto run_backward = [&] {
    PtnCache cache;
    const Tensor logits = model.forward(frames, {}, Mode::eval, nullptr, &cache);
    model.backward(cache, nn::softmax_cross_entropy(logits, 0).grad_logits);
  };
  model.zero_grads();
  run_backward();
  const Tensor once = model.find("classifier.weight")->grad;
  run_backward();
  const Tensor twice = model.find("classifier.weight")->grad;
  for (size_t i = 0; i < once.size(); ++i)
    CHECK(twice[i] == doctest::Approx(2.0 * once[i]).epsilon(1e-12));
  model.zero_grads();
  for (size_t i = 0; i < once.size(); ++i) CHECK(model.find("classifier.weight")->grad[i] == 0.0);
}

TEST_CASE("set_param validates name and shape") {
  PtnModel model(tiny_config(), 71);
  CHECK_THROWS_AS(model.set_param("no.such.param", Tensor({1})), ContractError);
  CHECK_THROWS_AS(model.set_param("seq_embed.cls", Tensor({1, 9})), ContractError);
  Tensor good({1, 8});
  good.fill(0.5);
  model.set_param("seq_embed.cls", good);
  CHECK(model.find("seq_embed.cls")->value[0] == 0.5);
}

TEST_CASE("config validation rejects inconsistent settings") {
  ModelConfig c = tiny_config();
  c.block_widths[3] = 7;  // must equal d_embed
  CHECK_THROWS_AS(PtnModel(c, 1), ContractError);
  c = tiny_config();
  c.heads = 3;  // 8 % 3 != 0
  CHECK_THROWS_AS(PtnModel(c, 1), ContractError);
  c = tiny_config();
  c.dropout_p = 1.0;
  CHECK_THROWS_AS(PtnModel(c, 1), ContractError);
  c = tiny_config();
  c.classes = 1;
  CHECK_THROWS_AS(PtnModel(c, 1), ContractError);
  c = tiny_config();
  c.input_dims = 3;
  c.input_width_override.reset();
  c.family = EstimatorFamily::openpose;  // 2D layout cannot feed a 3D-input model
  CHECK_THROWS_AS(PtnModel(c, 1), ContractError);
}

TEST_CASE("model config JSON round-trips") {
  TempPath tmp("config.json");
  ModelConfig c;
  c.family = EstimatorFamily::openpose;
  c.input_dims = 2;
  c.d_embed = 64;
  c.block_widths = {32, 48, 64, 64};
  c.layers = 2;
  c.heads = 4;
  c.ff_ratio = 3;
  c.dropout_p = 0.25;
  c.l1_lambda = 0.01;
  c.positional_encoding = true;
  c.pre_norm = true;
  c.classes = 17;
  save_model_config(c, tmp.path);
  const ModelConfig r = load_model_config(tmp.path);
  CHECK(r.family == c.family);
  CHECK(r.input_dims == c.input_dims);
  CHECK(r.d_embed == c.d_embed);
  CHECK(r.block_widths == c.block_widths);
  CHECK(r.layers == c.layers);
  CHECK(r.heads == c.heads);
  CHECK(r.ff_ratio == c.ff_ratio);
  CHECK(r.dropout_p == c.dropout_p);
  CHECK(r.l1_lambda == c.l1_lambda);
  CHECK(r.positional_encoding == c.positional_encoding);
  CHECK(r.pre_norm == c.pre_norm);
  CHECK(r.classes == c.classes);
}

TEST_CASE("checkpoints restore bit-identical values and reject mismatched models") {
  TempPath tmp("model.ckpt");
  ModelConfig c = tiny_config();
  PtnModel model(c, 81);
  save_checkpoint(model, tmp.path);

  SUBCASE("file entries mirror the parameter list in order") {
    const auto entries = load_checkpoint(tmp.path);
    const auto params = static_cast<const PtnModel&>(model).params();
    REQUIRE(entries.size() == params.size());
    for (size_t i = 0; i < entries.size(); ++i) {
      CHECK(entries[i].name == params[i]->name);
      CHECK(entries[i].value == params[i]->value);
    }
  }
  SUBCASE("round trip through a perturbed model is exact") {
    std::vector<Tensor> original;
    for (const nn::Param* p : static_cast<const PtnModel&>(model).params())
      original.push_back(p->value);
    for (nn::Param* p : model.params()) p->value.fill(9.0);
    load_into_model(model, tmp.path);
    const auto params = static_cast<const PtnModel&>(model).params();
    for (size_t i = 0; i < params.size(); ++i) CHECK(params[i]->value == original[i]);
  }
  SUBCASE("writing twice yields byte-identical files") {
    TempPath tmp2("model2.ckpt");
    save_checkpoint(model, tmp2.path);
    CHECK(slurp_bytes(tmp.path) == slurp_bytes(tmp2.path));
  }
  SUBCASE("a different class count cannot be restored silently") {
    ModelConfig c2 = c;
    c2.classes = 4;
    PtnModel other(c2, 1);
    CHECK_THROWS_AS(load_into_model(other, tmp.path), ContractError);
  }
  SUBCASE("missing and extra parameters are both rejected") {
    ModelConfig c2 = c;
    c2.layers = 2;  // model has names the checkpoint lacks
    PtnModel deeper(c2, 1);
    CHECK_THROWS_AS(load_into_model(deeper, tmp.path), ContractError);
    TempPath tmp3("deeper.ckpt");
    save_checkpoint(deeper, tmp3.path);  // checkpoint has names the model lacks
    CHECK_THROWS_AS(load_into_model(model, tmp3.path), ContractError);
  }
  SUBCASE("garbage files are reported as such") {
    TempPath bad("bad.ckpt");
    std::ofstream(bad.path) << "definitely not a checkpoint";
    CHECK_THROWS_AS(load_checkpoint(bad.path), IoError);
    CHECK_THROWS_AS(load_checkpoint(std::filesystem::path("/nonexistent/x.ckpt")), IoError);
  }
}

TEST_CASE("same seed, same init; different seed, different init") {
  ModelConfig c = tiny_config();
  PtnModel a(c, 5), b(c, 5), other(c, 6);
  const auto pa = static_cast<const PtnModel&>(a).params();
  const auto pb = static_cast<const PtnModel&>(b).params();
  const auto po = static_cast<const PtnModel&>(other).params();
  bool any_diff = false;
  for (size_t i = 0; i < pa.size(); ++i) {
    CHECK(pa[i]->value == pb[i]->value);
    any_diff = any_diff || !(pa[i]->value == po[i]->value);
  }
  CHECK(any_diff);
}

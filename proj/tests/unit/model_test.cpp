#include <cmath>
#include <filesystem>

#include "carp/generator.hpp"
#include "carp/model.hpp"
#include "doctest.h"

using namespace carp;

namespace {

ModelConfig small_config() {
  ModelConfig c;
  c.d_h = 16;
  c.n_layers = 2;
  c.n_heads = 4;
  c.mds_dim = 3;
  return c;
}

FeatureContext small_context(int index) {
  DatasetSpec spec = dataset_preset("Task20-mini");
  spec.required_edges = 6;
  spec.node_lo = 8;
  spec.node_hi = 10;
  const auto inst = generate_dataset_instance(spec, index);
  return make_feature_context(inst, all_pairs_shortest_paths(inst), 3);
}

}  // namespace

TEST_CASE("config validation") {
  ModelConfig c = small_config();
  CHECK_NOTHROW(c.validate());
  c.n_heads = 5;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  const auto back = ModelConfig::from_manifest(small_config().to_manifest());
  CHECK(back.d_h == 16);
  CHECK(back.n_heads == 4);
  CHECK(back.mds_dim == 3);
}

TEST_CASE("encoder is permutation equivariant") {
  Rng rng(41);
  const Policy policy(small_config(), rng);
  const auto ctx = small_context(0);
  EnvState s = EnvState::initial(ctx.graph());
  apply_action(s, 3, ctx.graph());
  const RowMatrix f = build_features(ctx, s);
  const RowMatrix in = ctx.incoming_weights();
  const int n = static_cast<int>(f.rows());
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = (i * 5 + 2) % n;  // n = 13 is coprime with 5
  RowMatrix fp(n, f.cols()), inp(n, n);
  for (int i = 0; i < n; ++i) {
    fp.row(i) = f.row(perm[i]);
    for (int j = 0; j < n; ++j) inp(i, j) = in(perm[i], perm[j]);
  }
  const auto run = [&](const RowMatrix& feats, const RowMatrix& inc) {
    ad::Tape t(false);
    ParamBinder w(t, policy);
    const auto h0 = gat_encode(w, policy.layout(), t.constant(feats), t.constant(inc));
    return ad::Matrix(encode(w, policy.layout(), policy.config(), h0).value());
  };
  REQUIRE(n == 13);
  const auto h = run(f, in);
  const auto hp = run(fp, inp);
  for (int i = 0; i < n; ++i) CHECK((hp.row(i) - h.row(perm[i])).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("GAT gradient matches central differences") {
  Rng rng(42);
  Policy policy(small_config(), rng);
  const auto ctx = small_context(1);
  const RowMatrix f = build_features(ctx, EnvState::initial(ctx.graph()));
  ad::Matrix weights(f.rows(), 16);
  for (Eigen::Index k = 0; k < weights.size(); ++k) weights.data()[k] = uniform01(rng) - 0.5;
  const auto loss = [&](ad::Tape& t, ParamBinder& w) {
    const auto h0 = gat_encode(w, policy.layout(), t.constant(f), t.constant_ref(ctx.incoming_weights()));
    return ad::sum(ad::mul(h0, t.constant(weights)));
  };
  policy.params().zero_grad();
  {
    ad::Tape t;
    ParamBinder w(t, policy);
    t.backward(loss(t, w));
  }
  auto& W = policy.params()[policy.layout().gat_w];
  const double h = 1e-5;
  for (Eigen::Index k = 0; k < W.value.size(); k += 7) {
    const double keep = W.value.data()[k];
    const auto eval = [&](double x) {
      W.value.data()[k] = x;
      ad::Tape t(false);
      ParamBinder w(t, std::as_const(policy));
      return loss(t, w).value()(0, 0);
    };
    const double numeric = (eval(keep + h) - eval(keep - h)) / (2 * h);
    W.value.data()[k] = keep;
    const double analytic = W.grad.data()[k];
    CHECK(std::abs(numeric - analytic) / std::max({1e-6, std::abs(numeric), std::abs(analytic)}) < 1e-4);
  }
}

TEST_CASE("degenerate encoder input stays finite") {
  Rng rng(43);
  Policy policy(small_config(), rng);
  for (auto& p : policy.params()) p.value.setZero();
  ad::Tape t(false);
  ParamBinder w(t, std::as_const(policy));
  const auto out = encode(w, policy.layout(), policy.config(), t.constant(ad::Matrix::Zero(7, 16))).value();
  CHECK(out.allFinite());
  CHECK(out.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("decoder probabilities") {
  Rng rng(44);
  const Policy policy(small_config(), rng);
  const auto ctx = small_context(2);
  EnvState s = EnvState::initial(ctx.graph());
  for (int a = 1; a < ctx.graph().size() - 2; a += 2) {
    apply_action(s, a, ctx.graph());
    if (s.remaining_capacity < 20) apply_action(s, 0, ctx.graph());
  }
  const auto probs = action_probabilities(policy, ctx, s);
  const auto mask = legal_actions(s, ctx.graph());
  double total = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    total += probs[i];
    if (!mask[i]) CHECK(probs[i] == 0.0);
  }
  CHECK(total == doctest::Approx(1.0));

  SUBCASE("single legal arc") {
    EnvState forced = s;
    apply_action(forced, ctx.graph().size() - 2, ctx.graph());
    REQUIRE(forced_return(forced));
    const auto p = action_probabilities(policy, ctx, forced);
    CHECK(p[0] == doctest::Approx(1.0));
  }
  SUBCASE("identical keys give equal probabilities") {
    ad::Tape t(false);
    ParamBinder w(t, policy);
    ad::Matrix h = ad::Matrix::Random(4, 16);
    h.row(2) = h.row(1);
    const auto logp = decode(w, policy.layout(), policy.config(), t.constant(h), EnvState::initial(ctx.graph()),
                             ctx.graph().capacity(), {0, 1, 1, 0});
    CHECK(logp.value()(0, 1) == doctest::Approx(std::log(0.5)));
    CHECK(logp.value()(0, 2) == doctest::Approx(std::log(0.5)));
  }
  SUBCASE("logits are bounded by C") {
    ad::Tape t(false);
    ParamBinder w(t, policy);
    const auto u = decoder_logits(w, policy.layout(), policy.config(), t.constant(ad::Matrix::Random(ctx.graph().size(), 16) * 50.0),
                                  s, ctx.graph().capacity());
    CHECK(u.value().cwiseAbs().maxCoeff() <= 10.0);
  }
}

TEST_CASE("action selection") {
  CHECK(argmax_lowest({0.2, 0.5, 0.3}) == 1);
  CHECK(argmax_lowest({0.4, 0.2, 0.4}) == 0);
  Rng a(7), b(7);
  const std::vector<double> p{0.1, 0.0, 0.6, 0.3};
  for (int i = 0; i < 50; ++i) {
    const int x = sample_index(p, a);
    CHECK(x == sample_index(p, b));
    CHECK(x != 1);
  }
}

TEST_CASE("rollouts are reproducible") {
  Rng rng(45);
  const Policy policy(small_config(), rng);
  const auto ctx = small_context(3);
  Rng r1(9), r2(9);
  const auto s1 = rollout(policy, ctx, EnvState::initial(ctx.graph()), DecodeMode::Sample, r1);
  const auto s2 = rollout(policy, ctx, EnvState::initial(ctx.graph()), DecodeMode::Sample, r2);
  CHECK(s1.done);
  CHECK(s1.sequence == s2.sequence);
  const auto g1 = greedy_rollout(policy, ctx, EnvState::initial(ctx.graph()));
  const auto g2 = greedy_rollout(policy, ctx, EnvState::initial(ctx.graph()));
  CHECK(g1.sequence == g2.sequence);
}

TEST_CASE("policy save and load") {
  Rng rng(46);
  const Policy policy(small_config(), rng);
  const auto path = (std::filesystem::temp_directory_path() / "carp_unit_policy.bin").string();
  policy.save(path);
  const Policy back = Policy::load(path);
  CHECK(back.config().d_h == 16);
  REQUIRE(back.params().size() == policy.params().size());
  for (int i = 0; i < policy.params().size(); ++i)
    CHECK((back.params()[i].value - policy.params()[i].value).cwiseAbs().maxCoeff() < 1e-6);
  std::filesystem::remove(path);
  std::filesystem::remove(path + ".manifest");
}

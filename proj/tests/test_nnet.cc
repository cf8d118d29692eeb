/* Copyright 2026 The Lemma Namer Authors. All Rights Reserved.

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

#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "gradcheck_suite.h"
#include "lemma_namer/nnet.h"

namespace lemma_namer::nnet {
namespace {

using D = double;
using testing::gradcheck_internal::random_mat;

TEST_CASE("gradients of every layer") {
  for (const auto& c : testing::run_grad_checks(1)) {
    INFO(c.layer << " worst " << c.report.worst);
    CHECK(c.report.coordinates > 0);
    CHECK(c.report.max_relative_error < 1e-4);
  }
}

TEST_CASE("grad check detects a wrong gradient") {
  Mat<D> x = Mat<D>::Constant(2, 1, 1.0);
  Mat<D> wrong = Mat<D>::Constant(2, 1, 3.0);
  std::vector<GradCheckTensor> t = {{"x", &x, &wrong}};
  auto rep = grad_check([&] { return x.squaredNorm(); }, t);
  CHECK(rep.max_relative_error > 0.3);
  CHECK(rep.coordinates == 2);
}

TEST_CASE("fusion matches a naive matrix product") {
  Rng rng(2);
  Fusion<D> f(3, 4, 2, 1);
  ParamList<D> ps;
  f.collect(ps, "fusion");
  init_uniform(ps, rng);
  std::vector<std::vector<Vec<D>>> h(3), c(3);
  for (int k = 0; k < 3; ++k) {
    h[k].push_back(random_mat(rng, 4, 1));
    c[k].push_back(random_mat(rng, 4, 1));
  }
  auto out = f.forward(h, c);
  const Mat<D>& w = f.hidden[0].weight;
  for (int i = 0; i < 2; ++i) {
    double acc = f.hidden[0].bias(i, 0);
    for (int k = 0; k < 3; ++k) {
      for (int j = 0; j < 4; ++j) acc += w(i, k * 4 + j) * h[k][0](j);
    }
    CHECK(out.h[0](i) == doctest::Approx(acc).epsilon(1e-12));
  }
}

TEST_CASE("attention edge cases") {
  Rng rng(4);
  Attention<D> att(3, 2);
  ParamList<D> ps;
  att.collect(ps, "a");
  init_uniform(ps, rng);
  Vec<D> q = random_mat(rng, 2, 1);
  Mat<D> one = random_mat(rng, 3, 1);
  auto [ctx1, w1] = att.attend(q, one);
  CHECK(w1.size() == 1);
  CHECK(w1(0) == doctest::Approx(1.0));
  CHECK((ctx1 - one.col(0)).norm() < 1e-12);

  Mat<D> twin(3, 2);
  twin.col(0) = one.col(0);
  twin.col(1) = one.col(0);
  auto [ctx2, w2] = att.attend(q, twin);
  CHECK(w2(0) == doctest::Approx(0.5));
  CHECK(w2(1) == doctest::Approx(0.5));
  CHECK((ctx2 - one.col(0)).norm() < 1e-12);
}

TEST_CASE("copy distribution against enumeration") {
  Rng rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const int v = 6;
    Vec<D> logits = random_mat(rng, v, 1, 3.0);
    const int n = 5;
    Vec<D> w = random_mat(rng, n, 1).array().exp();
    w /= w.sum();
    std::vector<int> src(n);
    for (auto& s : src) s = static_cast<int>(uniform_index(rng, v + 2));
    double p = uniform01(rng);
    Vec<D> out = copy_distribution<D>(logits, p, w, src, v + 2);
    double z = logits.array().exp().sum();
    for (int id = 0; id < v + 2; ++id) {
      double expect = id < v ? p * std::exp(logits(id)) / z : 0.0;
      for (int i = 0; i < n; ++i) {
        if (src[i] == id) expect += (1 - p) * w(i);
      }
      CHECK(out(id) == doctest::Approx(expect).epsilon(1e-12));
    }
    CHECK(out.sum() == doctest::Approx(1.0));
  }
  Vec<D> logits = Vec<D>::Zero(3);
  Vec<D> w = Vec<D>::Ones(1);
  std::vector<int> bad = {7};
  CHECK_THROWS_AS(copy_distribution<D>(logits, 0.5, w, bad, 4), DimensionMismatch);
}

TEST_CASE("uniform initialization") {
  Mat<D> a(1000, 1000);
  ParamList<D> ps = {{"a", &a}};
  Rng rng(10);
  init_uniform(ps, rng);
  CHECK(a.minCoeff() >= -0.1);
  CHECK(a.maxCoeff() < 0.1);
  CHECK(std::abs(a.mean()) < 5e-4);
  double var = (a.array() - a.mean()).square().mean();
  CHECK(var == doctest::Approx(0.01 / 3).epsilon(0.01));
  Mat<D> b(1000, 1000);
  ParamList<D> pb = {{"b", &b}};
  Rng rng2(10);
  init_uniform(pb, rng2);
  CHECK(a == b);
}

TEST_CASE("dropout mask") {
  Rng rng(3);
  DropoutContext ctx{0.5, &rng};
  Mat<D> m = dropout_mask<D>(200, 200, ctx);
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    CHECK((m.data()[i] == 0.0 || m.data()[i] == 2.0));
  }
  CHECK(m.mean() == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("softmax helpers") {
  Mat<D> s(3, 2);
  s << 1, 1000, 2, 1000, 3, 1000;
  Mat<D> p = softmax_columns<D>(s);
  CHECK(p.col(0).sum() == doctest::Approx(1));
  CHECK(p(0, 1) == doctest::Approx(1.0 / 3));
  Vec<D> l = log_softmax<D>(s.col(0));
  CHECK(l.array().exp().sum() == doctest::Approx(1));
}

BiLstmEncoder<D> mirrored_encoder(Rng& rng, int in, int h) {
  BiLstmEncoder<D> enc(in, h, 1);
  ParamList<D> ps;
  enc.collect(ps, "e");
  init_uniform(ps, rng, -0.5, 0.5);
  enc.layers[0].backward = enc.layers[0].forward;
  return enc;
}

TEST_CASE("bi-LSTM shape and direction") {
  Rng rng(12);
  const int in = 3, h = 4;
  auto enc = mirrored_encoder(rng, in, h);
  Mat<D> x1 = random_mat(rng, in, 1);
  auto o1 = enc.forward(x1);
  CHECK(o1.states.rows() == 2 * h);
  CHECK(o1.states.cols() == 1);
  CHECK((o1.states.topRows(h) - o1.states.bottomRows(h)).norm() < 1e-12);

  Mat<D> x = random_mat(rng, in, 5);
  Mat<D> rev = x.rowwise().reverse();
  auto a = enc.forward(x);
  auto b = enc.forward(rev);
  for (int t = 0; t < 5; ++t) {
    CHECK((a.states.col(t).topRows(h) - b.states.col(4 - t).bottomRows(h))
              .norm() < 1e-12);
  }
  CHECK((a.final_h[0].topRows(h) - b.final_h[0].bottomRows(h)).norm() < 1e-12);
  CHECK_THROWS_AS(enc.forward(Mat<D>(in, 0)), EmptySequenceError);
}

TEST_CASE("dense array round trip") {
  Rng rng(1);
  Mat<D> m = random_mat(rng, 3, 4);
  auto arr = DenseArray<D>::from_matrix(m);
  CHECK(arr.shape == std::vector<std::size_t>{3, 4});
  CHECK(arr.values[1] == m(0, 1));
  CHECK(arr.to_matrix() == m);
}

}  // namespace
}  // namespace lemma_namer::nnet

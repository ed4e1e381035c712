// Copyright 2026 The pbit-nqs developers
//
//    Licensed under the Apache License, Version 2.0 (the "License");
//    you may not use this file except in compliance with the License.
//    You may obtain a copy of the License at
//
//        http://www.apache.org/licenses/LICENSE-2.0
//
//    Unless required by applicable law or agreed to in writing, software
//    distributed under the License is distributed on an "AS IS" BASIS,
//    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//    See the License for the specific language governing permissions and
//    limitations under the License.

#include <doctest.h>

#include <cmath>

#include "pbitnqs/estimators.hpp"
#include "pbitnqs/trainer.hpp"
#include "support/oracles.hpp"

using namespace pbitnqs;

namespace {

SampleBatch batch_of_rows(std::vector<std::vector<int8_t>> rows) {
    SampleBatch b;
    b.n_bits = static_cast<uint32_t>(rows.front().size());
    b.n_rows = static_cast<uint32_t>(rows.size());
    for (const auto& r : rows) b.data.insert(b.data.end(), r.begin(), r.end());
    return b;
}

}  // namespace

TEST_CASE("estimate_energy: identical rows have zero spread") {
    const TfimModel m = TfimModel::uniform(4, 1.0, 1.0);
    const RbmParams p = RbmParams::random(4, 8, 4, 0.2);
    const std::vector<int8_t> row{1, -1, 1, 1};
    const SampleBatch batch = batch_of_rows({row, row, row});
    const EnergyEstimate est = estimate_energy(batch, p, m, SamplingMode::Psi2Duplicate);
    CHECK(est.mean == doctest::Approx(local_energy(row, p, m)).epsilon(1e-12));
    CHECK(est.std_error == 0.0);
    CHECK(est.ess == doctest::Approx(3.0));
}

TEST_CASE("estimate_energy: plain mean of two rows in psi2 mode") {
    const TfimModel m = TfimModel::uniform(4, 1.0, 0.5);
    const RbmParams p = RbmParams::random(4, 4, 9, 0.3);
    const std::vector<int8_t> r1{1, 1, 1, 1};
    const std::vector<int8_t> r2{1, -1, 1, -1};
    const SampleBatch batch = batch_of_rows({r1, r2});
    const EnergyEstimate est = estimate_energy(batch, p, m, SamplingMode::Psi2Duplicate);
    const double e1 = local_energy(r1, p, m);
    const double e2 = local_energy(r2, p, m);
    CHECK(est.mean == doctest::Approx(0.5 * (e1 + e2)).epsilon(1e-12));
}

TEST_CASE("estimate_energy: empty batch rejected") {
    const TfimModel m = TfimModel::uniform(4, 1.0, 1.0);
    const RbmParams p(4, 4);
    SampleBatch batch;
    batch.n_bits = 4;
    CHECK_THROWS_AS(estimate_energy(batch, p, m, SamplingMode::Psi2Duplicate), NumericError);
}

TEST_CASE("estimate_energy: psi2-sampled batches agree with the enumerated energy") {
    const TfimModel m = TfimModel::uniform(6, 1.0, 1.0);
    const RbmParams p = RbmParams::random(6, 12, 17, 0.3);
    const double exact = variational_energy_exact(p, m);
    const auto psi2 = testing::psi_power_distribution(p, 2.0);
    const SampleBatch batch = testing::draw_batch(psi2, 6, 4000, 555);
    const EnergyEstimate est = estimate_energy(batch, p, m, SamplingMode::Psi2Duplicate);
    CHECK(std::abs(est.mean - exact) < 4.0 * est.std_error);
}

TEST_CASE("estimate_energy: reweighted psi-sampled batches agree too") {
    const TfimModel m = TfimModel::uniform(6, 1.0, 1.0);
    const RbmParams p = RbmParams::random(6, 12, 18, 0.3);
    const double exact = variational_energy_exact(p, m);
    const auto psi1 = testing::psi_power_distribution(p, 1.0);
    const SampleBatch batch = testing::draw_batch(psi1, 6, 6000, 556);
    const EnergyEstimate est = estimate_energy(batch, p, m, SamplingMode::PsiReweight);
    CHECK(est.ess < batch.n_rows);  // reweighting costs effective samples
    CHECK(est.std_error == doctest::Approx(std::sqrt(est.variance / est.ess)).epsilon(1e-14));
    CHECK(std::abs(est.mean - exact) < 4.0 * est.std_error);
}

TEST_CASE("estimate_energy: unbiased over 100 independent batches") {
    const TfimModel m = TfimModel::uniform(5, 1.0, 1.0);
    const RbmParams p = RbmParams::random(5, 10, 23, 0.3);
    const double exact = variational_energy_exact(p, m);
    const auto psi2 = testing::psi_power_distribution(p, 2.0);

    double grand_mean = 0.0;
    double grand_se2 = 0.0;
    const int n_batches = 100;
    for (int k = 0; k < n_batches; ++k) {
        const SampleBatch batch = testing::draw_batch(psi2, 5, 500, 9000 + k);
        const EnergyEstimate est = estimate_energy(batch, p, m, SamplingMode::Psi2Duplicate);
        grand_mean += est.mean;
        grand_se2 += est.std_error * est.std_error;
    }
    grand_mean /= n_batches;
    const double combined_se = std::sqrt(grand_se2) / n_batches;
    CHECK(std::abs(grand_mean - exact) < 4.0 * combined_se);
}

TEST_CASE("variational bound holds statistically batch by batch") {
    const TfimModel m = TfimModel::uniform(6, 1.0, 1.0);
    const double e0 = exact_ground_energy(m).ground_energy;
    const RbmParams p = RbmParams::random(6, 12, 31, 0.3);
    const auto psi2 = testing::psi_power_distribution(p, 2.0);
    for (int k = 0; k < 50; ++k) {
        const SampleBatch batch = testing::draw_batch(psi2, 6, 400, 777 + k);
        const EnergyEstimate est = estimate_energy(batch, p, m, SamplingMode::Psi2Duplicate);
        CHECK(est.mean >= e0 - 4.0 * est.std_error);
    }
}

TEST_CASE("gradient: constant local energy gives the zero vector") {
    // Γ = 0 and zero parameters: E_loc = classical energy; pick rows with the
    // same classical energy.
    const TfimModel m = TfimModel::uniform(4, 1.0, 1.0);
    const RbmParams p = RbmParams::random(4, 4, 2, 0.2);
    const std::vector<int8_t> row{1, 1, -1, 1};
    const SampleBatch batch = batch_of_rows({row, row, row, row});
    for (double g : gradient(batch, p, m, SamplingMode::Psi2Duplicate))
        CHECK(g == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("gradient: single-row batch is zero") {
    const TfimModel m = TfimModel::uniform(4, 1.0, 1.0);
    const RbmParams p = RbmParams::random(4, 8, 3, 0.3);
    const SampleBatch batch = batch_of_rows({{1, -1, 1, -1}});
    for (double g : gradient(batch, p, m, SamplingMode::Psi2Duplicate)) CHECK(g == 0.0);
}

TEST_CASE("gradient: enumeration batch matches finite differences of the exact energy") {
    for (auto [nv, nh, seed] : {std::array<uint32_t, 3>{4, 8, 11},
                                std::array<uint32_t, 3>{6, 12, 12},
                                std::array<uint32_t, 3>{8, 16, 13}}) {
        const TfimModel m = TfimModel::uniform(nv, 1.0, 1.0);
        const RbmParams p = RbmParams::random(nv, nh, seed, 0.25);

        const SampleBatch rows = enumerate_visible_batch(nv);
        std::vector<double> logw = importance_log_weights(rows, p);
        for (double& lw : logw) lw *= 2.0;  // ψ² weights
        const BatchEvaluation eval = evaluate_weighted(rows, logw, p, m, true);

        const auto fd = testing::finite_difference_gradient5(
            p, 1e-3, [&](const RbmParams& q) { return variational_energy_exact(q, m); });
        REQUIRE(eval.grad.size() == fd.size());
        for (size_t k = 0; k < fd.size(); ++k) {
            const double scale = std::max(std::abs(fd[k]), 1e-6);
            CHECK(std::abs(eval.grad[k] - fd[k]) / scale < 1e-5);
        }
    }
}

TEST_CASE("parallel and reference estimator kernels agree") {
    const TfimModel m = TfimModel::uniform(8, 1.0, 1.0);
    const RbmParams p = RbmParams::random(8, 16, 40, 0.3);
    const auto psi1 = testing::psi_power_distribution(p, 1.0);
    const SampleBatch batch = testing::draw_batch(psi1, 8, 1500, 31337);
    const std::vector<double> logw = importance_log_weights(batch, p);

    const BatchEvaluation fast = evaluate_weighted(batch, logw, p, m, true);
    const BatchEvaluation slow = reference::evaluate_weighted(batch, logw, p, m, true);

    CHECK(fast.energy.mean == doctest::Approx(slow.energy.mean).epsilon(1e-12));
    CHECK(fast.energy.variance == doctest::Approx(slow.energy.variance).epsilon(1e-10));
    CHECK(fast.energy.ess == doctest::Approx(slow.energy.ess).epsilon(1e-12));
    REQUIRE(fast.grad.size() == slow.grad.size());
    for (size_t k = 0; k < fast.grad.size(); ++k)
        CHECK(fast.grad[k] == doctest::Approx(slow.grad[k]).epsilon(1e-9));
}

TEST_CASE("update_params: identity cases and the plain SGD step") {
    const RbmParams p = RbmParams::random(3, 6, 8, 0.2);
    const std::vector<double> zero(p.param_count(), 0.0);
    CHECK(update_params(p, zero, 0.02) == p);

    const std::vector<double> ones(p.param_count(), 1.0);
    CHECK(update_params(p, ones, 0.0) == p);

    const RbmParams q(3, 6);
    const RbmParams stepped = update_params(q, ones, 0.01);
    for (uint32_t i = 0; i < 3; ++i) CHECK(stepped.a(i) == doctest::Approx(-0.01));
    for (uint32_t j = 0; j < 6; ++j) CHECK(stepped.b(j) == doctest::Approx(-0.01));
    CHECK(stepped.w(2, 5) == doctest::Approx(-0.01));
}

TEST_CASE("update_params: non-finite gradient rejected with a diagnostic") {
    const RbmParams p(3, 3);
    std::vector<double> g(p.param_count(), 0.0);
    g[7] = std::nan("");
    CHECK_THROWS_WITH_AS(update_params(p, g, 0.01), doctest::Contains("component 7"),
                         NumericError);
    g[7] = 0.0;
    g.pop_back();
    CHECK_THROWS_AS(update_params(p, g, 0.01), std::invalid_argument);
}

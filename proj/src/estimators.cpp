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

#include "pbitnqs/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pbitnqs/errors.hpp"

namespace pbitnqs {

namespace {

void check_batch(const SampleBatch& batch, const RbmParams& p, const TfimModel& m) {
    if (batch.n_rows == 0) throw NumericError("estimator: empty batch");
    if (batch.n_bits != p.nv() || p.nv() != m.n_spins)
        throw std::invalid_argument("estimator: batch rows must be visible configurations");
}

EnergyEstimate finish_energy(std::span<const double> energies, std::vector<double> weights) {
    const size_t n = energies.size();
    double sum_w = 0.0;
    double sum_we = 0.0;
    for (size_t k = 0; k < n; ++k) {
        sum_w += weights[k];
        sum_we += weights[k] * energies[k];
    }
    EnergyEstimate est;
    est.mean = sum_we / sum_w;
    double sum_w2 = 0.0;
    double sum_wd2 = 0.0;
    for (size_t k = 0; k < n; ++k) {
        const double d = energies[k] - est.mean;
        sum_w2 += weights[k] * weights[k];
        sum_wd2 += weights[k] * d * d;
    }
    est.variance = sum_wd2 / sum_w;
    est.ess = sum_w * sum_w / sum_w2;
    est.std_error = std::sqrt(est.variance / est.ess);
    for (auto& w : weights) w /= sum_w;
    est.weights = std::move(weights);
    return est;
}

std::vector<double> normalized_exp(std::span<const double> log_weights, size_t n) {
    std::vector<double> w(n, 1.0);
    if (!log_weights.empty()) {
        const double log_max = *std::max_element(log_weights.begin(), log_weights.end());
        for (size_t k = 0; k < n; ++k) w[k] = std::exp(log_weights[k] - log_max);
    }
    return w;
}

}  // namespace

std::vector<double> importance_log_weights(const SampleBatch& batch, const RbmParams& p) {
    std::vector<double> logw(batch.n_rows);
    const int64_t rows = batch.n_rows;
#pragma omp parallel for schedule(static)
    for (int64_t k = 0; k < rows; ++k)
        logw[static_cast<size_t>(k)] = log_psi(batch.row(static_cast<uint32_t>(k)), p);
    return logw;
}

BatchEvaluation evaluate_weighted(const SampleBatch& batch, std::span<const double> log_weights,
                                  const RbmParams& p, const TfimModel& m, bool with_gradient) {
    check_batch(batch, p, m);
    if (!log_weights.empty() && log_weights.size() != batch.n_rows)
        throw std::invalid_argument("evaluate_weighted: one log weight per row required");

    const uint32_t nv = p.nv();
    const uint32_t nh = p.nh();
    const size_t n = batch.n_rows;

    // Per-row pass: local energy and, when the gradient is wanted, tanh θ.
    std::vector<double> energies(n);
    std::vector<double> tanh_theta;
    if (with_gradient) tanh_theta.resize(n * nh);
    const int64_t rows = static_cast<int64_t>(n);
#pragma omp parallel for schedule(static)
    for (int64_t k = 0; k < rows; ++k) {
        const auto row = batch.row(static_cast<uint32_t>(k));
        const ThetaCache cache = make_theta_cache(row, p);
        energies[static_cast<size_t>(k)] = local_energy(row, p, m, cache);
        if (with_gradient) {
            double* t = tanh_theta.data() + static_cast<size_t>(k) * nh;
            for (uint32_t j = 0; j < nh; ++j) t[j] = std::tanh(cache.theta[j]);
        }
    }

    BatchEvaluation out;
    out.energy = finish_energy(energies, normalized_exp(log_weights, n));

    if (with_gradient) {
        // c_k = (w_k / Σw)(E_k - mean); each gradient component is a serial
        // sum over rows, parallelized across components.
        std::vector<double> c(n);
        for (size_t k = 0; k < n; ++k)
            c[k] = out.energy.weights[k] * (energies[k] - out.energy.mean);
        out.grad.assign(p.param_count(), 0.0);
        double* ga = out.grad.data();
        double* gb = out.grad.data() + nv;
        double* gw = out.grad.data() + nv + nh;
        const int64_t nvi = nv;
#pragma omp parallel for schedule(static)
        for (int64_t i = 0; i < nvi; ++i) {
            double acc = 0.0;
            for (size_t k = 0; k < n; ++k)
                acc += c[k] * batch.data[k * nv + static_cast<size_t>(i)];
            ga[i] = 2.0 * acc;
        }
        const int64_t nhj = nh;
#pragma omp parallel for schedule(static)
        for (int64_t j = 0; j < nhj; ++j) {
            double acc = 0.0;
            for (size_t k = 0; k < n; ++k)
                acc += c[k] * tanh_theta[k * nh + static_cast<size_t>(j)];
            gb[j] = 2.0 * acc;
        }
#pragma omp parallel for schedule(static)
        for (int64_t i = 0; i < nvi; ++i) {
            double* grow = gw + static_cast<size_t>(i) * nh;
            for (size_t k = 0; k < n; ++k) {
                const double cv = 2.0 * c[k] * batch.data[k * nv + static_cast<size_t>(i)];
                const double* t = tanh_theta.data() + k * nh;
                for (uint32_t j = 0; j < nh; ++j) grow[j] += cv * t[j];
            }
        }
    }
    return out;
}

EnergyEstimate estimate_energy(const SampleBatch& batch, const RbmParams& p, const TfimModel& m,
                               SamplingMode mode) {
    if (mode == SamplingMode::PsiReweight) {
        const std::vector<double> logw = importance_log_weights(batch, p);
        return evaluate_weighted(batch, logw, p, m, false).energy;
    }
    return evaluate_weighted(batch, {}, p, m, false).energy;
}

std::vector<double> gradient(const SampleBatch& batch, const RbmParams& p, const TfimModel& m,
                             SamplingMode mode) {
    if (mode == SamplingMode::PsiReweight) {
        const std::vector<double> logw = importance_log_weights(batch, p);
        return evaluate_weighted(batch, logw, p, m, true).grad;
    }
    return evaluate_weighted(batch, {}, p, m, true).grad;
}

RbmParams update_params(const RbmParams& p, std::span<const double> g, double eta) {
    if (g.size() != p.param_count())
        throw std::invalid_argument("update_params: gradient length mismatch");
    for (size_t k = 0; k < g.size(); ++k)
        if (!std::isfinite(g[k]))
            throw NumericError("update_params: non-finite gradient component " +
                               std::to_string(k));
    std::vector<double> flat = p.to_flat();
    for (size_t k = 0; k < flat.size(); ++k) flat[k] -= eta * g[k];
    RbmParams next(p.nv(), p.nh());
    next.from_flat(flat);
    return next;
}

namespace reference {

BatchEvaluation evaluate_weighted(const SampleBatch& batch, std::span<const double> log_weights,
                                  const RbmParams& p, const TfimModel& m, bool with_gradient) {
    check_batch(batch, p, m);
    const size_t n = batch.n_rows;

    std::vector<double> energies(n);
    std::vector<std::vector<double>> derivs;
    if (with_gradient) derivs.resize(n);
    for (size_t k = 0; k < n; ++k) {
        const auto row = batch.row(static_cast<uint32_t>(k));
        const ThetaCache cache = make_theta_cache(row, p);
        energies[k] = local_energy(row, p, m, cache);
        if (with_gradient) {
            derivs[k].resize(p.param_count());
            log_derivatives(row, p, cache, derivs[k]);
        }
    }

    BatchEvaluation out;
    out.energy = finish_energy(energies, normalized_exp(log_weights, n));

    if (with_gradient) {
        out.grad.assign(p.param_count(), 0.0);
        for (size_t k = 0; k < n; ++k) {
            const double c = 2.0 * out.energy.weights[k] * (energies[k] - out.energy.mean);
            for (size_t q = 0; q < p.param_count(); ++q) out.grad[q] += c * derivs[k][q];
        }
    }
    return out;
}

}  // namespace reference

}  // namespace pbitnqs

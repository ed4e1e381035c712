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

#pragma once
#include <cstdint>
#include <span>
#include <vector>

#include "pbitnqs/pbit_network.hpp"
#include "pbitnqs/rbm.hpp"
#include "pbitnqs/tfim.hpp"

namespace pbitnqs {

struct EnergyEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    double variance = 0.0;
    double ess = 0.0;             // (Σw)² / Σw²
    std::vector<double> weights;  // self-normalized weights actually applied

    friend bool operator==(const EnergyEstimate&, const EnergyEstimate&) = default;
};

struct BatchEvaluation {
    EnergyEstimate energy;
    std::vector<double> grad;  // empty unless requested
};

// Weighted core shared by both sampling modes and the enumeration sampler.
// log_weights may be empty (uniform weights). Per-row local energies and
// tanh θ tables are filled in parallel; every reduction then runs serially in
// row order, so results are bit-identical for any thread count. Gradient is
// the covariance estimator g_k = 2( <E_loc O_k>_w - <E_loc>_w <O_k>_w ) with
// the batch mean subtracted per batch.
BatchEvaluation evaluate_weighted(const SampleBatch& batch, std::span<const double> log_weights,
                                  const RbmParams& p, const TfimModel& m, bool with_gradient);

// log ψ(v) per row, evaluated in parallel; the importance weights of
// psi-reweight mode.
std::vector<double> importance_log_weights(const SampleBatch& batch, const RbmParams& p);

// Energy estimate over a batch of visible configurations. Psi2Duplicate takes
// the plain mean of E_loc; PsiReweight applies self-normalized importance
// weights w = ψ(v). stderr = sqrt(variance / ESS).
EnergyEstimate estimate_energy(const SampleBatch& batch, const RbmParams& p, const TfimModel& m,
                               SamplingMode mode);

// Covariance-form gradient in the fixed (a, b, W row-major) ordering, with the
// same per-mode weighting as estimate_energy.
std::vector<double> gradient(const SampleBatch& batch, const RbmParams& p, const TfimModel& m,
                             SamplingMode mode);

// Plain SGD step p - η g. Rejects non-finite gradients with a diagnostic
// naming the first offending component.
RbmParams update_params(const RbmParams& p, std::span<const double> g, double eta);

// Straight-line single-threaded implementations kept as the reference the
// parallel kernels are tested and benchmarked against.
namespace reference {

BatchEvaluation evaluate_weighted(const SampleBatch& batch, std::span<const double> log_weights,
                                  const RbmParams& p, const TfimModel& m, bool with_gradient);

}  // namespace reference

}  // namespace pbitnqs

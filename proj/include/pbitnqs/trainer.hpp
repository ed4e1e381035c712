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
#include <functional>
#include <string>
#include <vector>

#include "pbitnqs/embedding.hpp"
#include "pbitnqs/errors.hpp"
#include "pbitnqs/estimators.hpp"
#include "pbitnqs/link.hpp"
#include "pbitnqs/rbm.hpp"
#include "pbitnqs/tfim.hpp"

namespace pbitnqs {

enum class SamplerKind : uint8_t { ExactEnumeration = 0, InprocessPbit = 1, Remote = 2 };

SamplerKind sampler_kind_from_string(const std::string& s);
std::string to_string(SamplerKind kind);

struct TrainConfig {
    TfimModel model = TfimModel::uniform(12, 1.0, 1.0);
    uint32_t alpha = 4;  // hidden units per visible unit

    SamplerKind sampler = SamplerKind::InprocessPbit;
    SamplingMode mode = SamplingMode::PsiReweight;
    ChimeraDims chimera{12, 3, 4};
    double chain_strength = 1.0;
    std::string endpoint;  // host:port, Remote only

    uint32_t samples_per_epoch = 2000;
    uint32_t sweeps_per_sample = 5;
    uint32_t burn_in = 200;
    double learning_rate = 0.02;
    uint32_t epochs = 500;
    uint64_t seed = 1;
    double init_sigma = 0.01;
    uint32_t convergence_window = 20;
    double convergence_tol = 1e-4;

    Activation activation = Activation::Tanh;
    UpdateOrder update_order = UpdateOrder::Sequential;
    bool parallel_sweeps = false;
    ReadoutPolicy readout_policy = ReadoutPolicy::MajorityVote;

    uint32_t nv() const { return model.n_spins; }
    uint32_t nh() const { return alpha * model.n_spins; }
    void validate() const;
};

struct EpochRecord {
    uint32_t epoch = 0;
    double energy_mean = 0.0;
    double energy_stderr = 0.0;
    double energy_variance = 0.0;
    double grad_norm = 0.0;
    double broken_chain_rate = 0.0;
    double ess = 0.0;
    double sample_ms = 0.0;  // wall clock, nondeterministic by nature
    double train_ms = 0.0;

    // Equality of the learning trajectory; wall-clock splits excluded.
    bool same_numbers(const EpochRecord& other) const {
        return epoch == other.epoch && energy_mean == other.energy_mean &&
               energy_stderr == other.energy_stderr &&
               energy_variance == other.energy_variance && grad_norm == other.grad_norm &&
               broken_chain_rate == other.broken_chain_rate && ess == other.ess;
    }
};

struct TrainHistory {
    std::vector<EpochRecord> records;

    bool same_numbers(const TrainHistory& other) const {
        if (records.size() != other.records.size()) return false;
        for (size_t k = 0; k < records.size(); ++k)
            if (!records[k].same_numbers(other.records[k])) return false;
        return true;
    }
};

struct TrainResult {
    TrainHistory history;
    RbmParams params;
    bool converged = false;
    uint32_t epochs_run = 0;
};

// Thrown when a run dies mid-loop; carries everything needed to leave a
// history file and a checkpoint of the last consistent parameters behind.
// protocol_code is nonzero when the underlying failure was transport-level,
// so callers can keep the protocol exit code.
class TrainAbort : public NumericError {
public:
    TrainAbort(const std::string& what, uint32_t epoch, TrainHistory history, RbmParams params,
               uint16_t protocol_code = 0)
        : NumericError(what),
          epoch(epoch),
          protocol_code(protocol_code),
          history(std::move(history)),
          params(std::move(params)) {}

    uint32_t epoch;
    uint16_t protocol_code;
    TrainHistory history;
    RbmParams params;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

// The hybrid loop: derive sampler parameters, map them onto the embedded
// network (or enumerate directly), sample, read chains out, estimate energy
// and gradient, step the parameters; stops at the epoch budget or when the
// windowed energy mean moves by less than convergence_tol relative. The
// supplied session must already point at the desired backend; train(cfg)
// resolves one from cfg.sampler.
TrainResult train(const TrainConfig& cfg, const EpochCallback& on_epoch = {});
TrainResult train_with_session(const TrainConfig& cfg, SamplerSession& session,
                               const EpochCallback& on_epoch = {});

// Per-epoch sampler seed; pure function of (run seed, epoch).
uint64_t epoch_seed(uint64_t run_seed, uint32_t epoch);

// All 2^nv visible configurations as one batch, in basis-index order.
SampleBatch enumerate_visible_batch(uint32_t nv);

}  // namespace pbitnqs

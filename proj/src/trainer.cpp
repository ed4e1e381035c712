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

#include "pbitnqs/trainer.hpp"

#include <chrono>
#include <cmath>
#include <memory>

#include "pbitnqs/rng.hpp"

namespace pbitnqs {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

double l2_norm(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

// Mean of the energy window [end-width, end).
double window_mean(const std::vector<EpochRecord>& records, size_t end, size_t width) {
    double s = 0.0;
    for (size_t k = end - width; k < end; ++k) s += records[k].energy_mean;
    return s / static_cast<double>(width);
}

}  // namespace

SamplerKind sampler_kind_from_string(const std::string& s) {
    if (s == "exact-enum") return SamplerKind::ExactEnumeration;
    if (s == "pbit") return SamplerKind::InprocessPbit;
    if (s == "remote") return SamplerKind::Remote;
    throw ConfigError("unknown sampler '" + s + "' (expected exact-enum, pbit or remote)");
}

std::string to_string(SamplerKind kind) {
    switch (kind) {
        case SamplerKind::ExactEnumeration: return "exact-enum";
        case SamplerKind::InprocessPbit: return "pbit";
        case SamplerKind::Remote: return "remote";
    }
    return "?";
}

void TrainConfig::validate() const {
    model.validate();
    if (alpha == 0) throw ConfigError("TrainConfig: alpha must be >= 1");
    if (samples_per_epoch == 0) throw ConfigError("TrainConfig: samples_per_epoch must be >= 1");
    if (sweeps_per_sample == 0) throw ConfigError("TrainConfig: sweeps_per_sample must be >= 1");
    if (!(learning_rate > 0.0)) throw ConfigError("TrainConfig: learning_rate must be > 0");
    if (convergence_window == 0) throw ConfigError("TrainConfig: convergence_window must be >= 1");
    if (!(convergence_tol >= 0.0)) throw ConfigError("TrainConfig: convergence_tol must be >= 0");
    if (!(init_sigma >= 0.0)) throw ConfigError("TrainConfig: init_sigma must be >= 0");
    if (sampler == SamplerKind::Remote && endpoint.empty())
        throw ConfigError("TrainConfig: remote sampler needs an endpoint");
    if (sampler == SamplerKind::ExactEnumeration && model.n_spins > kMaxExactSpins)
        throw ConfigError("TrainConfig: exact-enum sampler limited to N <= " +
                          std::to_string(kMaxExactSpins));
}

uint64_t epoch_seed(uint64_t run_seed, uint32_t epoch) {
    return CounterRng(run_seed ^ 0x7062697471735565ULL).bits(epoch);
}

SampleBatch enumerate_visible_batch(uint32_t nv) {
    if (nv > kMaxExactSpins)
        throw ConfigError("enumerate_visible_batch: N exceeds the exact-method limit");
    SampleBatch batch;
    batch.n_bits = nv;
    batch.n_rows = 1u << nv;
    batch.data.resize(static_cast<size_t>(batch.n_rows) * nv);
    for (uint32_t s = 0; s < batch.n_rows; ++s)
        spin_configuration(s, nv, {batch.data.data() + static_cast<size_t>(s) * nv, nv});
    return batch;
}

namespace {

// One epoch's sampling stage: whatever produces the visible-configuration
// batch and its importance log-weights.
struct EpochSample {
    SampleBatch visible;
    std::vector<double> log_weights;  // empty = uniform
    double broken_chain_rate = 0.0;
};

class EpochSampler {
public:
    virtual ~EpochSampler() = default;
    virtual EpochSample draw(const RbmParams& params, uint32_t epoch) = 0;
};

// ψ²-weighted full enumeration; zero sampling noise.
class EnumerationSampler final : public EpochSampler {
public:
    explicit EnumerationSampler(const TrainConfig& cfg)
        : rows_(enumerate_visible_batch(cfg.nv())) {}

    EpochSample draw(const RbmParams& params, uint32_t) override {
        EpochSample out;
        out.visible = rows_;
        out.log_weights.resize(rows_.n_rows);
        const std::vector<double> logpsi = importance_log_weights(rows_, params);
        for (size_t k = 0; k < logpsi.size(); ++k) out.log_weights[k] = 2.0 * logpsi[k];
        return out;
    }

private:
    SampleBatch rows_;
};

// Chimera-embedded p-bit sampling through a SamplerSession (in-process or
// remote); chains decoded by majority vote.
class PbitEpochSampler final : public EpochSampler {
public:
    PbitEpochSampler(const TrainConfig& cfg, SamplerSession& session)
        : cfg_(cfg), session_(session) {
        const uint32_t nh_eff = cfg.mode == SamplingMode::Psi2Duplicate ? 2 * cfg.nh() : cfg.nh();
        embedding_ = embed_bipartite(cfg.nv(), nh_eff, ChimeraTopology(cfg.chimera));
        session_.set_topology(cfg.chimera);
    }

    EpochSample draw(const RbmParams& params, uint32_t epoch) override {
        const EffectiveParams eff = effective_sampler_params(params, cfg_.mode);
        session_.set_weights(map_weights(eff, embedding_, cfg_.chain_strength));
        const SampleBatch physical =
            session_.run(cfg_.samples_per_epoch, cfg_.sweeps_per_sample, cfg_.burn_in,
                         epoch_seed(cfg_.seed, epoch));
        ReadoutStats stats;
        const SampleBatch logical =
            readout_batch(physical, embedding_, cfg_.readout_policy, &stats);

        EpochSample out;
        out.broken_chain_rate = stats.broken_rate();
        out.visible.n_bits = cfg_.nv();
        out.visible.n_rows = logical.n_rows;
        out.visible.seed = logical.seed;
        out.visible.sweeps_per_sample = logical.sweeps_per_sample;
        out.visible.burn_in_sweeps = logical.burn_in_sweeps;
        out.visible.data.resize(static_cast<size_t>(logical.n_rows) * cfg_.nv());
        for (uint32_t r = 0; r < logical.n_rows; ++r) {
            const auto row = logical.row(r);
            std::copy_n(row.begin(), cfg_.nv(),
                        out.visible.data.begin() + static_cast<size_t>(r) * cfg_.nv());
        }
        if (cfg_.mode == SamplingMode::PsiReweight)
            out.log_weights = importance_log_weights(out.visible, params);
        return out;
    }

private:
    TrainConfig cfg_;
    SamplerSession& session_;
    Embedding embedding_;
};

}  // namespace

TrainResult train_with_session(const TrainConfig& cfg, SamplerSession& session,
                               const EpochCallback& on_epoch) {
    cfg.validate();

    RbmParams params = RbmParams::random(cfg.nv(), cfg.nh(), cfg.seed, cfg.init_sigma);
    TrainHistory history;
    history.records.reserve(cfg.epochs);

    std::unique_ptr<EpochSampler> sampler;
    try {
        if (cfg.sampler == SamplerKind::ExactEnumeration)
            sampler = std::make_unique<EnumerationSampler>(cfg);
        else
            sampler = std::make_unique<PbitEpochSampler>(cfg, session);
    } catch (const ConfigError&) {
        throw;
    } catch (const ProtocolError& e) {
        throw TrainAbort(std::string("sampler setup failed: ") + e.what(), 0, history, params,
                         e.code());
    } catch (const Error& e) {
        throw TrainAbort(std::string("sampler setup failed: ") + e.what(), 0, history, params);
    }

    bool converged = false;
    for (uint32_t epoch = 0; epoch < cfg.epochs && !converged; ++epoch) {
        EpochRecord rec;
        rec.epoch = epoch;
        try {
            const auto t_sample = Clock::now();
            const EpochSample sample = sampler->draw(params, epoch);
            rec.sample_ms = ms_since(t_sample);
            rec.broken_chain_rate = sample.broken_chain_rate;

            const auto t_train = Clock::now();
            const BatchEvaluation eval =
                evaluate_weighted(sample.visible, sample.log_weights, params, cfg.model, true);
            rec.energy_mean = eval.energy.mean;
            rec.energy_stderr = eval.energy.std_error;
            rec.energy_variance = eval.energy.variance;
            rec.ess = eval.energy.ess;
            rec.grad_norm = l2_norm(eval.grad);
            if (!std::isfinite(rec.energy_mean))
                throw NumericError("non-finite energy estimate");
            params = update_params(params, eval.grad, cfg.learning_rate);
            rec.train_ms = ms_since(t_train);
        } catch (const ProtocolError& e) {
            throw TrainAbort("epoch " + std::to_string(epoch) + ": " + e.what(), epoch, history,
                             params, e.code());
        } catch (const Error& e) {
            throw TrainAbort("epoch " + std::to_string(epoch) + ": " + e.what(), epoch,
                             history, params);
        }

        history.records.push_back(rec);
        if (on_epoch) on_epoch(rec);

        const size_t w = cfg.convergence_window;
        if (history.records.size() >= 2 * w) {
            const double recent = window_mean(history.records, history.records.size(), w);
            const double previous = window_mean(history.records, history.records.size() - w, w);
            if (std::abs(recent - previous) < cfg.convergence_tol * std::max(1.0, std::abs(recent)))
                converged = true;
        }
    }

    TrainResult result{std::move(history), std::move(params), converged, 0};
    result.epochs_run = static_cast<uint32_t>(result.history.records.size());
    return result;
}

TrainResult train(const TrainConfig& cfg, const EpochCallback& on_epoch) {
    cfg.validate();
    const SamplerOptions opts{cfg.activation, cfg.update_order, cfg.parallel_sweeps};
    if (cfg.sampler == SamplerKind::Remote) {
        RemoteSession session(cfg.endpoint);
        TrainResult result = train_with_session(cfg, session, on_epoch);
        session.close();
        return result;
    }
    InprocessSession session(opts);
    return train_with_session(cfg, session, on_epoch);
}

}  // namespace pbitnqs

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

#include "pbitnqs/fixed_point.hpp"
#include "pbitnqs/rng.hpp"

namespace pbitnqs {

// How a p-bit turns its input into a flip probability.
//   Tanh: full-precision tanh of the (already quantized) input.
//   Rom:  1024-entry activation ROM, one entry per representable input, with
//         tanh stored at 1/32768 resolution the way an FPGA block RAM would.
enum class Activation : uint8_t { Tanh = 0, Rom = 1 };

// Sweep discipline.
//   Sequential: every p-bit updated once in ascending index order, each update
//               reading the latest neighbor states (the correctness baseline).
//   Colored:    update color class by color class; no two neighbors share a
//               color, so updates within a class commute and may run on
//               multiple threads without changing the trajectory.
enum class UpdateOrder : uint8_t { Sequential = 0, Colored = 1 };

struct Coupler {
    uint32_t i = 0;
    uint32_t j = 0;
    FixedPoint weight;

    friend bool operator==(const Coupler&, const Coupler&) = default;
};

// A batch of bipolar samples plus the metadata of the run that produced it.
struct SampleBatch {
    uint32_t n_bits = 0;
    uint32_t n_rows = 0;
    std::vector<int8_t> data;  // row-major, entries are exactly +1 / -1
    uint64_t seed = 0;
    uint32_t sweeps_per_sample = 0;
    uint32_t burn_in_sweeps = 0;

    std::span<const int8_t> row(uint32_t r) const {
        return {data.data() + static_cast<size_t>(r) * n_bits, n_bits};
    }

    friend bool operator==(const SampleBatch&, const SampleBatch&) = default;
};

double activation_tanh(FixedPoint input);
double activation_rom(FixedPoint input);

// Stochastic neuron rule: +1 if r < act(input), else -1, with r uniform on
// (-1, 1), so P(m = +1) = (1 + tanh I) / 2.
int8_t pbit_update(FixedPoint input, double r, Activation act = Activation::Tanh);

// Emulated network of p-bits: sparse symmetric fixed-point couplings with zero
// diagonal, fixed-point biases, a bipolar state vector and a seedable RNG.
// Gibbs sweeps leave the state distributed as
//     P(m) ∝ exp( Σ_{i<j} W_ij m_i m_j + Σ_i h_i m_i ),
// i.e. positive couplings are ferromagnetic. All synaptic arithmetic happens
// in s{6}{3}: the input Σ_j W_ij m_j + h_i is accumulated exactly in raw units
// (weights are multiples of 0.125 and states are ±1) and then saturated to the
// representable range before the activation, like a fixed-width hardware
// adder.
//
// A network is single-writer: a sweep mutates the state and must be externally
// serialized. Independent replicas with distinct seeds may run fully in
// parallel; colored sweeps may additionally parallelize within a color class.
class PbitNetwork {
public:
    explicit PbitNetwork(uint32_t n);

    uint32_t size() const { return static_cast<uint32_t>(bias_raw_.size()); }

    void set_bias(uint32_t i, FixedPoint b);
    FixedPoint bias(uint32_t i) const;

    // Stores w symmetrically for (i, j) and (j, i); i == j is rejected.
    // Setting a zero weight removes the coupler.
    void set_coupler(uint32_t i, uint32_t j, FixedPoint w);
    FixedPoint coupler(uint32_t i, uint32_t j) const;  // zero when absent
    uint32_t coupler_count() const;
    std::vector<Coupler> couplers() const;  // sorted by (i, j), i < j
    uint32_t degree(uint32_t i) const;

    void set_activation(Activation a) { activation_ = a; }
    Activation activation() const { return activation_; }

    // Synapse output for p-bit i at the current state, saturated to s{6}{3}.
    FixedPoint input(uint32_t i) const;

    std::span<const int8_t> state() const { return state_; }
    void set_state(std::span<const int8_t> s);

    // Resets the RNG stream and sweep counter and draws a fresh random state.
    void reseed(uint64_t seed);
    uint64_t seed() const { return rng_.seed(); }
    uint64_t sweeps_done() const { return sweep_counter_ - 1; }

    // One Gibbs sweep: every p-bit updated exactly once. The random number for
    // p-bit i in sweep t is draw (t*n + i) of the seed's stream regardless of
    // discipline or thread count. `parallel` only applies to Colored order.
    void sweep(UpdateOrder order = UpdateOrder::Sequential, bool parallel = false);

    // Runs burn_in_sweeps sweeps, then records the state every
    // sweeps_per_sample sweeps until n_samples rows are collected.
    // Deterministic under a fixed seed.
    SampleBatch sample(uint32_t n_samples, uint32_t sweeps_per_sample,
                       uint32_t burn_in_sweeps, uint64_t seed,
                       UpdateOrder order = UpdateOrder::Sequential,
                       bool parallel = false);

    // Greedy coloring of the coupling graph; rebuilt lazily after topology
    // changes. color_count() forces the build.
    const std::vector<uint32_t>& coloring() const;
    uint32_t color_count() const;

    friend bool operator==(const PbitNetwork& a, const PbitNetwork& b);

private:
    struct Edge {
        uint32_t to;
        int16_t raw;
    };

    void update_bit(uint32_t i, uint64_t counter);
    void compile() const;  // flat adjacency + greedy coloring, built lazily

    std::vector<std::vector<Edge>> adj_;
    std::vector<int16_t> bias_raw_;
    std::vector<int8_t> state_;
    CounterRng rng_{0};
    uint64_t sweep_counter_ = 1;  // counter row 0 seeds the initial state
    Activation activation_ = Activation::Tanh;

    // Sweep-time view of the graph: CSR adjacency and the color classes.
    mutable std::vector<uint32_t> csr_offsets_;
    mutable std::vector<uint32_t> csr_targets_;
    mutable std::vector<int16_t> csr_raws_;
    mutable std::vector<uint32_t> colors_;
    mutable std::vector<std::vector<uint32_t>> color_classes_;
    mutable bool compiled_ = false;
};

}  // namespace pbitnqs

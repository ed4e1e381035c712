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

#include "pbitnqs/pbit_network.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace pbitnqs {

namespace {

// Activation ROM: one entry per representable s{6}{3} input, tanh rounded to
// multiples of 1/32768 (a 16-bit fraction, the usual block-RAM width).
const std::array<double, 1024>& rom_table() {
    static const std::array<double, 1024> table = [] {
        std::array<double, 1024> t{};
        for (int raw = FixedPoint::kRawMin; raw <= FixedPoint::kRawMax; ++raw) {
            const double x = raw * FixedPoint::kResolution;
            t[static_cast<size_t>(raw - FixedPoint::kRawMin)] =
                std::nearbyint(std::tanh(x) * 32768.0) / 32768.0;
        }
        return t;
    }();
    return table;
}

// Exact tanh memoized over the 1024 representable inputs; sweeps evaluate it
// once per p-bit update, so the lookup is worth having.
const std::array<double, 1024>& tanh_table() {
    static const std::array<double, 1024> table = [] {
        std::array<double, 1024> t{};
        for (int raw = FixedPoint::kRawMin; raw <= FixedPoint::kRawMax; ++raw)
            t[static_cast<size_t>(raw - FixedPoint::kRawMin)] =
                std::tanh(raw * FixedPoint::kResolution);
        return t;
    }();
    return table;
}

}  // namespace

double activation_tanh(FixedPoint input) {
    return tanh_table()[static_cast<size_t>(input.raw() - FixedPoint::kRawMin)];
}

double activation_rom(FixedPoint input) {
    return rom_table()[static_cast<size_t>(input.raw() - FixedPoint::kRawMin)];
}

int8_t pbit_update(FixedPoint input, double r, Activation act) {
    const double p = act == Activation::Rom ? activation_rom(input) : activation_tanh(input);
    return r < p ? int8_t{1} : int8_t{-1};
}

PbitNetwork::PbitNetwork(uint32_t n) {
    if (n == 0) throw std::invalid_argument("PbitNetwork: zero-size network rejected");
    adj_.resize(n);
    bias_raw_.assign(n, 0);
    state_.assign(n, 1);
}

void PbitNetwork::set_bias(uint32_t i, FixedPoint b) {
    if (i >= size()) throw std::out_of_range("PbitNetwork::set_bias: index out of range");
    bias_raw_[i] = b.raw();
}

FixedPoint PbitNetwork::bias(uint32_t i) const {
    if (i >= size()) throw std::out_of_range("PbitNetwork::bias: index out of range");
    return FixedPoint::from_raw(bias_raw_[i]);
}

void PbitNetwork::set_coupler(uint32_t i, uint32_t j, FixedPoint w) {
    if (i >= size() || j >= size())
        throw std::out_of_range("PbitNetwork::set_coupler: index out of range");
    if (i == j) throw std::invalid_argument("PbitNetwork::set_coupler: diagonal must stay zero");

    auto put = [&](uint32_t from, uint32_t to) {
        auto& edges = adj_[from];
        auto it = std::find_if(edges.begin(), edges.end(),
                               [&](const Edge& e) { return e.to == to; });
        if (w.is_zero()) {
            if (it != edges.end()) edges.erase(it);
        } else if (it != edges.end()) {
            it->raw = w.raw();
        } else {
            edges.push_back({to, w.raw()});
        }
    };
    put(i, j);
    put(j, i);
    compiled_ = false;
}

FixedPoint PbitNetwork::coupler(uint32_t i, uint32_t j) const {
    if (i >= size() || j >= size())
        throw std::out_of_range("PbitNetwork::coupler: index out of range");
    for (const Edge& e : adj_[i])
        if (e.to == j) return FixedPoint::from_raw(e.raw);
    return FixedPoint{};
}

uint32_t PbitNetwork::coupler_count() const {
    size_t twice = 0;
    for (const auto& edges : adj_) twice += edges.size();
    return static_cast<uint32_t>(twice / 2);
}

std::vector<Coupler> PbitNetwork::couplers() const {
    std::vector<Coupler> out;
    out.reserve(coupler_count());
    for (uint32_t i = 0; i < size(); ++i)
        for (const Edge& e : adj_[i])
            if (i < e.to) out.push_back({i, e.to, FixedPoint::from_raw(e.raw)});
    std::sort(out.begin(), out.end(), [](const Coupler& a, const Coupler& b) {
        return a.i != b.i ? a.i < b.i : a.j < b.j;
    });
    return out;
}

uint32_t PbitNetwork::degree(uint32_t i) const {
    if (i >= size()) throw std::out_of_range("PbitNetwork::degree: index out of range");
    return static_cast<uint32_t>(adj_[i].size());
}

FixedPoint PbitNetwork::input(uint32_t i) const {
    if (i >= size()) throw std::out_of_range("PbitNetwork::input: index out of range");
    // Weights are multiples of 0.125 and states are ±1, so the sum is exact in
    // raw units; saturation is the only rounding step.
    int64_t acc = bias_raw_[i];
    for (const Edge& e : adj_[i]) acc += static_cast<int64_t>(e.raw) * state_[e.to];
    return FixedPoint::saturate_raw(acc);
}

void PbitNetwork::set_state(std::span<const int8_t> s) {
    if (s.size() != state_.size())
        throw std::invalid_argument("PbitNetwork::set_state: length mismatch");
    for (int8_t m : s)
        if (m != 1 && m != -1)
            throw std::invalid_argument("PbitNetwork::set_state: entries must be bipolar");
    std::copy(s.begin(), s.end(), state_.begin());
}

void PbitNetwork::reseed(uint64_t seed) {
    rng_ = CounterRng(seed);
    sweep_counter_ = 1;
    for (uint32_t i = 0; i < size(); ++i)
        state_[i] = rng_.uniform_pm1(i) < 0.0 ? int8_t{-1} : int8_t{1};
}

void PbitNetwork::update_bit(uint32_t i, uint64_t counter) {
    // Same arithmetic as input(): exact integer accumulation, then saturation.
    int64_t acc = bias_raw_[i];
    for (uint32_t e = csr_offsets_[i]; e < csr_offsets_[i + 1]; ++e)
        acc += static_cast<int64_t>(csr_raws_[e]) * state_[csr_targets_[e]];
    state_[i] = pbit_update(FixedPoint::saturate_raw(acc), rng_.uniform_pm1(counter), activation_);
}

void PbitNetwork::sweep(UpdateOrder order, bool parallel) {
    if (!compiled_) compile();
    const uint64_t base = sweep_counter_ * size();
    if (order == UpdateOrder::Sequential) {
        for (uint32_t i = 0; i < size(); ++i) update_bit(i, base + i);
    } else {
        for (const auto& cls : color_classes_) {
            if (parallel) {
                const int64_t count = static_cast<int64_t>(cls.size());
#pragma omp parallel for schedule(static)
                for (int64_t k = 0; k < count; ++k) {
                    const uint32_t i = cls[static_cast<size_t>(k)];
                    update_bit(i, base + i);
                }
            } else {
                for (uint32_t i : cls) update_bit(i, base + i);
            }
        }
    }
    ++sweep_counter_;
}

SampleBatch PbitNetwork::sample(uint32_t n_samples, uint32_t sweeps_per_sample,
                                uint32_t burn_in_sweeps, uint64_t seed,
                                UpdateOrder order, bool parallel) {
    if (n_samples < 1) throw std::invalid_argument("PbitNetwork::sample: n_samples must be >= 1");
    if (sweeps_per_sample < 1)
        throw std::invalid_argument("PbitNetwork::sample: sweeps_per_sample must be >= 1");

    reseed(seed);

    SampleBatch batch;
    batch.n_bits = size();
    batch.n_rows = n_samples;
    batch.seed = seed;
    batch.sweeps_per_sample = sweeps_per_sample;
    batch.burn_in_sweeps = burn_in_sweeps;
    batch.data.reserve(static_cast<size_t>(n_samples) * size());

    for (uint32_t s = 0; s < burn_in_sweeps; ++s) sweep(order, parallel);
    for (uint32_t r = 0; r < n_samples; ++r) {
        for (uint32_t s = 0; s < sweeps_per_sample; ++s) sweep(order, parallel);
        batch.data.insert(batch.data.end(), state_.begin(), state_.end());
    }
    return batch;
}

void PbitNetwork::compile() const {
    // CSR adjacency for the hot update loop.
    csr_offsets_.assign(size() + 1, 0);
    for (uint32_t i = 0; i < size(); ++i)
        csr_offsets_[i + 1] = csr_offsets_[i] + static_cast<uint32_t>(adj_[i].size());
    csr_targets_.resize(csr_offsets_.back());
    csr_raws_.resize(csr_offsets_.back());
    for (uint32_t i = 0; i < size(); ++i) {
        uint32_t e = csr_offsets_[i];
        for (const Edge& edge : adj_[i]) {
            csr_targets_[e] = edge.to;
            csr_raws_[e] = edge.raw;
            ++e;
        }
    }

    // Greedy coloring in index order.
    colors_.assign(size(), 0);
    uint32_t n_colors = 0;
    std::vector<char> used;
    for (uint32_t i = 0; i < size(); ++i) {
        used.assign(n_colors + 1, 0);
        for (const Edge& e : adj_[i])
            if (e.to < i) used[colors_[e.to]] = 1;
        uint32_t c = 0;
        while (used[c]) ++c;
        colors_[i] = c;
        n_colors = std::max(n_colors, c + 1);
    }
    color_classes_.assign(n_colors, {});
    for (uint32_t i = 0; i < size(); ++i) color_classes_[colors_[i]].push_back(i);
    compiled_ = true;
}

const std::vector<uint32_t>& PbitNetwork::coloring() const {
    if (!compiled_) compile();
    return colors_;
}

uint32_t PbitNetwork::color_count() const {
    if (!compiled_) compile();
    return static_cast<uint32_t>(color_classes_.size());
}

bool operator==(const PbitNetwork& a, const PbitNetwork& b) {
    return a.size() == b.size() && a.bias_raw_ == b.bias_raw_ && a.couplers() == b.couplers();
}

}  // namespace pbitnqs

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
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "pbitnqs/chimera.hpp"
#include "pbitnqs/pbit_network.hpp"
#include "pbitnqs/rbm.hpp"

namespace pbitnqs {

enum class NodeKind : uint8_t { Visible = 0, Hidden = 1 };

// Minor embedding of a complete bipartite graph onto a Chimera topology:
// every logical node owns a vertex-disjoint chain of physical p-bits forming
// a connected path, and every logical edge lands on exactly one physical
// coupler between the two chains. Logical ordering is visible nodes first,
// then hidden nodes. Immutable after construction.
struct Embedding {
    ChimeraDims dims;
    uint32_t nv = 0;
    uint32_t nh = 0;
    // Chains in path order, indexed by logical node (visible block first).
    std::vector<std::vector<uint32_t>> chains;

    uint32_t logical_count() const { return nv + nh; }
    uint32_t chain_index(NodeKind kind, uint32_t logical) const;
    const std::vector<uint32_t>& chain(NodeKind kind, uint32_t logical) const;

    // Σ chain lengths; equals the p-bit count of the mapped network.
    uint32_t physical_count() const;

    // Sorted list of physical labels in use; position = network index.
    const std::vector<uint32_t>& used_nodes() const;
    uint32_t network_index(uint32_t topology_label) const;

    // Plain-text map, one line per logical node:
    //   <kind> <index> <label>:<label>:...:<label>
    // preceded by a "chimera M N L" line. Lines starting with '#' are
    // comments.
    void save(std::ostream& os) const;
    void save_file(const std::string& path) const;
    static Embedding load(std::istream& is);
    static Embedding load_file(const std::string& path);

    friend bool operator==(const Embedding& a, const Embedding& b) {
        return a.dims == b.dims && a.nv == b.nv && a.nh == b.nh && a.chains == b.chains;
    }

private:
    mutable std::vector<uint32_t> used_nodes_;  // built lazily
};

// Deterministic biclique construction: visible node v becomes the vertical
// chain through all rows of column v/L at shore index v%L; hidden node h
// becomes the horizontal chain through all columns of row h/L at shore index
// h%L. Requires nv <= N*L and nh <= M*L; every visible-hidden pair then
// shares exactly one intra-cell coupler.
Embedding embed_bipartite(uint32_t nv, uint32_t nh, const ChimeraTopology& topo);

// Full structural validation (disjoint connected chains, unique coupler per
// logical edge). Throws ConfigError with the violated property.
void validate_embedding(const Embedding& emb);

struct MapWeightsReport {
    uint32_t zeroed_biases = 0;   // nonzero logical bias whose per-p-bit share quantized to 0
    uint32_t zeroed_weights = 0;  // nonzero logical weight quantized to 0
    double max_bias_error = 0.0;  // per-p-bit |quantized - intended|
    double max_weight_error = 0.0;

    bool precision_loss() const { return zeroed_biases > 0 || zeroed_weights > 0; }
};

// Places quantize(W'_vh) on the unique coupler between chain(v) and chain(h),
// quantize(chain_strength) on every intra-chain coupler, and splits each
// logical bias equally over its chain before quantization. The returned
// network is indexed by Embedding::network_index.
PbitNetwork map_weights(const EffectiveParams& params, const Embedding& emb,
                        double chain_strength, MapWeightsReport* report = nullptr);

// Quantizes a bipartite Boltzmann machine onto a dense p-bit network with no
// embedding: p-bits 0..nv-1 are the visible nodes, nv..nv+nh-1 the hidden
// ones. Used where hardware connectivity is not the point.
PbitNetwork direct_network(const EffectiveParams& params, MapWeightsReport* report = nullptr);

enum class ReadoutPolicy : uint8_t { MajorityVote = 0, DiscardBroken = 1 };

struct ReadoutStats {
    uint64_t chains_read = 0;
    uint64_t broken_chains = 0;  // chains with both +1 and -1 entries
    uint32_t rows_dropped = 0;   // DiscardBroken only

    double broken_rate() const {
        return chains_read == 0 ? 0.0 : static_cast<double>(broken_chains) / chains_read;
    }
};

// Majority vote per chain; a tie takes the value of the chain's lowest-labeled
// p-bit. The state is indexed by network index (see map_weights).
std::vector<int8_t> readout(std::span<const int8_t> state, const Embedding& emb,
                            ReadoutStats* stats = nullptr);

// Decodes every row of a physical batch to logical rows (visible block first).
// DiscardBroken drops rows containing any broken chain.
SampleBatch readout_batch(const SampleBatch& batch, const Embedding& emb,
                          ReadoutPolicy policy = ReadoutPolicy::MajorityVote,
                          ReadoutStats* stats = nullptr);

}  // namespace pbitnqs

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

#include "pbitnqs/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "pbitnqs/errors.hpp"

namespace pbitnqs {

uint32_t Embedding::chain_index(NodeKind kind, uint32_t logical) const {
    if (kind == NodeKind::Visible) {
        if (logical >= nv) throw std::out_of_range("Embedding::chain: visible index out of range");
        return logical;
    }
    if (logical >= nh) throw std::out_of_range("Embedding::chain: hidden index out of range");
    return nv + logical;
}

const std::vector<uint32_t>& Embedding::chain(NodeKind kind, uint32_t logical) const {
    return chains[chain_index(kind, logical)];
}

uint32_t Embedding::physical_count() const {
    size_t total = 0;
    for (const auto& c : chains) total += c.size();
    return static_cast<uint32_t>(total);
}

const std::vector<uint32_t>& Embedding::used_nodes() const {
    if (used_nodes_.empty() && !chains.empty()) {
        for (const auto& c : chains) used_nodes_.insert(used_nodes_.end(), c.begin(), c.end());
        std::sort(used_nodes_.begin(), used_nodes_.end());
    }
    return used_nodes_;
}

uint32_t Embedding::network_index(uint32_t topology_label) const {
    const auto& used = used_nodes();
    const auto it = std::lower_bound(used.begin(), used.end(), topology_label);
    if (it == used.end() || *it != topology_label)
        throw std::out_of_range("Embedding::network_index: label not in any chain");
    return static_cast<uint32_t>(it - used.begin());
}

void Embedding::save(std::ostream& os) const {
    os << "# pbit-nqs embedding map\n";
    os << "chimera " << dims.rows << " " << dims.cols << " " << dims.shore << "\n";
    for (uint32_t k = 0; k < logical_count(); ++k) {
        os << (k < nv ? "visible " : "hidden ") << (k < nv ? k : k - nv) << " ";
        const auto& c = chains[k];
        for (size_t p = 0; p < c.size(); ++p) os << (p ? ":" : "") << c[p];
        os << "\n";
    }
    if (!os) throw IoError("Embedding::save: write failed");
}

void Embedding::save_file(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw IoError("Embedding::save_file: cannot open " + path);
    save(os);
}

Embedding Embedding::load(std::istream& is) {
    Embedding emb;
    std::vector<std::vector<uint32_t>> visible, hidden;
    bool have_dims = false;
    std::string line;
    size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        auto fail = [&](const std::string& why) -> IoError {
            return IoError("embedding line " + std::to_string(line_no) + ": " + why);
        };
        if (tag == "chimera") {
            if (!(ls >> emb.dims.rows >> emb.dims.cols >> emb.dims.shore))
                throw fail("expected 'chimera M N L'");
            have_dims = true;
        } else if (tag == "visible" || tag == "hidden") {
            uint32_t index;
            std::string labels;
            if (!(ls >> index >> labels)) throw fail("expected '<kind> <index> a:b:...'");
            std::vector<uint32_t> chain;
            std::istringstream cs(labels);
            std::string tok;
            while (std::getline(cs, tok, ':')) {
                try {
                    chain.push_back(static_cast<uint32_t>(std::stoul(tok)));
                } catch (const std::exception&) {
                    throw fail("bad physical label '" + tok + "'");
                }
            }
            if (chain.empty()) throw fail("empty chain");
            auto& block = tag == "visible" ? visible : hidden;
            if (index != block.size()) throw fail("out-of-order logical index");
            block.push_back(std::move(chain));
        } else {
            throw fail("unknown tag '" + tag + "'");
        }
    }
    if (!have_dims) throw IoError("embedding file: missing 'chimera M N L' line");
    emb.nv = static_cast<uint32_t>(visible.size());
    emb.nh = static_cast<uint32_t>(hidden.size());
    emb.chains = std::move(visible);
    emb.chains.insert(emb.chains.end(), hidden.begin(), hidden.end());
    validate_embedding(emb);
    return emb;
}

Embedding Embedding::load_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("Embedding::load_file: cannot open " + path);
    return load(is);
}

Embedding embed_bipartite(uint32_t nv, uint32_t nh, const ChimeraTopology& topo) {
    const ChimeraDims d = topo.dims();
    if (nv == 0 || nh == 0) throw ConfigError("embed_bipartite: nv and nh must be >= 1");
    if (nv > d.cols * d.shore)
        throw ConfigError("embed_bipartite: nv = " + std::to_string(nv) +
                          " exceeds the visible capacity N*L = " +
                          std::to_string(d.cols * d.shore) + " of Chimera " +
                          ChimeraTopology::to_string(d));
    if (nh > d.rows * d.shore)
        throw ConfigError("embed_bipartite: nh = " + std::to_string(nh) +
                          " exceeds the hidden capacity M*L = " +
                          std::to_string(d.rows * d.shore) + " of Chimera " +
                          ChimeraTopology::to_string(d));

    Embedding emb;
    emb.dims = d;
    emb.nv = nv;
    emb.nh = nh;
    emb.chains.reserve(nv + nh);
    for (uint32_t v = 0; v < nv; ++v) {
        std::vector<uint32_t> chain(d.rows);
        for (uint32_t row = 0; row < d.rows; ++row)
            chain[row] = topo.node_index(row, v / d.shore, Side::Vertical, v % d.shore);
        emb.chains.push_back(std::move(chain));
    }
    for (uint32_t h = 0; h < nh; ++h) {
        std::vector<uint32_t> chain(d.cols);
        for (uint32_t col = 0; col < d.cols; ++col)
            chain[col] = topo.node_index(h / d.shore, col, Side::Horizontal, h % d.shore);
        emb.chains.push_back(std::move(chain));
    }
    return emb;
}

void validate_embedding(const Embedding& emb) {
    const ChimeraTopology topo(emb.dims);
    std::vector<int32_t> owner(topo.node_count(), -1);
    for (uint32_t k = 0; k < emb.logical_count(); ++k) {
        for (uint32_t label : emb.chains[k]) {
            if (label >= topo.node_count())
                throw ConfigError("embedding: physical label " + std::to_string(label) +
                                  " outside Chimera " + ChimeraTopology::to_string(emb.dims));
            if (owner[label] != -1)
                throw ConfigError("embedding: chains are not vertex-disjoint at label " +
                                  std::to_string(label));
            owner[label] = static_cast<int32_t>(k);
        }
    }
    // Each chain must be connected in path order.
    for (uint32_t k = 0; k < emb.logical_count(); ++k) {
        const auto& c = emb.chains[k];
        for (size_t p = 0; p + 1 < c.size(); ++p)
            if (!topo.adjacent(c[p], c[p + 1]))
                throw ConfigError("embedding: chain " + std::to_string(k) +
                                  " is not a connected path");
    }
    // Every visible-hidden pair must share exactly one physical coupler.
    std::map<std::pair<uint32_t, uint32_t>, uint32_t> edge_count;
    for (const auto& [a, b] : topo.couplers()) {
        const int32_t ka = owner[a];
        const int32_t kb = owner[b];
        if (ka < 0 || kb < 0 || ka == kb) continue;
        const uint32_t lo = static_cast<uint32_t>(std::min(ka, kb));
        const uint32_t hi = static_cast<uint32_t>(std::max(ka, kb));
        ++edge_count[{lo, hi}];
    }
    for (uint32_t v = 0; v < emb.nv; ++v)
        for (uint32_t h = 0; h < emb.nh; ++h) {
            const auto it = edge_count.find({v, emb.nv + h});
            const uint32_t count = it == edge_count.end() ? 0 : it->second;
            if (count != 1)
                throw ConfigError("embedding: logical edge (v" + std::to_string(v) + ", h" +
                                  std::to_string(h) + ") maps to " + std::to_string(count) +
                                  " physical couplers (expected exactly 1)");
        }
}

PbitNetwork map_weights(const EffectiveParams& params, const Embedding& emb,
                        double chain_strength, MapWeightsReport* report) {
    if (params.nv != emb.nv || params.nh != emb.nh)
        throw ConfigError("map_weights: parameter shape (" + std::to_string(params.nv) + "," +
                          std::to_string(params.nh) + ") does not match embedding (" +
                          std::to_string(emb.nv) + "," + std::to_string(emb.nh) + ")");

    const ChimeraTopology topo(emb.dims);
    MapWeightsReport local;
    PbitNetwork net(emb.physical_count());

    // Ferromagnetic chain couplers along each path.
    const FixedPoint chain_w = FixedPoint::quantize(chain_strength);
    for (const auto& c : emb.chains)
        for (size_t p = 0; p + 1 < c.size(); ++p)
            net.set_coupler(emb.network_index(c[p]), emb.network_index(c[p + 1]), chain_w);

    // Logical couplings on the unique chain-to-chain coupler.
    std::vector<int32_t> owner(topo.node_count(), -1);
    for (uint32_t k = 0; k < emb.logical_count(); ++k)
        for (uint32_t label : emb.chains[k]) owner[label] = static_cast<int32_t>(k);

    for (const auto& [a, b] : topo.couplers()) {
        const int32_t ka = owner[a];
        const int32_t kb = owner[b];
        if (ka < 0 || kb < 0 || ka == kb) continue;
        const uint32_t lo = static_cast<uint32_t>(std::min(ka, kb));
        const uint32_t hi = static_cast<uint32_t>(std::max(ka, kb));
        if (lo >= emb.nv || hi < emb.nv)
            throw ConfigError("map_weights: embedding joins two chains of the same kind");
        const uint32_t v = lo;
        const uint32_t h = hi - emb.nv;
        const double intended = params.w[static_cast<size_t>(v) * emb.nh + h];
        const FixedPoint q = FixedPoint::quantize(intended);
        if (intended != 0.0 && q.is_zero()) ++local.zeroed_weights;
        local.max_weight_error = std::max(local.max_weight_error,
                                          std::abs(q.value() - intended));
        net.set_coupler(emb.network_index(a), emb.network_index(b), q);
    }

    // Bias split equally over the chain, then quantized per p-bit.
    auto place_bias = [&](const std::vector<uint32_t>& chain, double logical_bias) {
        const double share = logical_bias / static_cast<double>(chain.size());
        const FixedPoint q = FixedPoint::quantize(share);
        if (logical_bias != 0.0 && q.is_zero()) ++local.zeroed_biases;
        local.max_bias_error = std::max(local.max_bias_error, std::abs(q.value() - share));
        for (uint32_t label : chain) net.set_bias(emb.network_index(label), q);
    };
    for (uint32_t v = 0; v < emb.nv; ++v) place_bias(emb.chain(NodeKind::Visible, v), params.a[v]);
    for (uint32_t h = 0; h < emb.nh; ++h) place_bias(emb.chain(NodeKind::Hidden, h), params.b[h]);

    if (report) *report = local;
    return net;
}

PbitNetwork direct_network(const EffectiveParams& params, MapWeightsReport* report) {
    MapWeightsReport local;
    PbitNetwork net(params.nv + params.nh);
    auto track_bias = [&](uint32_t node, double intended) {
        const FixedPoint q = FixedPoint::quantize(intended);
        if (intended != 0.0 && q.is_zero()) ++local.zeroed_biases;
        local.max_bias_error = std::max(local.max_bias_error, std::abs(q.value() - intended));
        net.set_bias(node, q);
    };
    for (uint32_t v = 0; v < params.nv; ++v) track_bias(v, params.a[v]);
    for (uint32_t h = 0; h < params.nh; ++h) track_bias(params.nv + h, params.b[h]);
    for (uint32_t v = 0; v < params.nv; ++v)
        for (uint32_t h = 0; h < params.nh; ++h) {
            const double intended = params.w[static_cast<size_t>(v) * params.nh + h];
            const FixedPoint q = FixedPoint::quantize(intended);
            if (intended != 0.0 && q.is_zero()) ++local.zeroed_weights;
            local.max_weight_error =
                std::max(local.max_weight_error, std::abs(q.value() - intended));
            net.set_coupler(v, params.nv + h, q);
        }
    if (report) *report = local;
    return net;
}

std::vector<int8_t> readout(std::span<const int8_t> state, const Embedding& emb,
                            ReadoutStats* stats) {
    if (state.size() != emb.physical_count())
        throw std::invalid_argument("readout: state length must equal the physical p-bit count");
    std::vector<int8_t> logical(emb.logical_count());
    for (uint32_t k = 0; k < emb.logical_count(); ++k) {
        const auto& c = emb.chains[k];
        int sum = 0;
        uint32_t lowest_label = c[0];
        int8_t lowest_value = state[emb.network_index(c[0])];
        for (uint32_t label : c) {
            const int8_t m = state[emb.network_index(label)];
            sum += m;
            if (label < lowest_label) {
                lowest_label = label;
                lowest_value = m;
            }
        }
        if (stats) {
            ++stats->chains_read;
            if (std::abs(sum) != static_cast<int>(c.size())) ++stats->broken_chains;
        }
        logical[k] = sum > 0 ? int8_t{1} : sum < 0 ? int8_t{-1} : lowest_value;
    }
    return logical;
}

SampleBatch readout_batch(const SampleBatch& batch, const Embedding& emb, ReadoutPolicy policy,
                          ReadoutStats* stats) {
    if (batch.n_bits != emb.physical_count())
        throw std::invalid_argument("readout_batch: batch width must equal the p-bit count");
    SampleBatch logical;
    logical.n_bits = emb.logical_count();
    logical.seed = batch.seed;
    logical.sweeps_per_sample = batch.sweeps_per_sample;
    logical.burn_in_sweeps = batch.burn_in_sweeps;
    logical.data.reserve(static_cast<size_t>(batch.n_rows) * logical.n_bits);

    ReadoutStats local;
    for (uint32_t r = 0; r < batch.n_rows; ++r) {
        const uint64_t broken_before = local.broken_chains;
        const std::vector<int8_t> row = readout(batch.row(r), emb, &local);
        if (policy == ReadoutPolicy::DiscardBroken && local.broken_chains != broken_before) {
            ++local.rows_dropped;
            continue;
        }
        logical.data.insert(logical.data.end(), row.begin(), row.end());
        ++logical.n_rows;
    }
    if (stats) *stats = local;
    return logical;
}

}  // namespace pbitnqs

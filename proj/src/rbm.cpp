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

#include "pbitnqs/rbm.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <random>
#include <stdexcept>

#include "pbitnqs/errors.hpp"

namespace pbitnqs {

namespace {

constexpr char kMagic[4] = {'R', 'B', 'M', '1'};

void write_u32(std::ostream& os, uint32_t x) {
    unsigned char b[4] = {static_cast<unsigned char>(x), static_cast<unsigned char>(x >> 8),
                          static_cast<unsigned char>(x >> 16), static_cast<unsigned char>(x >> 24)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

uint32_t read_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    return static_cast<uint32_t>(b[0]) | static_cast<uint32_t>(b[1]) << 8 |
           static_cast<uint32_t>(b[2]) << 16 | static_cast<uint32_t>(b[3]) << 24;
}

void write_f64(std::ostream& os, double x) {
    uint64_t bits;
    std::memcpy(&bits, &x, 8);
    unsigned char b[8];
    for (int k = 0; k < 8; ++k) b[k] = static_cast<unsigned char>(bits >> (8 * k));
    os.write(reinterpret_cast<const char*>(b), 8);
}

double read_f64(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    uint64_t bits = 0;
    for (int k = 0; k < 8; ++k) bits |= static_cast<uint64_t>(b[k]) << (8 * k);
    double x;
    std::memcpy(&x, &bits, 8);
    return x;
}

void check_config(std::span<const int8_t> v, const RbmParams& p, const char* who) {
    if (v.size() != p.nv()) throw std::invalid_argument(std::string(who) + ": length mismatch");
}

}  // namespace

RbmParams::RbmParams(uint32_t nv, uint32_t nh) : nv_(nv), nh_(nh) {
    if (nv == 0 || nh == 0) throw std::invalid_argument("RbmParams: nv and nh must be >= 1");
    a_.assign(nv, 0.0);
    b_.assign(nh, 0.0);
    w_.assign(static_cast<size_t>(nv) * nh, 0.0);
}

RbmParams RbmParams::random(uint32_t nv, uint32_t nh, uint64_t seed, double sigma) {
    RbmParams p(nv, nh);
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> dist(0.0, sigma);
    for (auto& x : p.a_) x = dist(gen);
    for (auto& x : p.b_) x = dist(gen);
    for (auto& x : p.w_) x = dist(gen);
    return p;
}

std::vector<double> RbmParams::to_flat() const {
    std::vector<double> flat;
    flat.reserve(param_count());
    flat.insert(flat.end(), a_.begin(), a_.end());
    flat.insert(flat.end(), b_.begin(), b_.end());
    flat.insert(flat.end(), w_.begin(), w_.end());
    return flat;
}

void RbmParams::from_flat(std::span<const double> flat) {
    if (flat.size() != param_count())
        throw std::invalid_argument("RbmParams::from_flat: length mismatch");
    std::copy_n(flat.begin(), nv_, a_.begin());
    std::copy_n(flat.begin() + nv_, nh_, b_.begin());
    std::copy_n(flat.begin() + nv_ + nh_, static_cast<size_t>(nv_) * nh_, w_.begin());
}

void RbmParams::save(std::ostream& os) const {
    os.write(kMagic, 4);
    write_u32(os, nv_);
    write_u32(os, nh_);
    for (double x : a_) write_f64(os, x);
    for (double x : b_) write_f64(os, x);
    for (double x : w_) write_f64(os, x);
    if (!os) throw IoError("RbmParams::save: write failed");
}

void RbmParams::save_file(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("RbmParams::save_file: cannot open " + path);
    save(os);
}

RbmParams RbmParams::load(std::istream& is) {
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        throw IoError("RbmParams::load: bad checkpoint magic (expected RBM1)");
    const uint32_t nv = read_u32(is);
    const uint32_t nh = read_u32(is);
    if (!is || nv == 0 || nh == 0 || nv > 1u << 20 || nh > 1u << 20)
        throw IoError("RbmParams::load: implausible header");
    RbmParams p(nv, nh);
    for (auto& x : p.a_) x = read_f64(is);
    for (auto& x : p.b_) x = read_f64(is);
    for (auto& x : p.w_) x = read_f64(is);
    if (!is) throw IoError("RbmParams::load: truncated checkpoint");
    return p;
}

RbmParams RbmParams::load_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("RbmParams::load_file: cannot open " + path);
    return load(is);
}

ThetaCache make_theta_cache(std::span<const int8_t> v, const RbmParams& p) {
    check_config(v, p, "make_theta_cache");
    ThetaCache cache;
    cache.theta.assign(p.nh(), 0.0);
    for (uint32_t j = 0; j < p.nh(); ++j) cache.theta[j] = p.b(j);
    for (uint32_t i = 0; i < p.nv(); ++i) {
        const double vi = v[i];
        const double* wrow = p.w_block().data() + static_cast<size_t>(i) * p.nh();
        for (uint32_t j = 0; j < p.nh(); ++j) cache.theta[j] += vi * wrow[j];
    }
    cache.log2cosh.resize(p.nh());
    for (uint32_t j = 0; j < p.nh(); ++j) cache.log2cosh[j] = log_2cosh(cache.theta[j]);
    return cache;
}

double log_psi(std::span<const int8_t> v, const RbmParams& p) {
    check_config(v, p, "log_psi");
    double vis = 0.0;
    for (uint32_t i = 0; i < p.nv(); ++i) vis += p.a(i) * v[i];
    const ThetaCache cache = make_theta_cache(v, p);
    double hid = 0.0;
    for (double l2c : cache.log2cosh) hid += l2c;
    return vis + hid;
}

double psi_ratio_flip(std::span<const int8_t> v, uint32_t i, const RbmParams& p,
                      const ThetaCache& cache) {
    check_config(v, p, "psi_ratio_flip");
    if (i >= p.nv()) throw std::out_of_range("psi_ratio_flip: index out of range");
    const double vi = v[i];
    double diff = -2.0 * p.a(i) * vi;
    const double* wrow = p.w_block().data() + static_cast<size_t>(i) * p.nh();
    for (uint32_t j = 0; j < p.nh(); ++j)
        diff += log_2cosh(cache.theta[j] - 2.0 * vi * wrow[j]) - cache.log2cosh[j];
    return std::exp(diff);
}

double psi_ratio_flip(std::span<const int8_t> v, uint32_t i, const RbmParams& p) {
    return psi_ratio_flip(v, i, p, make_theta_cache(v, p));
}

void log_derivatives(std::span<const int8_t> v, const RbmParams& p, const ThetaCache& cache,
                     std::span<double> out) {
    check_config(v, p, "log_derivatives");
    if (out.size() != p.param_count())
        throw std::invalid_argument("log_derivatives: output length mismatch");
    const uint32_t nv = p.nv();
    const uint32_t nh = p.nh();
    for (uint32_t i = 0; i < nv; ++i) out[i] = v[i];
    double* tanh_theta = out.data() + nv;
    for (uint32_t j = 0; j < nh; ++j) tanh_theta[j] = std::tanh(cache.theta[j]);
    double* wgrad = out.data() + nv + nh;
    for (uint32_t i = 0; i < nv; ++i) {
        const double vi = v[i];
        for (uint32_t j = 0; j < nh; ++j) wgrad[static_cast<size_t>(i) * nh + j] = vi * tanh_theta[j];
    }
}

std::vector<double> log_derivatives(std::span<const int8_t> v, const RbmParams& p) {
    std::vector<double> out(p.param_count());
    log_derivatives(v, p, make_theta_cache(v, p), out);
    return out;
}

SamplingMode sampling_mode_from_string(const std::string& s) {
    if (s == "psi2-duplicate") return SamplingMode::Psi2Duplicate;
    if (s == "psi-reweight") return SamplingMode::PsiReweight;
    throw ConfigError("unknown sampling mode '" + s +
                      "' (expected psi2-duplicate or psi-reweight)");
}

std::string to_string(SamplingMode mode) {
    return mode == SamplingMode::Psi2Duplicate ? "psi2-duplicate" : "psi-reweight";
}

EffectiveParams effective_sampler_params(const RbmParams& p, SamplingMode mode) {
    EffectiveParams eff;
    eff.nv = p.nv();
    if (mode == SamplingMode::PsiReweight) {
        // Boltzmann marginal of the bipartite network is exactly ψ(v);
        // estimators downstream must reweight by ψ.
        eff.nh = p.nh();
        eff.duplication = 1;
        eff.a.assign(p.a_block().begin(), p.a_block().end());
        eff.b.assign(p.b_block().begin(), p.b_block().end());
        eff.w.assign(p.w_block().begin(), p.w_block().end());
        return eff;
    }
    // Psi2Duplicate: double the visible biases and duplicate the hidden layer.
    // Marginalizing the two independent hidden copies gives
    // exp(2 a·v) Π_j (2 cosh θ_j)² = ψ(v)² exactly.
    eff.nh = 2 * p.nh();
    eff.duplication = 2;
    eff.a.resize(p.nv());
    for (uint32_t i = 0; i < p.nv(); ++i) eff.a[i] = 2.0 * p.a(i);
    eff.b.resize(eff.nh);
    for (uint32_t j = 0; j < p.nh(); ++j) {
        eff.b[j] = p.b(j);
        eff.b[p.nh() + j] = p.b(j);
    }
    eff.w.resize(static_cast<size_t>(p.nv()) * eff.nh);
    for (uint32_t i = 0; i < p.nv(); ++i)
        for (uint32_t j = 0; j < p.nh(); ++j) {
            eff.w[static_cast<size_t>(i) * eff.nh + j] = p.w(i, j);
            eff.w[static_cast<size_t>(i) * eff.nh + p.nh() + j] = p.w(i, j);
        }
    return eff;
}

}  // namespace pbitnqs

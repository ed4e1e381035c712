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
#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace pbitnqs {

// log(2 cosh x), stable for large |x|.
inline double log_2cosh(double x) {
    const double ax = std::abs(x);
    return ax + std::log1p(std::exp(-2.0 * ax));
}

// Real-parameter restricted Boltzmann machine used as the wavefunction ansatz
//     ψ(v) = exp(Σ_i a_i v_i) · Π_j 2 cosh(b_j + Σ_i v_i W_ij),
// v bipolar. Real parameters suffice because the target ground state is
// positive. The flat parameter ordering is fixed everywhere as
// (a block, b block, W row-major), so gradients and checkpoints line up.
class RbmParams {
public:
    RbmParams(uint32_t nv, uint32_t nh);

    // i.i.d. zero-mean Gaussian entries with standard deviation sigma.
    static RbmParams random(uint32_t nv, uint32_t nh, uint64_t seed, double sigma = 0.01);

    uint32_t nv() const { return nv_; }
    uint32_t nh() const { return nh_; }
    uint32_t param_count() const { return nv_ + nh_ + nv_ * nh_; }

    double a(uint32_t i) const { return a_[i]; }
    double b(uint32_t j) const { return b_[j]; }
    double w(uint32_t i, uint32_t j) const { return w_[static_cast<size_t>(i) * nh_ + j]; }
    void set_a(uint32_t i, double x) { a_[i] = x; }
    void set_b(uint32_t j, double x) { b_[j] = x; }
    void set_w(uint32_t i, uint32_t j, double x) { w_[static_cast<size_t>(i) * nh_ + j] = x; }

    std::span<const double> a_block() const { return a_; }
    std::span<const double> b_block() const { return b_; }
    std::span<const double> w_block() const { return w_; }  // row-major nv x nh

    std::vector<double> to_flat() const;
    void from_flat(std::span<const double> flat);

    // Checkpoint format: magic "RBM1", nv and nh as little-endian uint32, then
    // a, b, W as little-endian doubles in the fixed ordering.
    void save(std::ostream& os) const;
    void save_file(const std::string& path) const;
    static RbmParams load(std::istream& is);
    static RbmParams load_file(const std::string& path);

    friend bool operator==(const RbmParams&, const RbmParams&) = default;

private:
    uint32_t nv_;
    uint32_t nh_;
    std::vector<double> a_;
    std::vector<double> b_;
    std::vector<double> w_;
};

// θ_j = b_j + Σ_i v_i W_ij for the configuration the cache was built from,
// plus log(2 cosh θ_j) which every ratio evaluation needs.
struct ThetaCache {
    std::vector<double> theta;
    std::vector<double> log2cosh;
};

ThetaCache make_theta_cache(std::span<const int8_t> v, const RbmParams& p);

// log ψ(v) = Σ_i a_i v_i + Σ_j log(2 cosh θ_j).
double log_psi(std::span<const int8_t> v, const RbmParams& p);

// ψ(v with spin i flipped) / ψ(v), evaluated from the θ cache without
// re-evaluating log_psi.
double psi_ratio_flip(std::span<const int8_t> v, uint32_t i, const RbmParams& p,
                      const ThetaCache& cache);
double psi_ratio_flip(std::span<const int8_t> v, uint32_t i, const RbmParams& p);

// O_k = ∂ log ψ / ∂ p_k at v: O_a_i = v_i, O_b_j = tanh θ_j,
// O_W_ij = v_i tanh θ_j, written in the fixed flat ordering.
void log_derivatives(std::span<const int8_t> v, const RbmParams& p, const ThetaCache& cache,
                     std::span<double> out);
std::vector<double> log_derivatives(std::span<const int8_t> v, const RbmParams& p);

// How p-bit samples relate to ψ².
//   Psi2Duplicate: hidden layer duplicated so the sampler's visible marginal
//                  is exactly ψ(v)²; estimators take plain means.
//   PsiReweight:   parameters passed through unchanged, visible marginal ∝ ψ;
//                  estimators must apply self-normalized weights w = ψ(v).
enum class SamplingMode : uint8_t { Psi2Duplicate = 0, PsiReweight = 1 };

SamplingMode sampling_mode_from_string(const std::string& s);
std::string to_string(SamplingMode mode);

// Real-valued Boltzmann-machine parameters as handed to the sampler side
// (before fixed-point quantization).
struct EffectiveParams {
    uint32_t nv = 0;
    uint32_t nh = 0;           // hidden count after duplication
    uint32_t duplication = 1;  // hidden-layer copies: 1 or 2
    std::vector<double> a;
    std::vector<double> b;
    std::vector<double> w;  // row-major nv x nh
};

EffectiveParams effective_sampler_params(const RbmParams& p, SamplingMode mode);

}  // namespace pbitnqs

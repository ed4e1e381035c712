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

// Brute-force reference computations for tests. Everything here enumerates or
// diagonalizes directly and stays independent of the library code paths it is
// used to check.

#pragma once
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "pbitnqs/pbit_network.hpp"
#include "pbitnqs/rbm.hpp"
#include "pbitnqs/tfim.hpp"

namespace pbitnqs::testing {

inline void index_to_spins(uint64_t index, uint32_t n, std::vector<int8_t>& v) {
    v.resize(n);
    for (uint32_t i = 0; i < n; ++i) v[i] = (index >> i) & 1 ? 1 : -1;
}

// Exact Boltzmann distribution P(m) ∝ exp(Σ_{i<j} W m m + Σ h m) over all 2^n
// states of a p-bit network, indexed by the same bit convention as sampling
// histograms (bit i set = +1).
inline std::vector<double> boltzmann_distribution(const PbitNetwork& net) {
    const uint32_t n = net.size();
    if (n > 20) throw std::invalid_argument("boltzmann_distribution: too many p-bits");
    const auto couplers = net.couplers();
    const size_t dim = size_t{1} << n;
    std::vector<double> log_weight(dim);
    std::vector<int8_t> m;
    double log_max = -1e300;
    for (size_t s = 0; s < dim; ++s) {
        index_to_spins(s, n, m);
        double e = 0.0;
        for (const auto& c : couplers) e += c.weight.value() * m[c.i] * m[c.j];
        for (uint32_t i = 0; i < n; ++i) e += net.bias(i).value() * m[i];
        log_weight[s] = e;
        if (e > log_max) log_max = e;
    }
    double z = 0.0;
    for (double& lw : log_weight) {
        lw = std::exp(lw - log_max);
        z += lw;
    }
    for (double& lw : log_weight) lw /= z;
    return log_weight;
}

inline std::vector<double> empirical_distribution(const SampleBatch& batch) {
    if (batch.n_bits > 20) throw std::invalid_argument("empirical_distribution: too wide");
    std::vector<double> hist(size_t{1} << batch.n_bits, 0.0);
    for (uint32_t r = 0; r < batch.n_rows; ++r) {
        const auto row = batch.row(r);
        size_t idx = 0;
        for (uint32_t k = 0; k < batch.n_bits; ++k)
            if (row[k] > 0) idx |= size_t{1} << k;
        hist[idx] += 1.0;
    }
    for (double& h : hist) h /= batch.n_rows;
    return hist;
}

inline double total_variation(std::span<const double> p, std::span<const double> q) {
    double tv = 0.0;
    for (size_t k = 0; k < p.size(); ++k) tv += std::abs(p[k] - q[k]);
    return tv / 2.0;
}

// log ψ by direct summation over all hidden configurations:
// ψ(v) = Σ_h exp(a·v + b·h + v W h). Only usable for small nh.
inline double brute_force_log_psi(std::span<const int8_t> v, const RbmParams& p) {
    if (p.nh() > 20) throw std::invalid_argument("brute_force_log_psi: nh too large");
    double av = 0.0;
    for (uint32_t i = 0; i < p.nv(); ++i) av += p.a(i) * v[i];
    const size_t hidden_states = size_t{1} << p.nh();
    double sum = 0.0;
    for (size_t hs = 0; hs < hidden_states; ++hs) {
        double e = 0.0;
        for (uint32_t j = 0; j < p.nh(); ++j) {
            const int8_t h = (hs >> j) & 1 ? 1 : -1;
            e += p.b(j) * h;
            for (uint32_t i = 0; i < p.nv(); ++i) e += v[i] * p.w(i, j) * h;
        }
        sum += std::exp(e);
    }
    return av + std::log(sum);
}

// Visible marginal of the bipartite Boltzmann network described by real-valued
// sampler parameters, by enumerating the joint over (v, h).
inline std::vector<double> bipartite_visible_marginal(const EffectiveParams& eff) {
    if (eff.nv + eff.nh > 22)
        throw std::invalid_argument("bipartite_visible_marginal: joint too large");
    const size_t nvis = size_t{1} << eff.nv;
    const size_t nhid = size_t{1} << eff.nh;
    std::vector<double> marginal(nvis, 0.0);
    for (size_t vs = 0; vs < nvis; ++vs) {
        for (size_t hs = 0; hs < nhid; ++hs) {
            double e = 0.0;
            for (uint32_t i = 0; i < eff.nv; ++i) {
                const int8_t vi = (vs >> i) & 1 ? 1 : -1;
                e += eff.a[i] * vi;
                for (uint32_t j = 0; j < eff.nh; ++j) {
                    const int8_t hj = (hs >> j) & 1 ? 1 : -1;
                    e += vi * eff.w[static_cast<size_t>(i) * eff.nh + j] * hj;
                }
            }
            for (uint32_t j = 0; j < eff.nh; ++j)
                e += eff.b[j] * ((hs >> j) & 1 ? 1 : -1);
            marginal[vs] += std::exp(e);
        }
    }
    double z = 0.0;
    for (double m : marginal) z += m;
    for (double& m : marginal) m /= z;
    return marginal;
}

// Normalized ψ(v)^power over all visible configurations.
inline std::vector<double> psi_power_distribution(const RbmParams& p, double power) {
    const size_t dim = size_t{1} << p.nv();
    std::vector<double> logw(dim);
    std::vector<int8_t> v;
    double log_max = -1e300;
    for (size_t s = 0; s < dim; ++s) {
        index_to_spins(s, p.nv(), v);
        logw[s] = power * log_psi(v, p);
        if (logw[s] > log_max) log_max = logw[s];
    }
    double z = 0.0;
    for (double& lw : logw) {
        lw = std::exp(lw - log_max);
        z += lw;
    }
    for (double& lw : logw) lw /= z;
    return logw;
}

// i.i.d. draws from an explicit distribution by inverse CDF; the independent
// batch generator for estimator statistics.
inline SampleBatch draw_batch(std::span<const double> probs, uint32_t n_bits, uint32_t n_rows,
                              uint64_t seed) {
    std::vector<double> cdf(probs.size());
    double acc = 0.0;
    for (size_t k = 0; k < probs.size(); ++k) {
        acc += probs[k];
        cdf[k] = acc;
    }
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    SampleBatch batch;
    batch.n_bits = n_bits;
    batch.n_rows = n_rows;
    batch.seed = seed;
    batch.data.resize(static_cast<size_t>(n_rows) * n_bits);
    std::vector<int8_t> v;
    for (uint32_t r = 0; r < n_rows; ++r) {
        const double u = uniform(gen) * acc;
        const size_t idx = static_cast<size_t>(
            std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        index_to_spins(std::min(idx, probs.size() - 1), n_bits, v);
        std::copy(v.begin(), v.end(), batch.data.begin() + static_cast<size_t>(r) * n_bits);
    }
    return batch;
}

// Ground energy of the even-parity Jordan–Wigner sector of the uniform
// periodic transverse-field Ising chain (the global ground state for even N
// and ferromagnetic J): E0 = -Σ_m 2 sqrt(J² + Γ² - 2 J Γ cos k_m) with
// k_m = (2m+1)π/N over m = 0..N/2-1.
inline double free_fermion_ground_energy(uint32_t n, double j, double gamma) {
    if (n % 2 != 0) throw std::invalid_argument("free_fermion_ground_energy: N must be even");
    double e = 0.0;
    for (uint32_t m = 0; m < n / 2; ++m) {
        const double k = M_PI * (2.0 * m + 1.0) / n;
        e += 2.0 * std::sqrt(j * j + gamma * gamma - 2.0 * j * gamma * std::cos(k));
    }
    return -e;
}

// Cyclic Jacobi eigensolver for small dense symmetric matrices (row-major).
// Returns the eigenvalues in ascending order.
inline std::vector<double> jacobi_eigenvalues(std::vector<double> a, size_t n) {
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (size_t p = 0; p < n; ++p)
            for (size_t q = p + 1; q < n; ++q) off += a[p * n + q] * a[p * n + q];
        if (off < 1e-24) break;
        for (size_t p = 0; p < n; ++p) {
            for (size_t q = p + 1; q < n; ++q) {
                const double apq = a[p * n + q];
                if (std::abs(apq) < 1e-300) continue;
                const double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                const double t = std::copysign(1.0, theta) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (size_t k = 0; k < n; ++k) {
                    const double akp = a[k * n + p];
                    const double akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for (size_t k = 0; k < n; ++k) {
                    const double apk = a[p * n + k];
                    const double aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> evals(n);
    for (size_t k = 0; k < n; ++k) evals[k] = a[k * n + k];
    std::sort(evals.begin(), evals.end());
    return evals;
}

// Dense TFIM Hamiltonian in the σ^z product basis, row-major 2^N x 2^N.
inline std::vector<double> dense_tfim_matrix(const TfimModel& m) {
    if (m.n_spins > 10) throw std::invalid_argument("dense_tfim_matrix: N too large");
    const size_t dim = size_t{1} << m.n_spins;
    std::vector<double> h(dim * dim, 0.0);
    std::vector<int8_t> v;
    for (size_t s = 0; s < dim; ++s) {
        index_to_spins(s, m.n_spins, v);
        double diag = 0.0;
        for (uint32_t i = 0; i < m.n_spins; ++i)
            diag -= m.bonds[i] * v[i] * v[(i + 1) % m.n_spins];
        h[s * dim + s] = diag;
        for (uint32_t i = 0; i < m.n_spins; ++i) h[s * dim + (s ^ (size_t{1} << i))] -= m.gamma;
    }
    return h;
}

// Central finite difference of a scalar function of RBM parameters.
template <class F>
std::vector<double> finite_difference_gradient(const RbmParams& p, double step, F&& f) {
    std::vector<double> flat = p.to_flat();
    std::vector<double> grad(flat.size());
    for (size_t k = 0; k < flat.size(); ++k) {
        RbmParams plus(p.nv(), p.nh());
        RbmParams minus(p.nv(), p.nh());
        std::vector<double> work = flat;
        work[k] = flat[k] + step;
        plus.from_flat(work);
        work[k] = flat[k] - step;
        minus.from_flat(work);
        grad[k] = (f(plus) - f(minus)) / (2.0 * step);
    }
    return grad;
}

// Five-point central difference, truncation O(step^4); tight enough for
// per-component relative comparisons at 1e-5.
template <class F>
std::vector<double> finite_difference_gradient5(const RbmParams& p, double step, F&& f) {
    std::vector<double> flat = p.to_flat();
    std::vector<double> grad(flat.size());
    RbmParams probe(p.nv(), p.nh());
    for (size_t k = 0; k < flat.size(); ++k) {
        auto eval_at = [&](double offset) {
            std::vector<double> work = flat;
            work[k] = flat[k] + offset;
            probe.from_flat(work);
            return f(probe);
        };
        grad[k] = (8.0 * (eval_at(step) - eval_at(-step)) -
                   (eval_at(2.0 * step) - eval_at(-2.0 * step))) /
                  (12.0 * step);
    }
    return grad;
}

}  // namespace pbitnqs::testing

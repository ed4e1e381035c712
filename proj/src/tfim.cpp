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

#include "pbitnqs/tfim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "pbitnqs/errors.hpp"

namespace pbitnqs {

TfimModel TfimModel::uniform(uint32_t n, double j, double gamma, bool periodic) {
    TfimModel m;
    m.n_spins = n;
    m.bonds.assign(n, j);
    if (!periodic) m.bonds[n > 0 ? n - 1 : 0] = 0.0;
    m.gamma = gamma;
    m.validate();
    return m;
}

void TfimModel::validate() const {
    if (n_spins < 2) throw ConfigError("TfimModel: need at least 2 spins");
    if (bonds.size() != n_spins)
        throw ConfigError("TfimModel: bond vector must have one entry per spin");
    for (double j : bonds)
        if (!std::isfinite(j)) throw ConfigError("TfimModel: non-finite bond coupling");
    if (!std::isfinite(gamma)) throw ConfigError("TfimModel: non-finite transverse field");
}

double classical_energy(std::span<const int8_t> v, const TfimModel& m) {
    if (v.size() != m.n_spins) throw std::invalid_argument("classical_energy: length mismatch");
    double e = 0.0;
    for (uint32_t i = 0; i < m.n_spins; ++i)
        e += m.bonds[i] * v[i] * v[(i + 1) % m.n_spins];
    return -e;
}

double local_energy(std::span<const int8_t> v, const RbmParams& p, const TfimModel& m,
                    const ThetaCache& cache) {
    if (v.size() != m.n_spins || p.nv() != m.n_spins)
        throw std::invalid_argument("local_energy: shape mismatch");
    return local_energy_with_ratios(v, m,
                                    [&](uint32_t i) { return psi_ratio_flip(v, i, p, cache); });
}

double local_energy(std::span<const int8_t> v, const RbmParams& p, const TfimModel& m) {
    return local_energy(v, p, m, make_theta_cache(v, p));
}

void spin_configuration(uint64_t basis_index, uint32_t n, std::span<int8_t> out) {
    for (uint32_t i = 0; i < n; ++i)
        out[i] = (basis_index >> i) & 1 ? int8_t{1} : int8_t{-1};
}

namespace {

void check_exact_size(uint32_t n, const char* who) {
    if (n > kMaxExactSpins)
        throw ConfigError(std::string(who) + ": N = " + std::to_string(n) +
                          " exceeds the exact-method limit of " + std::to_string(kMaxExactSpins));
}

std::vector<double> diagonal_energies(const TfimModel& m) {
    const size_t dim = size_t{1} << m.n_spins;
    std::vector<double> diag(dim);
    const int64_t count = static_cast<int64_t>(dim);
#pragma omp parallel for schedule(static)
    for (int64_t s = 0; s < count; ++s) {
        std::vector<int8_t> v(m.n_spins);
        spin_configuration(static_cast<uint64_t>(s), m.n_spins, v);
        diag[static_cast<size_t>(s)] = classical_energy(v, m);
    }
    return diag;
}

double dot(std::span<const double> a, std::span<const double> b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

// Eigenvalues and eigenvectors of a symmetric tridiagonal matrix by the
// implicit QL algorithm with Wilkinson shifts. d holds the diagonal, e the
// subdiagonal (e[0] unused on entry). On return d holds eigenvalues and z
// columns hold the matching eigenvectors.
void tridiag_ql(std::vector<double>& d, std::vector<double>& e, std::vector<double>& z) {
    const size_t n = d.size();
    for (size_t i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;
    for (size_t l = 0; l < n; ++l) {
        size_t iter = 0;
        size_t m;
        do {
            for (m = l; m + 1 < n; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= 1e-15 * dd) break;
            }
            if (m != l) {
                if (iter++ == 50)
                    throw NumericError("tridiag_ql: too many iterations");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0;
                double c = 1.0;
                double p = 0.0;
                for (size_t i = m; i-- > l;) {
                    double f = s * e[i];
                    const double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    for (size_t k = 0; k < n; ++k) {
                        f = z[k * n + i + 1];
                        z[k * n + i + 1] = s * z[k * n + i] + c * f;
                        z[k * n + i] = c * z[k * n + i] - s * f;
                    }
                }
                if (r == 0.0 && m > l + 1) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

}  // namespace

void apply_hamiltonian(const TfimModel& m, std::span<const double> x, std::span<double> y) {
    const size_t dim = size_t{1} << m.n_spins;
    if (x.size() != dim || y.size() != dim)
        throw std::invalid_argument("apply_hamiltonian: dimension mismatch");
    const std::vector<double> diag = diagonal_energies(m);
    const double gamma = m.gamma;
    const uint32_t n = m.n_spins;
    const int64_t count = static_cast<int64_t>(dim);
#pragma omp parallel for schedule(static)
    for (int64_t s = 0; s < count; ++s) {
        const size_t u = static_cast<size_t>(s);
        double acc = diag[u] * x[u];
        for (uint32_t i = 0; i < n; ++i) acc -= gamma * x[u ^ (size_t{1} << i)];
        y[u] = acc;
    }
}

double variational_energy_exact(const RbmParams& p, const TfimModel& m) {
    if (p.nv() != m.n_spins)
        throw std::invalid_argument("variational_energy_exact: shape mismatch");
    check_exact_size(m.n_spins, "variational_energy_exact");
    const size_t dim = size_t{1} << m.n_spins;

    // First pass: log ψ for every configuration, keeping the max for a stable
    // exp. Second pass: ψ²-weighted local energies, reduced block by block in
    // index order so the result does not depend on the thread count.
    std::vector<double> logpsi(dim);
    const int64_t count = static_cast<int64_t>(dim);
#pragma omp parallel for schedule(static)
    for (int64_t s = 0; s < count; ++s) {
        std::vector<int8_t> v(m.n_spins);
        spin_configuration(static_cast<uint64_t>(s), m.n_spins, v);
        logpsi[static_cast<size_t>(s)] = log_psi(v, p);
    }
    const double log_max = *std::max_element(logpsi.begin(), logpsi.end());

    constexpr size_t kBlock = 256;
    const size_t n_blocks = (dim + kBlock - 1) / kBlock;
    std::vector<double> block_num(n_blocks, 0.0);
    std::vector<double> block_den(n_blocks, 0.0);
    const int64_t blocks = static_cast<int64_t>(n_blocks);
#pragma omp parallel for schedule(dynamic)
    for (int64_t bi = 0; bi < blocks; ++bi) {
        const size_t begin = static_cast<size_t>(bi) * kBlock;
        const size_t end = std::min(begin + kBlock, dim);
        std::vector<int8_t> v(m.n_spins);
        double num = 0.0;
        double den = 0.0;
        for (size_t s = begin; s < end; ++s) {
            spin_configuration(s, m.n_spins, v);
            const double w = std::exp(2.0 * (logpsi[s] - log_max));
            const ThetaCache cache = make_theta_cache(v, p);
            num += w * local_energy(v, p, m, cache);
            den += w;
        }
        block_num[static_cast<size_t>(bi)] = num;
        block_den[static_cast<size_t>(bi)] = den;
    }
    const double num = std::accumulate(block_num.begin(), block_num.end(), 0.0);
    const double den = std::accumulate(block_den.begin(), block_den.end(), 0.0);
    return num / den;
}

SpectrumResult exact_ground_energy(const TfimModel& m, bool keep_vector) {
    m.validate();
    check_exact_size(m.n_spins, "exact_ground_energy");
    const size_t dim = size_t{1} << m.n_spins;
    const std::vector<double> diag = diagonal_energies(m);
    const double gamma = m.gamma;
    const uint32_t n = m.n_spins;

    auto matvec = [&](const std::vector<double>& x, std::vector<double>& y) {
        const int64_t count = static_cast<int64_t>(dim);
#pragma omp parallel for schedule(static)
        for (int64_t s = 0; s < count; ++s) {
            const size_t u = static_cast<size_t>(s);
            double acc = diag[u] * x[u];
            for (uint32_t i = 0; i < n; ++i) acc -= gamma * x[u ^ (size_t{1} << i)];
            y[u] = acc;
        }
    };

    // Problem scale for residual/breakdown thresholds.
    double scale = std::abs(gamma) * n;
    for (double j : m.bonds) scale += std::abs(j);
    scale = std::max(scale, 1.0);

    // The ground state of this stoquastic H is positive, so the uniform
    // vector has guaranteed overlap with it.
    std::vector<double> start(dim, 1.0 / std::sqrt(static_cast<double>(dim)));

    const size_t steps_per_cycle = std::min<size_t>(dim, dim <= (size_t{1} << 16) ? 64 : 28);
    constexpr uint32_t kMaxRestarts = 60;
    const double tol = 1e-10 * scale;

    SpectrumResult result;
    result.method = "lanczos";
    std::vector<double> ritz;

    for (uint32_t restart = 0; restart < kMaxRestarts; ++restart) {
        // Lanczos with full reorthogonalization against the stored basis.
        std::vector<std::vector<double>> basis;
        std::vector<double> alpha;
        std::vector<double> beta;  // beta[k] couples basis k and k+1
        basis.push_back(start);
        std::vector<double> w(dim);
        for (size_t k = 0; k < steps_per_cycle; ++k) {
            matvec(basis[k], w);
            const double a = dot(w, basis[k]);
            alpha.push_back(a);
            for (size_t s = 0; s < dim; ++s) w[s] -= a * basis[k][s];
            if (k > 0)
                for (size_t s = 0; s < dim; ++s) w[s] -= beta[k - 1] * basis[k - 1][s];
            for (int pass = 0; pass < 2; ++pass)
                for (const auto& q : basis) {
                    const double c = dot(w, q);
                    for (size_t s = 0; s < dim; ++s) w[s] -= c * q[s];
                }
            const double b = norm(w);
            ++result.iterations;
            if (b < 1e-13 * scale) break;  // invariant subspace found
            beta.push_back(b);
            std::vector<double> next(dim);
            for (size_t s = 0; s < dim; ++s) next[s] = w[s] / b;
            basis.push_back(std::move(next));
        }

        // Ground pair of the tridiagonal projection.
        const size_t k = alpha.size();
        std::vector<double> d = alpha;
        std::vector<double> e(k, 0.0);
        for (size_t i = 1; i < k; ++i) e[i] = beta[i - 1];
        std::vector<double> z(k * k, 0.0);
        for (size_t i = 0; i < k; ++i) z[i * k + i] = 1.0;
        tridiag_ql(d, e, z);
        size_t lowest = 0;
        for (size_t i = 1; i < k; ++i)
            if (d[i] < d[lowest]) lowest = i;

        ritz.assign(dim, 0.0);
        for (size_t i = 0; i < k && i < basis.size(); ++i) {
            const double coeff = z[i * k + lowest];
            for (size_t s = 0; s < dim; ++s) ritz[s] += coeff * basis[i][s];
        }
        const double rn = norm(ritz);
        for (double& x : ritz) x /= rn;

        result.ground_energy = d[lowest];
        matvec(ritz, w);
        double res2 = 0.0;
        for (size_t s = 0; s < dim; ++s) {
            const double r = w[s] - result.ground_energy * ritz[s];
            res2 += r * r;
        }
        result.residual = std::sqrt(res2);
        if (result.residual <= tol) {
            if (keep_vector) result.ground_vector = std::move(ritz);
            return result;
        }
        start = ritz;  // restart from the best Ritz vector so far
    }
    throw NumericError("exact_ground_energy: Lanczos did not converge, residual = " +
                       std::to_string(result.residual));
}

}  // namespace pbitnqs

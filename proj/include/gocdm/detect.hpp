// SPDX-License-Identifier: Apache-2.0
//
// gocdm - generalized chirp division multiplexing simulation toolkit
// Copyright (C) 2026 The gocdm authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "gocdm/gf_channel.hpp"
#include "gocdm/types.hpp"
#include "gocdm/waveform.hpp"

namespace gocdm {

struct MpConfig
{
    double damping = 0.6;             // weight of the fresh message
    std::size_t max_iterations = 20;
    double gamma = 0.99;              // posterior confidence threshold
    double epsilon = 0.2;             // allowed drop of eta below its best value
    double noise_var = 0.0;           // sigma_o^2, must be > 0 when detecting
    std::size_t truncation = 10;      // B used when building the sparse channel

    void validate() const
    {
        if (!(damping > 0.0 && damping <= 1.0))
            throw std::invalid_argument("mp: damping must be in (0, 1]");
        if (max_iterations == 0)
            throw std::invalid_argument("mp: max_iterations must be positive");
        if (!(gamma > 0.0 && gamma < 1.0))
            throw std::invalid_argument("mp: gamma must be in (0, 1)");
        if (epsilon < 0.0)
            throw std::invalid_argument("mp: epsilon must be non-negative");
        if (!(noise_var > 0.0))
            throw std::invalid_argument("mp: observation noise variance must be positive");
    }
};

/**
 * Message tables of the factor graph. Edge (p, l) joins observation y[p] and
 * symbol x[<p - d_l>]; both ends index it by the same (p, l) pair, so symbol
 * x[v] sees its l-th edge at observation <v + d_l>.
 */
struct MpState
{
    std::size_t mn = 0;
    std::size_t groups = 0;
    std::size_t order = 0;
    std::vector<double> pmf; // symbol -> observation, [(p*L + l)*order + m]
    cvec mean;               // interference mean seen on edge (p, l)
    std::vector<double> var; // interference + noise variance on edge (p, l)
    double eta = 0.0;
    double eta_max = 0.0;
    std::size_t iteration = 0;

    static MpState uniform(const SparseGfChannel &sg, const Constellation &c)
    {
        MpState st;
        st.mn = sg.size();
        st.groups = sg.groups();
        st.order = c.order();
        st.pmf.assign(st.mn * st.groups * st.order, 1.0 / static_cast<double>(st.order));
        st.mean.assign(st.mn * st.groups, cplx{});
        st.var.assign(st.mn * st.groups, 0.0);
        return st;
    }

    std::size_t edge(std::size_t p, std::size_t l) const { return p * groups + l; }
    std::span<double> message(std::size_t p, std::size_t l) { return {pmf.data() + edge(p, l) * order, order}; }
    std::span<const double> message(std::size_t p, std::size_t l) const
    {
        return {pmf.data() + edge(p, l) * order, order};
    }
};

struct MpResult
{
    cvec x_hat;
    std::size_t iterations = 0;
    double eta = 0.0;     // indicator of the last iteration run
    double eta_max = 0.0; // indicator of the returned estimate
};

/**
 * Observation side: for every edge (p, l) the Gaussian approximation of the
 * other L-1 contributions to y[p],
 *   mean  = sum_{i != l} E[h_{p,i} x_i]
 *   var   = sum_{i != l} (E|h_{p,i} x_i|^2 - |E[h_{p,i} x_i]|^2) + sigma_o^2
 * Leave-one-out sums use prefix/suffix accumulation, no subtraction.
 */
inline void interference_moments(MpState &st, const SparseGfChannel &sg, const Constellation &c, double noise_var)
{
    const std::size_t L = st.groups;
    const auto points = c.points();
    std::vector<cplx> mu(L);
    std::vector<double> v(L);
    std::vector<cplx> mu_suffix(L + 1);
    std::vector<double> v_suffix(L + 1);
    for (std::size_t p = 0; p < st.mn; ++p)
    {
        for (std::size_t l = 0; l < L; ++l)
        {
            const cplx h = sg.coeff(p, l);
            const auto msg = st.message(p, l);
            cplx m1{};
            double m2 = 0.0;
            for (std::size_t m = 0; m < st.order; ++m)
            {
                m1 += msg[m] * points[m];
                m2 += msg[m] * std::norm(points[m]);
            }
            mu[l] = h * m1;
            v[l] = std::max(0.0, std::norm(h) * m2 - std::norm(mu[l]));
        }
        mu_suffix[L] = 0.0;
        v_suffix[L] = 0.0;
        for (std::size_t l = L; l-- > 0;)
        {
            mu_suffix[l] = mu_suffix[l + 1] + mu[l];
            v_suffix[l] = v_suffix[l + 1] + v[l];
        }
        cplx mu_prefix{};
        double v_prefix = 0.0;
        for (std::size_t l = 0; l < L; ++l)
        {
            st.mean[st.edge(p, l)] = mu_prefix + mu_suffix[l + 1];
            st.var[st.edge(p, l)] = v_prefix + v_suffix[l + 1] + noise_var;
            mu_prefix += mu[l];
            v_prefix += v[l];
        }
    }
}

namespace detail {

// In-place normalized exp of log weights; an all -inf / NaN input becomes uniform.
inline void softmax(std::span<double> w)
{
    double top = -std::numeric_limits<double>::infinity();
    for (double x : w)
        if (x > top)
            top = x;
    if (!std::isfinite(top))
    {
        std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(w.size()));
        return;
    }
    double total = 0.0;
    for (double &x : w)
    {
        x = std::exp(x - top);
        total += x;
    }
    for (double &x : w)
        x /= total;
}

} // namespace detail

/**
 * Damped message-passing detection on the sparse GF-domain factor graph.
 *
 * All edge messages start uniform. Each iteration recomputes the interference
 * moments, forms log-likelihoods -|y - mean - h alpha|^2 / var on every edge,
 * and replaces each symbol-to-observation message by
 *   damping * (leave-one-out posterior) + (1 - damping) * (old message).
 * eta is the fraction of symbols whose full posterior peaks at or above gamma.
 * The estimate is refreshed whenever eta beats its running maximum; the loop
 * stops at eta = 1, after max_iterations, or when eta falls more than epsilon
 * below the maximum. The first iteration always produces an estimate.
 */
inline MpResult mp_detect(std::span<const cplx> y, const SparseGfChannel &sg, const Constellation &c,
                          const MpConfig &cfg)
{
    cfg.validate();
    if (y.size() != sg.size())
        throw std::invalid_argument("mp_detect: observation length mismatch");

    const std::size_t MN = sg.size();
    const std::size_t L = sg.groups();
    const std::size_t Q = c.order();
    const auto points = c.points();

    MpState st = MpState::uniform(sg, c);
    std::vector<double> ll(MN * L * Q);
    std::vector<std::size_t> obs(L);
    std::vector<double> prefix((L + 1) * Q);
    std::vector<double> suffix((L + 1) * Q);
    std::vector<double> work(Q);
    std::vector<std::size_t> decision(MN);

    MpResult res;
    bool have_estimate = false;
    double eta = 0.0;

    while (st.iteration < cfg.max_iterations && eta < 1.0)
    {
        ++st.iteration;
        interference_moments(st, sg, c, cfg.noise_var);

        for (std::size_t p = 0; p < MN; ++p)
            for (std::size_t l = 0; l < L; ++l)
            {
                const std::size_t e = st.edge(p, l);
                const cplx resid = y[p] - st.mean[e];
                const cplx h = sg.coeff(p, l);
                for (std::size_t m = 0; m < Q; ++m)
                    ll[e * Q + m] = -std::norm(resid - h * points[m]) / st.var[e];
            }

        std::size_t confident = 0;
        for (std::size_t v = 0; v < MN; ++v)
        {
            for (std::size_t l = 0; l < L; ++l)
                obs[l] = wrap(static_cast<std::int64_t>(v) + static_cast<std::int64_t>(sg.shift(l)), MN);

            std::fill(prefix.begin(), prefix.begin() + static_cast<std::ptrdiff_t>(Q), 0.0);
            for (std::size_t l = 0; l < L; ++l)
                for (std::size_t m = 0; m < Q; ++m)
                    prefix[(l + 1) * Q + m] = prefix[l * Q + m] + ll[st.edge(obs[l], l) * Q + m];
            std::fill(suffix.begin() + static_cast<std::ptrdiff_t>(L * Q), suffix.end(), 0.0);
            for (std::size_t l = L; l-- > 0;)
                for (std::size_t m = 0; m < Q; ++m)
                    suffix[l * Q + m] = suffix[(l + 1) * Q + m] + ll[st.edge(obs[l], l) * Q + m];

            // full posterior over all L observations
            for (std::size_t m = 0; m < Q; ++m)
                work[m] = prefix[L * Q + m];
            detail::softmax(work);
            std::size_t best = 0;
            for (std::size_t m = 1; m < Q; ++m)
                if (work[m] > work[best])
                    best = m;
            decision[v] = best;
            if (work[best] >= cfg.gamma)
                ++confident;

            for (std::size_t l = 0; l < L; ++l)
            {
                for (std::size_t m = 0; m < Q; ++m)
                    work[m] = prefix[l * Q + m] + suffix[(l + 1) * Q + m];
                detail::softmax(work);
                auto msg = st.message(obs[l], l);
                for (std::size_t m = 0; m < Q; ++m)
                    msg[m] = cfg.damping * work[m] + (1.0 - cfg.damping) * msg[m];
            }
        }

        eta = static_cast<double>(confident) / static_cast<double>(MN);
        st.eta = eta;
        if (!have_estimate || eta > st.eta_max)
        {
            st.eta_max = std::max(st.eta_max, eta);
            res.x_hat.resize(MN);
            for (std::size_t v = 0; v < MN; ++v)
                res.x_hat[v] = points[decision[v]];
            have_estimate = true;
        }
        else if (eta < st.eta_max - cfg.epsilon)
        {
            break;
        }
    }

    res.iterations = st.iteration;
    res.eta = eta;
    res.eta_max = st.eta_max;
    return res;
}

/// Linear MMSE filter output z = H^H (H H^H + N0 I)^{-1} y, before slicing.
inline cvec mmse_filter(std::span<const cplx> y, const cmat &H, double N0)
{
    if (H.rows() != H.cols() || static_cast<std::size_t>(H.rows()) != y.size())
        throw std::invalid_argument("mmse: dimension mismatch");
    if (N0 < 0.0)
        throw std::invalid_argument("mmse: noise variance must be non-negative");
    const auto n = H.rows();
    cmat A = H * H.adjoint();
    A.diagonal().array() += N0;
    Eigen::LDLT<cmat> ldlt(A);
    if (ldlt.info() != Eigen::Success || !(ldlt.rcond() > std::numeric_limits<double>::epsilon()))
        throw std::runtime_error("mmse: singular system (zero noise with a rank-deficient channel?)");
    const Eigen::VectorXcd w = ldlt.solve(Eigen::Map<const Eigen::VectorXcd>(y.data(), n));
    const Eigen::VectorXcd z = H.adjoint() * w;
    return cvec(z.data(), z.data() + n);
}

inline cvec mmse_equalize(std::span<const cplx> y, const cmat &H, double N0, const Constellation &c)
{
    cvec z = mmse_filter(y, H, N0);
    for (auto &v : z)
        v = c.point(c.slice(v));
    return z;
}

/// Exhaustive ML over all symbol vectors; capped at 2^16 hypotheses.
inline cvec ml_bruteforce(std::span<const cplx> y, const cmat &H, const Constellation &c)
{
    const std::size_t n = y.size();
    if (H.rows() != H.cols() || static_cast<std::size_t>(H.rows()) != n)
        throw std::invalid_argument("ml: dimension mismatch");
    if (n * c.bits_per_symbol() > 16)
        throw std::length_error("ml: search space above 2^16 hypotheses");

    const std::size_t Q = c.order();
    const auto points = c.points();
    std::vector<std::size_t> idx(n, 0);
    Eigen::VectorXcd x(static_cast<Eigen::Index>(n));
    const Eigen::Map<const Eigen::VectorXcd> yv(y.data(), static_cast<Eigen::Index>(n));
    std::vector<std::size_t> best(n, 0);
    double best_metric = std::numeric_limits<double>::infinity();
    while (true)
    {
        for (std::size_t i = 0; i < n; ++i)
            x[static_cast<Eigen::Index>(i)] = points[idx[i]];
        const double metric = (yv - H * x).squaredNorm();
        if (metric < best_metric)
        {
            best_metric = metric;
            best = idx;
        }
        std::size_t i = 0;
        while (i < n && ++idx[i] == Q)
            idx[i++] = 0;
        if (i == n)
            break;
    }
    cvec out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = points[best[i]];
    return out;
}

inline cvec ml_bruteforce(std::span<const cplx> y, const SparseGfChannel &sg, const Constellation &c)
{
    return ml_bruteforce(y, sg.dense(), c);
}

} // namespace gocdm

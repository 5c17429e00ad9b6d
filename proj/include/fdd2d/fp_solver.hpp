// SPDX-License-Identifier: Apache-2.0
//
// fdd2d: system-level simulation and joint beamforming / power allocation
// for massive-MIMO downlink networks with underlaid full-duplex D2D links
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
//
// Fractional-programming solver for the joint beamforming / D2D power
// allocation problem. Each SINR ratio is replaced by its quadratic
// transform; the auxiliary variables have closed-form optima, and for fixed
// auxiliaries the transformed objective is concave in the beamformers and in
// the D2D transmit amplitudes, so the inner subproblem is solved by
// projected gradient ascent with a backtracking line search.

#ifndef FDD2D_FP_SOLVER_HPP
#define FDD2D_FP_SOLVER_HPP

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <vector>

#include "fdd2d/metrics.hpp"
#include "fdd2d/rng.hpp"
#include "fdd2d/units.hpp"

namespace fdd2d {

// Quadratic transform of a ratio a^2 / B with real numerator root a:
// 2 q a - q^2 B. Equals a^2 / B at the maximizing q = a / B.
inline double quadratic_transform_real(double a, double B, double q)
{
    return 2.0 * q * a - q * q * B;
}

// Complex counterpart for |a|^2 / B: 2 Re(conj(q) a) - |q|^2 B.
inline double quadratic_transform_complex(std::complex<double> a, double B,
                                          std::complex<double> q)
{
    return 2.0 * std::real(std::conj(q) * a) - std::norm(q) * B;
}

// FP auxiliary variables: one complex value per cellular link, one real
// value per D2D receive direction (two per link).
struct AuxiliaryVars {
    Eigen::VectorXcd q_cell; // B*M
    Eigen::VectorXd q_d2d;   // D
};

enum class ConstraintMode {
    PowerOnly,   // per-BS sum power and per-transceiver power box
    PowerAndQos, // additionally the transformed SINR targets, via log-barrier
};

enum class SolveStatus { Converged, MaxIterations, Infeasible };

struct SolverConfig {
    double epsilon = 1e-5;      // stop when the objective improves by less than this
    int max_outer_iters = 200;
    int max_inner_iters = 500;
    double inner_grad_tol = 1e-6; // on the projected-gradient norm, relative to 1+|f|

    ConstraintMode constraint_mode = ConstraintMode::PowerOnly;
    double gamma_cell = 1.0; // linear SINR targets (QoS mode and post-hoc checks)
    double gamma_d2d = 1.0;
    double qos_barrier_weight = 1e-4;

    double bs_power = dbm_to_watts(46.0);  // P_c, per-BS sum power budget
    double d2d_power = dbm_to_watts(23.0); // P_d, per-transceiver cap
    Eigen::VectorXd d2d_power_caps;        // optional per-transceiver caps (overrides d2d_power)

    D2dSignalPower signal_power = D2dSignalPower::Partner;

    Eigen::VectorXd power_caps(int num_transceivers) const
    {
        if (d2d_power_caps.size() > 0) {
            if (d2d_power_caps.size() != num_transceivers)
                throw std::invalid_argument("SolverConfig: d2d_power_caps size mismatch");
            return d2d_power_caps;
        }
        return Eigen::VectorXd::Constant(num_transceivers, d2d_power);
    }

    void validate() const
    {
        if (!(epsilon > 0.0))
            throw std::invalid_argument("SolverConfig: epsilon must be > 0");
        if (!(bs_power > 0.0) || !(d2d_power > 0.0))
            throw std::invalid_argument("SolverConfig: power budgets must be > 0");
        if (max_outer_iters < 1 || max_inner_iters < 1)
            throw std::invalid_argument("SolverConfig: iteration caps must be >= 1");
    }
};

struct SolveResult {
    BeamformerSet V;
    Eigen::VectorXd p;
    std::vector<double> objective_trace; // value after init, then one per outer iteration
    double final_sum_rate = 0.0;         // bits/s/Hz per cell, via metrics
    bool converged = false;
    int iterations = 0;
    SolveStatus status = SolveStatus::MaxIterations;
    bool inner_warning = false; // an inner solve hit its cap without any ascent step
    LinkRates rates;
    int qos_violations = 0; // links below the configured SINR targets at the final point
};

namespace detail {

// Shared state for fast evaluation of the transformed objective, the exact
// sum-rate, and their gradients. S and W hold the beamformer inner products
// every SINR term is built from:
//   S(k, k') = g_cc[bs(k')](k)^H v_{k'},   W(n, k') = g_cd[bs(k')](n)^H v_{k'}.
struct FpWorkspace {
    const ChannelSet& ch;
    NoiseModel noise;
    D2dSignalPower conv;
    int B, M, K, D;

    Eigen::MatrixXd dc_pow_t;      // (K, D): |g_dc(j,k)|^2 transposed
    Eigen::MatrixXd dd_pow;        // (D, D)
    Eigen::MatrixXd dd_pow_t;      // (D, D) transposed view, row n = gains into n
    Eigen::VectorXd desired_amp;   // |g_dd(partner(n), n)|
    std::vector<int> tx;           // transmitter feeding direction n's desired term

    // caches of the last evaluate() call
    Eigen::MatrixXcd S;
    Eigen::MatrixXcd W;
    Eigen::VectorXd p;
    Eigen::VectorXd Ic, Id; // aggregate interference
    Eigen::VectorXd X, Y;   // quadratic-transform arguments

    // optional log-barrier for the QoS surrogate constraints
    bool barrier = false;
    double gamma_cell = 1.0, gamma_d2d = 1.0, mu = 0.0;

    FpWorkspace(const ChannelSet& channels, const NoiseModel& nm, D2dSignalPower convention)
        : ch(channels), noise(nm), conv(convention), B(channels.num_cells),
          M(channels.users_per_cell), K(channels.num_cellular()),
          D(channels.num_transceivers())
    {
        noise.validate();
        dc_pow_t = ch.d2d_to_cell.cwiseAbs2().transpose();
        dd_pow = ch.d2d_to_d2d.cwiseAbs2();
        dd_pow_t = dd_pow.transpose();
        desired_amp.resize(D);
        tx.resize(D);
        for (int n = 0; n < D; ++n) {
            const int mate = ch.partner[n];
            desired_amp(n) = std::abs(ch.d2d_to_d2d(mate, n));
            tx[n] = (conv == D2dSignalPower::Partner) ? mate : n;
        }
        S.resize(K, K);
        W.resize(D, K);
        Ic.resize(K);
        Id.resize(D);
        X.resize(K);
        Y.resize(D);
    }

    // Refresh S, W, p, Ic, Id for an operating point.
    void load_point(const Eigen::MatrixXcd& V, const Eigen::VectorXd& u)
    {
        p = u.cwiseAbs2();
        for (int b = 0; b < B; ++b) {
            const auto vb = V.middleCols(b * M, M);
            S.middleCols(b * M, M).noalias() = ch.bs_to_cell[b].adjoint() * vb;
            W.middleCols(b * M, M).noalias() = ch.bs_to_d2d[b].adjoint() * vb;
        }
        if (K > 0) {
            Ic = S.cwiseAbs2().rowwise().sum() - S.diagonal().cwiseAbs2();
            if (D > 0)
                Ic.noalias() += dc_pow_t * p;
        }
        if (D > 0) {
            Id = W.cwiseAbs2().rowwise().sum();
            Id.noalias() += dd_pow_t * p;
            for (int n = 0; n < D; ++n)
                Id(n) -= p(ch.partner[n]) * dd_pow(ch.partner[n], n);
        }
    }

    // Transformed objective f_FR at fixed auxiliaries (plus barrier when
    // enabled). Returns -inf if any log argument is non-positive.
    double eval_transformed(const Eigen::MatrixXcd& V, const Eigen::VectorXd& u,
                            const AuxiliaryVars& aux)
    {
        load_point(V, u);
        constexpr double kInf = std::numeric_limits<double>::infinity();
        double f = 0.0;
        for (int k = 0; k < K; ++k) {
            X(k) = quadratic_transform_complex(S(k, k), Ic(k) + noise.sigma2, aux.q_cell(k));
            if (X(k) <= -1.0)
                return -kInf;
            if (barrier && X(k) <= gamma_cell)
                return -kInf;
            f += std::log1p(X(k));
        }
        for (int n = 0; n < D; ++n) {
            const double denom = Id(n) + noise.beta * p(n) + noise.sigma2;
            Y(n) = quadratic_transform_real(u(tx[n]) * desired_amp(n), denom, aux.q_d2d(n));
            if (Y(n) <= -1.0)
                return -kInf;
            if (barrier && Y(n) <= gamma_d2d)
                return -kInf;
            f += std::log1p(Y(n));
        }
        f /= (M_LN2 * B);
        if (barrier) {
            for (int k = 0; k < K; ++k)
                f += mu * std::log(X(k) - gamma_cell);
            for (int n = 0; n < D; ++n)
                f += mu * std::log(Y(n) - gamma_d2d);
        }
        return f;
    }

    // Exact per-cell sum-rate at the loaded point (call load_point first, or
    // use the convenience overload below).
    double sum_rate_loaded() const
    {
        double f = 0.0;
        for (int k = 0; k < K; ++k)
            f += std::log1p(std::norm(S(k, k)) / (Ic(k) + noise.sigma2));
        for (int n = 0; n < D; ++n)
            f += std::log1p(p(tx[n]) * desired_amp(n) * desired_amp(n) /
                            (Id(n) + noise.beta * p(n) + noise.sigma2));
        return f / (M_LN2 * B);
    }

    double sum_rate(const Eigen::MatrixXcd& V, const Eigen::VectorXd& u)
    {
        load_point(V, u);
        return sum_rate_loaded();
    }

    // Closed-form optimal auxiliaries at the loaded point.
    AuxiliaryVars optimal_aux() const
    {
        AuxiliaryVars aux;
        aux.q_cell.resize(K);
        aux.q_d2d.resize(D);
        for (int k = 0; k < K; ++k)
            aux.q_cell(k) = S(k, k) / (Ic(k) + noise.sigma2);
        for (int n = 0; n < D; ++n)
            aux.q_d2d(n) = std::sqrt(p(tx[n])) * desired_amp(n) /
                           (Id(n) + noise.beta * p(n) + noise.sigma2);
        return aux;
    }

    // Gradient of the (barriered) transformed objective with respect to
    // conj(V) and to the amplitudes u, at the point of the last
    // eval_transformed() call.
    void gradient(const Eigen::MatrixXcd& V, const Eigen::VectorXd& u,
                  const AuxiliaryVars& aux, Eigen::MatrixXcd& gV, Eigen::VectorXd& gu) const
    {
        const double ln2B = M_LN2 * B;
        Eigen::VectorXd cw(K), omega(K);
        for (int k = 0; k < K; ++k) {
            double c = 1.0 / ((1.0 + X(k)) * ln2B);
            if (barrier)
                c += mu / (X(k) - gamma_cell);
            cw(k) = c;
            omega(k) = c * std::norm(aux.q_cell(k));
        }
        Eigen::VectorXd dw(D), delta(D);
        for (int n = 0; n < D; ++n) {
            double d = 1.0 / ((1.0 + Y(n)) * ln2B);
            if (barrier)
                d += mu / (Y(n) - gamma_d2d);
            dw(n) = d;
            delta(n) = d * aux.q_d2d(n) * aux.q_d2d(n);
        }

        gV.resize(V.rows(), K);
        const Eigen::VectorXcd omega_c = omega.cast<std::complex<double>>();
        const Eigen::VectorXcd delta_c = delta.cast<std::complex<double>>();
        for (int b = 0; b < B; ++b) {
            const int c0 = b * M;
            gV.middleCols(c0, M).noalias() =
                -(ch.bs_to_cell[b] * (omega_c.asDiagonal() * S.middleCols(c0, M)));
            if (D > 0)
                gV.middleCols(c0, M).noalias() -=
                    ch.bs_to_d2d[b] * (delta_c.asDiagonal() * W.middleCols(c0, M));
            for (int m = 0; m < M; ++m) {
                const int k = c0 + m;
                // own desired term, plus the self term the block product
                // wrongly counted as interference
                const std::complex<double> coeff =
                    cw(k) * aux.q_cell(k) + omega(k) * S(k, k);
                gV.col(k) += coeff * ch.bs_to_cell[b].col(k);
            }
        }

        gu.setZero(D);
        if (D > 0) {
            gu -= 2.0 * u.cwiseProduct(dd_pow * delta);
            if (K > 0)
                gu -= 2.0 * u.cwiseProduct(dc_pow_t.transpose() * omega);
            for (int n = 0; n < D; ++n) {
                const int mate = ch.partner[n];
                gu(tx[n]) += 2.0 * dw(n) * aux.q_d2d(n) * desired_amp(n);
                gu(n) -= 2.0 * u(n) * delta(n) * noise.beta;
                // a pair's cross-direction gain is not interference
                gu(mate) += 2.0 * u(mate) * delta(n) * dd_pow(mate, n);
            }
        }
    }
};

// Scale every beamformer of an overweight BS back onto its power ball and
// clamp amplitudes into their box.
inline void project_feasible(Eigen::MatrixXcd& V, Eigen::VectorXd& u, int users_per_cell,
                             double bs_power, const Eigen::VectorXd& u_cap)
{
    const int B = users_per_cell > 0 ? static_cast<int>(V.cols()) / users_per_cell : 0;
    for (int b = 0; b < B; ++b) {
        auto block = V.middleCols(b * users_per_cell, users_per_cell);
        const double s = block.squaredNorm();
        if (s > bs_power)
            block *= std::sqrt(bs_power / s);
    }
    u = u.cwiseMax(0.0).cwiseMin(u_cap);
}

struct InnerOutcome {
    double objective = 0.0;
    bool ascended = false; // at least one accepted step
    bool warning = false;  // iteration cap reached without any ascent
};

// Inner subproblem: maximize the transformed objective over (V, u) for fixed
// auxiliaries. Spectral (Barzilai-Borwein) step sizes with Armijo
// backtracking; every accepted step strictly improves, so the result never
// falls below the warm start.
inline InnerOutcome solve_inner_impl(FpWorkspace& ws, const AuxiliaryVars& aux,
                                     const SolverConfig& cfg, Eigen::MatrixXcd& V,
                                     Eigen::VectorXd& u, const Eigen::VectorXd& u_cap)
{
    double f = ws.eval_transformed(V, u, aux);
    if (!std::isfinite(f))
        throw std::invalid_argument("solve_inner: infeasible warm start");

    Eigen::MatrixXcd gV, gV_prev, Vc;
    Eigen::VectorXd gu, gu_prev, uc;
    double t = 1.0;
    bool have_prev = false;
    Eigen::MatrixXcd V_prev;
    Eigen::VectorXd u_prev;
    bool accepted_any = false;
    int it = 0;

    for (; it < cfg.max_inner_iters; ++it) {
        ws.gradient(V, u, aux, gV, gu);

        // stationarity: unit-step projected gradient
        Vc = V + gV;
        uc = u + gu;
        project_feasible(Vc, uc, ws.M, cfg.bs_power, u_cap);
        const double pg = std::sqrt((Vc - V).squaredNorm() + (uc - u).squaredNorm());
        if (pg <= cfg.inner_grad_tol * (1.0 + std::abs(f)))
            break;

        if (have_prev) {
            // BB1 step for ascent: <s,s> / <s, -y>, y = g - g_prev, in the
            // metric of the step update (V += t gV, u += t gu)
            const double ss = (V - V_prev).squaredNorm() + (u - u_prev).squaredNorm();
            const double sy =
                ((V - V_prev).conjugate().cwiseProduct(gV - gV_prev)).sum().real() +
                (u - u_prev).dot(gu - gu_prev);
            if (sy < 0.0 && std::isfinite(sy))
                t = std::min(std::max(ss / (-sy), 1e-12), 1e8);
        }
        V_prev = V;
        u_prev = u;
        gV_prev = gV;
        gu_prev = gu;

        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            Vc = V + t * gV;
            uc = u + t * gu;
            project_feasible(Vc, uc, ws.M, cfg.bs_power, u_cap);
            const double dirderiv =
                2.0 * (gV.conjugate().cwiseProduct(Vc - V)).sum().real() + gu.dot(uc - u);
            if (dirderiv <= 0.0)
                break; // no ascent direction left after projection
            const double fc = ws.eval_transformed(Vc, uc, aux);
            if (fc >= f + 1e-4 * dirderiv) {
                V.swap(Vc);
                u.swap(uc);
                f = fc;
                accepted = true;
                accepted_any = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted)
            break;
        have_prev = true;
    }

    InnerOutcome outcome;
    outcome.objective = f;
    outcome.ascended = accepted_any;
    outcome.warning = (it >= cfg.max_inner_iters && !accepted_any);
    // leave the workspace caches at the returned point
    if (ws.eval_transformed(V, u, aux) == -std::numeric_limits<double>::infinity())
        throw std::logic_error("solve_inner: left the feasible domain"); // unreachable
    return outcome;
}

} // namespace detail

// Closed-form optimal auxiliaries for a fixed operating point.
inline AuxiliaryVars update_aux(const ChannelSet& ch, const BeamformerSet& V,
                                const Eigen::VectorXd& p, const NoiseModel& noise,
                                D2dSignalPower convention = D2dSignalPower::Partner)
{
    detail::check_dimensions(ch, V, p);
    detail::FpWorkspace ws(ch, noise, convention);
    ws.load_point(V.v, p.cwiseSqrt());
    return ws.optimal_aux();
}

// Transformed objective f_FR at fixed auxiliaries; -inf when any log
// argument is non-positive (an infeasible step for the line search).
inline double transformed_objective(const ChannelSet& ch, const BeamformerSet& V,
                                    const Eigen::VectorXd& p, const AuxiliaryVars& aux,
                                    const NoiseModel& noise,
                                    D2dSignalPower convention = D2dSignalPower::Partner)
{
    detail::check_dimensions(ch, V, p);
    if (aux.q_cell.size() != ch.num_cellular() || aux.q_d2d.size() != ch.num_transceivers())
        throw std::invalid_argument("transformed_objective: auxiliary size mismatch");
    detail::FpWorkspace ws(ch, noise, convention);
    return ws.eval_transformed(V.v, p.cwiseSqrt(), aux);
}

// Feasible starting point: matched-filter beams at equal per-user power
// splitting the full BS budget, and all D2D transmitters at their cap.
inline std::pair<BeamformerSet, Eigen::VectorXd> initialize(const ChannelSet& ch,
                                                            const SolverConfig& cfg, Rng& rng)
{
    cfg.validate();
    const int M = ch.users_per_cell;
    BeamformerSet V = BeamformerSet::zero(ch.num_antennas, ch.num_cells, M);
    const double per_user = M > 0 ? std::sqrt(cfg.bs_power / M) : 0.0;
    for (int b = 0; b < ch.num_cells; ++b)
        for (int m = 0; m < M; ++m) {
            const int k = b * M + m;
            Eigen::VectorXcd g = ch.bs_to_cell[b].col(k);
            double nrm = g.norm();
            if (!(nrm > 0.0)) {
                for (Eigen::Index i = 0; i < g.size(); ++i)
                    g(i) = rng.cgaussian();
                nrm = g.norm();
            }
            V.v.col(k) = (per_user / nrm) * g;
        }
    return {std::move(V), cfg.power_caps(ch.num_transceivers())};
}

// One inner convex subproblem, exposed for testing. Returns a feasible point
// whose transformed objective is at least the warm start's.
inline std::pair<BeamformerSet, Eigen::VectorXd> solve_inner(
    const ChannelSet& ch, const AuxiliaryVars& aux, const NoiseModel& noise,
    const SolverConfig& cfg, const BeamformerSet& warm_V, const Eigen::VectorXd& warm_p,
    bool* warning = nullptr)
{
    detail::check_dimensions(ch, warm_V, warm_p);
    cfg.validate();
    detail::FpWorkspace ws(ch, noise, cfg.signal_power);
    if (cfg.constraint_mode == ConstraintMode::PowerAndQos) {
        ws.barrier = true;
        ws.gamma_cell = cfg.gamma_cell;
        ws.gamma_d2d = cfg.gamma_d2d;
        ws.mu = cfg.qos_barrier_weight;
    }
    Eigen::MatrixXcd V = warm_V.v;
    Eigen::VectorXd u = warm_p.cwiseSqrt();
    const Eigen::VectorXd u_cap = cfg.power_caps(ws.D).cwiseSqrt();
    const detail::InnerOutcome outcome = detail::solve_inner_impl(ws, aux, cfg, V, u, u_cap);
    if (warning)
        *warning = outcome.warning;
    if (!outcome.ascended)
        return {warm_V, warm_p}; // nothing improved on the warm start
    BeamformerSet out;
    out.users_per_cell = ch.users_per_cell;
    out.v = std::move(V);
    return {std::move(out), u.cwiseAbs2()};
}

namespace detail {

struct ChainOutcome {
    double rate = 0.0;
    int iterations = 0;
    bool converged = false;
    bool inner_warning = false;
    bool qos_unreachable = false;
    std::vector<double> trace;
};

// One alternation chain from the given starting point. Each outer iteration
// refreshes the auxiliaries, solves the inner subproblem, then tries to
// over-relax along the outer displacement (adopted only when the exact
// sum-rate improves, so the trace stays nondecreasing). The over-relaxation
// is skipped in barrier mode where a long step could leave the QoS region.
inline ChainOutcome run_fp_chain(FpWorkspace& ws, const SolverConfig& cfg,
                                 Eigen::MatrixXcd& V, Eigen::VectorXd& u,
                                 const Eigen::VectorXd& u_cap, double epsilon,
                                 int max_outer, bool qos)
{
    ChainOutcome out;
    double f = ws.sum_rate(V, u);
    out.trace.push_back(f);

    bool qos_active = false;
    int bootstrap_left = 25;
    auto qos_feasible = [&]() {
        // strict feasibility of the surrogate constraints at optimal aux,
        // where the transform arguments equal the SINRs
        for (int k = 0; k < ws.K; ++k)
            if (std::norm(ws.S(k, k)) / (ws.Ic(k) + ws.noise.sigma2) <= cfg.gamma_cell)
                return false;
        for (int n = 0; n < ws.D; ++n)
            if (ws.p(ws.tx[n]) * ws.desired_amp(n) * ws.desired_amp(n) /
                    (ws.Id(n) + ws.noise.beta * ws.p(n) + ws.noise.sigma2) <=
                cfg.gamma_d2d)
                return false;
        return true;
    };

    Eigen::MatrixXcd V_from, V_cand;
    Eigen::VectorXd u_from, u_cand;
    while (out.iterations < max_outer) {
        ++out.iterations;
        if (qos && !qos_active) {
            if (qos_feasible()) {
                ws.barrier = true;
                ws.gamma_cell = cfg.gamma_cell;
                ws.gamma_d2d = cfg.gamma_d2d;
                ws.mu = cfg.qos_barrier_weight;
                qos_active = true;
            } else if (bootstrap_left-- <= 0) {
                out.qos_unreachable = true;
                break;
            }
        }
        const AuxiliaryVars aux = ws.optimal_aux();
        V_from = V;
        u_from = u;
        const InnerOutcome inner = solve_inner_impl(ws, aux, cfg, V, u, u_cap);
        out.inner_warning = out.inner_warning || inner.warning;
        double f_new = ws.sum_rate(V, u);
        if (!ws.barrier) {
            bool cache_stale = false;
            for (double omega = 2.0; omega <= 64.0; omega *= 2.0) {
                V_cand = V_from + omega * (V - V_from);
                u_cand = u_from + omega * (u - u_from);
                project_feasible(V_cand, u_cand, ws.M, cfg.bs_power, u_cap);
                const double f_cand = ws.sum_rate(V_cand, u_cand);
                if (!(f_cand > f_new)) {
                    cache_stale = true; // caches hold the rejected candidate
                    break;
                }
                V = V_cand;
                u = u_cand;
                f_new = f_cand;
            }
            if (cache_stale)
                ws.load_point(V, u);
        }
        out.trace.push_back(f_new);
        const double gain = std::abs(f_new - f);
        f = f_new;
        if (gain <= epsilon && !(qos && !qos_active)) {
            out.converged = true;
            break;
        }
    }
    out.rate = f;
    // leave the caches at the final point for the caller
    ws.load_point(V, u);
    return out;
}

} // namespace detail

// Iterative FP algorithm: alternate the closed-form auxiliary update with
// the inner subproblem until the objective improvement drops below epsilon.
// The recorded trace holds the objective at the optimal auxiliaries, which
// equals the exact sum-rate, so the trace is nondecreasing and its last
// entry is the achieved rate. Deterministic given the channel set.
//
// The alternation can stall on stationary points where one side of the
// network is switched off (a zeroed power pins its auxiliary at zero). To
// land near the global optimum the solver therefore explores a fixed set of
// starts: the matched-filter full-power point, a low-BS-power variant and a
// low-D2D-power variant; the exploration chains run under a loosened
// threshold and the best endpoint is polished at full accuracy.
inline SolveResult run_fp(const ChannelSet& ch, const NoiseModel& noise,
                          const SolverConfig& cfg)
{
    cfg.validate();
    noise.validate();
    detail::FpWorkspace ws(ch, noise, cfg.signal_power);
    const Eigen::VectorXd u_cap = cfg.power_caps(ws.D).cwiseSqrt();
    const bool qos = (cfg.constraint_mode == ConstraintMode::PowerAndQos);

    Rng fallback_rng(0x5eedf011baccULL); // only consumed if a channel vector is zero
    auto [V0, p0] = initialize(ch, cfg, fallback_rng);
    const Eigen::MatrixXcd V_init = std::move(V0.v);
    const Eigen::VectorXd u_init = p0.cwiseSqrt();

    Eigen::MatrixXcd V = V_init;
    Eigen::VectorXd u = u_init;
    detail::ChainOutcome best =
        detail::run_fp_chain(ws, cfg, V, u, u_cap, cfg.epsilon, cfg.max_outer_iters, qos);

    if (!qos) {
        // exploration starts; cheap chains, winner polished below
        const double eps_explore = std::max(cfg.epsilon * 10.0, 1e-4);
        const int cap_explore = std::min(cfg.max_outer_iters, 40);
        std::vector<std::pair<Eigen::MatrixXcd, Eigen::VectorXd>> starts;
        starts.emplace_back(0.1 * V_init, u_init); // 1% BS power favors the D2D side
        if (ws.D > 0)
            starts.emplace_back(V_init, 0.1 * u_init); // 1% D2D power favors cellular
        for (auto& [Vs, us] : starts) {
            detail::ChainOutcome explored =
                detail::run_fp_chain(ws, cfg, Vs, us, u_cap, eps_explore, cap_explore, false);
            if (explored.rate <= best.rate * 0.995)
                continue;
            const int budget = std::max(cfg.max_outer_iters - explored.iterations, 1);
            detail::ChainOutcome polished =
                detail::run_fp_chain(ws, cfg, Vs, us, u_cap, cfg.epsilon, budget, false);
            if (polished.rate > best.rate) {
                best = explored;
                best.rate = polished.rate;
                best.converged = polished.converged;
                best.inner_warning = best.inner_warning || polished.inner_warning;
                best.iterations += polished.iterations;
                best.trace.insert(best.trace.end(), polished.trace.begin() + 1,
                                  polished.trace.end());
                V = std::move(Vs);
                u = std::move(us);
            }
        }

        // Direction pruning. A pair can rate higher with one side silent
        // (the receive side sheds its residual self-interference), but a
        // zeroed power pins its auxiliary at zero, so the alternation never
        // crosses into that mode on its own. Zeroing usually costs rate
        // before the rest of the network re-equilibrates, so candidates are
        // judged by a short trial chain, not by the immediate rate.
        for (int round = 0; round < 3 && ws.D > 0; ++round) {
            // the returned chain sequence stays within the outer budget
            const int remaining = cfg.max_outer_iters - best.iterations;
            if (remaining < 45)
                break;
            ws.load_point(V, u);
            const double f_cur = ws.sum_rate_loaded();
            std::vector<std::pair<double, int>> candidates;
            for (int j = 0; j < ws.D; ++j) {
                if (u(j) == 0.0)
                    continue;
                const double saved = u(j);
                u(j) = 0.0;
                candidates.emplace_back(ws.sum_rate(V, u), j);
                u(j) = saved;
            }
            std::sort(candidates.rbegin(), candidates.rend());
            if (candidates.size() > 3)
                candidates.resize(3);

            double f_adopt = f_cur;
            Eigen::MatrixXcd V_adopt;
            Eigen::VectorXd u_adopt;
            detail::ChainOutcome adopt;
            for (const auto& [immediate, j] : candidates) {
                Eigen::MatrixXcd Vt = V;
                Eigen::VectorXd ut = u;
                ut(j) = 0.0;
                detail::ChainOutcome trial =
                    detail::run_fp_chain(ws, cfg, Vt, ut, u_cap, eps_explore, 25, false);
                if (trial.rate > f_adopt) {
                    f_adopt = trial.rate;
                    V_adopt = std::move(Vt);
                    u_adopt = std::move(ut);
                    adopt = std::move(trial);
                }
            }
            if (!(f_adopt > f_cur)) {
                ws.load_point(V, u); // caches hold a rejected trial
                break;
            }
            V = std::move(V_adopt);
            u = std::move(u_adopt);
            const int budget = remaining - adopt.iterations;
            detail::ChainOutcome settled =
                detail::run_fp_chain(ws, cfg, V, u, u_cap, cfg.epsilon, budget, false);
            best.rate = settled.rate;
            best.converged = settled.converged;
            best.inner_warning = best.inner_warning || settled.inner_warning;
            best.iterations += adopt.iterations + settled.iterations;
            // keep the reported trace a nondecreasing incumbent curve: the
            // adopted restart may dip below the previous end before winning
            for (double v : adopt.trace)
                best.trace.push_back(std::max(v, best.trace.back()));
            for (double v : settled.trace)
                best.trace.push_back(std::max(v, best.trace.back()));
        }
    }

    SolveResult res;
    res.V.users_per_cell = ch.users_per_cell;
    res.V.v = std::move(V);
    res.p = u.cwiseAbs2();
    res.objective_trace = std::move(best.trace);
    res.iterations = best.iterations;
    res.converged = best.converged;
    res.inner_warning = best.inner_warning;
    if (best.qos_unreachable)
        res.status = SolveStatus::Infeasible;
    else
        res.status = best.converged ? SolveStatus::Converged : SolveStatus::MaxIterations;
    res.final_sum_rate = network_sum_rate(ch, res.V, res.p, noise, cfg.signal_power);
    res.rates = link_rates(ch, res.V, res.p, noise, cfg.signal_power);

    const double tol = 1.0 - 1e-9;
    for (int b = 0; b < ch.num_cells; ++b)
        for (int m = 0; m < ch.users_per_cell; ++m)
            if (cellular_sinr(ch, res.V, res.p, noise, b, m) < cfg.gamma_cell * tol)
                ++res.qos_violations;
    for (int n = 0; n < ch.num_transceivers(); ++n)
        if (d2d_sinr(ch, res.V, res.p, noise, n, cfg.signal_power) < cfg.gamma_d2d * tol)
            ++res.qos_violations;
    return res;
}

} // namespace fdd2d

#endif

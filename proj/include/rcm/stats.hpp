// Copyright 2026 The rcm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Averages, fits and distribution summaries over collision trajectories:
// time averages along one history, ensemble averages over many seeded
// histories, exponential-relaxation fits, histograms and two-sample tests,
// and a Monte Carlo reference built from Haar-random three-qubit states.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "rcm/collision.hpp"
#include "rcm/errors.hpp"
#include "rcm/haar.hpp"
#include "rcm/observables.hpp"
#include "rcm/random.hpp"

namespace rcm {

/// Values indexed by step t = 0..T.
using Series = std::vector<double>;

/// Running average (1/(t+1)) * sum_{t' <= t} x[t'].
inline Series time_average(std::span<const double> x) {
    if (x.empty()) {
        throw UsageError("time_average: empty series");
    }
    Series out(x.size());
    double sum = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
        sum += x[t];
        out[t] = sum / static_cast<double>(t + 1);
    }
    return out;
}

/// Average subsystem purity of a Haar-random pure state on C^mu (x) C^nu.
inline double lubkin(int mu, int nu) {
    if (mu < 1 || nu < 1) {
        throw UsageError("lubkin: dimensions must be positive");
    }
    return static_cast<double>(mu + nu) / static_cast<double>(mu * nu + 1);
}

// ---------------------------------------------------------------------------
// Sample moments

struct Moments {
    std::size_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;  // sum of squared deviations

    void add(double x) {
        ++n;
        const double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
    }

    /// Chan et al. pairwise combination.
    void merge(const Moments &o) {
        if (o.n == 0) {
            return;
        }
        if (n == 0) {
            *this = o;
            return;
        }
        const double total = static_cast<double>(n + o.n);
        const double d = o.mean - mean;
        mean += d * static_cast<double>(o.n) / total;
        m2 += o.m2 + d * d * static_cast<double>(n) * static_cast<double>(o.n) / total;
        n += o.n;
    }

    [[nodiscard]] double sample_variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
    [[nodiscard]] double population_std() const { return n > 0 ? std::sqrt(m2 / static_cast<double>(n)) : 0.0; }
    [[nodiscard]] double std_error() const {
        return n > 1 ? std::sqrt(sample_variance() / static_cast<double>(n)) : 0.0;
    }
};

inline Moments moments(std::span<const double> x) {
    Moments m;
    for (double v : x) {
        m.add(v);
    }
    return m;
}

// ---------------------------------------------------------------------------
// Observables selectable for ensembles, histograms and the oracle

struct NamedObservable {
    std::string name;
    std::function<double(const ObservableRecord &)> select;
};

/// The record fields plus the pairwise concurrences sqrt(tangle).
inline const std::vector<NamedObservable> &standard_observables() {
    static const std::vector<NamedObservable> list = {
        {"purity", [](const ObservableRecord &r) { return r.purity; }},
        {"tangle01", [](const ObservableRecord &r) { return r.tangle01; }},
        {"tangle02", [](const ObservableRecord &r) { return r.tangle02; }},
        {"tangle12", [](const ObservableRecord &r) { return r.tangle12; }},
        {"tau0_rest", [](const ObservableRecord &r) { return r.tau0_rest; }},
        {"tau1_rest", [](const ObservableRecord &r) { return r.tau1_rest; }},
        {"tau2_rest", [](const ObservableRecord &r) { return r.tau2_rest; }},
        {"three_tangle", [](const ObservableRecord &r) { return r.three_tangle; }},
        {"concurrence01", [](const ObservableRecord &r) { return std::sqrt(r.tangle01); }},
        {"concurrence02", [](const ObservableRecord &r) { return std::sqrt(r.tangle02); }},
        {"concurrence12", [](const ObservableRecord &r) { return std::sqrt(r.tangle12); }},
    };
    return list;
}

inline const NamedObservable &find_observable(std::string_view name) {
    for (const auto &o : standard_observables()) {
        if (o.name == name) {
            return o;
        }
    }
    throw UsageError("unknown observable '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Ensemble averages

struct EnsembleConfig {
    Seed seed;
    int n = 10000;
    int steps = 40;
    CollisionPolicy policy = CollisionPolicy::random();
    std::string initial = "product";
    Sampler sampler = Sampler::hurwitz;
    int workers = 1;
};

struct EnsembleSummary {
    std::string observable_name;
    Series mean;
    Series std_error;
    int n_trajectories = 0;
};

struct EnsembleRun {
    std::vector<EnsembleSummary> summaries;
    std::vector<ObservableRecord> final_records;  // record at t = steps, by trajectory index
};

namespace detail {

// Trajectories are grouped into fixed blocks; block results are merged in
// block order, so sums are bit-identical for any worker count.
inline constexpr int kEnsembleBlock = 64;

template <class Work>
void for_each_block(int n_blocks, int workers, Work &&work) {
    if (workers <= 1 || n_blocks <= 1) {
        for (int b = 0; b < n_blocks; ++b) {
            work(b);
        }
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    const int n_threads = std::min(workers, n_blocks);
    for (int w = 0; w < n_threads; ++w) {
        pool.emplace_back([&] {
            for (int b = next++; b < n_blocks; b = next++) {
                if (failed) {
                    return;
                }
                try {
                    work(b);
                } catch (...) {
                    if (!failed.exchange(true)) {
                        failure = std::current_exception();
                    }
                    return;
                }
            }
        });
    }
    for (auto &t : pool) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

}  // namespace detail

/// Runs cfg.n independent trajectories (trajectory k draws from child
/// stream k of cfg.seed) and returns pointwise mean and standard error of
/// each observable, plus every trajectory's final record.
inline EnsembleRun run_ensemble(const EnsembleConfig &cfg, const std::vector<NamedObservable> &observables) {
    if (cfg.n < 2) {
        throw UsageError("ensemble needs at least 2 trajectories");
    }
    if (cfg.steps < 0) {
        throw UsageError("steps must be non-negative");
    }
    const StateVector initial = named_initial(cfg.initial);
    const RandomStream master(cfg.seed);
    const std::size_t n_obs = observables.size();
    const std::size_t n_t = static_cast<std::size_t>(cfg.steps) + 1;
    const int n_blocks = (cfg.n + detail::kEnsembleBlock - 1) / detail::kEnsembleBlock;

    std::vector<std::vector<Moments>> block_moments(static_cast<std::size_t>(n_blocks));
    EnsembleRun run;
    run.final_records.resize(static_cast<std::size_t>(cfg.n));

    detail::for_each_block(n_blocks, cfg.workers, [&](int b) {
        std::vector<Moments> acc(n_obs * n_t);
        const int begin = b * detail::kEnsembleBlock;
        const int end = std::min(cfg.n, begin + detail::kEnsembleBlock);
        for (int k = begin; k < end; ++k) {
            RandomStream rng = master.child(static_cast<std::uint64_t>(k));
            const Trajectory traj = run_trajectory(initial, cfg.policy, cfg.steps, rng, cfg.sampler, cfg.initial);
            for (std::size_t t = 0; t < n_t; ++t) {
                for (std::size_t o = 0; o < n_obs; ++o) {
                    acc[o * n_t + t].add(observables[o].select(traj.records[t]));
                }
            }
            run.final_records[static_cast<std::size_t>(k)] = traj.records.back();
        }
        block_moments[static_cast<std::size_t>(b)] = std::move(acc);
    });

    std::vector<Moments> total(n_obs * n_t);
    for (const auto &block : block_moments) {
        for (std::size_t i = 0; i < total.size(); ++i) {
            total[i].merge(block[i]);
        }
    }
    for (std::size_t o = 0; o < n_obs; ++o) {
        EnsembleSummary s;
        s.observable_name = observables[o].name;
        s.n_trajectories = cfg.n;
        s.mean.resize(n_t);
        s.std_error.resize(n_t);
        for (std::size_t t = 0; t < n_t; ++t) {
            s.mean[t] = total[o * n_t + t].mean;
            s.std_error[t] = total[o * n_t + t].std_error();
        }
        run.summaries.push_back(std::move(s));
    }
    return run;
}

inline EnsembleSummary ensemble_average(const NamedObservable &observable, const EnsembleConfig &cfg) {
    return run_ensemble(cfg, {observable}).summaries.front();
}

// ---------------------------------------------------------------------------
// Exponential relaxation fits

struct FitWindow {
    int t_start = 1;
    int t_end = 15;
};

struct FitResult {
    double rate = 0.0;       // lambda in x(t) ~ asymptote + amplitude * exp(-lambda t)
    double amplitude = 0.0;  // signed
    double asymptote = 0.0;
    FitWindow window;        // points actually used
    double residual_rms = 0.0;
};

/// Least-squares fit of ln|x[t] - asymptote| = c - rate * t over `window`.
///
/// Without standard errors every point in the window is used with equal
/// weight. With standard errors (an ensemble mean) the window is cut at the
/// first point whose deviation from the asymptote is not resolved at two
/// standard errors, and each log residual is weighted by (dev / se)^2, the
/// inverse variance of ln|dev|; the relative error is floored at 1% so exact
/// points cannot dominate.
///
/// Throws NumericalError when fewer than three points are usable or when the
/// deviation changes sign inside the window.
inline FitResult exp_fit(std::span<const double> x, double asymptote, FitWindow window,
                         std::optional<std::span<const double>> std_error = std::nullopt) {
    if (window.t_start < 0 || window.t_start >= window.t_end ||
        static_cast<std::size_t>(window.t_end) >= x.size()) {
        throw UsageError("exp_fit: window must satisfy 0 <= t_start < t_end <= T");
    }
    if (std_error && std_error->size() != x.size()) {
        throw UsageError("exp_fit: standard-error series has the wrong length");
    }
    std::vector<double> ts;
    std::vector<double> ys;
    std::vector<double> ws;
    double sign = 0.0;
    for (int t = window.t_start; t <= window.t_end; ++t) {
        const auto ti = static_cast<std::size_t>(t);
        const double dev = x[ti] - asymptote;
        if (!std::isfinite(dev)) {
            throw NumericalError("exp_fit: non-finite value at t=" + std::to_string(t));
        }
        double weight = 1.0;
        if (std_error) {
            const double se = (*std_error)[ti];
            if (std::abs(dev) <= 2.0 * se) {
                break;
            }
            const double rel = se / std::abs(dev);
            weight = 1.0 / std::max(rel * rel, 1e-4);
        }
        if (dev == 0.0) {
            throw NumericalError("exp_fit: series equals the asymptote at t=" + std::to_string(t) +
                                 "; use a shorter window");
        }
        const double s = dev > 0.0 ? 1.0 : -1.0;
        if (sign == 0.0) {
            sign = s;
        } else if (s != sign) {
            throw NumericalError("exp_fit: deviation from the asymptote changes sign at t=" + std::to_string(t) +
                                 "; use a shorter window");
        }
        ts.push_back(static_cast<double>(t));
        ys.push_back(std::log(std::abs(dev)));
        ws.push_back(weight);
    }
    if (ts.size() < 3) {
        throw NumericalError("exp_fit: fewer than 3 usable points in the window");
    }
    double sw = 0.0;
    double st = 0.0;
    double sy = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        sw += ws[i];
        st += ws[i] * ts[i];
        sy += ws[i] * ys[i];
    }
    const double tbar = st / sw;
    const double ybar = sy / sw;
    double stt = 0.0;
    double sty = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        stt += ws[i] * (ts[i] - tbar) * (ts[i] - tbar);
        sty += ws[i] * (ts[i] - tbar) * (ys[i] - ybar);
    }
    const double slope = sty / stt;
    const double intercept = ybar - slope * tbar;

    FitResult fit;
    fit.rate = -slope;
    fit.amplitude = sign * std::exp(intercept);
    fit.asymptote = asymptote;
    fit.window = {static_cast<int>(ts.front()), static_cast<int>(ts.back())};
    double ss = 0.0;
    for (double t : ts) {
        const double model = asymptote + fit.amplitude * std::exp(-fit.rate * t);
        const double r = x[static_cast<std::size_t>(t)] - model;
        ss += r * r;
    }
    fit.residual_rms = std::sqrt(ss / static_cast<double>(ts.size()));
    return fit;
}

// ---------------------------------------------------------------------------
// Histograms and two-sample tests

struct Histogram {
    std::vector<double> bin_edges;
    std::vector<long long> counts;
    double mean = 0.0;
    double std = 0.0;  // population standard deviation

    [[nodiscard]] long long total() const {
        long long s = 0;
        for (auto c : counts) {
            s += c;
        }
        return s;
    }
};

/// Equal-width histogram on [lo, hi]. Samples outside the range are counted
/// in the nearest edge bin so that the counts always sum to the sample count.
inline Histogram histogram(std::span<const double> samples, int bins, double lo, double hi) {
    if (samples.empty()) {
        throw UsageError("histogram: no samples");
    }
    if (bins < 1) {
        throw UsageError("histogram: need at least one bin");
    }
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
        throw UsageError("histogram: invalid range");
    }
    Histogram h;
    h.bin_edges.resize(static_cast<std::size_t>(bins) + 1);
    for (int i = 0; i <= bins; ++i) {
        h.bin_edges[static_cast<std::size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) / bins;
    }
    h.counts.assign(static_cast<std::size_t>(bins), 0);
    const double width = (hi - lo) / bins;
    for (double x : samples) {
        auto b = static_cast<long long>(std::floor((x - lo) / width));
        b = std::clamp<long long>(b, 0, bins - 1);
        // Settle rounding at bin boundaries against the stored edges.
        if (b > 0 && x < h.bin_edges[static_cast<std::size_t>(b)]) {
            --b;
        } else if (b < bins - 1 && x >= h.bin_edges[static_cast<std::size_t>(b) + 1]) {
            ++b;
        }
        ++h.counts[static_cast<std::size_t>(b)];
    }
    const Moments m = moments(samples);
    h.mean = m.mean;
    h.std = m.population_std();
    return h;
}

struct TestResult {
    double statistic = 0.0;
    double dof = 0.0;
    double p_value = 1.0;
};

/// Chi-square test that two histograms with identical binning come from the
/// same distribution (unequal sample sizes allowed).
inline TestResult chi_square_homogeneity(const Histogram &a, const Histogram &b) {
    if (a.bin_edges != b.bin_edges) {
        throw UsageError("chi_square_homogeneity: histograms use different bins");
    }
    const auto na = static_cast<double>(a.total());
    const auto nb = static_cast<double>(b.total());
    const double ka = std::sqrt(nb / na);
    const double kb = std::sqrt(na / nb);
    double chi2 = 0.0;
    int used = 0;
    for (std::size_t i = 0; i < a.counts.size(); ++i) {
        const auto ca = static_cast<double>(a.counts[i]);
        const auto cb = static_cast<double>(b.counts[i]);
        if (ca + cb == 0.0) {
            continue;
        }
        const double d = ka * ca - kb * cb;
        chi2 += d * d / (ca + cb);
        ++used;
    }
    TestResult r;
    r.statistic = chi2;
    r.dof = used - 1;
    r.p_value = r.dof > 0 ? boost::math::gamma_q(r.dof / 2.0, chi2 / 2.0) : 1.0;
    return r;
}

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value.
inline TestResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) {
        throw UsageError("ks_two_sample: empty sample");
    }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const auto na = static_cast<double>(a.size());
    const auto nb = static_cast<double>(b.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) {
            ++i;
        }
        while (j < b.size() && b[j] <= x) {
            ++j;
        }
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    const double ne = std::sqrt(na * nb / (na + nb));
    const double lambda = (ne + 0.12 + 0.11 / ne) * d;
    // Kolmogorov survival function.
    double p = 0.0;
    if (lambda < 0.2) {
        p = 1.0;
    } else {
        double sign = 1.0;
        for (int k = 1; k <= 100; ++k) {
            const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
            p += term;
            if (std::abs(term) < 1e-12) {
                break;
            }
            sign = -sign;
        }
        p = std::clamp(2.0 * p, 0.0, 1.0);
    }
    return TestResult{d, 0.0, p};
}

// ---------------------------------------------------------------------------
// Haar-random reference states

struct OracleEntry {
    std::string name;
    double mean = 0.0;
    double std = 0.0;
    double std_error = 0.0;
};

struct OracleSummary {
    int n = 0;
    std::vector<OracleEntry> entries;
    std::vector<ObservableRecord> samples;

    [[nodiscard]] const OracleEntry &get(std::string_view name) const {
        for (const auto &e : entries) {
            if (e.name == name) {
                return e;
            }
        }
        throw UsageError("oracle has no entry '" + std::string(name) + "'");
    }
};

/// Offset of the oracle's child streams, keeping them disjoint from the
/// trajectory streams of an ensemble sharing the same seed.
inline constexpr std::uint64_t kOracleStreamOffset = 1ULL << 62;

/// Monte Carlo statistics of every standard observable over n Haar-random
/// pure three-qubit states, plus the pooled pairwise tangle and concurrence
/// ("pair_tangle", "pair_concurrence") over all three pairs.
inline OracleSummary random_state_oracle(int n, Seed seed, int workers = 1) {
    if (n < 100) {
        throw UsageError("random_state_oracle: need at least 100 samples");
    }
    const RandomStream master(seed);
    OracleSummary out;
    out.n = n;
    out.samples.resize(static_cast<std::size_t>(n));
    const int n_blocks = (n + detail::kEnsembleBlock - 1) / detail::kEnsembleBlock;
    detail::for_each_block(n_blocks, workers, [&](int b) {
        const int begin = b * detail::kEnsembleBlock;
        const int end = std::min(n, begin + detail::kEnsembleBlock);
        for (int k = begin; k < end; ++k) {
            RandomStream rng = master.child(kOracleStreamOffset + static_cast<std::uint64_t>(k));
            out.samples[static_cast<std::size_t>(k)] = record(sample_state8(rng), 0);
        }
    });
    for (const auto &obs : standard_observables()) {
        Moments m;
        for (const auto &r : out.samples) {
            m.add(obs.select(r));
        }
        out.entries.push_back({obs.name, m.mean, m.population_std(), m.std_error()});
    }
    // Pooled pair statistics; the three pairs of one state are correlated, so
    // the standard error is taken from per-state pair averages.
    Moments tangle_avg;
    Moments conc_avg;
    Moments tangle_all;
    Moments conc_all;
    for (const auto &r : out.samples) {
        const double t[3] = {r.tangle01, r.tangle02, r.tangle12};
        double ts = 0.0;
        double cs = 0.0;
        for (double v : t) {
            tangle_all.add(v);
            conc_all.add(std::sqrt(v));
            ts += v;
            cs += std::sqrt(v);
        }
        tangle_avg.add(ts / 3.0);
        conc_avg.add(cs / 3.0);
    }
    out.entries.push_back({"pair_tangle", tangle_all.mean, tangle_all.population_std(), tangle_avg.std_error()});
    out.entries.push_back({"pair_concurrence", conc_all.mean, conc_all.population_std(), conc_avg.std_error()});
    return out;
}

/// Equilibrium value an ensemble observable relaxes to: Lubkin's purity for
/// purity and the one-vs-rest tangles (tau = 2 - 2P), the oracle mean for
/// everything else.
inline double equilibrium_value(std::string_view observable, const OracleSummary &oracle) {
    const double p = lubkin(2, 4);
    if (observable == "purity") {
        return p;
    }
    if (observable == "tau0_rest" || observable == "tau1_rest" || observable == "tau2_rest") {
        return 2.0 - 2.0 * p;
    }
    return oracle.get(observable).mean;
}

}  // namespace rcm

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

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "rcm/stats.hpp"
#include "test_util.hpp"

namespace rcm {
namespace {

Series synthetic(double rate, double amplitude, double asymptote, int steps) {
    Series x(static_cast<std::size_t>(steps) + 1);
    for (int t = 0; t <= steps; ++t) {
        x[static_cast<std::size_t>(t)] = asymptote + amplitude * std::exp(-rate * t);
    }
    return x;
}

TEST(TimeAverage, ConstantSeries) {
    const Series x(17, 0.25);
    for (double v : time_average(x)) {
        EXPECT_DOUBLE_EQ(v, 0.25);
    }
}

TEST(TimeAverage, TwoPoints) {
    const Series x = {1.0, 0.0};
    EXPECT_EQ(time_average(x), (Series{1.0, 0.5}));
}

TEST(TimeAverage, MatchesDirectSummation) {
    RandomStream rng(Seed{61});
    Series x(500);
    for (auto &v : x) {
        v = rng.normal();
    }
    const Series avg = time_average(x);
    for (std::size_t t : {0UL, 1UL, 77UL, 499UL}) {
        double sum = 0.0;
        for (std::size_t k = 0; k <= t; ++k) {
            sum += x[k];
        }
        EXPECT_NEAR(avg[t], sum / static_cast<double>(t + 1), 1e-12);
    }
}

TEST(TimeAverage, ConvergentSequenceKeepsItsLimit) {
    Series x(100000);
    for (std::size_t t = 0; t < x.size(); ++t) {
        x[t] = 2.0 / 3.0 + std::pow(0.7, static_cast<double>(t));
    }
    EXPECT_NEAR(time_average(x).back(), 2.0 / 3.0, 1e-4);
}

TEST(TimeAverage, EmptyInput) {
    EXPECT_THROW(time_average(Series{}), UsageError);
}

TEST(Lubkin, Values) {
    EXPECT_DOUBLE_EQ(lubkin(2, 4), 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(lubkin(1, 7), 1.0);
    EXPECT_DOUBLE_EQ(lubkin(2, 2), 0.8);
    EXPECT_THROW(lubkin(0, 2), UsageError);
}

TEST(MomentsTest, MergeEqualsSequentialAccumulation) {
    RandomStream rng(Seed{62});
    Moments all;
    Moments a;
    Moments b;
    for (int i = 0; i < 1000; ++i) {
        const double x = rng.normal() * 3.0 + 1.0;
        all.add(x);
        (i < 300 ? a : b).add(x);
    }
    a.merge(b);
    EXPECT_EQ(a.n, all.n);
    EXPECT_NEAR(a.mean, all.mean, 1e-12);
    EXPECT_NEAR(a.m2, all.m2, 1e-9);
    Moments empty;
    empty.merge(all);
    EXPECT_EQ(empty.mean, all.mean);
}

TEST(MomentsTest, KnownValues) {
    const std::vector<double> x = {1.0, 2.0, 3.0, 4.0};
    const Moments m = moments(x);
    EXPECT_DOUBLE_EQ(m.mean, 2.5);
    EXPECT_DOUBLE_EQ(m.sample_variance(), 5.0 / 3.0);
    EXPECT_DOUBLE_EQ(m.population_std(), std::sqrt(1.25));
    EXPECT_DOUBLE_EQ(m.std_error(), std::sqrt(5.0 / 12.0));
}

TEST(ExpFit, ExactExponentialRecovery) {
    const Series x = synthetic(0.36, 1.0 / 3.0, 2.0 / 3.0, 40);
    const FitResult f = exp_fit(x, 2.0 / 3.0, FitWindow{1, 15});
    EXPECT_NEAR(f.rate, 0.36, 1e-10);
    EXPECT_NEAR(f.amplitude, 1.0 / 3.0, 1e-10);
    EXPECT_EQ(f.asymptote, 2.0 / 3.0);
    EXPECT_EQ(f.window.t_start, 1);
    EXPECT_EQ(f.window.t_end, 15);
    EXPECT_LT(f.residual_rms, 1e-12);
}

TEST(ExpFit, ExactForEveryRateInRange) {
    for (int k = 1; k <= 40; ++k) {
        const double rate = 0.05 * k;
        for (double amp : {0.3, -0.2}) {
            // Keep |x - asymptote| >= e^-10 so it is resolved in x itself.
            const int t_end = std::min(15, static_cast<int>(10.0 / rate));
            const Series x = synthetic(rate, amp, 0.5, 20);
            const FitResult f = exp_fit(x, 0.5, FitWindow{1, t_end});
            EXPECT_NEAR(f.rate, rate, 1e-10) << "rate " << rate;
            EXPECT_NEAR(f.amplitude, amp, 1e-10);
            // With a zero asymptote nothing cancels and the full window works.
            const Series y = synthetic(rate, amp, 0.0, 20);
            EXPECT_NEAR(exp_fit(y, 0.0, FitWindow{1, 15}).rate, rate, 1e-10) << "rate " << rate;
        }
    }
}

TEST(ExpFit, ExactWithStandardErrorsSupplied) {
    const Series x = synthetic(0.7, -0.1, 0.4, 15);
    const Series se(x.size(), 0.0);
    const FitResult f = exp_fit(x, 0.4, FitWindow{0, 15}, std::span<const double>(se));
    EXPECT_NEAR(f.rate, 0.7, 1e-10);
    EXPECT_EQ(f.window.t_end, 15);
}

TEST(ExpFit, OnePercentRelativeNoise) {
    RandomStream rng(Seed{63});
    Moments rates;
    for (int trial = 0; trial < 200; ++trial) {
        Series x = synthetic(0.36, 1.0 / 3.0, 2.0 / 3.0, 15);
        for (std::size_t t = 0; t < x.size(); ++t) {
            const double dev = x[t] - 2.0 / 3.0;
            x[t] = 2.0 / 3.0 + dev * (1.0 + 0.01 * rng.normal());
        }
        const double rate = exp_fit(x, 2.0 / 3.0, FitWindow{1, 15}).rate;
        EXPECT_NEAR(rate, 0.36, 0.02);
        rates.add(rate);
    }
    EXPECT_NEAR(rates.mean, 0.36, 0.002);
}

TEST(ExpFit, TruncatesWhereTheSignalDropsUnderTheNoise) {
    // Absolute noise 1e-3 on every point: |dev| < 2e-3 from t ~ 14 on.
    RandomStream rng(Seed{64});
    Moments rates;
    for (int trial = 0; trial < 200; ++trial) {
        Series x = synthetic(0.36, 1.0 / 3.0, 2.0 / 3.0, 40);
        const Series se(x.size(), 1e-3);
        for (std::size_t t = 1; t < x.size(); ++t) {
            x[t] += 1e-3 * rng.normal();
        }
        const FitResult f = exp_fit(x, 2.0 / 3.0, FitWindow{1, 40}, std::span<const double>(se));
        EXPECT_LT(f.window.t_end, 20);
        EXPECT_NEAR(f.rate, 0.36, 0.03);
        rates.add(f.rate);
    }
    EXPECT_NEAR(rates.mean, 0.36, 0.005);
}

TEST(ExpFit, Errors) {
    const Series x = synthetic(0.36, 1.0 / 3.0, 2.0 / 3.0, 20);
    EXPECT_THROW(exp_fit(x, 2.0 / 3.0, FitWindow{5, 5}), UsageError);
    EXPECT_THROW(exp_fit(x, 2.0 / 3.0, FitWindow{1, 21}), UsageError);
    EXPECT_THROW(exp_fit(x, 2.0 / 3.0, FitWindow{-1, 10}), UsageError);
    // Deviation changes sign.
    Series flip = x;
    flip[6] = 2.0 / 3.0 - 0.01;
    EXPECT_THROW(exp_fit(flip, 2.0 / 3.0, FitWindow{1, 15}), NumericalError);
    // Only two points resolved above the noise.
    const Series se(x.size(), 0.06);
    EXPECT_THROW(exp_fit(x, 2.0 / 3.0, FitWindow{1, 15}, std::span<const double>(se)), NumericalError);
    // Point exactly at the asymptote.
    Series flat = x;
    flat[3] = 2.0 / 3.0;
    EXPECT_THROW(exp_fit(flat, 2.0 / 3.0, FitWindow{1, 15}), NumericalError);
    const Series short_se(3, 0.0);
    EXPECT_THROW(exp_fit(x, 2.0 / 3.0, FitWindow{1, 15}, std::span<const double>(short_se)), UsageError);
}

TEST(HistogramTest, AllEqualSamples) {
    const std::vector<double> x(100, 0.3);
    const Histogram h = histogram(x, 40, 0.0, 1.0);
    int occupied = 0;
    for (auto c : h.counts) {
        occupied += c > 0 ? 1 : 0;
    }
    EXPECT_EQ(occupied, 1);
    EXPECT_EQ(h.counts[12], 100);
    EXPECT_DOUBLE_EQ(h.mean, 0.3);
    EXPECT_NEAR(h.std, 0.0, 1e-15);
}

TEST(HistogramTest, EdgesCountsAndOutOfRangeSamples) {
    const std::vector<double> x = {-0.5, 0.0, 0.25, 0.5, 0.99, 1.0, 7.0};
    const Histogram h = histogram(x, 4, 0.0, 1.0);
    ASSERT_EQ(h.bin_edges.size(), 5U);
    ASSERT_EQ(h.counts.size(), 4U);
    EXPECT_DOUBLE_EQ(h.bin_edges[2], 0.5);
    EXPECT_EQ(h.counts, (std::vector<long long>{2, 1, 1, 3}));
    EXPECT_EQ(h.total(), static_cast<long long>(x.size()));
}

TEST(HistogramTest, UniformSamples) {
    RandomStream rng(Seed{65});
    std::vector<double> x(100000);
    for (auto &v : x) {
        v = rng.uniform();
    }
    const Histogram h = histogram(x, 40, 0.0, 1.0);
    const double se = h.std / std::sqrt(static_cast<double>(x.size()));
    EXPECT_NEAR(h.mean, 0.5, 3.0 * se);
    EXPECT_NEAR(h.std, std::sqrt(1.0 / 12.0), 0.002);
}

TEST(HistogramTest, Errors) {
    const std::vector<double> x = {0.1};
    EXPECT_THROW(histogram(std::vector<double>{}, 4, 0.0, 1.0), UsageError);
    EXPECT_THROW(histogram(x, 0, 0.0, 1.0), UsageError);
    EXPECT_THROW(histogram(x, 4, 1.0, 1.0), UsageError);
}

TEST(ChiSquare, PValueMatchesClosedFormForTwoDegreesOfFreedom) {
    // Three occupied bins -> 2 dof, where the survival function is exp(-x/2).
    Histogram a;
    Histogram b;
    a.bin_edges = b.bin_edges = {0.0, 1.0, 2.0, 3.0};
    a.counts = {100, 120, 80};
    b.counts = {110, 90, 100};
    const TestResult r = chi_square_homogeneity(a, b);
    double chi2 = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        const double d = static_cast<double>(a.counts[i] - b.counts[i]);
        chi2 += d * d / static_cast<double>(a.counts[i] + b.counts[i]);
    }
    EXPECT_NEAR(r.statistic, chi2, 1e-12);
    EXPECT_EQ(r.dof, 2.0);
    EXPECT_NEAR(r.p_value, std::exp(-chi2 / 2.0), 1e-12);
}

TEST(ChiSquare, SameAndDifferentDistributions) {
    RandomStream rng(Seed{66});
    std::vector<double> u1(20000);
    std::vector<double> u2(5000);
    std::vector<double> sq(20000);
    for (auto &v : u1) {
        v = rng.uniform();
    }
    for (auto &v : u2) {
        v = rng.uniform();
    }
    for (auto &v : sq) {
        v = rng.uniform() * rng.uniform();
    }
    const Histogram h1 = histogram(u1, 20, 0.0, 1.0);
    const Histogram h2 = histogram(u2, 20, 0.0, 1.0);
    const Histogram h3 = histogram(sq, 20, 0.0, 1.0);
    EXPECT_GT(chi_square_homogeneity(h1, h2).p_value, 0.001);
    EXPECT_LT(chi_square_homogeneity(h1, h3).p_value, 1e-10);
    EXPECT_NEAR(chi_square_homogeneity(h1, h1).p_value, 1.0, 1e-12);
    EXPECT_THROW(chi_square_homogeneity(h1, histogram(u2, 10, 0.0, 1.0)), UsageError);
}

TEST(KolmogorovSmirnov, SameAndDifferentDistributions) {
    RandomStream rng(Seed{67});
    std::vector<double> a(5000);
    std::vector<double> b(3000);
    std::vector<double> c(3000);
    for (auto &v : a) {
        v = rng.normal();
    }
    for (auto &v : b) {
        v = rng.normal();
    }
    for (auto &v : c) {
        v = rng.normal() + 0.2;
    }
    EXPECT_GT(ks_two_sample(a, b).p_value, 0.001);
    EXPECT_LT(ks_two_sample(a, c).p_value, 1e-6);
    EXPECT_DOUBLE_EQ(ks_two_sample(a, a).statistic, 0.0);
    const TestResult disjoint = ks_two_sample({0.0, 0.1, 0.2}, {1.0, 1.1});
    EXPECT_DOUBLE_EQ(disjoint.statistic, 1.0);
}

TEST(KolmogorovSmirnov, FalsePositiveRate) {
    // Under the null, p < 0.05 should happen about 5% of the time.
    RandomStream rng(Seed{68});
    int rejections = 0;
    const int trials = 400;
    for (int k = 0; k < trials; ++k) {
        std::vector<double> a(400);
        std::vector<double> b(300);
        for (auto &v : a) {
            v = rng.uniform();
        }
        for (auto &v : b) {
            v = rng.uniform();
        }
        rejections += ks_two_sample(a, b).p_value < 0.05 ? 1 : 0;
    }
    EXPECT_GT(rejections, 5);
    EXPECT_LT(rejections, 40);
}

EnsembleConfig small_config(std::string initial, int n, int steps) {
    EnsembleConfig cfg;
    cfg.seed = Seed{2024};
    cfg.n = n;
    cfg.steps = steps;
    cfg.initial = std::move(initial);
    return cfg;
}

TEST(Ensemble, ProductPurityStartsAtOneExactly) {
    const auto s = ensemble_average(find_observable("purity"), small_config("product", 200, 3));
    EXPECT_EQ(s.mean[0], 1.0);
    EXPECT_EQ(s.std_error[0], 0.0);
    EXPECT_EQ(s.n_trajectories, 200);
    EXPECT_EQ(s.observable_name, "purity");
    ASSERT_EQ(s.mean.size(), 4U);
    for (double se : s.std_error) {
        EXPECT_GE(se, 0.0);
    }
}

TEST(Ensemble, ResultDoesNotDependOnWorkerCount) {
    auto cfg = small_config("entangled", 300, 6);
    const auto one = run_ensemble(cfg, standard_observables());
    cfg.workers = 3;
    const auto three = run_ensemble(cfg, standard_observables());
    ASSERT_EQ(one.summaries.size(), three.summaries.size());
    for (std::size_t o = 0; o < one.summaries.size(); ++o) {
        EXPECT_EQ(one.summaries[o].mean, three.summaries[o].mean);
        EXPECT_EQ(one.summaries[o].std_error, three.summaries[o].std_error);
    }
    for (std::size_t k = 0; k < one.final_records.size(); ++k) {
        EXPECT_EQ(one.final_records[k].three_tangle, three.final_records[k].three_tangle);
    }
}

TEST(Ensemble, TrajectoryStreamsFollowChildIndices) {
    // Trajectory k of the ensemble is the single trajectory run on child k.
    const auto cfg = small_config("product", 70, 5);
    const auto run = run_ensemble(cfg, {find_observable("purity")});
    for (std::uint64_t k : {0ULL, 63ULL, 64ULL, 69ULL}) {
        RandomStream rng = RandomStream(cfg.seed).child(k);
        const auto traj = run_trajectory(StateVector(), CollisionPolicy::random(), 5, rng);
        EXPECT_EQ(run.final_records[k].purity, traj.records.back().purity);
    }
}

TEST(Ensemble, StandardErrorScalesAsInverseSqrtN) {
    const auto a = ensemble_average(find_observable("purity"), small_config("product", 1000, 10));
    auto cfg = small_config("product", 4000, 10);
    cfg.seed = Seed{99};
    const auto b = ensemble_average(find_observable("purity"), cfg);
    for (std::size_t t = 2; t <= 10; ++t) {
        EXPECT_NEAR(a.std_error[t] / b.std_error[t], 2.0, 0.25) << "t " << t;
    }
}

TEST(Ensemble, ApproachDirectionDependsOnInitialState) {
    const double p_l = lubkin(2, 4);
    const auto prod = ensemble_average(find_observable("purity"), small_config("product", 2000, 4));
    const auto ent = ensemble_average(find_observable("purity"), small_config("entangled", 2000, 4));
    for (std::size_t t = 1; t <= 3; ++t) {
        EXPECT_GT(prod.mean[t] - p_l, 3.0 * prod.std_error[t]);
        EXPECT_LT(ent.mean[t] - p_l, -3.0 * ent.std_error[t]);
    }
}

TEST(Ensemble, Errors) {
    EXPECT_THROW(ensemble_average(find_observable("purity"), small_config("product", 1, 3)), UsageError);
    EXPECT_THROW(ensemble_average(find_observable("purity"), small_config("product", 10, -1)), UsageError);
    EXPECT_THROW(ensemble_average(find_observable("purity"), small_config("bogus", 10, 1)), UsageError);
    EXPECT_THROW(find_observable("entropy"), UsageError);
}

TEST(Oracle, MeansOfHaarRandomStates) {
    const OracleSummary o = random_state_oracle(100000, Seed{7}, 2);
    EXPECT_EQ(o.n, 100000);
    EXPECT_NEAR(o.get("purity").mean, 2.0 / 3.0, 0.005);
    EXPECT_NEAR(o.get("tau0_rest").mean, 2.0 / 3.0, 0.01);
    // Monogamy: mean three-tangle = mean tau0_rest - 2 mean pair tangle.
    EXPECT_NEAR(o.get("three_tangle").mean,
                o.get("tau0_rest").mean - o.get("tangle01").mean - o.get("tangle02").mean, 1e-9);
    EXPECT_LE(o.get("pair_tangle").std_error, 0.002);
    EXPECT_LE(o.get("pair_concurrence").std_error, 0.002);
    EXPECT_NEAR(o.get("pair_concurrence").mean, 0.367, 0.02);
    EXPECT_GT(std::abs(o.get("pair_tangle").mean - 0.367), 0.1);
    for (const char *name : {"tangle01", "tangle02", "tangle12"}) {
        EXPECT_NEAR(o.get(name).mean, o.get("pair_tangle").mean, 4.0 * o.get(name).std_error);
    }
    EXPECT_THROW(o.get("nothing"), UsageError);
}

TEST(Oracle, DeterministicAndDisjointFromTrajectoryStreams) {
    const OracleSummary a = random_state_oracle(200, Seed{8});
    const OracleSummary b = random_state_oracle(200, Seed{8}, 3);
    EXPECT_EQ(a.get("three_tangle").mean, b.get("three_tangle").mean);
    EXPECT_THROW(random_state_oracle(99, Seed{8}), UsageError);
}

TEST(Oracle, EquilibriumValues) {
    const OracleSummary o = random_state_oracle(500, Seed{9});
    EXPECT_DOUBLE_EQ(equilibrium_value("purity", o), 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(equilibrium_value("tau2_rest", o), 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(equilibrium_value("concurrence12", o), o.get("concurrence12").mean);
}

}  // namespace
}  // namespace rcm

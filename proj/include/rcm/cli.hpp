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

// Command implementations behind the rcm binary. Every command reads a
// RunConfig and writes CSV files into cfg.out; they are callable in-process.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rcm/collision.hpp"
#include "rcm/errors.hpp"
#include "rcm/haar.hpp"
#include "rcm/observables.hpp"
#include "rcm/pauli_markov.hpp"
#include "rcm/random.hpp"
#include "rcm/stats.hpp"

namespace rcm::cli {

struct RunConfig {
    Seed seed{1};
    int steps = 40;
    int trajectories = 10000;
    std::string initial = "product";  // name or amplitude literal
    std::string policy = "random";    // random, alternating or a pair list
    Sampler sampler = Sampler::hurwitz;
    FitWindow fit_window{1, 15};
    int bins = 40;
    std::string out = ".";
    int workers = 1;
    int oracle_samples = 100000;
};

/// Keys accepted in config files; the same names as the long flags.
inline const std::vector<std::string> &config_keys() {
    static const std::vector<std::string> keys = {"seed",     "steps",      "trajectories", "initial",
                                                  "policy",   "sampler",    "fit-window",   "bins",
                                                  "out",      "workers",    "oracle-samples"};
    return keys;
}

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

inline int parse_int(std::string_view key, std::string_view text) {
    int v = 0;
    const auto *end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || text.empty()) {
        throw UsageError(std::string(key) + ": expected an integer, got '" + std::string(text) + "'");
    }
    return v;
}

inline std::string read_text_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot read " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// "@path" is replaced by the trimmed contents of the file.
inline std::string expand_at_file(std::string_view value) {
    if (!value.empty() && value.front() == '@') {
        return trim(read_text_file(std::string(value.substr(1))));
    }
    return std::string(value);
}

inline FitWindow parse_window(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) {
        throw UsageError("fit-window: expected a:b, got '" + std::string(text) + "'");
    }
    FitWindow w{parse_int("fit-window", text.substr(0, colon)), parse_int("fit-window", text.substr(colon + 1))};
    if (w.t_start < 0 || w.t_start >= w.t_end) {
        throw UsageError("fit-window: need 0 <= a < b");
    }
    return w;
}

}  // namespace detail

/// Applies one setting; used for config-file lines and command-line flags.
inline void apply_setting(RunConfig &cfg, std::string_view key, std::string_view raw) {
    const std::string value = detail::trim(raw);
    if (key == "seed") {
        cfg.seed = parse_seed(value);
    } else if (key == "steps") {
        cfg.steps = detail::parse_int(key, value);
        if (cfg.steps < 0) {
            throw UsageError("steps must be non-negative");
        }
    } else if (key == "trajectories") {
        cfg.trajectories = detail::parse_int(key, value);
        if (cfg.trajectories < 1) {
            throw UsageError("trajectories must be at least 1");
        }
    } else if (key == "initial") {
        const std::string text = detail::expand_at_file(value);
        named_initial(text);  // validate now
        cfg.initial = text;
    } else if (key == "policy") {
        const std::string text = detail::expand_at_file(value);
        cfg.policy = CollisionPolicy::parse(text).to_string();
    } else if (key == "sampler") {
        cfg.sampler = parse_sampler(value);
    } else if (key == "fit-window") {
        cfg.fit_window = detail::parse_window(value);
    } else if (key == "bins") {
        cfg.bins = detail::parse_int(key, value);
        if (cfg.bins < 1) {
            throw UsageError("bins must be at least 1");
        }
    } else if (key == "out") {
        if (value.empty()) {
            throw UsageError("out: empty path");
        }
        cfg.out = value;
    } else if (key == "workers") {
        cfg.workers = detail::parse_int(key, value);
        if (cfg.workers < 1) {
            throw UsageError("workers must be at least 1");
        }
    } else if (key == "oracle-samples") {
        cfg.oracle_samples = detail::parse_int(key, value);
        if (cfg.oracle_samples < 100) {
            throw UsageError("oracle-samples must be at least 100");
        }
    } else {
        throw UsageError("unknown setting '" + std::string(key) + "'");
    }
}

/// Reads key=value lines ('#' starts a comment) into cfg.
inline void load_config_text(RunConfig &cfg, std::string_view text, const std::string &origin) {
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        line = detail::trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw UsageError(origin + ":" + std::to_string(lineno) + ": expected key=value");
        }
        const std::string key = detail::trim(std::string_view(line).substr(0, eq));
        try {
            apply_setting(cfg, key, std::string_view(line).substr(eq + 1));
        } catch (const UsageError &e) {
            throw UsageError(origin + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
}

inline void load_config_file(RunConfig &cfg, const std::string &path) {
    load_config_text(cfg, detail::read_text_file(path), path);
}

/// Config file text that reproduces cfg when loaded.
inline std::string echo_config(const RunConfig &cfg) {
    std::ostringstream out;
    out << "seed=" << cfg.seed.master << '\n';
    out << "steps=" << cfg.steps << '\n';
    out << "trajectories=" << cfg.trajectories << '\n';
    out << "initial=" << cfg.initial << '\n';
    out << "policy=" << cfg.policy << '\n';
    out << "sampler=" << to_string(cfg.sampler) << '\n';
    out << "fit-window=" << cfg.fit_window.t_start << ':' << cfg.fit_window.t_end << '\n';
    out << "bins=" << cfg.bins << '\n';
    out << "out=" << cfg.out << '\n';
    out << "workers=" << cfg.workers << '\n';
    out << "oracle-samples=" << cfg.oracle_samples << '\n';
    return out.str();
}

// ---------------------------------------------------------------------------
// Output

/// CSV file with a fixed header; numbers use 12 significant digits.
class CsvWriter {
   public:
    CsvWriter(const std::filesystem::path &path, const std::vector<std::string> &header) : path_(path) {
        out_.open(path);
        if (!out_) {
            throw IoError("cannot write " + path.string());
        }
        out_.precision(12);
        for (std::size_t i = 0; i < header.size(); ++i) {
            out_ << (i > 0 ? "," : "") << header[i];
        }
        out_ << '\n';
    }

    CsvWriter &cell(double v) {
        sep();
        out_ << v;
        return *this;
    }
    CsvWriter &cell(int v) {
        sep();
        out_ << v;
        return *this;
    }
    CsvWriter &cell(long long v) {
        sep();
        out_ << v;
        return *this;
    }
    CsvWriter &cell(std::string_view v) {
        sep();
        if (v.find_first_of(",\"\n") != std::string_view::npos) {
            out_ << '"';
            for (char c : v) {
                out_ << (c == '"' ? "\"\"" : std::string(1, c == '\n' ? ' ' : c));
            }
            out_ << '"';
        } else {
            out_ << v;
        }
        return *this;
    }
    void end_row() {
        out_ << '\n';
        first_ = true;
    }

    void close() {
        out_.close();
        if (!out_) {
            throw IoError("failed writing " + path_.string());
        }
    }

    ~CsvWriter() = default;

   private:
    void sep() {
        if (!first_) {
            out_ << ',';
        }
        first_ = false;
    }

    std::filesystem::path path_;
    std::ofstream out_;
    bool first_ = true;
};

inline std::filesystem::path prepare_output(const RunConfig &cfg) {
    const std::filesystem::path dir(cfg.out);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw IoError("cannot create output directory " + dir.string());
    }
    const auto echo_path = dir / "config.txt";
    std::ofstream echo(echo_path);
    if (!echo) {
        throw IoError("cannot write " + echo_path.string());
    }
    echo << echo_config(cfg);
    if (!echo) {
        throw IoError("failed writing " + echo_path.string());
    }
    return dir;
}

inline const std::vector<std::string> &record_columns() {
    static const std::vector<std::string> cols = {"t",         "purity",    "tangle01",  "tangle02",    "tangle12",
                                                  "tau0_rest", "tau1_rest", "tau2_rest", "three_tangle"};
    return cols;
}

inline std::array<double, 8> record_values(const ObservableRecord &r) {
    return {r.purity, r.tangle01, r.tangle02, r.tangle12, r.tau0_rest, r.tau1_rest, r.tau2_rest, r.three_tangle};
}

struct CommandResult {
    std::vector<std::filesystem::path> files;
    std::vector<std::string> notes;  // one-line summaries for stdout
};

inline Trajectory simulate_trajectory(const RunConfig &cfg) {
    RandomStream rng = RandomStream(cfg.seed).child(0);
    return run_trajectory(named_initial(cfg.initial), CollisionPolicy::parse(cfg.policy), cfg.steps, rng,
                          cfg.sampler, cfg.initial);
}

// ---------------------------------------------------------------------------
// Commands

/// One trajectory, observables at every step.
inline CommandResult cmd_simulate(const RunConfig &cfg) {
    const Trajectory traj = simulate_trajectory(cfg);
    const auto dir = prepare_output(cfg);
    CommandResult res;
    const auto path = dir / "simulate.csv";
    CsvWriter csv(path, record_columns());
    for (const auto &r : traj.records) {
        csv.cell(r.t);
        for (double v : record_values(r)) {
            csv.cell(v);
        }
        csv.end_row();
    }
    csv.close();
    res.files.push_back(path);
    res.notes.push_back("final purity " + std::to_string(traj.records.back().purity));
    return res;
}

/// Running time averages of every observable of one trajectory.
inline CommandResult cmd_timeavg(const RunConfig &cfg) {
    const Trajectory traj = simulate_trajectory(cfg);
    std::vector<Series> columns(8);
    for (const auto &r : traj.records) {
        const auto v = record_values(r);
        for (std::size_t c = 0; c < 8; ++c) {
            columns[c].push_back(v[c]);
        }
    }
    for (auto &c : columns) {
        c = time_average(c);
    }
    const auto dir = prepare_output(cfg);
    CommandResult res;
    const auto path = dir / "timeavg.csv";
    CsvWriter csv(path, record_columns());
    for (std::size_t t = 0; t < traj.records.size(); ++t) {
        csv.cell(static_cast<int>(t));
        for (const auto &c : columns) {
            csv.cell(c[t]);
        }
        csv.end_row();
    }
    csv.close();
    res.files.push_back(path);
    res.notes.push_back("time-averaged purity at t=" + std::to_string(cfg.steps) + ": " +
                        std::to_string(columns[0].back()));
    return res;
}

inline EnsembleConfig ensemble_config(const RunConfig &cfg) {
    EnsembleConfig e;
    e.seed = cfg.seed;
    e.n = cfg.trajectories;
    e.steps = cfg.steps;
    e.policy = CollisionPolicy::parse(cfg.policy);
    e.initial = cfg.initial;
    e.sampler = cfg.sampler;
    e.workers = cfg.workers;
    return e;
}

/// Ensemble means and standard errors of every observable, plus an
/// exponential fit of each against its equilibrium value.
inline CommandResult cmd_ensemble(const RunConfig &cfg) {
    if (cfg.trajectories < 2) {
        throw UsageError("ensemble needs at least 2 trajectories");
    }
    const auto &observables = standard_observables();
    const EnsembleRun run = run_ensemble(ensemble_config(cfg), observables);
    const OracleSummary oracle = random_state_oracle(cfg.oracle_samples, cfg.seed, cfg.workers);
    const auto dir = prepare_output(cfg);
    CommandResult res;

    std::vector<std::string> header = {"t"};
    for (const auto &o : observables) {
        header.push_back(o.name + "_mean");
        header.push_back(o.name + "_se");
    }
    const auto curves = dir / "ensemble.csv";
    CsvWriter csv(curves, header);
    for (int t = 0; t <= cfg.steps; ++t) {
        csv.cell(t);
        for (const auto &s : run.summaries) {
            csv.cell(s.mean[static_cast<std::size_t>(t)]).cell(s.std_error[static_cast<std::size_t>(t)]);
        }
        csv.end_row();
    }
    csv.close();
    res.files.push_back(curves);

    const auto fits = dir / "ensemble_fit.csv";
    CsvWriter fcsv(fits, {"observable", "asymptote", "rate", "amplitude", "t_start", "t_end", "residual_rms",
                          "status"});
    for (const auto &s : run.summaries) {
        const double asymptote = equilibrium_value(s.observable_name, oracle);
        fcsv.cell(s.observable_name).cell(asymptote);
        try {
            const FitResult f = exp_fit(s.mean, asymptote, cfg.fit_window, std::span<const double>(s.std_error));
            fcsv.cell(f.rate).cell(f.amplitude).cell(f.window.t_start).cell(f.window.t_end).cell(f.residual_rms);
            fcsv.cell("ok");
            if (s.observable_name == "purity") {
                res.notes.push_back("purity relaxation rate " + std::to_string(f.rate));
            }
        } catch (const Error &e) {
            fcsv.cell("").cell("").cell("").cell("").cell("").cell(e.what());
            res.notes.push_back(s.observable_name + " fit failed: " + e.what());
        }
        fcsv.end_row();
    }
    fcsv.close();
    res.files.push_back(fits);
    return res;
}

/// Spectrum of the Pauli-weight chain and the purity curve it predicts.
inline CommandResult cmd_markov(const RunConfig &cfg) {
    const MixingMatrix m = build_m();
    const auto ev = spectrum(m);
    const auto clusters = cluster_eigenvalues(ev);
    if (clusters.size() < 2 || clusters[1].value <= 0.0) {
        throw NumericalError("chain spectrum has no positive second eigenvalue");
    }
    const auto predicted = predict_purity(weights_from_state(named_initial(cfg.initial)), cfg.steps);
    const auto dir = prepare_output(cfg);
    CommandResult res;

    const auto spath = dir / "markov_spectrum.csv";
    CsvWriter scsv(spath, {"index", "eigenvalue"});
    for (std::size_t k = 0; k < ev.size(); ++k) {
        scsv.cell(static_cast<int>(k)).cell(ev[k]);
        scsv.end_row();
    }
    scsv.close();
    res.files.push_back(spath);

    const auto sumpath = dir / "markov_summary.csv";
    CsvWriter sum(sumpath, {"largest_eigenvalue", "largest_multiplicity", "second_eigenvalue", "second_multiplicity",
                            "gap", "rate"});
    sum.cell(clusters[0].value).cell(clusters[0].multiplicity);
    sum.cell(clusters[1].value).cell(clusters[1].multiplicity);
    sum.cell(1.0 - clusters[1].value).cell(-std::log(clusters[1].value));
    sum.end_row();
    sum.close();
    res.files.push_back(sumpath);

    const auto ppath = dir / "markov_purity.csv";
    CsvWriter pcsv(ppath, {"t", "purity"});
    for (std::size_t t = 0; t < predicted.size(); ++t) {
        pcsv.cell(static_cast<int>(t)).cell(predicted[t]);
        pcsv.end_row();
    }
    pcsv.close();
    res.files.push_back(ppath);
    res.notes.push_back("second eigenvalue " + std::to_string(clusters[1].value) + ", rate " +
                        std::to_string(-std::log(clusters[1].value)));
    return res;
}

/// Late-time (t = steps) histograms of every observable next to the
/// Haar-random-state oracle with the same binning.
inline CommandResult cmd_hist(const RunConfig &cfg) {
    if (cfg.trajectories < 100) {
        throw UsageError("hist needs at least 100 trajectories");
    }
    const auto &observables = standard_observables();
    const EnsembleRun run = run_ensemble(ensemble_config(cfg), {observables.front()});
    const OracleSummary oracle = random_state_oracle(cfg.oracle_samples, cfg.seed, cfg.workers);
    const auto dir = prepare_output(cfg);
    CommandResult res;

    const auto sumpath = dir / "hist_summary.csv";
    CsvWriter sum(sumpath, {"observable", "mean", "std", "oracle_mean", "oracle_std", "chi2", "dof", "p_value"});
    for (const auto &o : observables) {
        std::vector<double> late;
        late.reserve(run.final_records.size());
        for (const auto &r : run.final_records) {
            late.push_back(o.select(r));
        }
        std::vector<double> ref;
        ref.reserve(oracle.samples.size());
        for (const auto &r : oracle.samples) {
            ref.push_back(o.select(r));
        }
        const Histogram h = histogram(late, cfg.bins, 0.0, 1.0);
        const Histogram g = histogram(ref, cfg.bins, 0.0, 1.0);
        const TestResult chi = chi_square_homogeneity(h, g);

        const auto path = dir / ("hist_" + o.name + ".csv");
        CsvWriter csv(path, {"bin_lo", "bin_hi", "count", "oracle_count"});
        for (std::size_t b = 0; b < h.counts.size(); ++b) {
            csv.cell(h.bin_edges[b]).cell(h.bin_edges[b + 1]).cell(h.counts[b]).cell(g.counts[b]);
            csv.end_row();
        }
        csv.close();
        res.files.push_back(path);

        sum.cell(o.name).cell(h.mean).cell(h.std).cell(g.mean).cell(g.std).cell(chi.statistic).cell(chi.dof);
        sum.cell(chi.p_value);
        sum.end_row();
        if (o.name == "three_tangle") {
            res.notes.push_back("three-tangle at t=" + std::to_string(cfg.steps) + ": mean " + std::to_string(h.mean) +
                                ", std " + std::to_string(h.std) + ", chi-square p vs oracle " +
                                std::to_string(chi.p_value));
        }
    }
    sum.close();
    res.files.push_back(sumpath);
    return res;
}

/// Value the mean pairwise concurrence of random states is compared with.
inline constexpr double kReferenceTauP = 0.367;

/// Statistics of Haar-random three-qubit states.
inline CommandResult cmd_oracle(const RunConfig &cfg) {
    const OracleSummary oracle = random_state_oracle(cfg.oracle_samples, cfg.seed, cfg.workers);
    const auto dir = prepare_output(cfg);
    CommandResult res;
    const auto path = dir / "oracle.csv";
    CsvWriter csv(path, {"observable", "mean", "std", "std_error", "n"});
    for (const auto &e : oracle.entries) {
        csv.cell(e.name).cell(e.mean).cell(e.std).cell(e.std_error).cell(oracle.n);
        csv.end_row();
    }
    csv.close();
    res.files.push_back(path);

    const auto tpath = dir / "oracle_tau_p.csv";
    CsvWriter tcsv(tpath, {"quantity", "mean", "std_error", "reference", "difference", "matches"});
    for (const char *name : {"pair_tangle", "pair_concurrence"}) {
        const auto &e = oracle.get(name);
        const double diff = e.mean - kReferenceTauP;
        tcsv.cell(name).cell(e.mean).cell(e.std_error).cell(kReferenceTauP).cell(diff);
        tcsv.cell(std::abs(diff) <= 0.02 ? "yes" : "no");
        tcsv.end_row();
        res.notes.push_back(std::string(name) + " mean " + std::to_string(e.mean) + " (se " +
                            std::to_string(e.std_error) + ")");
    }
    tcsv.close();
    res.files.push_back(tpath);
    return res;
}

inline const std::vector<std::string> &command_names() {
    static const std::vector<std::string> names = {"simulate", "timeavg", "ensemble", "markov", "hist", "oracle"};
    return names;
}

inline CommandResult run_command(std::string_view name, const RunConfig &cfg) {
    if (name == "simulate") {
        return cmd_simulate(cfg);
    }
    if (name == "timeavg") {
        return cmd_timeavg(cfg);
    }
    if (name == "ensemble") {
        return cmd_ensemble(cfg);
    }
    if (name == "markov") {
        return cmd_markov(cfg);
    }
    if (name == "hist") {
        return cmd_hist(cfg);
    }
    if (name == "oracle") {
        return cmd_oracle(cfg);
    }
    throw UsageError("unknown command '" + std::string(name) + "'");
}

/// Exit code for an error raised by a command.
inline int exit_code_for(const std::exception &e) {
    if (dynamic_cast<const IoError *>(&e) != nullptr) {
        return 3;
    }
    if (dynamic_cast<const UsageError *>(&e) != nullptr) {
        return 1;
    }
    return 2;
}

}  // namespace rcm::cli

///
/// \file experiments.hpp
///
/// Seeded multi-trial studies: phase transition, convergence rate, noise
/// robustness and signal-size sweeps, with deterministic CSV/JSON output.
///
/// Every trial derives its own RNG substream from (study, cell, trial
/// index) alone, so results do not depend on grid sizes or execution
/// order, and all solver variants see identical problem instances.
///
#ifndef LPPG_EXPERIMENTS_HPP
#define LPPG_EXPERIMENTS_HPP

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>

#include <json.hpp>

#include "lppg/solver.hpp"

namespace lppg
{

enum class ExperimentKind { PhaseTransition, Convergence, NoiseTable, SizeSweep };

inline const char *experiment_name(ExperimentKind k)
{
    switch (k) {
    case ExperimentKind::PhaseTransition: return "phase_transition";
    case ExperimentKind::Convergence: return "convergence";
    case ExperimentKind::NoiseTable: return "noise_table";
    default: return "size_sweep";
    }
}

struct ExperimentConfig
{
    ExperimentKind kind = ExperimentKind::PhaseTransition;
    std::vector<Index> dims{63};
    std::vector<Index> rank_grid{3};
    std::vector<double> sp_grid{0.5};
    std::vector<Index> size_grid{17, 33, 65, 129}; // size sweep only
    bool damped = false;
    double eta = 0.0;
    std::vector<double> beta_multipliers{1.0};
    Index trials = 50;
    std::uint64_t base_seed = 0;
    std::vector<Variant> variants{Variant::Lppg};
    std::string out_dir = "out";

    // solver knobs shared by all trials
    double beta = 0.0;  // <= 0: beta multiplier times the default beta*
    double gamma = 0.0; // <= 0: variant default step size
    double epsilon = 1e-6;
    Index max_iter = 1000;
    StopRule stop = StopRule::Subgradient;
    double rel_change_tol = 1e-3;

    void validate() const
    {
        if (trials < 1)
            throw std::invalid_argument("config: trials must be >= 1");
        if (variants.empty())
            throw std::invalid_argument("config: no solver variants selected");
        if (dims.empty() || rank_grid.empty() || sp_grid.empty() ||
            beta_multipliers.empty() || size_grid.empty())
            throw std::invalid_argument("config: empty parameter grid");
        for (double sp : sp_grid)
            if (!(sp > 0.0) || sp > 1.0)
                throw std::invalid_argument("config: sampling ratios must lie in (0, 1]");
        if (eta < 0.0)
            throw std::invalid_argument("config: noise level must be >= 0");
    }
};

struct ResultRow
{
    std::string experiment;
    std::string variant;
    std::vector<Index> dims;
    Index rank = 0;
    double sp = 1.0;
    double beta_multiplier = 1.0;
    double eta = 0.0;
    bool damped = false;
    Index trial = 0;
    std::uint64_t seed = 0;
    double nmse = 0.0;
    Index iterations = 0;
    double seconds = 0.0;
    std::string termination;
};

struct CurveSeries
{
    std::string name; // file stem under curves/
    std::string x_label, y_label;
    std::vector<std::pair<double, double>> points;
};

struct ExperimentResult
{
    std::vector<ResultRow> rows;
    std::vector<CurveSeries> curves;
    nlohmann::ordered_json summary;
};

class IoError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

namespace detail
{

/// Scientific notation with 10 significant digits, '.' decimal separator.
inline std::string sci(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9e", x);
    return buf;
}

inline std::string dims_label(const std::vector<Index> &dims)
{
    std::string s;
    for (std::size_t i = 0; i < dims.size(); ++i) {
        if (i)
            s += 'x';
        s += std::to_string(dims[i]);
    }
    return s;
}

inline std::uint64_t bits_of(double x)
{
    std::uint64_t u;
    static_assert(sizeof u == sizeof x);
    std::memcpy(&u, &x, sizeof u);
    return u;
}

/// One problem instance shared by every variant of a grid cell.
struct TrialInstance
{
    SpectralSignal signal;
    ObservedData data;
    std::uint64_t seed = 0;
};

inline TrialInstance make_instance(const std::vector<Index> &dims, Index rank,
                                   double sp, bool damped, double eta,
                                   std::uint64_t instance_seed)
{
    TrialInstance inst;
    inst.seed = instance_seed;
    Index n = 1;
    for (Index d : dims)
        n *= d;
    RandomStream sig_rng(derive_seed(instance_seed, {0x7369676eULL}));
    RandomStream mask_rng(derive_seed(instance_seed, {0x6d61736bULL}));
    inst.signal = generate_signal(dims, rank, damped, sig_rng);
    SampleMask mask = sample_uniform(n, sp, mask_rng);
    inst.data = observe(inst.signal.x, std::move(mask));
    if (eta > 0.0) {
        RandomStream noise_rng(derive_seed(instance_seed, {0x6e6f697365ULL}));
        inst.data = add_noise(inst.data, eta, noise_rng);
    }
    return inst;
}

struct TrialOutcome
{
    SolveResult result;
    double nmse = 0.0;
    Index iterations = 0;
    double seconds = 0.0;
};

inline TrialOutcome run_trial(const TrialInstance &inst, const HankelShape &shape,
                              Index rank, Variant variant, double beta_multiplier,
                              const ExperimentConfig &cfg)
{
    SolverConfig scfg;
    scfg.rank = rank;
    scfg.beta = cfg.beta > 0.0 ? cfg.beta
                               : beta_multiplier * default_beta(inst.data.mask, shape);
    scfg.gamma = variant == Variant::StandardPg ? 0.0 : cfg.gamma;
    scfg.epsilon = cfg.epsilon;
    scfg.max_iter = cfg.max_iter;
    scfg.variant = variant;
    scfg.stop = cfg.stop;
    scfg.rel_change_tol = cfg.rel_change_tol;
    scfg.seed = derive_seed(inst.seed, {0x736f6c76ULL, static_cast<std::uint64_t>(variant)});

    TrialOutcome out;
    const auto t0 = std::chrono::steady_clock::now();
    out.result = solve(inst.data, shape, scfg, &inst.signal.x);
    out.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.nmse = nmse(out.result.x, inst.signal.x);
    out.iterations = static_cast<Index>(out.result.trace.iterations.size()) - 1;
    return out;
}

inline ResultRow make_row(const ExperimentConfig &cfg, const TrialInstance &inst,
                          const TrialOutcome &out, Variant variant, Index rank,
                          double sp, double beta_multiplier, Index trial,
                          const std::vector<Index> &dims)
{
    ResultRow row;
    row.experiment = experiment_name(cfg.kind);
    row.variant = variant_name(variant);
    row.dims = dims;
    row.rank = rank;
    row.sp = sp;
    row.beta_multiplier = beta_multiplier;
    row.eta = cfg.eta;
    row.damped = cfg.damped;
    row.trial = trial;
    row.seed = inst.seed;
    row.nmse = out.nmse;
    row.iterations = out.iterations;
    row.seconds = out.seconds;
    row.termination = out.result.trace.termination;
    return row;
}

/// Aggregate rows that share every cell parameter into summary entries.
inline nlohmann::ordered_json summarize(const std::vector<ResultRow> &rows)
{
    struct Agg
    {
        nlohmann::ordered_json keys;
        double nmse_sum = 0.0;
        double iter_sum = 0.0;
        Index count = 0;
        Index successes = 0; // NMSE < 1e-3
        std::map<std::string, Index> terminations;
    };
    std::vector<Agg> groups;
    std::map<std::string, std::size_t> index;
    for (const auto &row : rows) {
        const std::string key = row.experiment + '|' + row.variant + '|' +
                                dims_label(row.dims) + '|' + std::to_string(row.rank) +
                                '|' + sci(row.sp) + '|' + sci(row.beta_multiplier) +
                                '|' + sci(row.eta) + '|' + std::to_string(row.damped);
        auto [it, fresh] = index.emplace(key, groups.size());
        if (fresh) {
            Agg agg;
            agg.keys = {{"experiment", row.experiment}, {"variant", row.variant},
                        {"dims", dims_label(row.dims)},  {"r", row.rank},
                        {"sp", row.sp},                  {"beta_multiplier", row.beta_multiplier},
                        {"eta", row.eta},                {"damped", row.damped}};
            groups.push_back(std::move(agg));
        }
        Agg &agg = groups[it->second];
        agg.nmse_sum += row.nmse;
        agg.iter_sum += static_cast<double>(row.iterations);
        agg.count += 1;
        agg.successes += row.nmse < 1e-3 ? 1 : 0;
        agg.terminations[row.termination] += 1;
    }
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const auto &agg : groups) {
        nlohmann::ordered_json entry = agg.keys;
        entry["trials"] = agg.count;
        entry["mean_nmse"] = agg.nmse_sum / static_cast<double>(agg.count);
        entry["mean_iterations"] = agg.iter_sum / static_cast<double>(agg.count);
        entry["success_rate"] =
            static_cast<double>(agg.successes) / static_cast<double>(agg.count);
        entry["terminations"] = agg.terminations;
        out.push_back(std::move(entry));
    }
    return out;
}

inline void atomic_write(const std::filesystem::path &path, const std::string &body)
{
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw IoError("cannot open " + tmp.string());
        out.write(body.data(), static_cast<std::streamsize>(body.size()));
        if (!out) {
            out.close();
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw IoError("short write to " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot finalize " + path.string());
    }
}

} // namespace detail

/// The cell seed for (study, dims, r, sp, eta, damped, trial). Independent
/// of the solver variant: all variants of a cell share instances.
inline std::uint64_t trial_seed(const ExperimentConfig &cfg,
                                const std::vector<Index> &dims, Index rank,
                                double sp, Index trial)
{
    std::uint64_t s = derive_seed(cfg.base_seed,
                                  {static_cast<std::uint64_t>(cfg.kind),
                                   static_cast<std::uint64_t>(rank),
                                   detail::bits_of(sp), detail::bits_of(cfg.eta),
                                   static_cast<std::uint64_t>(cfg.damped),
                                   static_cast<std::uint64_t>(trial)});
    for (Index d : dims)
        s = derive_seed(s, {static_cast<std::uint64_t>(d)});
    return s;
}

/// Noiseless success-fraction sweep over (Sp, r); the per-Sp curve value is
/// the largest rank recovered (NMSE < 1e-3) in at least half the trials.
inline ExperimentResult run_phase_transition(const ExperimentConfig &cfg)
{
    cfg.validate();
    ExperimentResult res;
    const HankelShape shape = HankelShape::square(cfg.dims);

    std::map<std::pair<std::string, double>, std::map<Index, double>> fractions;
    for (double sp : cfg.sp_grid) {
        for (Index r : cfg.rank_grid) {
            std::vector<detail::TrialInstance> instances;
            instances.reserve(static_cast<std::size_t>(cfg.trials));
            for (Index t = 0; t < cfg.trials; ++t)
                instances.push_back(detail::make_instance(
                    cfg.dims, r, sp, cfg.damped, cfg.eta,
                    trial_seed(cfg, cfg.dims, r, sp, t)));
            for (Variant variant : cfg.variants) {
                Index successes = 0;
                for (Index t = 0; t < cfg.trials; ++t) {
                    const auto out =
                        detail::run_trial(instances[static_cast<std::size_t>(t)],
                                          shape, r, variant, 1.0, cfg);
                    successes += out.nmse < 1e-3 ? 1 : 0;
                    res.rows.push_back(detail::make_row(cfg, instances[static_cast<std::size_t>(t)],
                                                        out, variant, r, sp, 1.0, t,
                                                        cfg.dims));
                }
                fractions[{variant_name(variant), sp}][r] =
                    static_cast<double>(successes) / static_cast<double>(cfg.trials);
            }
        }
    }

    for (Variant variant : cfg.variants) {
        CurveSeries curve;
        curve.name = std::string("phase_transition_") + variant_name(variant);
        curve.x_label = "sp";
        curve.y_label = "max_rank_50pct";
        for (double sp : cfg.sp_grid) {
            Index best = 0;
            for (const auto &[r, frac] : fractions[{variant_name(variant), sp}])
                if (frac >= 0.5)
                    best = std::max(best, r);
            curve.points.emplace_back(sp, static_cast<double>(best));
        }
        res.curves.push_back(std::move(curve));
    }
    res.summary = detail::summarize(res.rows);
    return res;
}

/// Per-iteration NMSE curves, averaged over trials, for each variant on
/// identical instances. Runs a fixed iteration budget (no early stopping).
inline ExperimentResult run_convergence(const ExperimentConfig &cfg)
{
    cfg.validate();
    ExperimentResult res;
    const HankelShape shape = HankelShape::square(cfg.dims);
    const Index r = cfg.rank_grid.front();
    const double sp = cfg.sp_grid.front();

    ExperimentConfig run_cfg = cfg;
    run_cfg.epsilon = 0.0; // fixed budget: curves need every iteration
    run_cfg.stop = StopRule::Subgradient;

    for (Variant variant : cfg.variants) {
        std::vector<double> nmse_sum(static_cast<std::size_t>(cfg.max_iter) + 1, 0.0);
        for (Index t = 0; t < cfg.trials; ++t) {
            const auto inst = detail::make_instance(cfg.dims, r, sp, cfg.damped,
                                                    cfg.eta,
                                                    trial_seed(cfg, cfg.dims, r, sp, t));
            const auto out = detail::run_trial(inst, shape, r, variant, 1.0, run_cfg);
            const auto &iters = out.result.trace.iterations;
            for (std::size_t k = 0; k < nmse_sum.size(); ++k)
                nmse_sum[k] += iters[std::min(k, iters.size() - 1)].nmse;
            res.rows.push_back(
                detail::make_row(cfg, inst, out, variant, r, sp, 1.0, t, cfg.dims));
        }
        CurveSeries curve;
        curve.name = std::string("convergence_") + variant_name(variant);
        curve.x_label = "iteration";
        curve.y_label = "mean_nmse";
        for (std::size_t k = 0; k < nmse_sum.size(); ++k)
            curve.points.emplace_back(static_cast<double>(k),
                                      nmse_sum[k] / static_cast<double>(cfg.trials));
        res.curves.push_back(std::move(curve));
    }
    res.summary = detail::summarize(res.rows);
    return res;
}

/// Heavy-noise robustness across Hankel enforcement strengths; stops on
/// relative iterate change per the reference protocol.
inline ExperimentResult run_noise_table(const ExperimentConfig &cfg)
{
    cfg.validate();
    ExperimentResult res;
    const HankelShape shape = HankelShape::square(cfg.dims);
    const Index r = cfg.rank_grid.front();
    const double sp = cfg.sp_grid.front();

    ExperimentConfig run_cfg = cfg;
    run_cfg.stop = StopRule::RelChange;

    std::vector<detail::TrialInstance> instances;
    for (Index t = 0; t < cfg.trials; ++t)
        instances.push_back(detail::make_instance(cfg.dims, r, sp, cfg.damped,
                                                  cfg.eta,
                                                  trial_seed(cfg, cfg.dims, r, sp, t)));

    for (Variant variant : cfg.variants) {
        CurveSeries curve;
        curve.name = std::string("noise_table_") + variant_name(variant);
        curve.x_label = "beta_multiplier";
        curve.y_label = "mean_nmse";
        for (double mult : cfg.beta_multipliers) {
            double nmse_sum = 0.0;
            for (Index t = 0; t < cfg.trials; ++t) {
                const auto out = detail::run_trial(instances[static_cast<std::size_t>(t)],
                                                   shape, r, variant, mult, run_cfg);
                nmse_sum += out.nmse;
                res.rows.push_back(detail::make_row(cfg, instances[static_cast<std::size_t>(t)],
                                                    out, variant, r, sp, mult, t,
                                                    cfg.dims));
            }
            curve.points.emplace_back(mult, nmse_sum / static_cast<double>(cfg.trials));
        }
        res.curves.push_back(std::move(curve));
    }
    res.summary = detail::summarize(res.rows);
    return res;
}

/// Mean NMSE against 1-D signal size at fixed order and noise level.
inline ExperimentResult run_size_sweep(const ExperimentConfig &cfg)
{
    cfg.validate();
    ExperimentResult res;
    const Index r = cfg.rank_grid.front();
    const double sp = cfg.sp_grid.front();
    const double mult = cfg.beta_multipliers.front();

    for (Variant variant : cfg.variants) {
        CurveSeries curve;
        curve.name = std::string("size_sweep_") + variant_name(variant);
        curve.x_label = "n";
        curve.y_label = "mean_nmse";
        for (Index n : cfg.size_grid) {
            const std::vector<Index> dims{n};
            const HankelShape shape = HankelShape::square(dims);
            double nmse_sum = 0.0;
            for (Index t = 0; t < cfg.trials; ++t) {
                const auto inst = detail::make_instance(dims, r, sp, cfg.damped,
                                                        cfg.eta,
                                                        trial_seed(cfg, dims, r, sp, t));
                const auto out = detail::run_trial(inst, shape, r, variant, mult, cfg);
                nmse_sum += out.nmse;
                res.rows.push_back(
                    detail::make_row(cfg, inst, out, variant, r, sp, mult, t, dims));
            }
            curve.points.emplace_back(static_cast<double>(n),
                                      nmse_sum / static_cast<double>(cfg.trials));
        }
        res.curves.push_back(std::move(curve));
    }
    res.summary = detail::summarize(res.rows);
    return res;
}

inline ExperimentResult run_experiment(const ExperimentConfig &cfg)
{
    switch (cfg.kind) {
    case ExperimentKind::PhaseTransition: return run_phase_transition(cfg);
    case ExperimentKind::Convergence: return run_convergence(cfg);
    case ExperimentKind::NoiseTable: return run_noise_table(cfg);
    default: return run_size_sweep(cfg);
    }
}

/// CSV header for results.csv; wall times live in timings.csv so the
/// results file is byte-identical across re-runs with one seed.
inline constexpr const char *kResultsHeader =
    "experiment,variant,dims,r,sp,beta_multiplier,eta,damped,trial,seed,nmse,"
    "iterations,termination";

/// Writes results.csv, timings.csv, summary.json and curves/*.csv. Each
/// file is staged to a temporary name and renamed, so a failed run never
/// leaves a truncated artifact behind.
inline void emit_outputs(const ExperimentResult &res, const std::filesystem::path &outdir)
{
    namespace fs = std::filesystem;
    using detail::sci;
    std::error_code ec;
    fs::create_directories(outdir / "curves", ec);
    if (ec)
        throw IoError("cannot create output directory " + outdir.string());

    std::string csv = kResultsHeader;
    csv += '\n';
    std::string timings = "experiment,variant,dims,r,sp,trial,seconds\n";
    for (const auto &row : res.rows) {
        csv += row.experiment + ',' + row.variant + ',' + detail::dims_label(row.dims) +
               ',' + std::to_string(row.rank) + ',' + sci(row.sp) + ',' +
               sci(row.beta_multiplier) + ',' + sci(row.eta) + ',' +
               std::to_string(row.damped ? 1 : 0) + ',' + std::to_string(row.trial) +
               ',' + std::to_string(row.seed) + ',' + sci(row.nmse) + ',' +
               std::to_string(row.iterations) + ',' + row.termination + '\n';
        timings += row.experiment + ',' + row.variant + ',' +
                   detail::dims_label(row.dims) + ',' + std::to_string(row.rank) + ',' +
                   sci(row.sp) + ',' + std::to_string(row.trial) + ',' +
                   sci(row.seconds) + '\n';
    }
    detail::atomic_write(outdir / "results.csv", csv);
    detail::atomic_write(outdir / "timings.csv", timings);
    detail::atomic_write(outdir / "summary.json", res.summary.dump(2) + "\n");

    for (const auto &curve : res.curves) {
        std::string body = curve.x_label + ',' + curve.y_label + '\n';
        for (const auto &[x, y] : curve.points)
            body += sci(x) + ',' + sci(y) + '\n';
        detail::atomic_write(outdir / "curves" / (curve.name + ".csv"), body);
    }
}

// --- presets mirroring the reference studies ----------------------------

inline ExperimentConfig phase_transition_preset(bool quick)
{
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::PhaseTransition;
    cfg.dims = {63};
    cfg.sp_grid = quick ? std::vector<double>{0.3, 0.5, 0.7}
                        : std::vector<double>{0.1, 0.2, 0.3, 0.4, 0.5,
                                              0.6, 0.7, 0.8, 0.9, 1.0};
    cfg.rank_grid.clear();
    for (Index r = 1; r <= (quick ? 12 : 20); ++r)
        cfg.rank_grid.push_back(r);
    cfg.trials = quick ? 10 : 50;
    return cfg;
}

inline ExperimentConfig convergence_preset(bool quick)
{
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::Convergence;
    cfg.dims = {31, 31};
    cfg.rank_grid = {15};
    cfg.sp_grid = {0.3};
    cfg.beta = 1e-6;
    cfg.gamma = 1e6;
    cfg.max_iter = 100;
    cfg.trials = quick ? 10 : 50;
    cfg.variants = {Variant::Lppg, Variant::Mpg, Variant::StandardPg};
    return cfg;
}

inline ExperimentConfig noise_table_preset(bool quick)
{
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::NoiseTable;
    cfg.dims = {15, 15, 15};
    cfg.rank_grid = {10};
    cfg.sp_grid = {1.0};
    cfg.eta = 1.0;
    cfg.beta_multipliers = {1.0, 10.0, 100.0};
    cfg.stop = StopRule::RelChange;
    cfg.trials = quick ? 10 : 50;
    return cfg;
}

inline ExperimentConfig size_sweep_preset(bool quick)
{
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::SizeSweep;
    cfg.size_grid = {17, 33, 65, 129};
    cfg.rank_grid = {2};
    cfg.sp_grid = {1.0};
    cfg.eta = 1.0;
    cfg.beta_multipliers = {100.0};
    cfg.stop = StopRule::RelChange;
    cfg.trials = quick ? 10 : 50;
    return cfg;
}

} // namespace lppg

#endif // LPPG_EXPERIMENTS_HPP

///
/// \file lppg_cli.cpp
///
/// Command-line front end: seeded multi-trial studies plus a single-solve
/// mode for user-supplied data. Exit codes: 0 success, 1 config error,
/// 2 solver failure, 3 I/O error.
///
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lppg/experiments.hpp"

namespace
{

using nlohmann::json;

lppg::Variant parse_variant(const std::string &name)
{
    if (name == "lppg")
        return lppg::Variant::Lppg;
    if (name == "mpg")
        return lppg::Variant::Mpg;
    if (name == "pg")
        return lppg::Variant::StandardPg;
    throw std::invalid_argument("unknown variant '" + name + "'");
}

lppg::StopRule parse_stop(const std::string &name)
{
    if (name == "subgradient")
        return lppg::StopRule::Subgradient;
    if (name == "rel_change")
        return lppg::StopRule::RelChange;
    throw std::invalid_argument("unknown stop rule '" + name + "'");
}

/// Overlay a JSON config file onto a preset. Unknown keys are rejected so
/// typos fail loudly.
void apply_config_file(lppg::ExperimentConfig &cfg, const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw lppg::IoError("cannot open config file " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error &e) {
        throw std::invalid_argument("config parse error: " + std::string(e.what()));
    }
    for (const auto &[key, value] : doc.items()) {
        if (key == "dims")
            cfg.dims = value.get<std::vector<lppg::Index>>();
        else if (key == "rank_grid")
            cfg.rank_grid = value.get<std::vector<lppg::Index>>();
        else if (key == "sp_grid")
            cfg.sp_grid = value.get<std::vector<double>>();
        else if (key == "size_grid")
            cfg.size_grid = value.get<std::vector<lppg::Index>>();
        else if (key == "damped")
            cfg.damped = value.get<bool>();
        else if (key == "eta")
            cfg.eta = value.get<double>();
        else if (key == "beta_multipliers")
            cfg.beta_multipliers = value.get<std::vector<double>>();
        else if (key == "trials")
            cfg.trials = value.get<lppg::Index>();
        else if (key == "seed")
            cfg.base_seed = value.get<std::uint64_t>();
        else if (key == "variants") {
            cfg.variants.clear();
            for (const auto &v : value)
                cfg.variants.push_back(parse_variant(v.get<std::string>()));
        } else if (key == "out")
            cfg.out_dir = value.get<std::string>();
        else if (key == "beta")
            cfg.beta = value.get<double>();
        else if (key == "gamma")
            cfg.gamma = value.get<double>();
        else if (key == "epsilon")
            cfg.epsilon = value.get<double>();
        else if (key == "max_iter")
            cfg.max_iter = value.get<lppg::Index>();
        else if (key == "stop")
            cfg.stop = parse_stop(value.get<std::string>());
        else if (key == "rel_change_tol")
            cfg.rel_change_tol = value.get<double>();
        else
            throw std::invalid_argument("unknown config key '" + key + "'");
    }
}

struct CommonFlags
{
    std::string config_path;
    std::string out_dir;
    std::string variant;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool quick = false;
};

void add_common_flags(CLI::App *cmd, CommonFlags &flags)
{
    cmd->add_option("--config", flags.config_path, "JSON config file");
    cmd->add_option("--out", flags.out_dir, "output directory");
    cmd->add_option("--seed", flags.seed, "base RNG seed")
        ->each([&flags](const std::string &) { flags.seed_set = true; });
    cmd->add_flag("--quick", flags.quick, "desk-scale preset (fewer trials)");
    cmd->add_option("--variant", flags.variant, "restrict to one solver variant")
        ->check(CLI::IsMember({"lppg", "mpg", "pg"}));
}

int run_study(lppg::ExperimentConfig cfg, const CommonFlags &flags)
{
    if (!flags.config_path.empty())
        apply_config_file(cfg, flags.config_path);
    if (flags.seed_set)
        cfg.base_seed = flags.seed;
    if (!flags.out_dir.empty())
        cfg.out_dir = flags.out_dir;
    if (!flags.variant.empty())
        cfg.variants = {parse_variant(flags.variant)};
    cfg.validate();
    const auto res = lppg::run_experiment(cfg);
    lppg::emit_outputs(res, cfg.out_dir);
    std::cout << res.rows.size() << " trials -> " << cfg.out_dir << "\n";
    return 0;
}

/// Observed data file. JSON: {"dims":[..],"entries":[[index,re,im],..]}.
/// CSV: a `dims,AxBx..` line, an optional `index,re,im` header, then rows.
struct SolveInput
{
    std::vector<lppg::Index> dims;
    std::vector<std::tuple<lppg::Index, double, double>> entries;
};

SolveInput load_solve_input(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw lppg::IoError("cannot open data file " + path);
    SolveInput data;
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
        json doc;
        try {
            in >> doc;
        } catch (const json::parse_error &e) {
            throw std::invalid_argument("data parse error: " + std::string(e.what()));
        }
        data.dims = doc.at("dims").get<std::vector<lppg::Index>>();
        for (const auto &e : doc.at("entries"))
            data.entries.emplace_back(e.at(0).get<lppg::Index>(), e.at(1).get<double>(),
                                      e.at(2).get<double>());
        return data;
    }
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line == "index,re,im")
            continue;
        std::istringstream row(line);
        std::string field;
        std::getline(row, field, ',');
        if (field == "dims") {
            std::string rest;
            std::getline(row, rest);
            std::istringstream ds(rest);
            std::string tok;
            while (std::getline(ds, tok, 'x'))
                data.dims.push_back(std::stoll(tok));
            continue;
        }
        const lppg::Index idx = std::stoll(field);
        std::getline(row, field, ',');
        const double re = std::stod(field);
        std::getline(row, field, ',');
        const double im = std::stod(field);
        data.entries.emplace_back(idx, re, im);
    }
    return data;
}

int run_solve(const std::string &data_path, const CommonFlags &flags,
              lppg::SolverConfig scfg, double beta_multiplier,
              const std::string &stop_name)
{
    const SolveInput input = load_solve_input(data_path);
    if (input.dims.empty())
        throw std::invalid_argument("data file has no dims header");
    lppg::Index n = 1;
    for (lppg::Index d : input.dims)
        n *= d;

    lppg::ObservedData data;
    data.s = lppg::Vec::Zero(n);
    data.mask.signal_size = n;
    for (const auto &[idx, re, im] : input.entries) {
        if (idx < 0 || idx >= n)
            throw std::invalid_argument("entry index out of range");
        data.s[idx] = lppg::Complex(re, im);
        data.mask.omega.push_back(idx);
    }
    std::sort(data.mask.omega.begin(), data.mask.omega.end());
    if (std::adjacent_find(data.mask.omega.begin(), data.mask.omega.end()) !=
        data.mask.omega.end())
        throw std::invalid_argument("duplicate entry index in data file");

    const lppg::HankelShape shape = lppg::HankelShape::square(input.dims);
    if (scfg.beta <= 0.0)
        scfg.beta = beta_multiplier * lppg::default_beta(data.mask, shape);
    if (!flags.variant.empty())
        scfg.variant = parse_variant(flags.variant);
    scfg.stop = parse_stop(stop_name);
    if (flags.seed_set)
        scfg.seed = flags.seed;

    const auto result = lppg::solve(data, shape, scfg);

    namespace fs = std::filesystem;
    const fs::path outdir = flags.out_dir.empty() ? "out" : flags.out_dir;
    std::error_code ec;
    fs::create_directories(outdir, ec);
    if (ec)
        throw lppg::IoError("cannot create output directory " + outdir.string());

    std::string est = "index,re,im\n";
    for (lppg::Index i = 0; i < n; ++i)
        est += std::to_string(i) + ',' + lppg::detail::sci(result.x[i].real()) + ',' +
               lppg::detail::sci(result.x[i].imag()) + '\n';
    lppg::detail::atomic_write(outdir / "estimate.csv", est);

    std::string trace = "iteration,objective,fidelity,hankel_mismatch,subgrad_norm\n";
    for (const auto &rec : result.trace.iterations)
        trace += std::to_string(rec.iteration) + ',' + lppg::detail::sci(rec.objective) +
                 ',' + lppg::detail::sci(rec.fidelity) + ',' +
                 lppg::detail::sci(rec.hankel_mismatch) + ',' +
                 lppg::detail::sci(rec.subgrad_norm) + '\n';
    lppg::detail::atomic_write(outdir / "trace.csv", trace);

    std::cout << "terminated: " << result.trace.termination << " after "
              << result.trace.iterations.size() - 1 << " iterations -> "
              << (outdir / "estimate.csv").string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Spectrally sparse signal recovery via low-rank Hankel completion"};
    app.require_subcommand(1);

    CommonFlags flags;
    auto *pt = app.add_subcommand("phase-transition",
                                  "noiseless success-rate sweep over (Sp, r)");
    auto *cv = app.add_subcommand("convergence", "per-iteration NMSE curves");
    auto *nt = app.add_subcommand("noise-table", "heavy-noise robustness table");
    auto *sw = app.add_subcommand("size-sweep", "NMSE against signal size");
    auto *sv = app.add_subcommand("solve", "recover a signal from a data file");
    for (auto *cmd : {pt, cv, nt, sw, sv})
        add_common_flags(cmd, flags);

    std::string data_path;
    lppg::SolverConfig scfg;
    double beta_multiplier = 1.0;
    std::string stop_name = "subgradient";
    sv->add_option("data", data_path, "observed entries (CSV or JSON)")->required();
    sv->add_option("--rank", scfg.rank, "target rank")->required();
    sv->add_option("--beta", scfg.beta, "Hankel enforcement parameter (0 = auto)");
    sv->add_option("--beta-multiplier", beta_multiplier, "scale on the auto beta");
    sv->add_option("--gamma", scfg.gamma, "step size (0 = variant default)");
    sv->add_option("--epsilon", scfg.epsilon, "subgradient stopping tolerance");
    sv->add_option("--max-iter", scfg.max_iter, "iteration cap");
    sv->add_option("--stop", stop_name, "stopping rule")
        ->check(CLI::IsMember({"subgradient", "rel_change"}));
    sv->add_option("--rel-change-tol", scfg.rel_change_tol,
                   "relative-change stopping tolerance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (pt->parsed())
            return run_study(lppg::phase_transition_preset(flags.quick), flags);
        if (cv->parsed())
            return run_study(lppg::convergence_preset(flags.quick), flags);
        if (nt->parsed())
            return run_study(lppg::noise_table_preset(flags.quick), flags);
        if (sw->parsed())
            return run_study(lppg::size_sweep_preset(flags.quick), flags);
        return run_solve(data_path, flags, scfg, beta_multiplier, stop_name);
    } catch (const lppg::IoError &e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return 3;
    } catch (const std::filesystem::filesystem_error &e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return 3;
    } catch (const lppg::SolverError &e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

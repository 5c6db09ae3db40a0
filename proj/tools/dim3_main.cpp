#include <CLI11.hpp>

#include <iostream>

#include "dim3/dim3.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

void add_run_options(CLI::App* cmd, dim3::RunConfig& cfg, std::string& model_name) {
    cmd->add_option("--model", model_name,
                    "one of mtv-gibbs, mtv-slice, mti-gibbs, f-mtv, f-mti");
    cmd->add_option("--dataset", cfg.dataset_path, "dataset file (dim3 text format)");
    cmd->add_option("--generator", cfg.generator,
                    "built-in data source: case, mtv-prior, mti-prior, sampson-like");
    cmd->add_option("--case", cfg.gen_case, "compatibility case 1..4 for --generator case");
    cmd->add_option("--n", cfg.gen_n, "generated node count");
    cmd->add_option("--T", cfg.gen_t, "generated time steps");
    cmd->add_option("--gen-seed", cfg.gen_seed, "generator seed");
    cmd->add_option("--iterations", cfg.iterations, "sweeps per chain");
    cmd->add_option("--burnin-frac", cfg.burnin_frac, "fraction discarded as burn-in");
    cmd->add_option("--thin", cfg.thin, "retain every thin-th post-burn-in sample");
    cmd->add_option("--chains", cfg.chains, "number of independent chains");
    cmd->add_option("--seed", cfg.seed, "master seed (chain c uses stream c+1)");
    cmd->add_option("--k-fixed", cfg.k_fixed, "community count for the finite baselines");
    cmd->add_option("--init-communities", cfg.init_communities, "random initial partition size");
    cmd->add_option("--gamma", cfg.gamma0, "initial gamma");
    cmd->add_option("--alpha", cfg.alpha0, "initial alpha");
    cmd->add_option("--kappa", cfg.kappa0, "initial kappa");
    cmd->add_option("--lambda1", cfg.lambda1, "Beta prior success mass for W");
    cmd->add_option("--lambda2", cfg.lambda2, "Beta prior failure mass for W");
    cmd->add_flag("--freeze-gamma", cfg.freeze_gamma, "do not resample gamma");
    cmd->add_flag("--freeze-concentration", cfg.freeze_concentration,
                  "do not resample alpha+kappa");
    cmd->add_flag("--freeze-ratio", cfg.freeze_ratio, "do not resample kappa/(alpha+kappa)");
    cmd->add_flag("--random-order", cfg.random_order, "randomized pair order per sweep");
    cmd->add_flag("--parallel-labels", cfg.parallel_labels,
                  "slice sampler: scheduling-independent snapshot label stage");
    cmd->add_option("--out", cfg.out_dir, "output directory");
    cmd->add_option("--checkpoint-interval", cfg.checkpoint_interval,
                    "sweeps between checkpoints (0: final only)");
    cmd->set_config("--config", "", "key=value config file; command-line flags win");
}

dim3::RunConfig finalize(dim3::RunConfig cfg, const std::string& model_name) {
    if (!model_name.empty() && !dim3::parse_model_kind(model_name, cfg.model))
        throw dim3::ConfigError("unknown model '" + model_name + "'");
    cfg.validate();
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"DIM3: nonparametric inference for dynamic directed binary networks"};
    app.require_subcommand(1);

    dim3::RunConfig cfg;
    std::string model_name;

    auto* run_cmd = app.add_subcommand("run", "run MCMC chains and write traces + summary");
    add_run_options(run_cmd, cfg, model_name);

    auto* resume_cmd = app.add_subcommand("resume", "continue a run from its checkpoints");
    add_run_options(resume_cmd, cfg, model_name);

    auto* gen_cmd = app.add_subcommand("gen", "generate a dataset file");
    std::string gen_kind = "case";
    int gen_case = 1, gen_n = 20, gen_T = 3;
    uint64_t gen_seed = 1;
    std::string gen_out = "dataset.txt";
    gen_cmd->add_option("--kind", gen_kind, "case, mtv-prior, mti-prior, sampson-like");
    gen_cmd->add_option("--case", gen_case, "compatibility case 1..4");
    gen_cmd->add_option("--n", gen_n, "node count");
    gen_cmd->add_option("--T", gen_T, "time steps");
    gen_cmd->add_option("--seed", gen_seed, "seed");
    gen_cmd->add_option("--out", gen_out, "output path")->required();
    double gg = 1.0, ga = 1.0, gk = 1.0;
    gen_cmd->add_option("--gamma", gg, "gamma for prior draws");
    gen_cmd->add_option("--alpha", ga, "alpha for prior draws");
    gen_cmd->add_option("--kappa", gk, "kappa for prior draws");

    auto* eval_cmd = app.add_subcommand("eval", "fit metrics for an existing run directory");
    std::string truth_path, report_path = "report.json";
    add_run_options(eval_cmd, cfg, model_name);
    eval_cmd->add_option("--truth", truth_path, "dataset file carrying ground truth");
    eval_cmd->add_option("--report", report_path, "where to write the report JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitConfig;
    }

    try {
        if (run_cmd->parsed()) {
            auto final_cfg = finalize(cfg, model_name);
            auto result = dim3::run(final_cfg);
            std::cout << result.summary.dump(2) << std::endl;
        } else if (resume_cmd->parsed()) {
            auto final_cfg = finalize(cfg, model_name);
            auto result = dim3::resume(final_cfg);
            std::cout << result.summary.dump(2) << std::endl;
        } else if (gen_cmd->parsed()) {
            dim3::DatasetBundle bundle;
            if (gen_kind == "case") {
                auto truth = dim3::synthetic_truth(gen_case, gen_n);
                bundle = dim3::generate_fixed(truth, gen_n, gen_T, gen_seed,
                                              "case" + std::to_string(gen_case));
            } else if (gen_kind == "mtv-prior" || gen_kind == "mti-prior") {
                dim3::GlobalWeights w;
                w.gamma = gg;
                w.alpha = ga;
                w.kappa = gk;
                bundle = gen_kind == "mtv-prior"
                             ? dim3::generate_mtv(gen_n, gen_T, w, gen_seed).bundle
                             : dim3::generate_mti(gen_n, gen_T, w, gen_seed).bundle;
            } else if (gen_kind == "sampson-like") {
                bundle = dim3::sampson_like_fixture(gen_seed);
            } else {
                throw dim3::ConfigError("unknown generator kind '" + gen_kind + "'");
            }
            dim3::save_dataset(bundle, gen_out);
            std::cout << "wrote " << gen_out << " (" << bundle.data.nodes() << " nodes, "
                      << bundle.data.steps() << " steps)" << std::endl;
        } else if (eval_cmd->parsed()) {
            auto final_cfg = finalize(cfg, model_name);
            auto report = dim3::evaluate_run(final_cfg, truth_path);
            std::ofstream out(report_path);
            out << report.dump(2) << "\n";
            std::cout << report.dump(2) << std::endl;
        }
    } catch (const dim3::ConfigError& e) {
        std::cerr << "config error: " << e.what() << std::endl;
        return kExitConfig;
    } catch (const dim3::DataError& e) {
        std::cerr << "data error: " << e.what() << std::endl;
        return kExitData;
    } catch (const dim3::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << std::endl;
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return kExitNumeric;
    }
    return 0;
}

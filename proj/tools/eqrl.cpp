// eqrl: DFE/CTLE parameter optimization on synthetic channels with an
// information-bottleneck latent proxy and a CVaR quantile actor-critic.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "eqrl/pipeline.hpp"
#include "json.hpp"

namespace {

using namespace eqrl;

struct GlobalOpts {
    std::string config_path;
    std::vector<std::string> overrides;  // section.key=value
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out_dir;
    int threads = 0;
};

RunConfig build_config(const GlobalOpts& g) {
    RunConfig cfg = g.config_path.empty() ? RunConfig{} : load_config(g.config_path);
    for (const auto& ov : g.overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos)
            throw ConfigError("--set expects section.key=value, got '" + ov + "'");
        apply_override(cfg, ov.substr(0, eq), ov.substr(eq + 1));
    }
    if (g.seed_set) cfg.seeds.master = g.seed;
    if (!g.out_dir.empty()) cfg.paths.run_dir = g.out_dir;
    cfg.validate();
    return cfg;
}

void append_run_manifest(const PipelineContext& ctx, const std::string& command) {
    ctx.paths.ensure();
    const std::string path = ctx.paths.run_dir + "/manifest.json";
    nlohmann::json manifest;
    if (file_exists(path)) manifest = nlohmann::json::parse(read_text_file(path));
    manifest["config_hash"] = ctx.cfg.hash();
    manifest["version"] = kVersion;
    manifest["master_seed"] = ctx.cfg.seeds.master;
    if (!manifest.contains("commands")) manifest["commands"] = nlohmann::json::array();
    manifest["commands"].push_back(command);
    write_text_file(path, manifest.dump(2) + "\n");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"equalizer optimization with latent-proxy CVaR reinforcement learning"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--config", g.config_path, "config file (defaults to built-in values)");
    app.add_option("--set", g.overrides, "override a config key: section.key=value")
        ->take_all();
    app.add_option("--seed", g.seed, "override [seeds] master")->each([&](const std::string&) {
        g.seed_set = true;
    });
    app.add_option("--out", g.out_dir, "override [paths] run_dir");
    app.add_option("--threads", g.threads, "worker threads (or EQRL_THREADS; default 1)");

    auto* c_gen = app.add_subcommand("gen-data", "generate labeled train/heldout datasets");
    auto* c_label = app.add_subcommand("label", "relabel a dataset file with the mask test");
    std::string label_path;
    c_label->add_option("--data", label_path, "dataset path (default: run train+heldout)");
    auto* c_enc = app.add_subcommand("train-encoder", "train the latent encoder (phase 1)");
    int enc_epochs = -1;
    c_enc->add_option("--epochs", enc_epochs, "override [encoder] epochs");
    double enc_latent = -1;
    c_enc->add_option("--latent-dim", enc_latent, "override [encoder] latent_dim");
    auto* c_anchor = app.add_subcommand("anchor", "compute the valid-signal latent anchor");
    auto* c_agent = app.add_subcommand("train-agent", "train the CVaR agent (phase 2)");
    int agent_epochs = -1;
    c_agent->add_option("--epochs", agent_epochs, "override [agent] epochs");
    double agent_alpha = -1;
    c_agent->add_option("--alpha", agent_alpha, "override [agent] alpha");
    std::string eq_kind_flag;
    for (auto* cmd : {c_agent, c_gen}) (void)cmd;
    app.get_subcommand("train-agent")
        ->add_option("--eq", eq_kind_flag, "equalizer kind: dfe | ctle-dfe");

    auto* c_opt = app.add_subcommand("optimize", "optimal parameters for one waveform");
    std::string opt_data;
    std::size_t opt_index = 0;
    c_opt->add_option("--data", opt_data, "dataset path (default: heldout)");
    c_opt->add_option("--index", opt_index, "record index")->required();

    auto* c_eval = app.add_subcommand("evaluate", "evaluate the trained agent, write report");
    bool eval_force = false;
    c_eval->add_flag("--force", eval_force, "accept mixed-config artifacts");
    std::vector<double> eval_sigmas;
    c_eval->add_option("--sigma", eval_sigmas, "noise robustness levels")->take_all();

    auto* c_classify = app.add_subcommand("classify", "deployment class from the report");
    auto* c_base = app.add_subcommand("baseline", "run a reference optimizer");
    std::string base_method, base_fitness = "latent";
    c_base->add_option("method", base_method, "ga | pso | grid")->required();
    c_base->add_option("--fitness", base_fitness, "latent | eye");
    auto* c_report = app.add_subcommand("report", "merge results into summary + CSV tables");
    auto* c_self = app.add_subcommand("selfcheck", "run the built-in invariant suite");

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg = build_config(g);
        if (enc_epochs >= 0) apply_override(cfg, "encoder.epochs", std::to_string(enc_epochs));
        if (enc_latent >= 0)
            apply_override(cfg, "encoder.latent_dim", std::to_string(static_cast<int>(enc_latent)));
        if (agent_epochs >= 0) apply_override(cfg, "agent.epochs", std::to_string(agent_epochs));
        if (agent_alpha >= 0) apply_override(cfg, "agent.alpha", std::to_string(agent_alpha));
        if (!eq_kind_flag.empty()) apply_override(cfg, "equalizer.kind", eq_kind_flag);
        if (!eval_sigmas.empty()) {
            std::string list;
            for (std::size_t i = 0; i < eval_sigmas.size(); ++i)
                list += (i ? ", " : "") + std::to_string(eval_sigmas[i]);
            apply_override(cfg, "eval.noise_sigmas", list);
        }

        PipelineContext ctx(cfg, g.threads);

        if (c_gen->parsed()) {
            const auto s = run_gen_data(ctx);
            append_run_manifest(ctx, "gen-data");
            std::printf("train: %zu records (%zu valid), heldout: %zu records (%zu valid)\n",
                        s.train_records, s.train_valid, s.heldout_records, s.heldout_valid);
        } else if (c_label->parsed()) {
            if (!label_path.empty()) {
                const auto valid = run_label(ctx, label_path);
                std::printf("%s: %zu valid records\n", label_path.c_str(), valid);
            } else {
                for (const auto& path : {ctx.paths.train_data(), ctx.paths.heldout_data()}) {
                    const auto valid = run_label(ctx, path);
                    std::printf("%s: %zu valid records\n", path.c_str(), valid);
                }
            }
            append_run_manifest(ctx, "label");
        } else if (c_enc->parsed()) {
            const auto r = run_train_encoder(ctx);
            append_run_manifest(ctx, "train-encoder");
            std::printf("epochs=%zu val_ce=%.4f val_acc=%.3f silhouette=%.3f\n", r.curve.size(),
                        r.val_ce, r.val_accuracy, r.silhouette);
        } else if (c_anchor->parsed()) {
            const auto a = run_anchor(ctx);
            append_run_manifest(ctx, "anchor");
            std::printf("anchor over %zu valid latents, residual %.2e%s\n", a.n_valid, a.residual,
                        a.max_iterations_hit ? " (max iterations hit)" : "");
        } else if (c_agent->parsed()) {
            const auto r = run_train_agent(ctx);
            append_run_manifest(ctx, "train-agent");
            std::printf("epochs_run=%d early_stopped=%s final_val_cvar=%.4f\n", r.epochs_run,
                        r.early_stopped ? "yes" : "no",
                        r.curve.empty() ? 0.0 : r.curve.back().val_cvar);
        } else if (c_opt->parsed()) {
            const std::string data = opt_data.empty() ? ctx.paths.heldout_data() : opt_data;
            const auto params = run_optimize(ctx, data, opt_index);
            nlohmann::json out;
            out["kind"] = to_string(params.kind);
            out["normalized"] = params.values;
            out["physical"] = denormalize(params);
            std::printf("%s\n", out.dump(2).c_str());
        } else if (c_eval->parsed()) {
            const auto s = run_evaluate(ctx, eval_force);
            append_run_manifest(ctx, "evaluate");
            std::printf("heldout mean=%.2f%% cvar10=%.2f%% cvar05=%.2f%% gen_gap=%.2f%% class=%s\n",
                        s.heldout.aggregates.mean_pct, s.heldout.aggregates.cvar10_pct,
                        s.heldout.aggregates.cvar05_pct, s.gen_gap_pct,
                        to_string(s.deployment).c_str());
        } else if (c_classify->parsed()) {
            std::printf("%s\n", to_string(run_classify(ctx)).c_str());
        } else if (c_base->parsed()) {
            const auto r = run_baseline(ctx, base_method, base_fitness);
            append_run_manifest(ctx, "baseline");
            std::printf("%s(%s): best_fitness=%.4f calls=%zu heldout_mean=%.2f%% cvar10=%.2f%%\n",
                        base_method.c_str(), base_fitness.c_str(), r.opt.best_fitness,
                        r.opt.fitness_calls, r.heldout_mean_pct, r.heldout_cvar10_pct);
        } else if (c_report->parsed()) {
            run_report(ctx);
            append_run_manifest(ctx, "report");
            std::printf("wrote %s\n", ctx.paths.summary_file().c_str());
        } else if (c_self->parsed()) {
            bool all_pass = true;
            for (const auto& check : run_selfcheck(cfg.seeds.master)) {
                std::printf("[%s] %-12s %s\n", check.pass ? "PASS" : "FAIL", check.name.c_str(),
                            check.detail.c_str());
                all_pass = all_pass && check.pass;
            }
            return all_pass ? 0 : 1;
        }
        return 0;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const MissingArtifactError& e) {
        std::fprintf(stderr, "missing artifact: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

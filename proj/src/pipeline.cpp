#include "eqrl/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "eqrl/threading.hpp"
#include "json.hpp"

namespace eqrl {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kProjStream = 0x70726f6a6563;
constexpr std::uint64_t kVibInitStream = 0x766962;
constexpr std::uint64_t kAgentStream = 0x6167656e74;
constexpr std::uint64_t kEvalStateStream = 0x657374;
constexpr std::uint64_t kEqLatentStream = 0x65716c;
constexpr std::uint64_t kRandomEvalStream = 0x726e64;
constexpr std::uint64_t kNoiseEvalStream = 0x6e6f6272;

json base_meta(const RunConfig& cfg, const std::string& command) {
    json j;
    j["config_hash"] = cfg.hash();
    j["version"] = kVersion;
    j["command"] = command;
    j["master_seed"] = cfg.seeds.master;
    return j;
}

double mean_quantile(const QuantileSet& q) {
    double acc = 0.0;
    for (double v : q.values) acc += v;
    return acc / static_cast<double>(q.values.size());
}

VibConfig vib_config_from(const RunConfig& cfg) {
    VibConfig vc;
    vc.input_dim = static_cast<int>(cfg.channel.n_x);
    vc.latent_dim = cfg.encoder.latent_dim;
    vc.encoder_hidden = cfg.encoder.hidden;
    vc.classifier_hidden = cfg.encoder.classifier_hidden;
    vc.beta = cfg.encoder.beta;
    vc.lambda_rec = cfg.encoder.lambda_rec;
    vc.dropout_p = cfg.encoder.dropout_p;
    vc.logvar_clamp = cfg.encoder.logvar_clamp;
    vc.input_scale_mv = cfg.encoder.input_scale_mv;
    if (cfg.encoder.variant == "ae") {
        vc.deterministic_bottleneck = true;
        vc.detach_classifier = true;
    }
    vc.init_seed = derive_seed(cfg.seeds.master, kVibInitStream);
    return vc;
}

AgentConfig agent_config_from(const RunConfig& cfg) {
    AgentConfig ac;
    ac.alpha = cfg.agent.alpha;
    ac.n_quantiles = cfg.agent.quantiles;
    ac.gamma = cfg.agent.gamma;
    ac.kappa = cfg.agent.kappa;
    ac.actor_lr = cfg.agent.actor_lr;
    ac.critic_lr = cfg.agent.critic_lr;
    ac.entropy_beta = cfg.agent.entropy_beta;
    ac.lambda_pac = cfg.agent.lambda_pac;
    ac.sigma_p2 = cfg.agent.sigma_p2;
    ac.batch = cfg.agent.batch;
    ac.buffer_capacity = cfg.agent.buffer_capacity;
    ac.episodes_per_epoch = cfg.agent.episodes_per_epoch;
    ac.updates_per_epoch = cfg.agent.updates_per_epoch;
    ac.epochs = cfg.agent.epochs;
    ac.early_stop_patience = cfg.agent.early_stop_patience;
    ac.ema_tau = cfg.agent.ema_tau;
    ac.spectral_every = cfg.agent.spectral_every;
    ac.spectral_norm = cfg.agent.spectral_norm;
    ac.mc_passes = cfg.encoder.mc_passes;
    ac.lambda_unc = cfg.agent.lambda_unc;
    ac.hidden = cfg.agent.hidden;
    ac.latent_dim = cfg.encoder.latent_dim;
    ac.action_dim = param_dim(cfg.eq_kind());
    ac.seed = derive_seed(cfg.seeds.master, kAgentStream);
    return ac;
}

void require_file(const std::string& path, const std::string& what,
                  const std::string& prerequisite) {
    if (!file_exists(path))
        throw MissingArtifactError(what + " not found at " + path + "; run `" + prerequisite +
                                       "` first",
                                   prerequisite);
}

std::uint64_t manifest_config_hash(const std::string& manifest_text, const std::string& what) {
    if (manifest_text.empty()) throw IoError(what + ": missing manifest");
    const auto j = json::parse(manifest_text);
    return j.value("config_hash", std::uint64_t{0});
}

}  // namespace

bool file_exists(const std::string& path) { return fs::exists(path); }

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw IoError("cannot open for writing: " + path);
    os << text;
    if (!os) throw IoError("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open: " + path);
    return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

void RunPaths::ensure() const {
    fs::create_directories(data_dir());
    fs::create_directories(checkpoints_dir());
    fs::create_directories(reports_dir());
    fs::create_directories(logs_dir());
}

ProjectionSet projections_for(const RunConfig& cfg) {
    return sample_projections(static_cast<std::size_t>(cfg.encoder.latent_dim),
                              static_cast<std::size_t>(cfg.agent.projections),
                              derive_seed(cfg.seeds.master, kProjStream));
}

ChannelModel channel_for_unit(const RunConfig& cfg, std::uint64_t unit_seed) {
    ChannelModel model;
    model.isi_taps = cfg.channel.isi_taps;
    model.noise_std = cfg.channel.noise_std;
    model.swing = cfg.channel.swing;
    model.rise_fraction = cfg.channel.rise_fraction;
    model.seed = unit_seed;
    return model;
}

namespace {

Dataset generate_units(const PipelineContext& ctx, const std::vector<std::uint64_t>& units,
                       json& manifest_units) {
    const auto& cfg = ctx.cfg;
    Dataset merged;
    merged.n_x = static_cast<std::uint32_t>(cfg.channel.n_x);
    merged.dt_ps = cfg.channel.dt_ps;
    merged.t_ui_ps = cfg.channel.t_ui_ps;
    const MaskSpec mask{cfg.eval.mask_width_ps, cfg.eval.mask_height_mv};
    for (const auto unit : units) {
        const auto model = channel_for_unit(cfg, unit);
        auto ds = generate_dataset(model, cfg.channel.records_per_unit, cfg.channel.n_x,
                                   cfg.channel.window_stride, cfg.seeds.master, mask, ctx.threads,
                                   cfg.channel.dt_ps, cfg.channel.t_ui_ps);
        manifest_units.push_back({{"unit_seed", unit},
                                  {"base_seed", cfg.seeds.master},
                                  {"first_record", merged.records.size()},
                                  {"count", ds.records.size()}});
        for (auto& rec : ds.records) merged.records.push_back(std::move(rec));
    }
    return merged;
}

json channel_manifest(const RunConfig& cfg) {
    return {{"isi_taps", cfg.channel.isi_taps},
            {"noise_std", cfg.channel.noise_std},
            {"swing", cfg.channel.swing},
            {"rise_fraction", cfg.channel.rise_fraction},
            {"n_x", cfg.channel.n_x},
            {"dt_ps", cfg.channel.dt_ps},
            {"t_ui_ps", cfg.channel.t_ui_ps},
            {"window_stride", cfg.channel.window_stride},
            {"prbs", "prbs7 x^7+x^6+1, all-ones seed, seed-derived phase"},
            {"rng", "xoshiro256++ with splitmix64 expansion, Box-Muller normals"}};
}

}  // namespace

GenDataSummary run_gen_data(const PipelineContext& ctx) {
    ctx.paths.ensure();
    const auto& cfg = ctx.cfg;

    GenDataSummary summary;
    for (const bool heldout : {false, true}) {
        json units = json::array();
        auto ds = generate_units(ctx, heldout ? cfg.seeds.heldout_units : cfg.seeds.train_units,
                                 units);
        json manifest = base_meta(cfg, "gen-data");
        manifest["channel"] = channel_manifest(cfg);
        manifest["units"] = units;
        manifest["split"] = heldout ? "heldout" : "train";
        ds.manifest_json = manifest.dump(2);

        std::size_t valid = 0;
        for (const auto& rec : ds.records) valid += rec.label;
        if (heldout) {
            summary.heldout_records = ds.records.size();
            summary.heldout_valid = valid;
            write_dataset(ds, ctx.paths.heldout_data());
        } else {
            summary.train_records = ds.records.size();
            summary.train_valid = valid;
            write_dataset(ds, ctx.paths.train_data());
        }
    }
    return summary;
}

std::size_t run_label(const PipelineContext& ctx, const std::string& dataset_path) {
    require_file(dataset_path, "dataset", "gen-data");
    auto ds = read_dataset(dataset_path);
    const MaskSpec mask{ctx.cfg.eval.mask_width_ps, ctx.cfg.eval.mask_height_mv};
    const auto valid = label_dataset(ds, mask, ctx.threads);
    write_dataset(ds, dataset_path);
    return valid;
}

TrainEncoderResult run_train_encoder(const PipelineContext& ctx) {
    ctx.paths.ensure();
    const auto& cfg = ctx.cfg;
    require_file(ctx.paths.train_data(), "training dataset", "gen-data");
    const auto ds = read_dataset(ctx.paths.train_data());

    VibModel vib = make_vib(vib_config_from(cfg));
    auto result = train_encoder(vib, ds, cfg.encoder.epochs, cfg.encoder.batch, cfg.encoder.lr,
                                derive_seed(cfg.seeds.master, 0x747261696e));

    json meta = base_meta(cfg, "train-encoder");
    meta["variant"] = cfg.encoder.variant;
    meta["val_ce"] = result.val_ce;
    meta["val_accuracy"] = result.val_accuracy;
    meta["silhouette"] = result.silhouette;
    save_vib(vib, ctx.paths.encoder_stem(), meta.dump());

    std::string curve = "epoch,total,ce,kl,mse\n";
    for (std::size_t e = 0; e < result.curve.size(); ++e) {
        const auto& row = result.curve[e];
        curve += std::to_string(e + 1) + "," + std::to_string(row.total) + "," +
                 std::to_string(row.ce) + "," + std::to_string(row.kl) + "," +
                 std::to_string(row.mse) + "\n";
    }
    write_text_file(ctx.paths.encoder_curve(), curve);
    return result;
}

AnchorPoint run_anchor(const PipelineContext& ctx) {
    ctx.paths.ensure();
    const auto& cfg = ctx.cfg;
    require_file(ctx.paths.encoder_stem() + ".encoder.json", "encoder checkpoint",
                 "train-encoder");
    require_file(ctx.paths.train_data(), "training dataset", "gen-data");

    const auto vib = load_vib(ctx.paths.encoder_stem());
    const auto ds = read_dataset(ctx.paths.train_data());

    std::vector<std::vector<double>> valid_latents;
    for (const auto& rec : ds.records) {
        if (rec.label) valid_latents.push_back(latent_mean(vib, rec.output));
    }
    if (valid_latents.empty())
        throw TrainError("anchor: no valid-labeled records in the training dataset");

    auto anchor = weiszfeld_anchor(valid_latents, 1e-6, 1000);

    json j = base_meta(cfg, "anchor");
    j["c"] = anchor.c;
    j["n_valid"] = anchor.n_valid;
    j["residual"] = anchor.residual;
    j["max_iterations_hit"] = anchor.max_iterations_hit;
    j["encoder_checksum"] = encoder_checksum(vib);
    write_text_file(ctx.paths.anchor_file(), j.dump(2) + "\n");
    return anchor;
}

namespace {

AnchorPoint load_anchor(const std::string& path, std::uint64_t* checksum = nullptr,
                        std::uint64_t* config_hash = nullptr) {
    const auto j = json::parse(read_text_file(path));
    AnchorPoint anchor;
    anchor.c = j["c"].get<std::vector<double>>();
    anchor.n_valid = j["n_valid"].get<std::size_t>();
    anchor.residual = j["residual"].get<double>();
    anchor.max_iterations_hit = j["max_iterations_hit"].get<bool>();
    if (checksum) *checksum = j["encoder_checksum"].get<std::uint64_t>();
    if (config_hash) *config_hash = j["config_hash"].get<std::uint64_t>();
    return anchor;
}

std::pair<Dataset, Dataset> split_train_val(const Dataset& ds) {
    const std::size_t n = ds.records.size();
    const std::size_t n_train = std::max<std::size_t>(1, (n * 9) / 10);
    Dataset train, val;
    train.n_x = val.n_x = ds.n_x;
    train.dt_ps = val.dt_ps = ds.dt_ps;
    train.t_ui_ps = val.t_ui_ps = ds.t_ui_ps;
    train.records.assign(ds.records.begin(), ds.records.begin() + static_cast<std::ptrdiff_t>(n_train));
    val.records.assign(ds.records.begin() + static_cast<std::ptrdiff_t>(n_train), ds.records.end());
    if (val.records.empty()) val.records.push_back(ds.records.back());
    return {std::move(train), std::move(val)};
}

}  // namespace

TrainAgentResult run_train_agent(const PipelineContext& ctx) {
    ctx.paths.ensure();
    const auto& cfg = ctx.cfg;
    require_file(ctx.paths.encoder_stem() + ".encoder.json", "encoder checkpoint",
                 "train-encoder");
    require_file(ctx.paths.anchor_file(), "anchor", "anchor");
    require_file(ctx.paths.train_data(), "training dataset", "gen-data");

    const auto vib = load_vib(ctx.paths.encoder_stem());
    std::uint64_t anchor_checksum = 0;
    const auto anchor = load_anchor(ctx.paths.anchor_file(), &anchor_checksum);
    if (anchor_checksum != encoder_checksum(vib))
        throw ConfigError("train-agent: anchor was computed with a different encoder; rerun `anchor`");

    const auto full = read_dataset(ctx.paths.train_data());
    const auto [train_ds, val_ds] = split_train_val(full);

    const auto proj = projections_for(cfg);
    const double scale = calibrate_distance_scale(vib, anchor, proj, train_ds, ctx.threads);

    Agent agent = make_agent(agent_config_from(cfg));
    LatentEqEnv env(vib, anchor, proj, train_ds, val_ds, cfg.eq_kind(), cfg.equalizer.ranges,
                    cfg.encoder.mc_passes, cfg.agent.lambda_unc, scale, ctx.threads);
    const auto result = train_agent(agent, env, ctx.threads);

    json meta = base_meta(cfg, "train-agent");
    meta["distance_scale"] = scale;
    meta["equalizer_kind"] = cfg.equalizer.kind;
    meta["encoder_checksum"] = encoder_checksum(vib);
    meta["projections_seed"] = proj.seed;
    json dirs = json::array();
    for (const auto& u : proj.dirs) dirs.push_back(u);
    meta["projections"] = std::move(dirs);
    meta["epochs_run"] = result.epochs_run;
    meta["early_stopped"] = result.early_stopped;
    meta["quantile_crossings"] = agent.quantile_crossings;
    save_agent(agent, ctx.paths.agent_stem(), meta.dump());

    std::string curve = "epoch,actor_loss,critic_loss,mean_reward,val_cvar\n";
    for (std::size_t e = 0; e < result.curve.size(); ++e) {
        const auto& row = result.curve[e];
        curve += std::to_string(e + 1) + "," + std::to_string(row.actor_loss) + "," +
                 std::to_string(row.critic_loss) + "," + std::to_string(row.mean_reward) + "," +
                 std::to_string(row.val_cvar) + "\n";
    }
    write_text_file(ctx.paths.agent_curve(), curve);
    return result;
}

Artifacts load_artifacts(const PipelineContext& ctx, bool force_hash) {
    require_file(ctx.paths.encoder_stem() + ".encoder.json", "encoder checkpoint",
                 "train-encoder");
    require_file(ctx.paths.anchor_file(), "anchor", "anchor");
    require_file(ctx.paths.agent_stem() + ".policy.json", "agent checkpoint", "train-agent");

    Artifacts art;
    std::string enc_extra;
    art.vib = load_vib(ctx.paths.encoder_stem(), &enc_extra);

    std::uint64_t anchor_checksum = 0, anchor_hash = 0;
    art.anchor = load_anchor(ctx.paths.anchor_file(), &anchor_checksum, &anchor_hash);

    std::string agent_extra;
    art.agent = load_agent(ctx.paths.agent_stem(), &agent_extra);
    const auto agent_meta = json::parse(agent_extra);
    art.distance_scale = agent_meta["distance_scale"].get<double>();
    art.proj.seed = agent_meta["projections_seed"].get<std::uint64_t>();
    for (const auto& u : agent_meta["projections"])
        art.proj.dirs.push_back(u.get<std::vector<double>>());

    if (!force_hash) {
        const auto enc_hash = manifest_config_hash(enc_extra, "encoder");
        const auto agent_hash = agent_meta.value("config_hash", std::uint64_t{0});
        const auto expect = ctx.cfg.hash();
        if (enc_hash != expect || anchor_hash != expect || agent_hash != expect)
            throw ConfigError(
                "artifact config hashes do not match this configuration; regenerate the "
                "pipeline or pass --force");
        if (anchor_checksum != encoder_checksum(art.vib))
            throw ConfigError("anchor/encoder mismatch; rerun `anchor` (or pass --force)");
    }
    return art;
}

ActionProvider agent_provider(const Artifacts& art) {
    return [&art](std::size_t, const std::vector<double>& state) {
        return optimize_action(art.agent, state);
    };
}

ActionProvider random_provider(const RunConfig& cfg, std::uint64_t seed) {
    const int d = param_dim(cfg.eq_kind());
    return [d, seed](std::size_t record, const std::vector<double>&) {
        Rng rng(derive_seed(seed, derive_seed(kRandomEvalStream, record)));
        std::vector<double> a(static_cast<std::size_t>(d));
        for (auto& v : a) v = rng.uniform();
        return a;
    };
}

EvaluateOutput evaluate_dataset(const PipelineContext& ctx, const Artifacts& art,
                                const Dataset& ds, const ActionProvider& provider) {
    const auto& cfg = ctx.cfg;
    const auto kind = cfg.eq_kind();
    using clock = std::chrono::steady_clock;

    EvaluateOutput out;
    out.result.records.resize(ds.records.size());
    std::vector<double> wall_us(ds.records.size(), 0.0);
    std::vector<double> latent_us(ds.records.size(), 0.0);
    std::vector<double> eye_us(ds.records.size(), 0.0);

    parallel_for(ds.records.size(), ctx.threads, [&](std::size_t i) {
        const auto& w = ds.records[i].output;
        EvalRecord rec;
        rec.id = i;

        const auto eye_before = fold_eye(w);
        rec.area_before = window_area(eye_before);
        rec.valid_baseline = rec.area_before > 0.0;

        const auto t0 = clock::now();
        const auto state =
            mc_latent(art.vib, w, art.agent.cfg.mc_passes,
                      derive_seed(cfg.seeds.master, derive_seed(kEvalStateStream, i)))
                .as_state();
        const auto action = provider(i, state);
        const auto t1 = clock::now();
        wall_us[i] = std::chrono::duration<double, std::micro>(t1 - t0).count();

        const auto params = make_params(kind, action, cfg.equalizer.ranges);
        const auto equalized = apply(w, params);

        const auto t2 = clock::now();
        const auto eye_after = fold_eye(equalized);
        rec.area_after = window_area(eye_after);
        const auto t3 = clock::now();
        eye_us[i] = std::chrono::duration<double, std::micro>(t3 - t2).count();

        if (rec.valid_baseline) rec.improvement_pct = improvement(rec.area_before, rec.area_after);

        // Latent proxy of the same equalized waveform: one deterministic
        // encoder pass plus the sliced distance (the quantity the RL reward
        // replaces the eye metric with).
        const auto t4 = clock::now();
        const auto proxy_latent = latent_mean(art.vib, equalized);
        const double proxy = -sliced_w2(proxy_latent, art.anchor.c, art.proj);
        const auto t5 = clock::now();
        (void)proxy;
        latent_us[i] = std::chrono::duration<double, std::micro>(t5 - t4).count();

        const auto eq_latent =
            mc_latent(art.vib, equalized, art.agent.cfg.mc_passes,
                      derive_seed(cfg.seeds.master, derive_seed(kEqLatentStream, i)));
        rec.sigma_unc = eq_latent.uncertainty;
        rec.reward = latent_reward(eq_latent, art.anchor, art.proj, cfg.agent.lambda_unc,
                                   art.distance_scale);
        rec.critic_pred = mean_quantile(critic_quantiles(art.agent.critic, state, action));
        out.result.records[i] = std::move(rec);
    });

    out.result.aggregates = compute_aggregates(out.result.records);
    double wall = 0.0, lat = 0.0, eye = 0.0;
    for (std::size_t i = 0; i < ds.records.size(); ++i) {
        wall += wall_us[i];
        lat += latent_us[i];
        eye += eye_us[i];
    }
    const auto n = static_cast<double>(std::max<std::size_t>(1, ds.records.size()));
    out.result.wall_us_per_optimization = wall / n;
    out.latent_eval_us = lat / n;
    out.eye_eval_us = eye / n;
    return out;
}

std::vector<std::pair<double, double>> noise_robustness(const PipelineContext& ctx,
                                                        const Artifacts& art, const Dataset& ds) {
    const auto& cfg = ctx.cfg;
    const auto kind = cfg.eq_kind();
    std::vector<std::pair<double, double>> rows;

    for (const double sigma : cfg.eval.noise_sigmas) {
        std::vector<double> improvements(ds.records.size(),
                                         std::numeric_limits<double>::quiet_NaN());
        parallel_for(ds.records.size(), ctx.threads, [&](std::size_t i) {
            const auto& clean = ds.records[i].output;
            const auto eye_before = fold_eye(clean);
            const double area_before = window_area(eye_before);
            if (!(area_before > 0.0)) return;

            // Perturb in normalized units, derive parameters, score on clean.
            Waveform noisy = clean;
            Rng rng(derive_seed(cfg.seeds.master, derive_seed(kNoiseEvalStream, i)));
            const double std_mv = sigma * cfg.encoder.input_scale_mv;
            for (auto& s : noisy.samples)
                s = static_cast<float>(static_cast<double>(s) + std_mv * rng.normal());

            const auto state =
                mc_latent(art.vib, noisy, art.agent.cfg.mc_passes,
                          derive_seed(cfg.seeds.master, derive_seed(kEvalStateStream, i)))
                    .as_state();
            const auto params = make_params(kind, optimize_action(art.agent, state),
                                            cfg.equalizer.ranges);
            const auto equalized = apply(clean, params);
            improvements[i] = improvement(area_before, window_area(fold_eye(equalized)));
        });
        double acc = 0.0;
        std::size_t used = 0;
        for (double v : improvements) {
            if (!std::isnan(v)) {
                acc += v;
                used += 1;
            }
        }
        rows.emplace_back(sigma, used ? acc / static_cast<double>(used) : 0.0);
    }
    return rows;
}

EvaluateSummary run_evaluate(const PipelineContext& ctx, bool force) {
    ctx.paths.ensure();
    const auto& cfg = ctx.cfg;
    require_file(ctx.paths.train_data(), "training dataset", "gen-data");
    require_file(ctx.paths.heldout_data(), "held-out dataset", "gen-data");
    const auto art = load_artifacts(ctx, force);

    const auto train_ds = read_dataset(ctx.paths.train_data());
    const auto heldout_ds = read_dataset(ctx.paths.heldout_data());
    if (!force) {
        const auto expect = cfg.hash();
        if (manifest_config_hash(train_ds.manifest_json, "train dataset") != expect ||
            manifest_config_hash(heldout_ds.manifest_json, "heldout dataset") != expect)
            throw ConfigError("dataset config hashes do not match; rerun gen-data or pass --force");
    }

    const auto provider = agent_provider(art);
    const auto train_out = evaluate_dataset(ctx, art, train_ds, provider);
    const auto heldout_out = evaluate_dataset(ctx, art, heldout_ds, provider);

    EvaluateSummary summary;
    summary.train = train_out.result;
    summary.heldout = heldout_out.result;
    summary.gen_gap_pct = generalization_gap(summary.train, summary.heldout);

    double mean_unc = 0.0;
    for (const auto& r : summary.heldout.records) mean_unc += r.sigma_unc;
    if (!summary.heldout.records.empty())
        mean_unc /= static_cast<double>(summary.heldout.records.size());
    const ClassifyThresholds th{cfg.eval.threshold_pct, cfg.eval.unc_high, cfg.eval.unc_moderate};
    summary.deployment = classify(summary.heldout.aggregates.cvar05_pct,
                                  summary.heldout.aggregates.cvar10_pct, mean_unc, th);

    json report;
    report["schema_version"] = 1;
    report["config_hash"] = cfg.hash();
    report["version"] = kVersion;
    report["equalizer_kind"] = cfg.equalizer.kind;
    report["train"] = json::parse(eval_result_to_json(summary.train));
    report["heldout"] = json::parse(eval_result_to_json(summary.heldout));
    report["generalization_gap_pct"] = summary.gen_gap_pct;
    report["deployment"] = {{"class", to_string(summary.deployment)},
                            {"cvar05_pct", summary.heldout.aggregates.cvar05_pct},
                            {"cvar10_pct", summary.heldout.aggregates.cvar10_pct},
                            {"sigma_unc", mean_unc}};

    // Correlation between uncertainty and realized improvement.
    {
        std::vector<double> unc, imp;
        for (const auto& r : summary.heldout.records) {
            if (r.valid_baseline) {
                unc.push_back(r.sigma_unc);
                imp.push_back(r.improvement_pct);
            }
        }
        try {
            report["pearson_r_unc_improvement"] = pearson_r(unc, imp);
        } catch (const StatsError&) {
            report["pearson_r_unc_improvement"] = nullptr;
        }
    }
    try {
        json rows = json::array();
        for (const auto& row : calibration_quartiles(summary.heldout.records)) {
            rows.push_back({{"unc_lo", row.unc_lo},
                            {"unc_hi", row.unc_hi},
                            {"mean_perf_pct", row.mean_perf_pct},
                            {"expected_perf_pct", row.expected_perf_pct},
                            {"calibration_error_pct", row.calibration_error_pct},
                            {"count", row.count}});
        }
        report["calibration_quartiles"] = std::move(rows);
    } catch (const StatsError&) {
        report["calibration_quartiles"] = nullptr;
    }

    const auto plane = information_plane(art.vib, train_ds, 8, derive_seed(cfg.seeds.master, 0x6970));
    report["information_plane"] = {{"i_zy_bits", plane.i_zy_bits}, {"i_zx_bits", plane.i_zx_bits}};

    const auto robustness = noise_robustness(ctx, art, heldout_ds);
    {
        json rows = json::array();
        for (const auto& [sigma, mean] : robustness)
            rows.push_back({{"sigma", sigma}, {"mean_improvement_pct", mean}});
        report["noise_robustness"] = std::move(rows);
    }

    write_text_file(ctx.paths.report_file(), report.dump(2) + "\n");

    json timings;
    timings["latent_eval_us"] = heldout_out.latent_eval_us;
    timings["eye_eval_us"] = heldout_out.eye_eval_us;
    timings["speedup"] = heldout_out.latent_eval_us > 0.0
                             ? heldout_out.eye_eval_us / heldout_out.latent_eval_us
                             : 0.0;
    timings["wall_us_per_optimization"] = heldout_out.result.wall_us_per_optimization;
    write_text_file(ctx.paths.timings_file(), timings.dump(2) + "\n");
    return summary;
}

DeploymentClass run_classify(const PipelineContext& ctx) {
    require_file(ctx.paths.report_file(), "evaluation report", "evaluate");
    const auto report = json::parse(read_text_file(ctx.paths.report_file()));
    const auto name = report["deployment"]["class"].get<std::string>();
    if (name == "HighReliability") return DeploymentClass::HighReliability;
    if (name == "ModerateConfidence") return DeploymentClass::ModerateConfidence;
    return DeploymentClass::ValidationRequired;
}

BaselineRun run_baseline(const PipelineContext& ctx, const std::string& method,
                         const std::string& fitness_mode) {
    ctx.paths.ensure();
    const auto& cfg = ctx.cfg;
    require_file(ctx.paths.train_data(), "training dataset", "gen-data");
    require_file(ctx.paths.heldout_data(), "held-out dataset", "gen-data");
    const auto train_ds = read_dataset(ctx.paths.train_data());
    const auto heldout_ds = read_dataset(ctx.paths.heldout_data());
    const auto kind = cfg.eq_kind();
    const int d = param_dim(kind);

    // Small fixed evaluation set: the first 8 open-eye training waveforms.
    std::vector<const Waveform*> eval_set;
    std::vector<double> eval_areas;
    for (const auto& rec : train_ds.records) {
        const double area = window_area(fold_eye(rec.output));
        if (area > 0.0) {
            eval_set.push_back(&rec.output);
            eval_areas.push_back(area);
            if (eval_set.size() >= 8) break;
        }
    }
    if (eval_set.empty()) throw TrainError("baseline: no open-eye training waveforms");

    std::optional<VibModel> vib;
    AnchorPoint anchor;
    ProjectionSet proj;
    if (fitness_mode == "latent") {
        require_file(ctx.paths.encoder_stem() + ".encoder.json", "encoder checkpoint",
                     "train-encoder");
        require_file(ctx.paths.anchor_file(), "anchor", "anchor");
        vib = load_vib(ctx.paths.encoder_stem());
        anchor = load_anchor(ctx.paths.anchor_file());
        proj = projections_for(cfg);
    } else if (fitness_mode != "eye") {
        throw ConfigError("baseline: fitness mode must be latent or eye");
    }

    FitnessFn fitness([&](std::span<const double> p) {
        const auto params = make_params(kind, std::vector<double>(p.begin(), p.end()),
                                        cfg.equalizer.ranges);
        double acc = 0.0;
        for (std::size_t i = 0; i < eval_set.size(); ++i) {
            const auto equalized = apply(*eval_set[i], params);
            if (fitness_mode == "latent") {
                acc -= sliced_w2(latent_mean(*vib, equalized), anchor.c, proj);
            } else {
                acc += improvement(eval_areas[i], window_area(fold_eye(equalized)));
            }
        }
        return acc / static_cast<double>(eval_set.size());
    });

    BaselineRun run;
    const auto seed = derive_seed(cfg.seeds.master, 0x62617365);
    if (method == "ga") {
        run.opt = ga_optimize(fitness, GaConfig{}, d, seed);
    } else if (method == "pso") {
        run.opt = pso_optimize(fitness, PsoConfig{}, d, seed);
    } else if (method == "grid") {
        run.opt = grid_search(fitness, d, d == 4 ? 7 : 3);
    } else {
        throw ConfigError("baseline: method must be ga, pso or grid");
    }

    // Score the winning parameters on the held-out set.
    const auto params = make_params(kind, run.opt.best, cfg.equalizer.ranges);
    std::vector<double> improvements;
    for (const auto& rec : heldout_ds.records) {
        const double area = window_area(fold_eye(rec.output));
        if (!(area > 0.0)) continue;
        improvements.push_back(improvement(area, window_area(fold_eye(apply(rec.output, params)))));
    }
    run.heldout_used = improvements.size();
    if (!improvements.empty()) {
        for (double v : improvements) run.heldout_mean_pct += v;
        run.heldout_mean_pct /= static_cast<double>(improvements.size());
        run.heldout_cvar10_pct = improvements.size() >= 10 ? empirical_cvar(improvements, 0.10)
                                                           : run.heldout_mean_pct;
    }

    json j = base_meta(cfg, "baseline");
    j["method"] = method;
    j["fitness_mode"] = fitness_mode;
    j["best"] = run.opt.best;
    j["best_fitness"] = run.opt.best_fitness;
    j["history"] = run.opt.history;
    j["fitness_calls"] = run.opt.fitness_calls;
    j["roulette_fallback"] = run.opt.roulette_fallback;
    j["heldout_mean_pct"] = run.heldout_mean_pct;
    j["heldout_cvar10_pct"] = run.heldout_cvar10_pct;
    j["heldout_used"] = run.heldout_used;
    write_text_file(ctx.paths.baseline_file(method, fitness_mode), j.dump(2) + "\n");
    return run;
}

void run_report(const PipelineContext& ctx) {
    ctx.paths.ensure();
    require_file(ctx.paths.report_file(), "evaluation report", "evaluate");
    const auto report = json::parse(read_text_file(ctx.paths.report_file()));

    json summary;
    summary["config_hash"] = report["config_hash"];
    summary["version"] = kVersion;
    summary["evaluation"] = report;

    // Method comparison table.
    std::string table = "method,mean_pct,cvar10_pct,std_pct,n\n";
    {
        const auto& agg = report["heldout"]["aggregates"];
        table += "dr-ib-a2c," + std::to_string(agg["mean_pct"].get<double>()) + "," +
                 std::to_string(agg["cvar10_pct"].get<double>()) + "," +
                 std::to_string(agg["std_pct"].get<double>()) + "," +
                 std::to_string(agg["n_used"].get<std::size_t>()) + "\n";
    }
    json baselines = json::array();
    for (const std::string method : {"ga", "pso", "grid"}) {
        for (const std::string mode : {"latent", "eye"}) {
            const auto path = ctx.paths.baseline_file(method, mode);
            if (!file_exists(path)) continue;
            const auto b = json::parse(read_text_file(path));
            baselines.push_back(b);
            table += method + "-" + mode + "," + std::to_string(b["heldout_mean_pct"].get<double>()) +
                     "," + std::to_string(b["heldout_cvar10_pct"].get<double>()) + ",," +
                     std::to_string(b["heldout_used"].get<std::size_t>()) + "\n";
        }
    }
    summary["baselines"] = std::move(baselines);
    if (file_exists(ctx.paths.timings_file()))
        summary["timings"] = json::parse(read_text_file(ctx.paths.timings_file()));
    write_text_file(ctx.paths.reports_dir() + "/table_performance.csv", table);

    // Calibration table analogue.
    if (report.contains("calibration_quartiles") && !report["calibration_quartiles"].is_null()) {
        std::string cal = "quartile,unc_lo,unc_hi,mean_perf_pct,expected_perf_pct,calibration_error_pct\n";
        int q = 1;
        for (const auto& row : report["calibration_quartiles"]) {
            cal += "Q" + std::to_string(q++) + "," + std::to_string(row["unc_lo"].get<double>()) +
                   "," + std::to_string(row["unc_hi"].get<double>()) + "," +
                   std::to_string(row["mean_perf_pct"].get<double>()) + "," +
                   std::to_string(row["expected_perf_pct"].get<double>()) + "," +
                   std::to_string(row["calibration_error_pct"].get<double>()) + "\n";
        }
        write_text_file(ctx.paths.reports_dir() + "/table_calibration.csv", cal);
    }

    // Robustness table analogue.
    {
        std::string rob = "sigma,mean_improvement_pct\n";
        for (const auto& row : report["noise_robustness"]) {
            rob += std::to_string(row["sigma"].get<double>()) + "," +
                   std::to_string(row["mean_improvement_pct"].get<double>()) + "\n";
        }
        write_text_file(ctx.paths.reports_dir() + "/table_robustness.csv", rob);
    }

    // Wasserstein convergence curve (empirical vs gamma^k bound).
    {
        const auto mdp = make_contraction_demo_mdp();
        const double gamma = 0.98;
        const auto contraction = bellman_contraction_harness(mdp, gamma, 200, 51, 10000);
        std::string curve = "iteration,empirical_w1,gamma_k_bound\n";
        for (std::size_t k = 0; k < contraction.w1.size(); ++k) {
            curve += std::to_string(k) + "," + std::to_string(contraction.w1[k]) + "," +
                     std::to_string(contraction.w1[0] * std::pow(gamma, static_cast<double>(k))) +
                     "\n";
        }
        write_text_file(ctx.paths.wasserstein_curve(), curve);
        summary["contraction"] = {{"eps_quant", contraction.eps_quant},
                                  {"iterations", contraction.w1.size() - 1}};
    }

    write_text_file(ctx.paths.summary_file(), summary.dump(2) + "\n");
}

EqualizerParams run_optimize(const PipelineContext& ctx, const std::string& dataset_path,
                             std::size_t record_index) {
    const auto art = load_artifacts(ctx, /*force_hash=*/true);
    require_file(dataset_path, "dataset", "gen-data");
    const auto ds = read_dataset(dataset_path);
    if (record_index >= ds.records.size())
        throw InputError("optimize: record index out of range");
    return optimize(art.agent, art.vib, ds.records[record_index].output, ctx.cfg.eq_kind(),
                    ctx.cfg.equalizer.ranges,
                    derive_seed(ctx.cfg.seeds.master, derive_seed(kEvalStateStream, record_index)),
                    ctx.threads);
}

}  // namespace eqrl

#include "eqrl/vib.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "eqrl/evalreport.hpp"
#include "eqrl/rng.hpp"
#include "eqrl/threading.hpp"
#include "json.hpp"

namespace eqrl {

namespace {

constexpr std::uint64_t kEncoderStream = 1;
constexpr std::uint64_t kClassifierStream = 2;
constexpr std::uint64_t kDecoderStream = 3;
constexpr std::uint64_t kReparamStream = 4;

double softplus(double x) { return x > 30.0 ? x : std::log1p(std::exp(x)); }

// Numerically stable binary cross-entropy from the logit.
double bce_from_logit(double logit, double y) { return softplus(logit) - y * logit; }

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

VibModel make_vib(const VibConfig& cfg) {
    if (cfg.input_dim < 1 || cfg.latent_dim < 1)
        throw ConfigError("vib: input_dim and latent_dim must be >= 1");
    if (!(cfg.beta > 0.0) && !cfg.deterministic_bottleneck)
        throw ConfigError("vib: beta must be > 0 for the IB variant");
    if (cfg.lambda_rec < 0.0) throw ConfigError("vib: lambda_rec must be >= 0");

    VibModel m;
    m.cfg = cfg;

    std::vector<LayerSpec> enc;
    int prev = cfg.input_dim;
    for (int h : cfg.encoder_hidden) {
        enc.push_back({prev, h, Activation::Relu, cfg.dropout_p, false});
        prev = h;
    }
    enc.push_back({prev, 2 * cfg.latent_dim, Activation::Identity, 0.0, false});
    m.encoder = Mlp(enc, derive_seed(cfg.init_seed, kEncoderStream));

    m.classifier = Mlp({{cfg.latent_dim, cfg.classifier_hidden, Activation::Relu, cfg.dropout_p, false},
                        {cfg.classifier_hidden, 1, Activation::Identity, 0.0, false}},
                       derive_seed(cfg.init_seed, kClassifierStream));

    std::vector<LayerSpec> dec;
    prev = cfg.latent_dim;
    for (auto it = cfg.encoder_hidden.rbegin(); it != cfg.encoder_hidden.rend(); ++it) {
        dec.push_back({prev, *it, Activation::Relu, cfg.dropout_p, false});
        prev = *it;
    }
    dec.push_back({prev, cfg.input_dim, Activation::Identity, 0.0, false});
    m.decoder = Mlp(dec, derive_seed(cfg.init_seed, kDecoderStream));
    return m;
}

std::vector<double> normalize_waveform(const Waveform& w, double scale_mv) {
    std::vector<double> x(w.samples.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(w.samples[i]) / scale_mv;
    return x;
}

namespace {

struct SplitLatent {
    std::vector<double> mu, logvar;
    std::vector<bool> clamped;  // logvar clamp engaged -> zero gradient
};

SplitLatent split_encoder_output(const std::vector<double>& out, int latent_dim, double clamp) {
    SplitLatent s;
    s.mu.assign(out.begin(), out.begin() + latent_dim);
    s.logvar.resize(static_cast<std::size_t>(latent_dim));
    s.clamped.resize(static_cast<std::size_t>(latent_dim));
    for (int i = 0; i < latent_dim; ++i) {
        const double raw = out[static_cast<std::size_t>(latent_dim + i)];
        const double lv = std::clamp(raw, -clamp, clamp);
        s.logvar[static_cast<std::size_t>(i)] = lv;
        s.clamped[static_cast<std::size_t>(i)] = lv != raw;
    }
    return s;
}

}  // namespace

EncodeResult encode(const VibModel& m, const Waveform& w, std::uint64_t noise_seed) {
    const auto x = normalize_waveform(w, m.cfg.input_scale_mv);
    if (static_cast<int>(x.size()) != m.cfg.input_dim)
        throw InputError("encode: waveform length does not match encoder input");
    const auto out = forward(m.encoder, x, ForwardMode::Eval);
    auto s = split_encoder_output(out, m.cfg.latent_dim, m.cfg.logvar_clamp);

    EncodeResult res;
    res.mu = s.mu;
    res.logvar = s.logvar;
    res.z.resize(s.mu.size());
    if (m.cfg.deterministic_bottleneck) {
        res.z = s.mu;
    } else {
        Rng rng(derive_seed(noise_seed, kReparamStream));
        for (std::size_t i = 0; i < res.z.size(); ++i)
            res.z[i] = s.mu[i] + std::exp(0.5 * s.logvar[i]) * rng.normal();
    }
    return res;
}

double classify_latent(const VibModel& m, std::span<const double> z) {
    const auto out = forward(m.classifier, z, ForwardMode::Eval);
    return sigmoid(out[0]);
}

double kl_to_standard_normal(std::span<const double> mu, std::span<const double> logvar) {
    if (mu.size() != logvar.size()) throw InputError("kl: shape mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        if (!std::isfinite(mu[i]) || !std::isfinite(logvar[i]))
            throw InputError("kl: non-finite input");
        acc += std::exp(logvar[i]) + mu[i] * mu[i] - 1.0 - logvar[i];
    }
    return 0.5 * acc;
}

namespace {

struct SampleGrads {
    VibLossParts parts;
    Gradients enc, cls, dec;
};

// Forward + backward for one labeled record under fixed dropout/reparam seeds.
SampleGrads sample_loss_grads(const VibModel& m, const LabeledPair& rec, std::uint64_t seed) {
    const auto& cfg = m.cfg;
    const auto x = normalize_waveform(rec.output, cfg.input_scale_mv);
    if (static_cast<int>(x.size()) != cfg.input_dim)
        throw InputError("vib_loss: waveform length does not match encoder input");
    const double y = rec.label ? 1.0 : 0.0;
    const auto l = static_cast<std::size_t>(cfg.latent_dim);

    ForwardCache enc_cache, cls_cache, dec_cache;
    const auto enc_out =
        forward(m.encoder, x, ForwardMode::Train, derive_seed(seed, kEncoderStream), &enc_cache);
    auto s = split_encoder_output(enc_out, cfg.latent_dim, cfg.logvar_clamp);

    std::vector<double> eps(l, 0.0), z(l);
    if (cfg.deterministic_bottleneck) {
        z = s.mu;
    } else {
        Rng rng(derive_seed(seed, kReparamStream));
        for (std::size_t i = 0; i < l; ++i) {
            eps[i] = rng.normal();
            z[i] = s.mu[i] + std::exp(0.5 * s.logvar[i]) * eps[i];
        }
    }

    const auto cls_out =
        forward(m.classifier, z, ForwardMode::Train, derive_seed(seed, kClassifierStream), &cls_cache);
    const double logit = cls_out[0];
    const double ce = bce_from_logit(logit, y);

    const auto dec_out =
        forward(m.decoder, z, ForwardMode::Train, derive_seed(seed, kDecoderStream), &dec_cache);
    double mse = 0.0;
    std::vector<double> dec_up(dec_out.size());
    for (std::size_t i = 0; i < dec_out.size(); ++i) {
        const double d = dec_out[i] - x[i];
        mse += d * d;
        dec_up[i] = cfg.lambda_rec * 2.0 * d;
    }

    const double kl = cfg.deterministic_bottleneck ? 0.0 : kl_to_standard_normal(s.mu, s.logvar);
    const double beta = cfg.deterministic_bottleneck ? 0.0 : cfg.beta;

    SampleGrads out;
    out.parts.ce = ce;
    out.parts.kl = kl;
    out.parts.mse = mse;
    out.parts.total = ce + beta * kl + cfg.lambda_rec * mse;

    out.cls = zero_gradients(m.classifier);
    backward_accumulate(m.classifier, cls_cache, std::vector<double>{sigmoid(logit) - y}, out.cls);
    out.dec = zero_gradients(m.decoder);
    backward_accumulate(m.decoder, dec_cache, dec_up, out.dec);

    // Gradient into the bottleneck: reconstruction always, classification
    // unless the ablation detaches it.
    std::vector<double> g_z(l, 0.0);
    for (std::size_t i = 0; i < l; ++i) {
        g_z[i] = out.dec.dx[i];
        if (!cfg.detach_classifier) g_z[i] += out.cls.dx[i];
    }

    std::vector<double> enc_up(2 * l, 0.0);
    for (std::size_t i = 0; i < l; ++i) {
        double g_mu = g_z[i];
        double g_lv = cfg.deterministic_bottleneck
                          ? 0.0
                          : g_z[i] * eps[i] * 0.5 * std::exp(0.5 * s.logvar[i]);
        if (beta > 0.0) {
            g_mu += beta * s.mu[i];
            g_lv += beta * 0.5 * (std::exp(s.logvar[i]) - 1.0);
        }
        enc_up[i] = g_mu;
        enc_up[l + i] = s.clamped[i] ? 0.0 : g_lv;
    }
    out.enc = zero_gradients(m.encoder);
    backward_accumulate(m.encoder, enc_cache, enc_up, out.enc);
    return out;
}

}  // namespace

VibLossParts vib_loss(const VibModel& m, const std::vector<const LabeledPair*>& batch,
                      std::uint64_t seed) {
    if (batch.empty()) throw InputError("vib_loss: empty batch");
    VibLossParts acc;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const auto g = sample_loss_grads(m, *batch[i], derive_seed(seed, i));
        acc.total += g.parts.total;
        acc.ce += g.parts.ce;
        acc.kl += g.parts.kl;
        acc.mse += g.parts.mse;
    }
    const auto n = static_cast<double>(batch.size());
    acc.total /= n;
    acc.ce /= n;
    acc.kl /= n;
    acc.mse /= n;
    return acc;
}

TrainEncoderResult train_encoder(VibModel& m, const Dataset& ds, int epochs, int batch, double lr,
                                 std::uint64_t seed) {
    if (batch < 1) throw ConfigError("train_encoder: batch must be >= 1");
    const std::size_t n = ds.records.size();
    if (n < 2) throw TrainError("train_encoder: need at least 2 records");

    const std::size_t n_train = std::max<std::size_t>(1, (n * 9) / 10);
    std::size_t pos = 0, neg = 0;
    for (std::size_t i = 0; i < n_train; ++i) (ds.records[i].label ? pos : neg) += 1;
    if (pos == 0 || neg == 0)
        throw TrainError("train_encoder: training split must contain both labels");

    AdamState opt_enc, opt_cls, opt_dec;
    opt_enc.lr = opt_cls.lr = opt_dec.lr = lr;
    TrainEncoderResult result;

    std::vector<std::size_t> order(n_train);
    for (std::size_t i = 0; i < n_train; ++i) order[i] = i;

    for (int epoch = 0; epoch < epochs; ++epoch) {
        // Fisher-Yates with the epoch stream keeps runs reproducible.
        Rng shuffle_rng(derive_seed(seed, 0x1000 + static_cast<std::uint64_t>(epoch)));
        for (std::size_t i = n_train - 1; i > 0; --i) {
            const auto j = static_cast<std::size_t>(shuffle_rng.below(i + 1));
            std::swap(order[i], order[j]);
        }

        VibEpochRow row;
        std::size_t seen = 0;
        for (std::size_t start = 0; start < n_train; start += static_cast<std::size_t>(batch)) {
            const std::size_t stop = std::min(n_train, start + static_cast<std::size_t>(batch));
            Gradients g_enc = zero_gradients(m.encoder);
            Gradients g_cls = zero_gradients(m.classifier);
            Gradients g_dec = zero_gradients(m.decoder);
            VibLossParts parts;
            for (std::size_t k = start; k < stop; ++k) {
                const std::uint64_t sample_seed =
                    derive_seed(seed, 0x2000 + static_cast<std::uint64_t>(epoch) * 1000003 + k);
                const auto g = sample_loss_grads(m, ds.records[order[k]], sample_seed);
                const double inv = 1.0 / static_cast<double>(stop - start);
                g_enc.add_scaled(g.enc, inv);
                g_cls.add_scaled(g.cls, inv);
                g_dec.add_scaled(g.dec, inv);
                parts.total += g.parts.total;
                parts.ce += g.parts.ce;
                parts.kl += g.parts.kl;
                parts.mse += g.parts.mse;
            }
            adam_step(opt_enc, m.encoder, g_enc);
            adam_step(opt_cls, m.classifier, g_cls);
            adam_step(opt_dec, m.decoder, g_dec);
            row.total += parts.total;
            row.ce += parts.ce;
            row.kl += parts.kl;
            row.mse += parts.mse;
            seen += stop - start;
        }
        const auto inv = 1.0 / static_cast<double>(seen);
        row.total *= inv;
        row.ce *= inv;
        row.kl *= inv;
        row.mse *= inv;
        result.curve.push_back(row);
    }

    // Validation: eval-mode CE and accuracy on the held-back tail.
    double val_ce = 0.0;
    std::size_t correct = 0, n_val = 0;
    for (std::size_t i = n_train; i < n; ++i) {
        const auto x = normalize_waveform(ds.records[i].output, m.cfg.input_scale_mv);
        const auto enc_out = forward(m.encoder, x, ForwardMode::Eval);
        const auto s = split_encoder_output(enc_out, m.cfg.latent_dim, m.cfg.logvar_clamp);
        const auto logit = forward(m.classifier, s.mu, ForwardMode::Eval)[0];
        const double y = ds.records[i].label ? 1.0 : 0.0;
        val_ce += bce_from_logit(logit, y);
        correct += ((logit >= 0.0) == (ds.records[i].label != 0)) ? 1u : 0u;
        n_val += 1;
    }
    if (n_val > 0) {
        result.val_ce = val_ce / static_cast<double>(n_val);
        result.val_accuracy = static_cast<double>(correct) / static_cast<double>(n_val);
    }

    // Latent structure over the whole corpus (validation splits can be
    // single-class at desk scale).
    std::vector<std::vector<double>> latents(n);
    std::vector<int> labels(n);
    bool any_pos = false, any_neg = false;
    for (std::size_t i = 0; i < n; ++i) {
        latents[i] = latent_mean(m, ds.records[i].output);
        labels[i] = ds.records[i].label;
        (labels[i] ? any_pos : any_neg) = true;
    }
    result.silhouette = (any_pos && any_neg) ? silhouette_score(latents, labels) : 0.0;
    return result;
}

LatentState mc_latent(const VibModel& m, const Waveform& w, int passes, std::uint64_t seed,
                      int threads) {
    if (passes < 2) throw InputError("mc_latent: need at least 2 passes");
    const auto x = normalize_waveform(w, m.cfg.input_scale_mv);
    if (static_cast<int>(x.size()) != m.cfg.input_dim)
        throw InputError("mc_latent: waveform length does not match encoder input");
    const auto l = static_cast<std::size_t>(m.cfg.latent_dim);

    std::vector<std::vector<double>> mus(static_cast<std::size_t>(passes));
    parallel_for(static_cast<std::size_t>(passes), threads, [&](std::size_t p) {
        const auto out = forward(m.encoder, x, ForwardMode::McDropout, derive_seed(seed, p));
        mus[p].assign(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(l));
    });

    LatentState state;
    state.mean.assign(l, 0.0);
    for (const auto& mu : mus)
        for (std::size_t i = 0; i < l; ++i) state.mean[i] += mu[i];
    for (auto& v : state.mean) v /= static_cast<double>(passes);

    state.std.assign(l, 0.0);
    for (const auto& mu : mus)
        for (std::size_t i = 0; i < l; ++i) {
            const double d = mu[i] - state.mean[i];
            state.std[i] += d * d;
        }
    double unc = 0.0;
    for (auto& v : state.std) {
        v = std::sqrt(v / static_cast<double>(passes - 1));
        unc += v * v;
    }
    state.uncertainty = std::sqrt(unc);
    return state;
}

std::vector<double> latent_mean(const VibModel& m, const Waveform& w) {
    const auto x = normalize_waveform(w, m.cfg.input_scale_mv);
    if (static_cast<int>(x.size()) != m.cfg.input_dim)
        throw InputError("latent_mean: waveform length does not match encoder input");
    const auto out = forward(m.encoder, x, ForwardMode::Eval);
    return {out.begin(), out.begin() + m.cfg.latent_dim};
}

InfoPlane information_plane(const VibModel& m, const Dataset& ds, int mc_samples,
                            std::uint64_t seed) {
    if (ds.records.empty()) throw InputError("information_plane: empty dataset");
    if (mc_samples < 1) throw InputError("information_plane: mc_samples must be >= 1");

    std::size_t pos = 0;
    double ce_acc = 0.0, kl_acc = 0.0;
    for (std::size_t r = 0; r < ds.records.size(); ++r) {
        const auto& rec = ds.records[r];
        pos += rec.label;
        const auto x = normalize_waveform(rec.output, m.cfg.input_scale_mv);
        const auto enc_out = forward(m.encoder, x, ForwardMode::Eval);
        const auto s = split_encoder_output(enc_out, m.cfg.latent_dim, m.cfg.logvar_clamp);
        kl_acc += kl_to_standard_normal(s.mu, s.logvar);

        Rng rng(derive_seed(seed, r));
        const double y = rec.label ? 1.0 : 0.0;
        for (int k = 0; k < mc_samples; ++k) {
            std::vector<double> z(s.mu.size());
            for (std::size_t i = 0; i < z.size(); ++i) {
                const double noise = m.cfg.deterministic_bottleneck ? 0.0 : rng.normal();
                z[i] = s.mu[i] + std::exp(0.5 * s.logvar[i]) * noise;
            }
            ce_acc += bce_from_logit(forward(m.classifier, z, ForwardMode::Eval)[0], y);
        }
    }
    const auto n = static_cast<double>(ds.records.size());
    const double ce = ce_acc / (n * mc_samples);
    const double kl = kl_acc / n;

    const double p1 = static_cast<double>(pos) / n;
    double h_y = 0.0;  // bits
    if (p1 > 0.0 && p1 < 1.0) h_y = -(p1 * std::log2(p1) + (1.0 - p1) * std::log2(1.0 - p1));

    InfoPlane plane;
    plane.i_zy_bits = h_y - ce / std::log(2.0);
    plane.i_zx_bits = kl / std::log(2.0);
    return plane;
}

void save_vib(const VibModel& m, const std::string& path_stem, const std::string& extra_json) {
    nlohmann::json cfg;
    cfg["input_dim"] = m.cfg.input_dim;
    cfg["latent_dim"] = m.cfg.latent_dim;
    cfg["encoder_hidden"] = m.cfg.encoder_hidden;
    cfg["classifier_hidden"] = m.cfg.classifier_hidden;
    cfg["beta"] = m.cfg.beta;
    cfg["lambda_rec"] = m.cfg.lambda_rec;
    cfg["dropout_p"] = m.cfg.dropout_p;
    cfg["logvar_clamp"] = m.cfg.logvar_clamp;
    cfg["input_scale_mv"] = m.cfg.input_scale_mv;
    cfg["deterministic_bottleneck"] = m.cfg.deterministic_bottleneck;
    cfg["detach_classifier"] = m.cfg.detach_classifier;
    cfg["init_seed"] = m.cfg.init_seed;
    nlohmann::json meta;
    meta["vib"] = cfg;
    if (!extra_json.empty()) meta["extra"] = nlohmann::json::parse(extra_json);
    save_mlp(m.encoder, path_stem + ".encoder", meta.dump());
    save_mlp(m.classifier, path_stem + ".classifier");
    save_mlp(m.decoder, path_stem + ".decoder");
}

VibModel load_vib(const std::string& path_stem, std::string* extra_json) {
    std::string meta_text;
    Mlp encoder = load_mlp(path_stem + ".encoder", &meta_text);
    nlohmann::json meta = nlohmann::json::parse(meta_text);
    if (!meta.contains("vib")) throw IoError("not a vib checkpoint: " + path_stem);
    const auto& cfg_json = meta["vib"];

    VibConfig cfg;
    cfg.input_dim = cfg_json["input_dim"].get<int>();
    cfg.latent_dim = cfg_json["latent_dim"].get<int>();
    cfg.encoder_hidden = cfg_json["encoder_hidden"].get<std::vector<int>>();
    cfg.classifier_hidden = cfg_json["classifier_hidden"].get<int>();
    cfg.beta = cfg_json["beta"].get<double>();
    cfg.lambda_rec = cfg_json["lambda_rec"].get<double>();
    cfg.dropout_p = cfg_json["dropout_p"].get<double>();
    cfg.logvar_clamp = cfg_json["logvar_clamp"].get<double>();
    cfg.input_scale_mv = cfg_json["input_scale_mv"].get<double>();
    cfg.deterministic_bottleneck = cfg_json["deterministic_bottleneck"].get<bool>();
    cfg.detach_classifier = cfg_json["detach_classifier"].get<bool>();
    cfg.init_seed = cfg_json["init_seed"].get<std::uint64_t>();

    VibModel m;
    m.cfg = cfg;
    m.encoder = std::move(encoder);
    m.classifier = load_mlp(path_stem + ".classifier");
    m.decoder = load_mlp(path_stem + ".decoder");
    if (extra_json) *extra_json = meta.contains("extra") ? meta["extra"].dump() : std::string("{}");
    return m;
}

std::uint64_t encoder_checksum(const VibModel& m) {
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a
    auto feed = [&h](double v) {
        const auto f = static_cast<float>(v);
        std::uint32_t bits;
        std::memcpy(&bits, &f, sizeof(bits));
        for (int k = 0; k < 4; ++k) {
            h ^= (bits >> (8 * k)) & 0xFFu;
            h *= 1099511628211ull;
        }
    };
    for (const auto& layer : m.encoder.layers) {
        for (double v : layer.w) feed(v);
        for (double v : layer.b) feed(v);
    }
    return h;
}

}  // namespace eqrl

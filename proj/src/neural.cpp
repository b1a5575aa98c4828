#include "eqrl/neural.hpp"

#include <cmath>
#include <fstream>

#include "eqrl/rng.hpp"
#include "json.hpp"

namespace eqrl {

std::string to_string(Activation a) {
    switch (a) {
        case Activation::Identity: return "identity";
        case Activation::Relu: return "relu";
        case Activation::Sigmoid: return "sigmoid";
    }
    return "identity";
}

Activation activation_from_string(const std::string& s) {
    if (s == "identity") return Activation::Identity;
    if (s == "relu") return Activation::Relu;
    if (s == "sigmoid") return Activation::Sigmoid;
    throw ConfigError("unknown activation: " + s);
}

Mlp::Mlp(const std::vector<LayerSpec>& specs, std::uint64_t init_seed) {
    layers.reserve(specs.size());
    int prev_out = -1;
    for (std::size_t li = 0; li < specs.size(); ++li) {
        const auto& sp = specs[li];
        if (sp.in <= 0 || sp.out <= 0) throw ConfigError("mlp: layer dims must be positive");
        if (prev_out >= 0 && sp.in != prev_out)
            throw ConfigError("mlp: consecutive layer dimensions must chain");
        if (!(sp.dropout_p >= 0.0 && sp.dropout_p < 1.0))
            throw ConfigError("mlp: dropout_p must be in [0,1)");
        prev_out = sp.out;

        DenseLayer layer;
        layer.in = sp.in;
        layer.out = sp.out;
        layer.act = sp.act;
        layer.dropout_p = sp.dropout_p;
        layer.spectral_norm = sp.spectral_norm;
        layer.w.resize(static_cast<std::size_t>(sp.in) * sp.out);
        layer.b.assign(static_cast<std::size_t>(sp.out), 0.0);

        // Kaiming-uniform for ReLU layers, Xavier-uniform otherwise.
        Rng rng(derive_seed(init_seed, li));
        const double bound = sp.act == Activation::Relu
                                 ? std::sqrt(6.0 / sp.in)
                                 : std::sqrt(6.0 / (sp.in + sp.out));
        for (auto& weight : layer.w) weight = rng.uniform(-bound, bound);

        layer.sn_u.resize(static_cast<std::size_t>(sp.out));
        layer.sn_v.resize(static_cast<std::size_t>(sp.in));
        Rng sn_rng(derive_seed(init_seed, 0x736e00 + li));
        for (auto& u : layer.sn_u) u = sn_rng.normal();
        for (auto& v : layer.sn_v) v = sn_rng.normal();

        layers.push_back(std::move(layer));
    }
}

std::size_t Mlp::param_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.w.size() + l.b.size();
    return n;
}

std::vector<double> Mlp::flat_params() const {
    std::vector<double> out;
    out.reserve(param_count());
    for (const auto& l : layers) {
        out.insert(out.end(), l.w.begin(), l.w.end());
        out.insert(out.end(), l.b.begin(), l.b.end());
    }
    return out;
}

void Mlp::set_flat_params(std::span<const double> p) {
    if (p.size() != param_count()) throw InputError("set_flat_params: size mismatch");
    std::size_t off = 0;
    for (auto& l : layers) {
        std::copy(p.begin() + static_cast<std::ptrdiff_t>(off),
                  p.begin() + static_cast<std::ptrdiff_t>(off + l.w.size()), l.w.begin());
        off += l.w.size();
        std::copy(p.begin() + static_cast<std::ptrdiff_t>(off),
                  p.begin() + static_cast<std::ptrdiff_t>(off + l.b.size()), l.b.begin());
        off += l.b.size();
    }
}

namespace {

inline double activate(Activation a, double z) {
    switch (a) {
        case Activation::Identity: return z;
        case Activation::Relu: return z > 0.0 ? z : 0.0;
        case Activation::Sigmoid: return 1.0 / (1.0 + std::exp(-z));
    }
    return z;
}

inline double activate_grad(Activation a, double z) {
    switch (a) {
        case Activation::Identity: return 1.0;
        case Activation::Relu: return z > 0.0 ? 1.0 : 0.0;
        case Activation::Sigmoid: {
            const double s = 1.0 / (1.0 + std::exp(-z));
            return s * (1.0 - s);
        }
    }
    return 1.0;
}

}  // namespace

std::vector<double> forward(const Mlp& net, std::span<const double> x, ForwardMode mode,
                            std::uint64_t dropout_seed, ForwardCache* cache) {
    if (net.layers.empty()) throw InputError("forward: empty network");
    if (static_cast<int>(x.size()) != net.input_dim())
        throw InputError("forward: input dimension mismatch");

    if (cache) {
        cache->inputs.assign(net.layers.size(), {});
        cache->preacts.assign(net.layers.size(), {});
        cache->masks.assign(net.layers.size(), {});
    }

    std::vector<double> cur(x.begin(), x.end());
    const bool dropout_active = mode != ForwardMode::Eval;
    for (std::size_t li = 0; li < net.layers.size(); ++li) {
        const auto& layer = net.layers[li];
        if (cache) cache->inputs[li] = cur;

        std::vector<double> z(static_cast<std::size_t>(layer.out));
        for (int o = 0; o < layer.out; ++o) {
            const double* row = layer.w.data() + static_cast<std::size_t>(o) * layer.in;
            double acc = layer.b[static_cast<std::size_t>(o)];
            for (int i = 0; i < layer.in; ++i) acc += row[i] * cur[static_cast<std::size_t>(i)];
            z[static_cast<std::size_t>(o)] = acc;
        }
        if (cache) cache->preacts[li] = z;

        std::vector<double> a(z.size());
        for (std::size_t i = 0; i < z.size(); ++i) a[i] = activate(layer.act, z[i]);

        if (dropout_active && layer.dropout_p > 0.0) {
            Rng rng(derive_seed(dropout_seed, li));
            const double keep_scale = 1.0 / (1.0 - layer.dropout_p);
            std::vector<double> mask(a.size());
            for (std::size_t i = 0; i < a.size(); ++i) {
                mask[i] = rng.uniform() < layer.dropout_p ? 0.0 : keep_scale;
                a[i] *= mask[i];
            }
            if (cache) cache->masks[li] = std::move(mask);
        }
        cur = std::move(a);
    }
    if (cache) cache->output = cur;
    return cur;
}

Gradients zero_gradients(const Mlp& net) {
    Gradients g;
    g.dw.resize(net.layers.size());
    g.db.resize(net.layers.size());
    for (std::size_t li = 0; li < net.layers.size(); ++li) {
        g.dw[li].assign(net.layers[li].w.size(), 0.0);
        g.db[li].assign(net.layers[li].b.size(), 0.0);
    }
    g.dx.assign(static_cast<std::size_t>(net.input_dim()), 0.0);
    return g;
}

void Gradients::add_scaled(const Gradients& other, double s) {
    for (std::size_t li = 0; li < dw.size(); ++li) {
        for (std::size_t i = 0; i < dw[li].size(); ++i) dw[li][i] += s * other.dw[li][i];
        for (std::size_t i = 0; i < db[li].size(); ++i) db[li][i] += s * other.db[li][i];
    }
    for (std::size_t i = 0; i < dx.size() && i < other.dx.size(); ++i) dx[i] += s * other.dx[i];
}

void Gradients::scale(double s) {
    for (auto& l : dw)
        for (auto& v : l) v *= s;
    for (auto& l : db)
        for (auto& v : l) v *= s;
    for (auto& v : dx) v *= s;
}

std::vector<double> Gradients::flat() const {
    std::vector<double> out;
    std::size_t n = dx.size();
    for (std::size_t li = 0; li < dw.size(); ++li) n += dw[li].size() + db[li].size();
    out.reserve(n - dx.size());
    for (std::size_t li = 0; li < dw.size(); ++li) {
        out.insert(out.end(), dw[li].begin(), dw[li].end());
        out.insert(out.end(), db[li].begin(), db[li].end());
    }
    return out;
}

void backward_accumulate(const Mlp& net, const ForwardCache& cache,
                         std::span<const double> upstream, Gradients& grads) {
    if (cache.inputs.size() != net.layers.size())
        throw InputError("backward: cache does not match network");
    if (static_cast<int>(upstream.size()) != net.output_dim())
        throw InputError("backward: upstream dimension mismatch");

    std::vector<double> delta(upstream.begin(), upstream.end());
    for (std::size_t li = net.layers.size(); li-- > 0;) {
        const auto& layer = net.layers[li];
        const auto& z = cache.preacts[li];
        const auto& in = cache.inputs[li];
        if (z.size() != static_cast<std::size_t>(layer.out) ||
            in.size() != static_cast<std::size_t>(layer.in))
            throw InputError("backward: stale cache");

        if (!cache.masks[li].empty()) {
            for (std::size_t i = 0; i < delta.size(); ++i) delta[i] *= cache.masks[li][i];
        }
        for (std::size_t i = 0; i < delta.size(); ++i) delta[i] *= activate_grad(layer.act, z[i]);

        auto& dw = grads.dw[li];
        auto& db = grads.db[li];
        for (int o = 0; o < layer.out; ++o) {
            const double d = delta[static_cast<std::size_t>(o)];
            db[static_cast<std::size_t>(o)] += d;
            double* dw_row = dw.data() + static_cast<std::size_t>(o) * layer.in;
            for (int i = 0; i < layer.in; ++i) dw_row[i] += d * in[static_cast<std::size_t>(i)];
        }

        std::vector<double> next(static_cast<std::size_t>(layer.in), 0.0);
        for (int o = 0; o < layer.out; ++o) {
            const double d = delta[static_cast<std::size_t>(o)];
            const double* row = layer.w.data() + static_cast<std::size_t>(o) * layer.in;
            for (int i = 0; i < layer.in; ++i) next[static_cast<std::size_t>(i)] += d * row[i];
        }
        delta = std::move(next);
    }
    for (std::size_t i = 0; i < grads.dx.size(); ++i) grads.dx[i] += delta[i];
}

Gradients backward(const Mlp& net, const ForwardCache& cache, std::span<const double> upstream) {
    Gradients g = zero_gradients(net);
    backward_accumulate(net, cache, upstream, g);
    return g;
}

void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads) {
    if (params.size() != grads.size()) throw InputError("adam: shape mismatch");
    if (state.m.empty()) {
        state.m.assign(params.size(), 0.0);
        state.v.assign(params.size(), 0.0);
    }
    if (state.m.size() != params.size()) throw InputError("adam: state shape mismatch");
    for (double g : grads) {
        if (!std::isfinite(g))
            throw TrainError("adam: non-finite gradient at step " + std::to_string(state.step + 1));
    }
    state.step += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grads[i];
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * grads[i] * grads[i];
        const double m_hat = state.m[i] / bc1;
        const double v_hat = state.v[i] / bc2;
        params[i] -= state.lr * m_hat / (std::sqrt(v_hat) + state.eps);
    }
}

void adam_step(AdamState& state, Mlp& net, const Gradients& grads) {
    auto params = net.flat_params();
    const auto flat_grads = grads.flat();
    adam_step(state, params, flat_grads);
    net.set_flat_params(params);
}

namespace {

double vec_norm(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc);
}

}  // namespace

bool spectral_normalize(DenseLayer& layer, int iters) {
    double w_norm = 0.0;
    for (double x : layer.w) w_norm += x * x;
    if (w_norm == 0.0) return false;

    for (int it = 0; it < iters; ++it) {
        // v <- W^T u / ||.||, u <- W v / ||.||
        for (int i = 0; i < layer.in; ++i) {
            double acc = 0.0;
            for (int o = 0; o < layer.out; ++o)
                acc += layer.w[static_cast<std::size_t>(o) * layer.in + i] *
                       layer.sn_u[static_cast<std::size_t>(o)];
            layer.sn_v[static_cast<std::size_t>(i)] = acc;
        }
        const double vn = vec_norm(layer.sn_v);
        if (vn == 0.0) return false;
        for (auto& x : layer.sn_v) x /= vn;
        for (int o = 0; o < layer.out; ++o) {
            const double* row = layer.w.data() + static_cast<std::size_t>(o) * layer.in;
            double acc = 0.0;
            for (int i = 0; i < layer.in; ++i) acc += row[i] * layer.sn_v[static_cast<std::size_t>(i)];
            layer.sn_u[static_cast<std::size_t>(o)] = acc;
        }
        const double un = vec_norm(layer.sn_u);
        if (un == 0.0) return false;
        for (auto& x : layer.sn_u) x /= un;
        layer.sn_iterations += 1;
    }

    double sigma = 0.0;
    for (int o = 0; o < layer.out; ++o) {
        const double* row = layer.w.data() + static_cast<std::size_t>(o) * layer.in;
        double acc = 0.0;
        for (int i = 0; i < layer.in; ++i) acc += row[i] * layer.sn_v[static_cast<std::size_t>(i)];
        sigma += layer.sn_u[static_cast<std::size_t>(o)] * acc;
    }
    sigma = std::abs(sigma);
    if (sigma <= 0.0) return false;
    for (auto& x : layer.w) x /= sigma;
    return true;
}

void spectral_normalize_flagged(Mlp& net, int iters) {
    for (auto& layer : net.layers) {
        if (layer.spectral_norm) spectral_normalize(layer, iters);
    }
}

void ema_update(Mlp& target, const Mlp& online, double tau) {
    if (target.layers.size() != online.layers.size())
        throw InputError("ema_update: architecture mismatch");
    for (std::size_t li = 0; li < target.layers.size(); ++li) {
        auto& t = target.layers[li];
        const auto& o = online.layers[li];
        if (t.w.size() != o.w.size() || t.b.size() != o.b.size())
            throw InputError("ema_update: shape mismatch");
        for (std::size_t i = 0; i < t.w.size(); ++i) t.w[i] = (1.0 - tau) * t.w[i] + tau * o.w[i];
        for (std::size_t i = 0; i < t.b.size(); ++i) t.b[i] = (1.0 - tau) * t.b[i] + tau * o.b[i];
    }
}

void save_mlp(const Mlp& net, const std::string& path_stem, const std::string& extra_json) {
    nlohmann::json manifest;
    manifest["format"] = "eqrl-mlp";
    manifest["format_version"] = 1;
    auto layers = nlohmann::json::array();
    auto tensors = nlohmann::json::array();
    std::size_t offset = 0;  // in f32 elements
    for (std::size_t li = 0; li < net.layers.size(); ++li) {
        const auto& l = net.layers[li];
        layers.push_back({{"in", l.in},
                          {"out", l.out},
                          {"activation", to_string(l.act)},
                          {"dropout_p", l.dropout_p},
                          {"spectral_norm", l.spectral_norm}});
        tensors.push_back({{"name", "layer" + std::to_string(li) + ".w"},
                           {"offset_bytes", offset * sizeof(float)},
                           {"count", l.w.size()}});
        offset += l.w.size();
        tensors.push_back({{"name", "layer" + std::to_string(li) + ".b"},
                           {"offset_bytes", offset * sizeof(float)},
                           {"count", l.b.size()}});
        offset += l.b.size();
    }
    manifest["layers"] = layers;
    manifest["tensors"] = tensors;
    manifest["blob"] = path_stem.substr(path_stem.find_last_of('/') + 1) + ".bin";
    if (!extra_json.empty()) manifest["meta"] = nlohmann::json::parse(extra_json);

    std::ofstream js(path_stem + ".json", std::ios::trunc);
    if (!js) throw IoError("cannot open for writing: " + path_stem + ".json");
    js << manifest.dump(2) << "\n";

    std::ofstream bs(path_stem + ".bin", std::ios::binary | std::ios::trunc);
    if (!bs) throw IoError("cannot open for writing: " + path_stem + ".bin");
    std::vector<float> blob;
    blob.reserve(offset);
    for (const auto& l : net.layers) {
        for (double x : l.w) blob.push_back(static_cast<float>(x));
        for (double x : l.b) blob.push_back(static_cast<float>(x));
    }
    bs.write(reinterpret_cast<const char*>(blob.data()),
             static_cast<std::streamsize>(blob.size() * sizeof(float)));
    if (!bs) throw IoError("write failed: " + path_stem + ".bin");
}

Mlp load_mlp(const std::string& path_stem, std::string* extra_json) {
    std::ifstream js(path_stem + ".json");
    if (!js) throw IoError("cannot open: " + path_stem + ".json");
    nlohmann::json manifest = nlohmann::json::parse(js);
    if (manifest.value("format", "") != "eqrl-mlp")
        throw IoError("not an mlp checkpoint: " + path_stem + ".json");

    std::vector<LayerSpec> specs;
    for (const auto& lj : manifest["layers"]) {
        LayerSpec sp;
        sp.in = lj["in"].get<int>();
        sp.out = lj["out"].get<int>();
        sp.act = activation_from_string(lj["activation"].get<std::string>());
        sp.dropout_p = lj["dropout_p"].get<double>();
        sp.spectral_norm = lj["spectral_norm"].get<bool>();
        specs.push_back(sp);
    }
    Mlp net(specs, /*init_seed=*/0);

    std::ifstream bs(path_stem + ".bin", std::ios::binary);
    if (!bs) throw IoError("cannot open: " + path_stem + ".bin");
    for (auto& l : net.layers) {
        std::vector<float> buf(l.w.size() + l.b.size());
        bs.read(reinterpret_cast<char*>(buf.data()),
                static_cast<std::streamsize>(buf.size() * sizeof(float)));
        if (!bs) throw IoError("truncated checkpoint blob: " + path_stem + ".bin");
        for (std::size_t i = 0; i < l.w.size(); ++i) l.w[i] = buf[i];
        for (std::size_t i = 0; i < l.b.size(); ++i) l.b[i] = buf[l.w.size() + i];
    }
    if (extra_json) {
        *extra_json = manifest.contains("meta") ? manifest["meta"].dump() : std::string("{}");
    }
    return net;
}

}  // namespace eqrl

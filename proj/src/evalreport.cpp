#include "eqrl/evalreport.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"

namespace eqrl {

double empirical_cvar(std::vector<double> samples, double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw StatsError("empirical_cvar: alpha must be in (0,1]");
    const auto n = samples.size();
    const auto needed = static_cast<std::size_t>(std::ceil(1.0 / alpha - 1e-9));
    if (n < needed) throw StatsError("empirical_cvar: too few samples for the requested tail");
    auto k = static_cast<std::size_t>(std::ceil(alpha * static_cast<double>(n) - 1e-9));
    k = std::clamp<std::size_t>(k, 1, n);
    std::partial_sort(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(k),
                      samples.end());
    double acc = 0.0;
    for (std::size_t i = 0; i < k; ++i) acc += samples[i];
    return acc / static_cast<double>(k);
}

std::string to_string(DeploymentClass c) {
    switch (c) {
        case DeploymentClass::HighReliability: return "HighReliability";
        case DeploymentClass::ModerateConfidence: return "ModerateConfidence";
        case DeploymentClass::ValidationRequired: return "ValidationRequired";
    }
    return "ValidationRequired";
}

DeploymentClass classify(double cvar05_pct, double cvar10_pct, double sigma_unc,
                         const ClassifyThresholds& th) {
    if (cvar05_pct >= th.improvement_pct && sigma_unc < th.unc_high)
        return DeploymentClass::HighReliability;
    if (cvar10_pct >= th.improvement_pct && sigma_unc >= th.unc_high &&
        sigma_unc < th.unc_moderate)
        return DeploymentClass::ModerateConfidence;
    return DeploymentClass::ValidationRequired;
}

double pearson_r(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw StatsError("pearson_r: length mismatch");
    const auto n = x.size();
    if (n < 3) throw StatsError("pearson_r: need at least 3 samples");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw StatsError("pearson_r: zero variance");
    return sxy / std::sqrt(sxx * syy);
}

double silhouette_score(const std::vector<std::vector<double>>& points,
                        const std::vector<int>& labels) {
    if (points.size() != labels.size()) throw StatsError("silhouette: length mismatch");
    const auto n = points.size();
    if (n < 2) throw StatsError("silhouette: need at least 2 points");

    int lab_a = labels[0];
    int lab_b = lab_a;
    for (int l : labels) {
        if (l != lab_a) {
            if (lab_b == lab_a) {
                lab_b = l;
            } else if (l != lab_b) {
                throw StatsError("silhouette: more than two clusters");
            }
        }
    }
    if (lab_b == lab_a) throw StatsError("silhouette: only one cluster present");

    auto dist = [](const std::vector<double>& a, const std::vector<double>& b) {
        double acc = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double d = a[i] - b[i];
            acc += d * d;
        }
        return std::sqrt(acc);
    };

    std::size_t count_a = 0;
    for (int l : labels) count_a += (l == lab_a) ? 1 : 0;
    const std::size_t count_b = n - count_a;

    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t own = labels[i] == lab_a ? count_a : count_b;
        if (own <= 1) continue;  // singleton scores 0
        double same = 0.0, other = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double d = dist(points[i], points[j]);
            if (labels[j] == labels[i])
                same += d;
            else
                other += d;
        }
        const double a = same / static_cast<double>(own - 1);
        const double b = other / static_cast<double>(n - own);
        const double m = std::max(a, b);
        acc += m == 0.0 ? 0.0 : (b - a) / m;
    }
    return acc / static_cast<double>(n);
}

EvalAggregates compute_aggregates(const std::vector<EvalRecord>& records) {
    std::vector<double> imp;
    imp.reserve(records.size());
    for (const auto& r : records) {
        if (r.valid_baseline) imp.push_back(r.improvement_pct);
    }
    EvalAggregates agg;
    agg.n_used = imp.size();
    if (imp.empty()) return agg;

    double mean = 0.0;
    for (double v : imp) mean += v;
    mean /= static_cast<double>(imp.size());
    double var = 0.0;
    for (double v : imp) var += (v - mean) * (v - mean);
    agg.mean_pct = mean;
    agg.std_pct = imp.size() > 1 ? std::sqrt(var / static_cast<double>(imp.size() - 1)) : 0.0;

    auto cvar_or_mean = [&](double alpha) {
        const auto needed = static_cast<std::size_t>(std::ceil(1.0 / alpha - 1e-9));
        return imp.size() >= needed ? empirical_cvar(imp, alpha) : mean;
    };
    agg.cvar10_pct = cvar_or_mean(0.10);
    agg.cvar05_pct = cvar_or_mean(0.05);
    agg.cvar01_pct = cvar_or_mean(0.01);
    return agg;
}

std::vector<CalibrationRow> calibration_quartiles(const std::vector<EvalRecord>& records) {
    std::vector<const EvalRecord*> usable;
    for (const auto& r : records) {
        if (r.valid_baseline) usable.push_back(&r);
    }
    if (usable.size() < 8) throw StatsError("calibration_quartiles: need at least 8 records");

    std::sort(usable.begin(), usable.end(), [](const EvalRecord* a, const EvalRecord* b) {
        if (a->sigma_unc != b->sigma_unc) return a->sigma_unc < b->sigma_unc;
        return a->id < b->id;
    });

    // Global least-squares line improvement ~ critic prediction; a flat fit
    // (zero prediction variance) collapses to the grand mean.
    const auto n = usable.size();
    double mp = 0.0, mi = 0.0;
    for (const auto* r : usable) {
        mp += r->critic_pred;
        mi += r->improvement_pct;
    }
    mp /= static_cast<double>(n);
    mi /= static_cast<double>(n);
    double spp = 0.0, spi = 0.0;
    for (const auto* r : usable) {
        spp += (r->critic_pred - mp) * (r->critic_pred - mp);
        spi += (r->critic_pred - mp) * (r->improvement_pct - mi);
    }
    const double slope = spp > 0.0 ? spi / spp : 0.0;
    const double intercept = mi - slope * mp;

    std::vector<CalibrationRow> rows(4);
    for (std::size_t q = 0; q < 4; ++q) {
        const std::size_t lo = q * n / 4;
        const std::size_t hi = (q + 1) * n / 4;
        CalibrationRow row;
        row.count = hi - lo;
        row.unc_lo = usable[lo]->sigma_unc;
        row.unc_hi = usable[hi - 1]->sigma_unc;
        double mean_perf = 0.0, expected = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
            mean_perf += usable[i]->improvement_pct;
            expected += intercept + slope * usable[i]->critic_pred;
        }
        row.mean_perf_pct = mean_perf / static_cast<double>(row.count);
        row.expected_perf_pct = expected / static_cast<double>(row.count);
        row.calibration_error_pct = std::abs(row.mean_perf_pct - row.expected_perf_pct);
        rows[q] = row;
    }
    return rows;
}

double generalization_gap(double train_mean_pct, double heldout_mean_pct) {
    return train_mean_pct - heldout_mean_pct;
}

double generalization_gap(const EvalResult& train_eval, const EvalResult& heldout_eval) {
    if (train_eval.records.empty() || heldout_eval.records.empty())
        throw StatsError("generalization_gap: both evaluations must be non-empty");
    return generalization_gap(train_eval.aggregates.mean_pct, heldout_eval.aggregates.mean_pct);
}

namespace {

nlohmann::json record_to_json(const EvalRecord& r) {
    return {{"id", r.id},
            {"area_before", r.area_before},
            {"area_after", r.area_after},
            {"valid_baseline", r.valid_baseline},
            {"improvement_pct", r.improvement_pct},
            {"sigma_unc", r.sigma_unc},
            {"reward", r.reward},
            {"critic_pred", r.critic_pred}};
}

EvalRecord record_from_json(const nlohmann::json& j) {
    EvalRecord r;
    r.id = j["id"].get<std::size_t>();
    r.area_before = j["area_before"].get<double>();
    r.area_after = j["area_after"].get<double>();
    r.valid_baseline = j["valid_baseline"].get<bool>();
    r.improvement_pct = j["improvement_pct"].get<double>();
    r.sigma_unc = j["sigma_unc"].get<double>();
    r.reward = j["reward"].get<double>();
    r.critic_pred = j["critic_pred"].get<double>();
    return r;
}

}  // namespace

std::string eval_result_to_json(const EvalResult& result) {
    nlohmann::json j;
    j["schema_version"] = 1;
    auto records = nlohmann::json::array();
    for (const auto& r : result.records) records.push_back(record_to_json(r));
    j["records"] = std::move(records);
    j["aggregates"] = {{"mean_pct", result.aggregates.mean_pct},
                       {"std_pct", result.aggregates.std_pct},
                       {"cvar10_pct", result.aggregates.cvar10_pct},
                       {"cvar05_pct", result.aggregates.cvar05_pct},
                       {"cvar01_pct", result.aggregates.cvar01_pct},
                       {"n_used", result.aggregates.n_used}};
    return j.dump(2);
}

EvalResult eval_result_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    if (j.value("schema_version", 0) != 1) throw IoError("eval result: unsupported schema");
    EvalResult result;
    for (const auto& rj : j["records"]) result.records.push_back(record_from_json(rj));
    result.aggregates = compute_aggregates(result.records);

    const auto& aj = j["aggregates"];
    const bool consistent = aj["mean_pct"].get<double>() == result.aggregates.mean_pct &&
                            aj["std_pct"].get<double>() == result.aggregates.std_pct &&
                            aj["cvar10_pct"].get<double>() == result.aggregates.cvar10_pct &&
                            aj["cvar05_pct"].get<double>() == result.aggregates.cvar05_pct &&
                            aj["cvar01_pct"].get<double>() == result.aggregates.cvar01_pct &&
                            aj["n_used"].get<std::size_t>() == result.aggregates.n_used;
    if (!consistent) throw IoError("eval result: stored aggregates do not match records");
    return result;
}

}  // namespace eqrl

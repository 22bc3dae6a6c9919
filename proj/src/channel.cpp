#include "cvrep/channel.hpp"

#include <algorithm>
#include <cmath>

namespace cvrep {

double HalfChannelParams::alpha() const { return std::sqrt(1.0 - eta); }

void HalfChannelParams::validate() const {
    if (!(chi >= 0.0 && chi < 1.0))
        throw std::invalid_argument("HalfChannelParams: chi must be in [0, 1)");
    if (!(eta > 0.0 && eta <= 1.0))
        throw std::invalid_argument("HalfChannelParams: eta must be in (0, 1]");
    if (!(g >= 0.0) || !std::isfinite(g))
        throw std::invalid_argument("HalfChannelParams: g must be finite and >= 0");
}

double transmissivity(double distance_km, const LossModel& loss) {
    if (distance_km < 0.0)
        throw std::invalid_argument("transmissivity: negative distance");
    return std::pow(10.0, -loss.db_per_km * distance_km / 10.0);
}

double repeaterless_capacity(double eta, double eta1_sentinel) {
    if (eta < 0.0 || eta > 1.0)
        throw std::invalid_argument("repeaterless_capacity: eta outside [0, 1]");
    if (eta >= 1.0) return eta1_sentinel;
    return -std::log2(1.0 - eta);
}

std::vector<double> tmsv_schmidt_coeffs(double chi, int n_max) {
    std::vector<double> c(static_cast<std::size_t>(n_max) + 1);
    const double pref = std::sqrt(1.0 - chi * chi);
    double pw = 1.0;
    for (int n = 0; n <= n_max; ++n) {
        c[static_cast<std::size_t>(n)] = pref * pw;
        pw *= chi;
    }
    return c;
}

double qs_success_probability(const HalfChannelParams& p) {
    p.validate();
    const double c2 = p.chi * p.chi;
    const double num = (1.0 - c2) * (c2 * (p.eta * p.g * p.g + p.eta - 1.0) + 1.0);
    const double den = (1.0 + p.g * p.g) * std::pow((p.eta - 1.0) * c2 + 1.0, 2);
    return num / den;
}

double multiplex_boost(double p, long multiplexing) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("multiplex_boost: p outside [0, 1]");
    if (multiplexing < 1) throw std::invalid_argument("multiplex_boost: M must be >= 1");
    if (p == 1.0) return 1.0;
    if (p == 0.0) return 0.0;
    return -std::expm1(static_cast<double>(multiplexing) * std::log1p(-p));
}

GainPolicy GainPolicy::fixed(double g) {
    GainPolicy p;
    p.kind = Kind::Fixed;
    p.fixed_g = g;
    return p;
}

GainPolicy GainPolicy::power_law(double a, double b, double g_max) {
    GainPolicy p;
    p.kind = Kind::PowerLaw;
    p.a = a;
    p.b = b;
    p.g_max = g_max;
    return p;
}

GainPolicy GainPolicy::numeric_opt(std::function<double(double, double)> objective,
                                   double g_max) {
    GainPolicy p;
    p.kind = Kind::NumericOpt;
    p.g_max = g_max;
    p.g_grid = default_grid(g_max);
    p.objective = std::move(objective);
    return p;
}

std::vector<double> GainPolicy::default_grid(double g_max) {
    std::vector<double> grid;
    for (double g = 1.0; g < g_max; g *= 1.25) grid.push_back(g);
    grid.push_back(g_max);
    return grid;
}

double gain_policy(double eta, const GainPolicy& policy) {
    if (!(eta > 0.0 && eta <= 1.0))
        throw std::invalid_argument("gain_policy: eta outside (0, 1]");
    switch (policy.kind) {
        case GainPolicy::Kind::Fixed:
            return policy.fixed_g;
        case GainPolicy::Kind::PowerLaw:
            return std::min(policy.a * std::pow(eta, -policy.b), policy.g_max);
        case GainPolicy::Kind::NumericOpt:
            break;
    }
    if (!policy.objective)
        throw std::invalid_argument("gain_policy: NumericOpt requires an objective");
    const auto& grid = policy.g_grid.empty()
                           ? GainPolicy::default_grid(policy.g_max)
                           : policy.g_grid;

    const double atten_db = -10.0 * std::log10(eta);
    const long long key = std::llround(atten_db / policy.cache_quantum_db);
    {
        std::scoped_lock lk(policy.cache_->mu);
        auto it = policy.cache_->map.find(key);
        if (it != policy.cache_->map.end()) return it->second;
    }
    // Evaluate at the quantized eta so the cached value is placement-independent.
    const double eta_q = std::pow(10.0, -static_cast<double>(key) * policy.cache_quantum_db / 10.0);
    double best_g = grid.front();
    double best_v = -std::numeric_limits<double>::infinity();
    for (double g : grid) {
        if (g > policy.g_max) continue;
        double v = policy.objective(eta_q, g);
        if (v > best_v) {
            best_v = v;
            best_g = g;
        }
    }
    std::scoped_lock lk(policy.cache_->mu);
    policy.cache_->map.emplace(key, best_g);
    return best_g;
}

}  // namespace cvrep

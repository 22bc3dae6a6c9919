#include "cvrep/rate.hpp"

#include "cvrep/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

namespace cvrep {

namespace {

constexpr double kPi = std::numbers::pi;

// Gauss-Legendre nodes/weights on [-1, 1], Newton iteration on the Legendre
// recurrence. Cached per order.
struct GLRule {
    std::vector<double> x, w;
};

const GLRule& gauss_legendre(int n) {
    static std::mutex mu;
    static std::map<int, GLRule> cache;
    std::scoped_lock lk(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    GLRule rule;
    rule.x.resize(static_cast<std::size_t>(n));
    rule.w.resize(static_cast<std::size_t>(n));
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.x[static_cast<std::size_t>(i)] = -x;
        rule.x[static_cast<std::size_t>(n - 1 - i)] = x;
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.w[static_cast<std::size_t>(i)] = w;
        rule.w[static_cast<std::size_t>(n - 1 - i)] = w;
    }
    return cache.emplace(n, std::move(rule)).first->second;
}

double state_weight(const LinkPairConfig& cfg, double gamma) {
    return build_conditional(cfg, Complex(gamma, 0.0)).weight;
}

// 2*pi Int_0^R w(r) r dr by Gauss-Legendre, nodes doubled until stable.
double enclosed_mass(const LinkPairConfig& cfg, double radius, int threads) {
    if (radius <= 0.0) return 0.0;
    double prev = -1.0;
    for (int nodes = 64; nodes <= 512; nodes *= 2) {
        const GLRule& gl = gauss_legendre(nodes);
        std::vector<double> vals(static_cast<std::size_t>(nodes));
        parallel_for(
            static_cast<std::size_t>(nodes),
            [&](std::size_t i) {
                const double r = 0.5 * radius * (gl.x[i] + 1.0);
                vals[i] = state_weight(cfg, r) * r * gl.w[i];
            },
            threads);
        double sum = 0.0;
        for (double v : vals) sum += v;
        const double mass = 2.0 * kPi * 0.5 * radius * sum;
        if (prev >= 0.0 && std::abs(mass - prev) <= 1e-5 * std::max(std::abs(mass), 1e-300))
            return mass;
        prev = mass;
    }
    return prev;
}

}  // namespace

double rci(const TwoModeFockState& state) {
    if (!state.normalized)
        throw std::invalid_argument("rci: state must be normalized (divide by weight first)");
    const auto joint = hermitian_eigenvalues(state.matrix);
    const double h_ab = von_neumann_entropy(joint);
    const ComplexMatrix rho_a = partial_trace(state.matrix, state.dims, Mode::A);
    const auto marginal = hermitian_eigenvalues(rho_a);
    const double h_a = von_neumann_entropy(marginal);
    return h_a - h_ab;
}

double conditional_rate(const TwoModeFockState& state, double p1, double p2,
                        const RateConfig& rc) {
    const double i_ab = std::max(rci(state), 0.0);
    return rc.swap_success * multiplex_boost(p1, rc.multiplexing) *
           multiplex_boost(p2, rc.multiplexing) / static_cast<double>(rc.multiplexing) *
           i_ab;
}

double scissors_joint_success(const LinkPairConfig& cfg) {
    const TwoModeFockState st = build_symmetric_scissors(cfg);
    const double chip = cfg.link1.chi * cfg.link2.chi;
    return st.weight * (1.0 - chip * chip) /
           ((1.0 + cfg.link1.g * cfg.link1.g) * (1.0 + cfg.link2.g * cfg.link2.g));
}

double gamma_max(const LinkPairConfig& cfg, const RateConfig& rc) {
    if (cfg.orientation == Orientation::SymmetricScissors) return 0.0;
    const LinkPairConfig c = resolved(cfg, std::max(cfg.trace_target, rc.internal_trace_target()));
    const double total = qs_success_probability(c.link1) * qs_success_probability(c.link2);
    const double target = rc.gamma_mass * total;

    double radius = std::sqrt(-std::log(1.0 - rc.gamma_mass));
    double lo = 0.0;
    bool reached = false;
    for (int step = 0; step < 8; ++step) {
        if (enclosed_mass(c, radius, rc.threads) >= target) {
            reached = true;
            break;
        }
        lo = radius;
        radius *= 2.0;
    }
    if (!reached)
        throw MassNotReached("gamma_max: mass target unreachable (truncation too small)");
    double hi = radius;
    while (hi - lo > 1e-3 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (enclosed_mass(c, mid, rc.threads) >= target)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

ErgodicResult ergodic_rate_detailed(const LinkPairConfig& cfg, const RateConfig& rc) {
    ErgodicResult res;
    res.p1 = qs_success_probability(cfg.link1);
    res.p2 = qs_success_probability(cfg.link2);
    const auto m = rc.multiplexing;

    if (cfg.orientation == Orientation::SymmetricScissors) {
        const TwoModeFockState st = build_symmetric_scissors(cfg);
        res.n_max = 1;
        res.rci_avg = st.weight > 0.0 ? std::max(rci(st.normalize()), 0.0) : 0.0;
        const double pj = scissors_joint_success(cfg);
        res.rate = rc.swap_success * multiplex_boost(pj, m) / static_cast<double>(m) *
                   res.rci_avg;
        return res;
    }

    const double t_star = std::max(cfg.trace_target, rc.internal_trace_target());
    LinkPairConfig c = resolved(cfg, t_star);

    // Window radius, re-resolving the cutoff if the trace at the window edge
    // has not settled (the gamma=0 criterion can undershoot at large |gamma|).
    double gm = 0.0;
    for (int round = 0;; ++round) {
        RateConfig rc_fixed = rc;
        LinkPairConfig probe = c;
        gm = gamma_max(probe, rc_fixed);
        LinkPairConfig bigger = c;
        bigger.n_max = c.n_max + 2;
        const double w0 = state_weight(c, gm);
        const double w1 = state_weight(bigger, gm);
        if (w1 <= 0.0 || std::abs(w1 - w0) <= (1.0 - t_star) * w1) break;
        if (round >= 6)
            throw TruncationInsufficient("ergodic_rate: cutoff not converging at gamma_max");
        c.n_max += 2;
    }
    res.n_max = c.n_max;
    res.gamma_max = gm;

    auto integral = [&](int nodes) {
        const GLRule& gl = gauss_legendre(nodes);
        std::vector<double> vals(static_cast<std::size_t>(nodes));
        parallel_for(
            static_cast<std::size_t>(nodes),
            [&](std::size_t i) {
                const double r = 0.5 * gm * (gl.x[i] + 1.0);
                const TwoModeFockState st = build_conditional(c, Complex(r, 0.0));
                double v = 0.0;
                if (st.weight > 0.0) {
                    const double i_ab = rci(st.normalize());
                    if (i_ab > 0.0) v = i_ab * st.weight * r * gl.w[i];
                }
                vals[i] = v;
            },
            rc.threads);
        double sum = 0.0;
        for (double v : vals) sum += v;
        return 2.0 * kPi * 0.5 * gm * sum;
    };

    int nodes = std::max(8, rc.radial_nodes);
    double num = integral(nodes);
    for (int d = 0;; ++d) {
        if (d >= rc.max_node_doublings) {
            // Zero numerator (RCI <= 0 everywhere) is converged by inspection.
            if (num == 0.0) break;
            throw QuadratureNotConverged("ergodic_rate: radial quadrature not converged");
        }
        const double refined = integral(2 * nodes);
        const double ref = std::max(std::abs(refined), 1e-300);
        if (std::abs(refined - num) <= rc.quad_rel_tol * ref) {
            num = refined;
            nodes *= 2;
            break;
        }
        num = refined;
        nodes *= 2;
    }
    res.nodes_used = nodes;

    const double total = res.p1 * res.p2;
    res.rci_avg = total > 0.0 ? num / total : 0.0;
    res.rate = rc.swap_success * multiplex_boost(res.p1, m) * multiplex_boost(res.p2, m) /
               static_cast<double>(m) * res.rci_avg;
    return res;
}

double ergodic_rate(const LinkPairConfig& cfg, const RateConfig& rc) {
    return ergodic_rate_detailed(cfg, rc).rate;
}

LinkPairConfig make_link_pair(double d1_km, double d2_km, Orientation orientation,
                              const GainPolicy& policy, const LossModel& loss, double chi) {
    LinkPairConfig cfg;
    cfg.orientation = orientation;
    cfg.link1.chi = chi;
    cfg.link2.chi = chi;
    cfg.link1.eta = transmissivity(d1_km, loss);
    cfg.link2.eta = transmissivity(d2_km, loss);
    cfg.link1.g = gain_policy(cfg.link1.eta, policy);
    cfg.link2.g = gain_policy(cfg.link2.eta, policy);
    return cfg;
}

RatePoint end_to_end_rate(double d1_km, double d2_km, Orientation orientation,
                          const GainPolicy& policy, const RateConfig& rc,
                          const LossModel& loss, double chi) {
    const LinkPairConfig cfg = make_link_pair(d1_km, d2_km, orientation, policy, loss, chi);
    RatePoint pt;
    pt.d1_km = d1_km;
    pt.d2_km = d2_km;
    pt.eta1 = cfg.link1.eta;
    pt.eta2 = cfg.link2.eta;
    pt.g1 = cfg.link1.g;
    pt.g2 = cfg.link2.g;
    pt.orientation = orientation;
    pt.multiplexing = rc.multiplexing;
    pt.rate = ergodic_rate(cfg, rc);
    pt.cap_direct = repeaterless_capacity(transmissivity(d1_km + d2_km, loss));
    pt.cap_through_node = repeaterless_capacity(pt.eta1 * pt.eta2);
    return pt;
}

std::vector<RatePoint> rate_distance_sweep(const std::vector<double>& total_km,
                                           const std::vector<Orientation>& orientations,
                                           const RateConfig& rc, const LossModel& loss,
                                           const GainPolicy& policy, double chi) {
    std::vector<RatePoint> rows;
    rows.reserve(total_km.size() * orientations.size());
    for (double total : total_km)
        for (Orientation o : orientations)
            rows.push_back(end_to_end_rate(total / 2.0, total / 2.0, o, policy, rc, loss, chi));
    return rows;
}

std::pair<long, double> optimal_multiplexing(double p1, double p2) {
    auto f = [&](long m) {
        return multiplex_boost(p1, m) * multiplex_boost(p2, m) / static_cast<double>(m);
    };
    long best_m = 1;
    double best = f(1);
    long m = 1;
    while (m < (1L << 50)) {
        m *= 2;
        const double v = f(m);
        if (v > best) {
            best = v;
            best_m = m;
        } else if (v < best / 8.0) {
            break;
        }
    }
    long lo = std::max(1L, best_m / 2), hi = best_m * 2;
    while (hi - lo > 2) {
        const long m1 = lo + (hi - lo) / 3;
        const long m2 = hi - (hi - lo) / 3;
        if (f(m1) < f(m2))
            lo = m1 + 1;
        else
            hi = m2 - 1;
    }
    for (long k = lo; k <= hi; ++k)
        if (f(k) > best) {
            best = f(k);
            best_m = k;
        }
    return {best_m, best};
}

OptimizedM optimized_m_rate(const LinkPairConfig& cfg, const RateConfig& rc) {
    RateConfig rc1 = rc;
    rc1.multiplexing = 1;
    const ErgodicResult base = ergodic_rate_detailed(cfg, rc1);
    OptimizedM out;
    if (cfg.orientation == Orientation::SymmetricScissors) {
        // boost(Pj, M)/M is maximal at M = 1.
        out.m_star = 1;
        out.rate = base.rate;
        return out;
    }
    const auto [m_star, f_star] = optimal_multiplexing(base.p1, base.p2);
    out.m_star = m_star;
    out.rate = rc.swap_success * f_star * base.rci_avg;
    return out;
}

GainPolicy make_numeric_opt_policy(Orientation orientation, const RateConfig& rc,
                                   double chi, double g_max, bool optimize_m) {
    RateConfig rc_search = rc;
    rc_search.radial_nodes = std::max(24, rc.radial_nodes / 2);
    rc_search.quad_rel_tol = std::max(rc.quad_rel_tol, 2e-2);
    rc_search.max_node_doublings = std::max(rc.max_node_doublings, 2);
    auto objective = [orientation, rc_search, chi, optimize_m](double eta, double g) {
        LinkPairConfig cfg;
        cfg.orientation = orientation;
        cfg.link1 = {chi, eta, g};
        cfg.link2 = {chi, eta, g};
        if (optimize_m) return optimized_m_rate(cfg, rc_search).rate;
        return ergodic_rate(cfg, rc_search);
    };
    return GainPolicy::numeric_opt(objective, g_max);
}

std::string rate_csv_header() {
    return "distance_km,orientation,eta1,eta2,g1,g2,M,rate_ebits_per_mode,cap_direct,"
           "cap_through_node";
}

std::string rate_csv_row(const RatePoint& p) {
    std::ostringstream os;
    os.precision(10);
    os << (p.d1_km + p.d2_km) << "," << to_string(p.orientation) << "," << p.eta1 << ","
       << p.eta2 << "," << p.g1 << "," << p.g2 << "," << p.multiplexing << "," << p.rate
       << "," << p.cap_direct << "," << p.cap_through_node;
    return os.str();
}

}  // namespace cvrep

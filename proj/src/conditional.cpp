#include "cvrep/conditional.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace cvrep {

namespace {

constexpr double kPi = std::numbers::pi;

// Fock-basis overlaps with the displaced measurement eigenstate, with the
// common exp(-|gamma|^2/2) factor stripped (it is folded into the state
// prefactor):
//   T0(m) = <m|D(-g)|0> * e^{s/2} = (-g)^m / sqrt(m!)
//   T1(m) = <m|D(-g)|1> * e^{s/2} = (-g)^(m-1) (m - s) / sqrt(m!),  T1(0) = conj(g)
// where s = |gamma|^2. Values are built by multiplicative recurrence so large
// m never touches a bare factorial.
class Overlaps {
  public:
    explicit Overlaps(Complex gamma)
        : u_(-gamma), s_(std::norm(gamma)), gconj_(std::conj(gamma)) {
        z_ = {Complex(1.0, 0.0)};
        y_ = {Complex(0.0, 0.0)};  // y_[0] unused
    }

    Complex t(int c, int m) {
        ensure(m);
        if (c == 0) return z_[static_cast<std::size_t>(m)];
        if (m == 0) return gconj_;
        return y_[static_cast<std::size_t>(m)] * (static_cast<double>(m) - s_);
    }

  private:
    void ensure(int m) {
        while (z_.size() <= static_cast<std::size_t>(m)) {
            const auto k = z_.size();
            const double r = 1.0 / std::sqrt(static_cast<double>(k));
            z_.push_back(z_[k - 1] * u_ * r);
            y_.push_back(k == 1 ? Complex(1.0, 0.0) : y_[k - 1] * u_ * r);
        }
    }

    Complex u_;
    double s_;
    Complex gconj_;
    std::vector<Complex> z_, y_;
};

// The four bra/ket branch combinations of one half channel, indexed by the
// (ket, bra) scissor outcomes. For the branch pair at summation index n the
// bra index is n + offset.
struct BranchFactor {
    double value = 0.0;
    int offset = 0;
    bool valid = false;
};

// Shared branch algebra for both links. x = chi^2 (1 - eta) is the geometric
// decay of the traced-environment series; xp holds x^n (or x^(n-1) for the
// ket-1 families).
BranchFactor branch_factor(int ket, int bra, int n, const HalfChannelParams& p,
                           double x_pow_n, double x_pow_nm1) {
    const double chi = p.chi, g = p.g, eta = p.eta;
    BranchFactor f;
    if (ket == 0 && bra == 0) {
        f = {x_pow_n, 0, true};
    } else if (ket == 0 && bra == 1) {
        f = {g * std::sqrt(eta) * std::sqrt(n + 1.0) * chi * x_pow_n, +1, true};
    } else if (ket == 1 && bra == 0) {
        if (n < 1) return f;
        f = {g * std::sqrt(eta) * std::sqrt(static_cast<double>(n)) * chi * x_pow_nm1, -1, true};
    } else {
        if (n < 1) return f;
        f = {g * g * eta * n * chi * chi * x_pow_nm1, 0, true};
    }
    return f;
}

double common_prefactor(const LinkPairConfig& cfg, Complex gamma) {
    const auto& l1 = cfg.link1;
    const auto& l2 = cfg.link2;
    return std::exp(-std::norm(gamma)) / kPi * (1.0 - l1.chi * l1.chi) /
           (1.0 + l1.g * l1.g) * (1.0 - l2.chi * l2.chi) / (1.0 + l2.g * l2.g);
}

TwoModeFockState finish(ComplexMatrix m, ModeDims dims) {
    TwoModeFockState s;
    s.weight = m.trace().real();
    s.matrix = std::move(m);
    s.dims = dims;
    s.normalized = false;
    return s;
}

}  // namespace

std::string to_string(Orientation o) {
    switch (o) {
        case Orientation::AsymmetricSourceScissor: return "asymmetric";
        case Orientation::SymmetricSources: return "symmetric-sources";
        case Orientation::SymmetricScissors: return "symmetric-scissors";
    }
    return "?";
}

Orientation orientation_from_string(const std::string& s) {
    if (s == "asymmetric" || s == "asym") return Orientation::AsymmetricSourceScissor;
    if (s == "symmetric-sources" || s == "sources") return Orientation::SymmetricSources;
    if (s == "symmetric-scissors" || s == "scissors") return Orientation::SymmetricScissors;
    throw std::invalid_argument("unknown orientation: " + s);
}

void LinkPairConfig::validate() const {
    link1.validate();
    link2.validate();
    if (n_max < 0) throw std::invalid_argument("LinkPairConfig: n_max must be >= 0");
    if (!(trace_target > 0.9 && trace_target < 1.0))
        throw std::invalid_argument("LinkPairConfig: trace_target must be in (0.9, 1)");
}

TwoModeFockState TwoModeFockState::normalize() const {
    if (!(weight > 0.0))
        throw TruncationInsufficient("normalize: state has non-positive weight");
    TwoModeFockState out;
    out.matrix = matrix / weight;
    out.dims = dims;
    out.weight = weight;
    out.normalized = true;
    return out;
}

double TwoModeFockState::hermiticity_defect() const {
    const double w = weight > 0.0 ? weight : 1.0;
    return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff() / w;
}

TwoModeFockState build_asymmetric(const LinkPairConfig& cfg, Complex gamma) {
    cfg.validate();
    if (cfg.n_max < 1)
        throw std::invalid_argument("build_asymmetric: n_max not resolved (>= 1 required)");
    const auto& l1 = cfg.link1;
    const auto& l2 = cfg.link2;
    const int da = cfg.n_max + 1, db = 2;
    const ModeDims dims{da, db};
    const double W = common_prefactor(cfg, gamma);
    const double x1 = l1.chi * l1.chi * (1.0 - l1.eta);
    const double x2 = l2.chi * l2.chi * (1.0 - l2.eta);

    Overlaps ov(gamma);
    ComplexMatrix rho = ComplexMatrix::Zero(dims.joint(), dims.joint());

    // The link-2 sums over the traced environment are independent of the
    // link-1 index, so each of the 16 bra/ket families contributes a scalar
    // series times a link-1 profile over n.
    auto link2_series = [&](int b, int bp, int c, int cp) -> Complex {
        Complex total(0.0, 0.0);
        double peak = 0.0;
        double xp = 1.0;    // x2^m
        double xpm = 1.0;   // x2^(m-1), tracked from m = 1
        const int m0 = (b == 1) ? 1 : 0;
        constexpr int kCap = 4096;
        for (int m = 0; m < kCap; ++m) {
            if (m >= 1) xpm = (m == 1) ? 1.0 : xpm * x2;
            if (m >= 1) xp *= x2;
            if (m < m0) continue;
            const BranchFactor fb = branch_factor(b, bp, m, l2, xp, xpm);
            if (!fb.valid) continue;
            const int mb = m + fb.offset;
            const Complex term = fb.value * ov.t(c, m) * std::conj(ov.t(cp, mb));
            total += term;
            peak = std::max(peak, std::abs(term));
            if (m > m0 + 8 && std::abs(term) < 1e-17 * (peak + 1e-300)) return total;
            if (peak == 0.0 && m > m0 + 8) return total;
        }
        throw TruncationInsufficient("build_asymmetric: environment series did not converge");
    };

    for (int c = 0; c < 2; ++c) {
        for (int cp = 0; cp < 2; ++cp) {
            for (int b = 0; b < 2; ++b) {
                for (int bp = 0; bp < 2; ++bp) {
                    const Complex S = W * link2_series(b, bp, c, cp);
                    if (S == Complex(0.0, 0.0)) continue;
                    double xp = 1.0, xpm = 1.0;
                    for (int n = 0; n < da; ++n) {
                        if (n >= 1) xpm = (n == 1) ? 1.0 : xpm * x1;
                        if (n >= 1) xp *= x1;
                        const BranchFactor fa = branch_factor(c, cp, n, l1, xp, xpm);
                        if (!fa.valid) continue;
                        const int nb = n + fa.offset;
                        if (nb < 0 || nb >= da) continue;
                        rho(dims.index(n, b), dims.index(nb, bp)) += fa.value * S;
                    }
                }
            }
        }
    }
    return finish(std::move(rho), dims);
}

TwoModeFockState build_symmetric_sources(const LinkPairConfig& cfg, Complex gamma) {
    cfg.validate();
    if (cfg.n_max < 1)
        throw std::invalid_argument("build_symmetric_sources: n_max not resolved");
    const auto& l1 = cfg.link1;
    const auto& l2 = cfg.link2;
    const int dn = cfg.n_max + 1;
    const ModeDims dims{dn, dn};
    const double W = common_prefactor(cfg, gamma);
    const double x1 = l1.chi * l1.chi * (1.0 - l1.eta);
    const double x2 = l2.chi * l2.chi * (1.0 - l2.eta);
    const double s = std::norm(gamma);

    // <f|D(-gamma)|c> on the {0,1} scissor outputs, e^{-s/2} stripped.
    const Complex d[2][2] = {{Complex(1.0, 0.0), std::conj(gamma)},
                             {-gamma, Complex(1.0 - s, 0.0)}};

    ComplexMatrix rho = ComplexMatrix::Zero(dims.joint(), dims.joint());
    for (int c = 0; c < 2; ++c) {
        for (int cp = 0; cp < 2; ++cp) {
            for (int f = 0; f < 2; ++f) {
                for (int fp = 0; fp < 2; ++fp) {
                    const Complex coeff = W * d[f][c] * std::conj(d[fp][cp]);
                    double xa = 1.0, xam = 1.0;
                    for (int n = 0; n < dn; ++n) {
                        if (n >= 1) xam = (n == 1) ? 1.0 : xam * x1;
                        if (n >= 1) xa *= x1;
                        const BranchFactor fa = branch_factor(c, cp, n, l1, xa, xam);
                        if (!fa.valid) continue;
                        const int nb = n + fa.offset;
                        if (nb < 0 || nb >= dn) continue;
                        double xb = 1.0, xbm = 1.0;
                        for (int m = 0; m < dn; ++m) {
                            if (m >= 1) xbm = (m == 1) ? 1.0 : xbm * x2;
                            if (m >= 1) xb *= x2;
                            const BranchFactor fb = branch_factor(f, fp, m, l2, xb, xbm);
                            if (!fb.valid) continue;
                            const int mb = m + fb.offset;
                            if (mb < 0 || mb >= dn) continue;
                            rho(dims.index(n, m), dims.index(nb, mb)) +=
                                coeff * fa.value * fb.value;
                        }
                    }
                }
            }
        }
    }
    return finish(std::move(rho), dims);
}

TwoModeFockState build_symmetric_scissors(const LinkPairConfig& cfg) {
    cfg.validate();
    const auto& l1 = cfg.link1;
    const auto& l2 = cfg.link2;
    const double chip = l1.chi * l2.chi;
    const double a1s = 1.0 - l1.eta, a2s = 1.0 - l2.eta;
    const double x = a1s * a2s * chip * chip;
    const double g1 = l1.g, g2 = l2.g;
    const double den = 1.0 - x;

    ComplexMatrix rho = ComplexMatrix::Zero(4, 4);
    rho(0, 0) = 1.0 / den;
    rho(1, 1) = g2 * g2 * a1s * l2.eta * chip * chip / (den * den);
    rho(2, 2) = g1 * g1 * a2s * l1.eta * chip * chip / (den * den);
    rho(3, 3) = g1 * g1 * g2 * g2 * l1.eta * l2.eta * chip * chip * (1.0 + x) /
                (den * den * den);
    rho(0, 3) = g1 * g2 * std::sqrt(l1.eta * l2.eta) * chip / (den * den);
    rho(3, 0) = rho(0, 3);
    return finish(std::move(rho), ModeDims{2, 2});
}

TwoModeFockState build_conditional(const LinkPairConfig& cfg, Complex gamma) {
    switch (cfg.orientation) {
        case Orientation::AsymmetricSourceScissor: return build_asymmetric(cfg, gamma);
        case Orientation::SymmetricSources: return build_symmetric_sources(cfg, gamma);
        case Orientation::SymmetricScissors: return build_symmetric_scissors(cfg);
    }
    throw std::logic_error("build_conditional: bad orientation");
}

namespace {

// Sparse ket of one heralded half channel over (stored, scissor, environment):
//   sqrt((1-chi^2)/(1+g^2)) [ sum_n chi^n a^n |n,0,n>
//                           + g sqrt(eta) sum_n chi^n sqrt(n) a^(n-1) |n,1,n-1> ]
struct KetTerm {
    int stored, qs, env;
    double amp;
};

std::vector<KetTerm> half_channel_ket(const HalfChannelParams& p, int n_cut) {
    std::vector<KetTerm> terms;
    terms.reserve(2 * static_cast<std::size_t>(n_cut) + 1);
    const double pref = std::sqrt((1.0 - p.chi * p.chi) / (1.0 + p.g * p.g));
    const double al = p.alpha();
    double chin = 1.0;   // chi^n
    double aln = 1.0;    // alpha^n
    double alnm = 1.0;   // alpha^(n-1)
    for (int n = 0; n <= n_cut; ++n) {
        if (n >= 1) alnm = (n == 1) ? 1.0 : alnm * al;
        if (n >= 1) aln *= al;
        if (n >= 1) chin *= p.chi;
        terms.push_back({n, 0, n, pref * chin * aln});
        if (n >= 1)
            terms.push_back({n, 1, n - 1,
                             pref * p.g * std::sqrt(p.eta) * chin *
                                 std::sqrt(static_cast<double>(n)) * alnm});
    }
    return terms;
}

// rho[(A,B),(A',B')] = sum_{D,E} psi[A,D,B,E] conj(psi[A',D,B',E])
ComplexMatrix trace_environments(const std::vector<Complex>& psi, int da, int dd,
                                 int dbn, int de) {
    const ModeDims dims{da, dbn};
    ComplexMatrix rho = ComplexMatrix::Zero(dims.joint(), dims.joint());
    auto at = [&](int A, int D, int B, int E) {
        return psi[((static_cast<std::size_t>(A) * dd + D) * dbn + B) * de + E];
    };
    for (int A = 0; A < da; ++A)
        for (int B = 0; B < dbn; ++B)
            for (int A2 = 0; A2 < da; ++A2)
                for (int B2 = 0; B2 < dbn; ++B2) {
                    Complex acc(0.0, 0.0);
                    for (int D = 0; D < dd; ++D)
                        for (int E = 0; E < de; ++E)
                            acc += at(A, D, B, E) * std::conj(at(A2, D, B2, E));
                    rho(dims.index(A, B), dims.index(A2, B2)) = acc;
                }
    return rho;
}

TwoModeFockState oracle_asymmetric(const LinkPairConfig& cfg, Complex gamma) {
    const int n_max = cfg.n_max;
    const int m_cut = 48 + static_cast<int>(std::ceil(8.0 * std::abs(gamma)));
    const auto ket1 = half_channel_ket(cfg.link1, n_max);  // (A, C, D)
    const auto ket2 = half_channel_ket(cfg.link2, m_cut);  // (F, B, E)
    const ComplexMatrix dm = displacement_matrix(-gamma, m_cut + 1);

    const int da = n_max + 1, dd = n_max + 1, dbn = 2, de = m_cut + 1;
    std::vector<Complex> psi(static_cast<std::size_t>(da) * dd * dbn * de,
                             Complex(0.0, 0.0));
    const double proj = 1.0 / std::sqrt(kPi);
    for (const auto& t1 : ket1)
        for (const auto& t2 : ket2) {
            if (t2.env >= de) continue;
            const Complex amp = t1.amp * t2.amp * proj * dm(t2.stored, t1.qs);
            psi[((static_cast<std::size_t>(t1.stored) * dd + t1.env) * dbn + t2.qs) * de +
                t2.env] += amp;
        }
    return finish(trace_environments(psi, da, dd, dbn, de), ModeDims{da, 2});
}

TwoModeFockState oracle_symmetric_sources(const LinkPairConfig& cfg, Complex gamma) {
    const int n_max = cfg.n_max;
    const auto ket1 = half_channel_ket(cfg.link1, n_max);  // (A, C, D)
    const auto ket2 = half_channel_ket(cfg.link2, n_max);  // (B, F, E)
    const ComplexMatrix dm = displacement_matrix(-gamma, 2);

    const int da = n_max + 1, dd = n_max + 1, dbn = n_max + 1, de = n_max + 1;
    std::vector<Complex> psi(static_cast<std::size_t>(da) * dd * dbn * de,
                             Complex(0.0, 0.0));
    const double proj = 1.0 / std::sqrt(kPi);
    for (const auto& t1 : ket1)
        for (const auto& t2 : ket2) {
            const Complex amp = t1.amp * t2.amp * proj * dm(t2.qs, t1.qs);
            psi[((static_cast<std::size_t>(t1.stored) * dd + t1.env) * dbn + t2.stored) *
                    de +
                t2.env] += amp;
        }
    return finish(trace_environments(psi, da, dd, dbn, de), ModeDims{da, dbn});
}

// TMSV(chi') through loss on both arms, then a scissor on each arm; built in
// the paper's normalization (no TMSV norm, no scissor 1/(1+g^2) factors).
TwoModeFockState oracle_symmetric_scissors(const LinkPairConfig& cfg) {
    const double chip = cfg.link1.chi * cfg.link2.chi;
    const double a1 = cfg.link1.alpha(), a2 = cfg.link2.alpha();
    const double g1 = cfg.link1.g, g2 = cfg.link2.g;
    const double e1 = cfg.link1.eta, e2 = cfg.link2.eta;
    const int k_cut = 72;

    const int dd = k_cut + 1, de = k_cut + 1;
    std::vector<Complex> psi(static_cast<std::size_t>(2) * dd * 2 * de, Complex(0.0, 0.0));
    auto idx = [&](int A, int D, int B, int E) {
        return ((static_cast<std::size_t>(A) * dd + D) * 2 + B) * de + E;
    };
    double chk = 1.0;
    for (int k = 0; k <= k_cut; ++k) {
        if (k >= 1) chk *= chip;
        const double s1_0 = std::pow(a1, k);
        const double s1_1 = k >= 1 ? g1 * std::sqrt(k * e1) * std::pow(a1, k - 1) : 0.0;
        const double s2_0 = std::pow(a2, k);
        const double s2_1 = k >= 1 ? g2 * std::sqrt(k * e2) * std::pow(a2, k - 1) : 0.0;
        psi[idx(0, k, 0, k)] += chk * s1_0 * s2_0;
        if (k >= 1) {
            psi[idx(0, k, 1, k - 1)] += chk * s1_0 * s2_1;
            psi[idx(1, k - 1, 0, k)] += chk * s1_1 * s2_0;
            psi[idx(1, k - 1, 1, k - 1)] += chk * s1_1 * s2_1;
        }
    }
    return finish(trace_environments(psi, 2, dd, 2, de), ModeDims{2, 2});
}

}  // namespace

TwoModeFockState oracle_state(const LinkPairConfig& cfg, Complex gamma) {
    cfg.validate();
    switch (cfg.orientation) {
        case Orientation::AsymmetricSourceScissor: return oracle_asymmetric(cfg, gamma);
        case Orientation::SymmetricSources: return oracle_symmetric_sources(cfg, gamma);
        case Orientation::SymmetricScissors: return oracle_symmetric_scissors(cfg);
    }
    throw std::logic_error("oracle_state: bad orientation");
}

int truncation_level(const LinkPairConfig& cfg) {
    return truncation_level(cfg, cfg.trace_target);
}

int truncation_level(const LinkPairConfig& cfg, double trace_target) {
    cfg.validate();
    if (cfg.orientation == Orientation::SymmetricScissors) return 1;

    auto trace_at = [&](int n) {
        LinkPairConfig c = cfg;
        c.n_max = n;
        return build_conditional(c, Complex(0.0, 0.0)).weight;
    };

    constexpr int kMax = 64;
    std::vector<double> traces;
    traces.push_back(trace_at(1));
    for (int n = 2; n <= kMax; ++n) {
        traces.push_back(trace_at(n));
        const double d2 = traces[traces.size() - 1] - traces[traces.size() - 2];
        if (d2 == 0.0 && traces.back() > 0.0) return std::max(n - 1, 1);
        if (traces.size() < 3) continue;
        const double d1 = traces[traces.size() - 2] - traces[traces.size() - 3];
        if (d1 > 0.0 && d2 >= 0.0) {
            const double r = d2 / d1;
            if (r < 0.9) {
                const double limit = traces.back() + d2 * r / (1.0 - r);
                for (std::size_t k = 0; k < traces.size(); ++k)
                    if (traces[k] >= trace_target * limit)
                        return std::max(static_cast<int>(k) + 1, 1);
            }
        }
    }
    throw NoConvergence("truncation_level: trace increments not geometrically decaying");
}

LinkPairConfig resolved(const LinkPairConfig& cfg) { return resolved(cfg, cfg.trace_target); }

LinkPairConfig resolved(const LinkPairConfig& cfg, double trace_target) {
    LinkPairConfig out = cfg;
    if (out.n_max < 1) out.n_max = truncation_level(cfg, trace_target);
    return out;
}

std::string state_to_json(const TwoModeFockState& s) {
    std::ostringstream os;
    os.precision(17);
    os << "{\"dims\":[" << s.dims.dim_a << "," << s.dims.dim_b << "],\"weight\":"
       << s.weight << ",\"normalized\":" << (s.normalized ? "true" : "false")
       << ",\"entries\":[";
    for (int i = 0; i < s.matrix.rows(); ++i)
        for (int j = 0; j < s.matrix.cols(); ++j) {
            if (i + j > 0) os << ",";
            os << "[" << s.matrix(i, j).real() << "," << s.matrix(i, j).imag() << "]";
        }
    os << "]}";
    return os.str();
}

}  // namespace cvrep

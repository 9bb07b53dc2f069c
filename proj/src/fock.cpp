#include "homsim/fock.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace homsim::fock {

namespace {

// Squared-weight budget for basis states a pairwise mixer would push past
// the cutoff. Coherent-state tails at the default cutoff sit orders of
// magnitude below this; anything above it means the cutoff is too small.
constexpr double kMixerOverflowBudget = 1e-8;

// l2-norm budget for the top Fock level under apply_create.
constexpr double kCreateTopLevelBudget = 1e-12;

// Coherent-tail budget for apply_displacement.
constexpr double kDisplacementTailBudget = 1e-10;

// Branches below this probability are dropped by the loss channel.
constexpr double kBranchPruneThreshold = 1e-14;

// Merging a candidate branch of probability p into a representative at
// phase-aligned distance delta perturbs the density operator by at most
// 2 p delta, so the merge is gated on that product. Kraus outputs of a
// coherent-state mode coincide up to support truncation (high-order
// branches of vanishing probability lose their top levels, delta up to
// ~1e-4), which the product gate admits; any branch carrying real weight
// must sit within the hard distance cap to merge.
constexpr double kBranchMergeMaxDist = 1e-3;
constexpr double kBranchMergeWeightedBudget = 1e-12;

double factorial(int n) {
    static const std::vector<double> table = [] {
        std::vector<double> t(171);
        t[0] = 1.0;
        for (int i = 1; i < 171; ++i) t[i] = t[i - 1] * i;
        return t;
    }();
    return table[static_cast<std::size_t>(n)];
}

double binom(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    return factorial(n) / (factorial(k) * factorial(n - k));
}

void check_mode(const StateVector& s, int mode, const char* what) {
    if (mode < 0 || mode >= s.num_modes())
        throw std::invalid_argument(std::string(what) + ": mode index out of range");
}

}  // namespace

StateVector::StateVector(int num_modes, int cutoff)
    : num_modes_(num_modes), cutoff_(cutoff) {
    if (num_modes < 1) throw std::invalid_argument("StateVector: num_modes must be >= 1");
    if (cutoff < 1) throw std::invalid_argument("StateVector: cutoff must be >= 1");
    std::size_t d = 1;
    const std::size_t levels = static_cast<std::size_t>(cutoff) + 1;
    strides_.reserve(static_cast<std::size_t>(num_modes));
    for (int m = 0; m < num_modes; ++m) {
        strides_.push_back(d);
        if (d > std::numeric_limits<std::size_t>::max() / levels)
            throw std::invalid_argument("StateVector: dimension overflow");
        d *= levels;
    }
    amps_.assign(d, cplx(0.0, 0.0));
}

std::size_t StateVector::stride(int mode) const {
    return strides_[static_cast<std::size_t>(mode)];
}

int StateVector::occupation(std::size_t index, int mode) const {
    return static_cast<int>(index / strides_[static_cast<std::size_t>(mode)] %
                            static_cast<std::size_t>(levels()));
}

std::size_t StateVector::index_of(const std::vector<int>& occupations) const {
    if (static_cast<int>(occupations.size()) != num_modes_)
        throw std::invalid_argument("index_of: occupation list length mismatch");
    std::size_t idx = 0, s = 1;
    for (int m = 0; m < num_modes_; ++m) {
        const int n = occupations[static_cast<std::size_t>(m)];
        if (n < 0 || n > cutoff_) throw std::invalid_argument("index_of: occupation out of range");
        idx += static_cast<std::size_t>(n) * s;
        s *= static_cast<std::size_t>(levels());
    }
    return idx;
}

cplx StateVector::amplitude(const std::vector<int>& occupations) const {
    return amps_[index_of(occupations)];
}

double StateVector::norm_sq() const {
    double n = 0.0;
    for (const cplx& a : amps_) n += std::norm(a);
    return n;
}

void StateVector::normalize() {
    const double n = norm_sq();
    if (n <= 0.0) throw std::domain_error("normalize: zero state");
    const double inv = 1.0 / std::sqrt(n);
    for (cplx& a : amps_) a *= inv;
}

double StateVector::mean_photon_number(int mode) const {
    check_mode(*this, mode, "mean_photon_number");
    double acc = 0.0;
    for (std::size_t i = 0; i < dim(); ++i)
        acc += occupation(i, mode) * std::norm(amps_[i]);
    return acc;
}

double StateVector::total_mean_photon_number() const {
    double acc = 0.0;
    for (int m = 0; m < num_modes_; ++m) acc += mean_photon_number(m);
    return acc;
}

Ensemble Ensemble::pure(StateVector s) {
    Ensemble e;
    e.branches.push_back({1.0, std::move(s)});
    return e;
}

double Ensemble::total_probability() const {
    double p = 0.0;
    for (const Branch& b : branches) p += b.probability;
    return p;
}

DetectorModel::DetectorModel(double d) : dark_prob(d) {
    if (!(d >= 0.0 && d < 1.0))
        throw std::invalid_argument("DetectorModel: dark_prob must be in [0, 1)");
}

StateVector make_vacuum(int num_modes, int cutoff) {
    StateVector s(num_modes, cutoff);
    s[0] = cplx(1.0, 0.0);
    return s;
}

StateVector apply_create(const StateVector& s, int mode, double* image_norm) {
    check_mode(s, mode, "apply_create");
    const std::size_t st = s.stride(mode);

    double top = 0.0;
    for (std::size_t i = 0; i < s.dim(); ++i)
        if (s.occupation(i, mode) == s.cutoff()) top += std::norm(s[i]);
    if (std::sqrt(top) >= kCreateTopLevelBudget)
        throw truncation_overflow("apply_create: top Fock level carries norm " +
                                  std::to_string(std::sqrt(top)) + "; increase the cutoff");

    StateVector out(s.num_modes(), s.cutoff());
    for (std::size_t i = 0; i < s.dim(); ++i) {
        const int n = s.occupation(i, mode);
        if (n == s.cutoff()) continue;  // amplitude below budget, dropped
        out[i + st] += std::sqrt(static_cast<double>(n + 1)) * s[i];
    }
    const double norm = std::sqrt(out.norm_sq());
    if (image_norm) *image_norm = norm;
    out.normalize();
    return out;
}

double coherent_tail_defect(double alpha_sq, int cutoff) {
    if (alpha_sq == 0.0) return 0.0;
    // sum_{n > cutoff} e^{-x} x^n / n!  by forward recursion on the terms
    double term = std::exp(-alpha_sq);
    for (int n = 1; n <= cutoff + 1; ++n) term *= alpha_sq / n;
    double tail = term;
    for (int n = cutoff + 2; n < cutoff + 2000; ++n) {
        term *= alpha_sq / n;
        tail += term;
        if (term < tail * 1e-18) break;
    }
    return tail;
}

namespace {

// exp(alpha a^dag - conj(alpha) a) on the truncated space via
// scaling-and-squaring of the anti-Hermitian generator.
std::vector<cplx> displacement_matrix(cplx alpha, int levels) {
    const int L = levels;
    const std::size_t n2 = static_cast<std::size_t>(L) * L;
    std::vector<cplx> gen(n2, cplx(0.0));
    for (int n = 0; n + 1 < L; ++n) {
        gen[static_cast<std::size_t>(n + 1) * L + n] = alpha * std::sqrt(n + 1.0);  // a^dag
        gen[static_cast<std::size_t>(n) * L + (n + 1)] = -std::conj(alpha) * std::sqrt(n + 1.0);
    }

    double norm1 = 0.0;
    for (int c = 0; c < L; ++c) {
        double col = 0.0;
        for (int r = 0; r < L; ++r) col += std::abs(gen[static_cast<std::size_t>(r) * L + c]);
        norm1 = std::max(norm1, col);
    }
    int squarings = 0;
    while (norm1 > 0.25) {
        norm1 /= 2.0;
        ++squarings;
    }
    const double scale = std::ldexp(1.0, -squarings);
    for (cplx& g : gen) g *= scale;

    auto matmul = [L](const std::vector<cplx>& a, const std::vector<cplx>& b) {
        std::vector<cplx> c(static_cast<std::size_t>(L) * L, cplx(0.0));
        for (int i = 0; i < L; ++i)
            for (int k = 0; k < L; ++k) {
                const cplx aik = a[static_cast<std::size_t>(i) * L + k];
                if (aik == cplx(0.0)) continue;
                for (int j = 0; j < L; ++j)
                    c[static_cast<std::size_t>(i) * L + j] += aik * b[static_cast<std::size_t>(k) * L + j];
            }
        return c;
    };

    std::vector<cplx> result(n2, cplx(0.0)), term(n2, cplx(0.0));
    for (int i = 0; i < L; ++i) {
        result[static_cast<std::size_t>(i) * L + i] = 1.0;
        term[static_cast<std::size_t>(i) * L + i] = 1.0;
    }
    for (int k = 1; k <= 60; ++k) {
        term = matmul(term, gen);
        double tnorm = 0.0;
        for (std::size_t i = 0; i < n2; ++i) {
            term[i] /= k;
            tnorm += std::norm(term[i]);
        }
        for (std::size_t i = 0; i < n2; ++i) result[i] += term[i];
        if (std::sqrt(tnorm) < 1e-22) break;
    }
    for (int q = 0; q < squarings; ++q) result = matmul(result, result);
    return result;
}

}  // namespace

StateVector apply_displacement(const StateVector& s, int mode, cplx alpha) {
    check_mode(s, mode, "apply_displacement");
    if (alpha == cplx(0.0)) return s;  // D(0) = 1

    const double defect = coherent_tail_defect(std::norm(alpha), s.cutoff());
    if (defect >= kDisplacementTailBudget)
        throw cutoff_too_small("apply_displacement: coherent tail defect " +
                               std::to_string(defect) + " exceeds 1e-10; increase the cutoff");

    const int L = s.levels();
    const std::size_t st = s.stride(mode);
    const std::size_t block = st * static_cast<std::size_t>(L);

    // When the mode factors as vacuum, tensor on the projected coherent
    // expansion directly. That keeps every amplitude exactly proportional
    // to alpha^n/sqrt(n!), which downstream Kraus maps rely on; the
    // truncated-generator exponential distorts the boundary levels.
    bool mode_in_vacuum = true;
    for (std::size_t i = 0; i < s.dim() && mode_in_vacuum; ++i) {
        if (s[i] != cplx(0.0) && static_cast<int>(i / st % static_cast<std::size_t>(L)) != 0)
            mode_in_vacuum = false;
    }
    StateVector out(s.num_modes(), s.cutoff());
    if (mode_in_vacuum) {
        std::vector<cplx> coh(static_cast<std::size_t>(L));
        coh[0] = std::exp(-0.5 * std::norm(alpha));
        for (int n = 1; n < L; ++n)
            coh[static_cast<std::size_t>(n)] =
                coh[static_cast<std::size_t>(n - 1)] * alpha / std::sqrt(static_cast<double>(n));
        for (std::size_t b0 = 0; b0 < s.dim(); b0 += block) {
            for (std::size_t off = 0; off < st; ++off) {
                const cplx a = s[b0 + off];
                if (a == cplx(0.0)) continue;
                for (int n = 0; n < L; ++n)
                    out[b0 + off + st * static_cast<std::size_t>(n)] =
                        coh[static_cast<std::size_t>(n)] * a;
            }
        }
        return out;
    }

    const std::vector<cplx> U = displacement_matrix(alpha, L);
    std::vector<cplx> in(static_cast<std::size_t>(L));
    for (std::size_t b0 = 0; b0 < s.dim(); b0 += block) {
        for (std::size_t off = 0; off < st; ++off) {
            const std::size_t base = b0 + off;
            for (int n = 0; n < L; ++n) in[static_cast<std::size_t>(n)] = s[base + st * static_cast<std::size_t>(n)];
            for (int m = 0; m < L; ++m) {
                cplx acc(0.0);
                for (int n = 0; n < L; ++n)
                    acc += U[static_cast<std::size_t>(m) * L + n] * in[static_cast<std::size_t>(n)];
                out[base + st * static_cast<std::size_t>(m)] = acc;
            }
        }
    }
    return out;
}

namespace {

// Block matrices of the pairwise rotation, one per conserved pair total n:
//   B_n[m1][k] maps input |k, n-k> to output |m1, n-m1>.
std::vector<std::vector<double>> mixer_blocks(int max_total, double c, double sn) {
    std::vector<double> c_pow(static_cast<std::size_t>(max_total) + 1, 1.0);
    std::vector<double> s_pow(static_cast<std::size_t>(max_total) + 1, 1.0);
    std::vector<double> ms_pow(static_cast<std::size_t>(max_total) + 1, 1.0);
    for (int i = 1; i <= max_total; ++i) {
        c_pow[static_cast<std::size_t>(i)] = c_pow[static_cast<std::size_t>(i - 1)] * c;
        s_pow[static_cast<std::size_t>(i)] = s_pow[static_cast<std::size_t>(i - 1)] * sn;
        ms_pow[static_cast<std::size_t>(i)] = ms_pow[static_cast<std::size_t>(i - 1)] * -sn;
    }

    std::vector<std::vector<double>> blocks(static_cast<std::size_t>(max_total) + 1);
    for (int n = 0; n <= max_total; ++n) {
        std::vector<double>& B = blocks[static_cast<std::size_t>(n)];
        B.assign(static_cast<std::size_t>(n + 1) * static_cast<std::size_t>(n + 1), 0.0);
        for (int k = 0; k <= n; ++k) {
            for (int m1 = 0; m1 <= n; ++m1) {
                double acc = 0.0;
                const int jlo = std::max(0, m1 - (n - k));
                const int jhi = std::min(k, m1);
                for (int j = jlo; j <= jhi; ++j) {
                    acc += binom(k, j) * binom(n - k, m1 - j) *
                           c_pow[static_cast<std::size_t>(j)] *
                           s_pow[static_cast<std::size_t>(k - j)] *
                           ms_pow[static_cast<std::size_t>(m1 - j)] *
                           c_pow[static_cast<std::size_t>((n - k) - (m1 - j))];
                }
                acc *= std::sqrt(factorial(m1) * factorial(n - m1) /
                                 (factorial(k) * factorial(n - k)));
                B[static_cast<std::size_t>(m1) * static_cast<std::size_t>(n + 1) +
                  static_cast<std::size_t>(k)] = acc;
            }
        }
    }
    return blocks;
}

}  // namespace

namespace {

// Flat indices whose digits vanish on every listed mode, enumerated by
// expanding the complement modes level by level.
std::vector<std::size_t> zero_digit_bases(const StateVector& s, const std::vector<int>& modes) {
    std::vector<bool> fixed(static_cast<std::size_t>(s.num_modes()), false);
    for (int m : modes) fixed[static_cast<std::size_t>(m)] = true;

    std::vector<std::size_t> bases = {0};
    for (int m = 0; m < s.num_modes(); ++m) {
        if (fixed[static_cast<std::size_t>(m)]) continue;
        const std::size_t st = s.stride(m);
        std::vector<std::size_t> next;
        next.reserve(bases.size() * static_cast<std::size_t>(s.levels()));
        for (std::size_t b : bases)
            for (int n = 0; n < s.levels(); ++n)
                next.push_back(b + st * static_cast<std::size_t>(n));
        bases = std::move(next);
    }
    return bases;
}

}  // namespace

StateVector apply_mixer(const StateVector& s, int m1, int m2, double c, double sn) {
    check_mode(s, m1, "apply_mixer");
    check_mode(s, m2, "apply_mixer");
    if (m1 == m2) throw std::invalid_argument("apply_mixer: modes must differ");
    if (std::abs(c * c + sn * sn - 1.0) > 1e-12)
        throw std::invalid_argument("apply_mixer: c^2 + sn^2 must be 1");

    const int cut = s.cutoff();
    const std::size_t s1 = s.stride(m1), s2 = s.stride(m2);
    const std::vector<std::size_t> bases = zero_digit_bases(s, {m1, m2});

    double overflow = 0.0;
    for (std::size_t base : bases)
        for (int n1 = 1; n1 <= cut; ++n1)
            for (int n2 = cut + 1 - n1; n2 <= cut; ++n2)
                overflow += std::norm(s[base + s1 * static_cast<std::size_t>(n1) +
                                        s2 * static_cast<std::size_t>(n2)]);
    if (overflow >= kMixerOverflowBudget)
        throw truncation_overflow("apply_mixer: weight " + std::to_string(overflow) +
                                  " sits above the pair cutoff; increase the cutoff");

    const std::vector<std::vector<double>> blocks = mixer_blocks(cut, c, sn);

    StateVector out(s.num_modes(), cut);
    std::vector<cplx> in(static_cast<std::size_t>(cut) + 1), res(static_cast<std::size_t>(cut) + 1);
    for (std::size_t base : bases) {
        for (int n = 0; n <= cut; ++n) {
            bool any = false;
            for (int k = 0; k <= n; ++k) {
                in[static_cast<std::size_t>(k)] =
                    s[base + s1 * static_cast<std::size_t>(k) + s2 * static_cast<std::size_t>(n - k)];
                if (in[static_cast<std::size_t>(k)] != cplx(0.0)) any = true;
            }
            if (!any) continue;
            const std::vector<double>& B = blocks[static_cast<std::size_t>(n)];
            for (int m = 0; m <= n; ++m) {
                cplx acc(0.0);
                for (int k = 0; k <= n; ++k)
                    acc += B[static_cast<std::size_t>(m) * static_cast<std::size_t>(n + 1) +
                             static_cast<std::size_t>(k)] * in[static_cast<std::size_t>(k)];
                res[static_cast<std::size_t>(m)] = acc;
            }
            for (int m = 0; m <= n; ++m)
                out[base + s1 * static_cast<std::size_t>(m) + s2 * static_cast<std::size_t>(n - m)] =
                    res[static_cast<std::size_t>(m)];
        }
    }
    return out;
}

StateVector apply_beamsplitter_50_50(const StateVector& s, int mode_a, int mode_b) {
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    return apply_mixer(s, mode_a, mode_b, inv_sqrt2, -inv_sqrt2);
}

namespace {

bool mergeable_up_to_phase(const StateVector& a, const StateVector& b, double probability) {
    cplx r(0.0);
    for (std::size_t i = 0; i < a.dim(); ++i) r += std::conj(a[i]) * b[i];
    const double mag = std::abs(r);
    if (mag < 0.99) return false;
    const cplx phase = r / mag;
    double d2 = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) d2 += std::norm(b[i] - phase * a[i]);
    const double dist = std::sqrt(d2);
    return dist < kBranchMergeMaxDist && probability * dist < kBranchMergeWeightedBudget;
}

}  // namespace

Ensemble apply_loss(const Ensemble& e, int mode, double transmittance) {
    if (!(transmittance >= 0.0 && transmittance <= 1.0))
        throw std::invalid_argument("apply_loss: transmittance must be in [0, 1]");
    if (transmittance == 1.0) return e;

    Ensemble out;
    const double T = transmittance;
    for (const Branch& br : e.branches) {
        const StateVector& st = br.state;
        check_mode(st, mode, "apply_loss");
        const std::size_t stride = st.stride(mode);
        const std::size_t L = static_cast<std::size_t>(st.levels());

        int nmax = 0;
        for (std::size_t i = 0; i < st.dim(); ++i) {
            if (st[i] != cplx(0.0))
                nmax = std::max(nmax, static_cast<int>(i / stride % L));
        }

        const std::size_t block = stride * L;

        // Squared weight per Fock level of the mode; an upper bound on each
        // branch weight lets dead Kraus orders be skipped without building
        // the state (levels are coupled only diagonally by K_k).
        std::vector<double> level_weight(static_cast<std::size_t>(nmax) + 1, 0.0);
        for (std::size_t b0 = 0; b0 < st.dim(); b0 += block)
            for (std::size_t off = 0; off < stride; ++off)
                for (int n = 0; n <= nmax; ++n)
                    level_weight[static_cast<std::size_t>(n)] +=
                        std::norm(st[b0 + off + stride * static_cast<std::size_t>(n)]);

        for (int k = 0; k <= nmax; ++k) {
            std::vector<double> coef(static_cast<std::size_t>(nmax) + 1, 0.0);
            double q_exact = 0.0;
            for (int n = k; n <= nmax; ++n) {
                coef[static_cast<std::size_t>(n)] =
                    std::sqrt(binom(n, k) * std::pow(T, n - k) * std::pow(1.0 - T, k));
                q_exact += coef[static_cast<std::size_t>(n)] *
                           coef[static_cast<std::size_t>(n)] *
                           level_weight[static_cast<std::size_t>(n)];
            }
            const double p = br.probability * q_exact;
            if (p < kBranchPruneThreshold) continue;

            StateVector mapped(st.num_modes(), st.cutoff());
            for (std::size_t b0 = 0; b0 < st.dim(); b0 += block) {
                for (std::size_t off = 0; off < stride; ++off) {
                    const std::size_t base = b0 + off;
                    for (int n = k; n <= nmax; ++n) {
                        const cplx a = st[base + stride * static_cast<std::size_t>(n)];
                        if (a == cplx(0.0)) continue;
                        mapped[base + stride * static_cast<std::size_t>(n - k)] +=
                            coef[static_cast<std::size_t>(n)] * a;
                    }
                }
            }
            mapped.normalize();

            bool merged = false;
            for (Branch& existing : out.branches) {
                if (existing.state.dim() == mapped.dim() &&
                    mergeable_up_to_phase(existing.state, mapped, p)) {
                    existing.probability += p;
                    merged = true;
                    break;
                }
            }
            if (!merged) out.branches.push_back({p, std::move(mapped)});
        }
    }
    return out;
}

Ensemble apply_loss(const StateVector& s, int mode, double transmittance) {
    return apply_loss(Ensemble::pure(s), mode, transmittance);
}

double vacuum_probability(const StateVector& s, const std::vector<int>& modes) {
    if (modes.empty()) throw std::invalid_argument("vacuum_probability: empty mode set");
    for (int m : modes) check_mode(s, m, "vacuum_probability");
    double p = 0.0;
    for (std::size_t i : zero_digit_bases(s, modes)) p += std::norm(s[i]);
    return p;
}

double coincidence_click_probability(const StateVector& s,
                                     const std::vector<int>& group_x,
                                     const std::vector<int>& group_y,
                                     const DetectorModel& det) {
    if (group_x.empty() || group_y.empty())
        throw std::invalid_argument("coincidence_click_probability: empty detector group");
    for (int m : group_x)
        for (int n : group_y)
            if (m == n)
                throw std::invalid_argument("coincidence_click_probability: groups must be disjoint");

    std::vector<int> both = group_x;
    both.insert(both.end(), group_y.begin(), group_y.end());

    const double nd = 1.0 - det.dark_prob;
    const double qx = nd * vacuum_probability(s, group_x);
    const double qy = nd * vacuum_probability(s, group_y);
    const double qxy = nd * nd * vacuum_probability(s, both);
    return 1.0 - qx - qy + qxy;
}

double coincidence_click_probability(const Ensemble& e,
                                     const std::vector<int>& group_x,
                                     const std::vector<int>& group_y,
                                     const DetectorModel& det) {
    double acc = 0.0;
    for (const Branch& b : e.branches)
        acc += b.probability * coincidence_click_probability(b.state, group_x, group_y, det);
    return acc;
}

std::vector<cplx> density_matrix(const Ensemble& e) {
    if (e.branches.empty()) throw std::invalid_argument("density_matrix: empty ensemble");
    const std::size_t d = e.branches.front().state.dim();
    std::vector<cplx> rho(d * d, cplx(0.0));
    for (const Branch& b : e.branches) {
        if (b.state.dim() != d)
            throw std::invalid_argument("density_matrix: branch dimension mismatch");
        for (std::size_t i = 0; i < d; ++i) {
            const cplx ai = b.state[i];
            if (ai == cplx(0.0)) continue;
            for (std::size_t j = 0; j < d; ++j)
                rho[i * d + j] += b.probability * ai * std::conj(b.state[j]);
        }
    }
    return rho;
}

double frobenius_distance(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("frobenius_distance: size mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::norm(a[i] - b[i]);
    return std::sqrt(acc);
}

}  // namespace homsim::fock

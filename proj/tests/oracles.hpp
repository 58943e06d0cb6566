#pragma once

// Independent reference implementations and random-data helpers for tests.
// Oracles use plain loops and long double accumulation, never library code.

#include "inkbridge/prng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <vector>

namespace inkbridge::test {

inline double normal(Xoshiro256 &rng) {
    // Box-Muller; 1 - u keeps the log argument in (0, 1].
    const double u = 1.0 - rng.uniform01();
    const double v = rng.uniform01();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
}

inline Eigen::MatrixXd gaussian_matrix(Xoshiro256 &rng, Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            m(i, j) = normal(rng);
        }
    }
    return m;
}

inline Eigen::MatrixXd random_orthonormal(Xoshiro256 &rng, Eigen::Index d) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian_matrix(rng, d, d));
    return qr.householderQ() * Eigen::MatrixXd::Identity(d, d);
}

/// Q diag(lambda) Q^T with lambda spread over several orders of magnitude.
inline Eigen::MatrixXd random_psd(Xoshiro256 &rng, Eigen::Index d) {
    const auto q = random_orthonormal(rng, d);
    Eigen::VectorXd lambda(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        lambda(i) = std::pow(10.0, 3.0 * rng.uniform01() - 1.5);
    }
    Eigen::MatrixXd a = q * lambda.asDiagonal() * q.transpose();
    return 0.5 * (a + a.transpose());
}

/// Gaussian rows with a random mixing matrix and offset.
inline Eigen::MatrixXd correlated_matrix(Xoshiro256 &rng, Eigen::Index n, Eigen::Index d) {
    const Eigen::MatrixXd mix = gaussian_matrix(rng, d, d);
    const Eigen::RowVectorXd offset = gaussian_matrix(rng, 1, d) * 3.0;
    return (gaussian_matrix(rng, n, d) * mix).rowwise() + offset;
}

struct LedoitWolfOracle {
    Eigen::MatrixXd cov;
    double delta = 0.0;
};

/// Ledoit and Wolf (2004), Lemma 3.2 / Theorem 3.2 estimators, transcribed literally.
inline LedoitWolfOracle ledoit_wolf_oracle(const Eigen::MatrixXd &x) {
    const auto n = static_cast<std::size_t>(x.rows());
    const auto p = static_cast<std::size_t>(x.cols());
    std::vector<long double> mean(p, 0.0L);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < p; ++i) {
            mean[i] += x(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i));
        }
    }
    for (auto &v : mean) {
        v /= static_cast<long double>(n);
    }
    std::vector<std::vector<long double>> c(n, std::vector<long double>(p));
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < p; ++i) {
            c[k][i] = x(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) - mean[i];
        }
    }
    std::vector<std::vector<long double>> s(p, std::vector<long double>(p, 0.0L));
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j < p; ++j) {
            for (std::size_t k = 0; k < n; ++k) {
                s[i][j] += c[k][i] * c[k][j];
            }
            s[i][j] /= static_cast<long double>(n);
        }
    }
    // <A, B> = tr(A B^T) / p
    long double m = 0.0L;
    for (std::size_t i = 0; i < p; ++i) {
        m += s[i][i];
    }
    m /= static_cast<long double>(p);
    long double d2 = 0.0L;
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j < p; ++j) {
            const long double diff = s[i][j] - (i == j ? m : 0.0L);
            d2 += diff * diff;
        }
    }
    d2 /= static_cast<long double>(p);
    long double b2_bar = 0.0L;
    for (std::size_t k = 0; k < n; ++k) {
        long double norm = 0.0L;
        for (std::size_t i = 0; i < p; ++i) {
            for (std::size_t j = 0; j < p; ++j) {
                const long double diff = c[k][i] * c[k][j] - s[i][j];
                norm += diff * diff;
            }
        }
        b2_bar += norm / static_cast<long double>(p);
    }
    b2_bar /= static_cast<long double>(n) * static_cast<long double>(n);
    const long double b2 = std::min(b2_bar, d2);
    const long double a2 = d2 - b2;
    LedoitWolfOracle out;
    out.cov.resize(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j < p; ++j) {
            const long double target = i == j ? m : 0.0L;
            const long double v = d2 > 0 ? (b2 / d2) * target + (a2 / d2) * s[i][j] : s[i][j];
            out.cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = static_cast<double>(v);
        }
    }
    out.delta = d2 > 0 ? static_cast<double>(b2 / d2) : 0.0;
    return out;
}

/// Bag intersection size by counting every character.
inline std::size_t multiset_overlap(const std::u32string &a, const std::u32string &b) {
    std::map<char32_t, std::size_t> ca;
    std::map<char32_t, std::size_t> cb;
    for (char32_t ch : a) {
        ++ca[ch];
    }
    for (char32_t ch : b) {
        ++cb[ch];
    }
    std::size_t overlap = 0;
    for (const auto &[ch, count] : ca) {
        const auto it = cb.find(ch);
        if (it != cb.end()) {
            overlap += std::min(count, it->second);
        }
    }
    return overlap;
}

/// Exhaustive alignment search: every injective exact-match assignment of
/// candidate positions to reference positions. Returns {matches, chunks} with
/// maximum matches, then minimum chunks. Exponential; keep inputs short.
inline std::pair<std::size_t, std::size_t> brute_force_alignment(const std::u32string &cand,
                                                                  const std::u32string &ref) {
    std::pair<std::size_t, std::size_t> best{0, 0};
    std::vector<int> assign(cand.size(), -1);
    std::vector<bool> used(ref.size(), false);
    const auto evaluate = [&] {
        std::size_t matches = 0;
        std::size_t chunks = 0;
        int prev_ref = -2;
        bool prev_matched = false;
        for (std::size_t i = 0; i < cand.size(); ++i) {
            if (assign[i] < 0) {
                prev_matched = false;
                continue;
            }
            ++matches;
            if (!prev_matched || assign[i] != prev_ref + 1) {
                ++chunks;
            }
            prev_ref = assign[i];
            prev_matched = true;
        }
        if (matches > best.first || (matches == best.first && matches > 0 && chunks < best.second)) {
            best = {matches, chunks};
        }
    };
    const auto recurse = [&](auto &self, std::size_t i) -> void {
        if (i == cand.size()) {
            evaluate();
            return;
        }
        assign[i] = -1;
        self(self, i + 1);
        for (std::size_t j = 0; j < ref.size(); ++j) {
            if (!used[j] && ref[j] == cand[i]) {
                used[j] = true;
                assign[i] = static_cast<int>(j);
                self(self, i + 1);
                used[j] = false;
                assign[i] = -1;
            }
        }
    };
    recurse(recurse, 0);
    return best;
}

/// Textbook two-pass Pearson correlation in long double.
inline double pearson_oracle(const std::vector<double> &x, const std::vector<double> &y) {
    long double mx = 0.0L;
    long double my = 0.0L;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<long double>(x.size());
    my /= static_cast<long double>(y.size());
    long double sxy = 0.0L;
    long double sxx = 0.0L;
    long double syy = 0.0L;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return static_cast<double>(sxy / std::sqrt(sxx * syy));
}

/// Two Gaussian corpora living on a shared q-dimensional subspace of R^d.
/// Coordinates within the subspace are N(mu_i, cov_i); the embedding is an
/// isometry, so the subspace W2 is the analytic answer for the full data.
struct SubspaceCorpora {
    Eigen::MatrixXd a;
    Eigen::MatrixXd b;
    Eigen::VectorXd mu_a, mu_b;
    Eigen::MatrixXd cov_a, cov_b;
};

inline Eigen::MatrixXd sample_gaussian(Xoshiro256 &rng, Eigen::Index n, const Eigen::VectorXd &mu,
                                       const Eigen::MatrixXd &cov) {
    const Eigen::MatrixXd l = Eigen::LLT<Eigen::MatrixXd>(cov).matrixL();
    return (gaussian_matrix(rng, n, mu.size()) * l.transpose()).rowwise() + mu.transpose();
}

inline SubspaceCorpora subspace_corpora(Xoshiro256 &rng, Eigen::Index n, Eigen::Index d, Eigen::Index q) {
    SubspaceCorpora c;
    const Eigen::MatrixXd embed = random_orthonormal(rng, d).leftCols(q);
    c.mu_a = Eigen::VectorXd::Zero(q);
    c.mu_b = gaussian_matrix(rng, q, 1).col(0);
    const auto diag_cov = [&](double lo, double hi) {
        Eigen::VectorXd lambda(q);
        for (Eigen::Index i = 0; i < q; ++i) {
            lambda(i) = lo + (hi - lo) * rng.uniform01();
        }
        const auto rot = random_orthonormal(rng, q);
        Eigen::MatrixXd cov = rot * lambda.asDiagonal() * rot.transpose();
        return Eigen::MatrixXd(0.5 * (cov + cov.transpose()));
    };
    c.cov_a = diag_cov(0.5, 2.0);
    c.cov_b = diag_cov(1.0, 6.0);
    c.a = sample_gaussian(rng, n, c.mu_a, c.cov_a) * embed.transpose();
    c.b = sample_gaussian(rng, n, c.mu_b, c.cov_b) * embed.transpose();
    return c;
}

} // namespace inkbridge::test

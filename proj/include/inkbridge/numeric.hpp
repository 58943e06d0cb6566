#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>

namespace inkbridge {

/// Leaf size of the pairwise summation tree. Leaves are summed with four
/// interleaved accumulators in a fixed order, so the result depends only on
/// the input sequence, never on thread count.
inline constexpr std::size_t pairwise_block = 128;

double pairwise_sum(std::span<const double> values);

/// Pairwise-summed dot product of two equal-length contiguous arrays.
double pairwise_dot(const double *a, const double *b, std::size_t n);

namespace detail {

template <class Term>
double pairwise_range(std::size_t begin, std::size_t n, const Term &term) {
    if (n <= pairwise_block) {
        double acc[4] = {0.0, 0.0, 0.0, 0.0};
        std::size_t i = 0;
        for (; i + 4 <= n; i += 4) {
            acc[0] += term(begin + i);
            acc[1] += term(begin + i + 1);
            acc[2] += term(begin + i + 2);
            acc[3] += term(begin + i + 3);
        }
        for (; i < n; ++i) {
            acc[0] += term(begin + i);
        }
        return (acc[0] + acc[1]) + (acc[2] + acc[3]);
    }
    const std::size_t half = (n / 2 + pairwise_block - 1) / pairwise_block * pairwise_block;
    return pairwise_range(begin, half, term) + pairwise_range(begin + half, n - half, term);
}

} // namespace detail

/// Pairwise sum of term(i) for i in [0, n). Same tree shape as pairwise_sum.
template <class Term>
double pairwise_sum_of(std::size_t n, const Term &term) {
    return detail::pairwise_range(0, n, term);
}

/// Shortest decimal string that round-trips to the same 64-bit value.
std::string format_double(double value);

/// Strict decimal parse of a whole field; returns false on trailing garbage.
/// Accepts "nan"/"inf" spellings so callers can report non-finite values by id.
bool parse_double(std::string_view text, double &out);

} // namespace inkbridge

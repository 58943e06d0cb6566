#include "inkbridge/numeric.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <system_error>

namespace inkbridge {

double pairwise_sum(std::span<const double> values) {
    return pairwise_sum_of(values.size(), [values](std::size_t i) { return values[i]; });
}

double pairwise_dot(const double *a, const double *b, std::size_t n) {
    return pairwise_sum_of(n, [a, b](std::size_t i) { return a[i] * b[i]; });
}

std::string format_double(double value) {
    if (std::isnan(value)) {
        return "nan";
    }
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
    return std::string(buffer, result.ptr);
}

bool parse_double(std::string_view text, double &out) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) {
        text.remove_prefix(1);
    }
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
        text.remove_suffix(1);
    }
    if (!text.empty() && text.front() == '+') {
        text.remove_prefix(1);
    }
    if (text.empty()) {
        return false;
    }
    const char *first = text.data();
    const char *last = text.data() + text.size();
    const auto result = std::from_chars(first, last, out);
    if (result.ec == std::errc::result_out_of_range) {
        // from_chars leaves out untouched on overflow/underflow; strtod saturates.
        const std::string copy(text);
        out = std::strtod(copy.c_str(), nullptr);
        return result.ptr == last;
    }
    return result.ec == std::errc() && result.ptr == last;
}

} // namespace inkbridge

#pragma once

// Data-parallel kernels behind the statistics and per-item metrics.
//
// Each kernel exists twice: `serial` is the reference loop kept for tests and
// benchmarks, `omp` distributes the same per-entry computation over OpenMP
// threads. Every output entry is produced by one fixed-order pairwise sum, so
// the two variants agree bit-for-bit for any thread count.

#include <Eigen/Dense>

#include <cstddef>
#include <exception>
#include <vector>

namespace inkbridge::kernels {

/// Sets the OpenMP worker count for subsequent parallel kernels (n >= 1).
void set_num_threads(int n);
int max_threads();

namespace serial {

/// Column means of an n x d matrix.
Eigen::VectorXd column_means(const Eigen::MatrixXd &x);

/// Cross-product matrix C^T C of an n x d (centered) matrix; d x d, symmetric.
Eigen::MatrixXd scatter(const Eigen::MatrixXd &centered);

/// Entry (i, j) = sum_k (c_ki * c_kj - s_ij)^2: the per-observation
/// deviation of outer products from a reference matrix s.
Eigen::MatrixXd outer_residual_sq(const Eigen::MatrixXd &centered, const Eigen::MatrixXd &s);

/// Rows of x (n x d) projected on the rows of basis (q x d) after subtracting
/// offset: result (n x q).
Eigen::MatrixXd project(const Eigen::MatrixXd &x, const Eigen::VectorXd &offset, const Eigen::MatrixXd &basis);

template <class F>
std::vector<double> map_items(std::size_t n, F &&f) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = f(i);
    }
    return out;
}

} // namespace serial

namespace omp {

Eigen::VectorXd column_means(const Eigen::MatrixXd &x);
Eigen::MatrixXd scatter(const Eigen::MatrixXd &centered);
Eigen::MatrixXd outer_residual_sq(const Eigen::MatrixXd &centered, const Eigen::MatrixXd &s);
Eigen::MatrixXd project(const Eigen::MatrixXd &x, const Eigen::VectorXd &offset, const Eigen::MatrixXd &basis);

/// Evaluates f(i) for every item in parallel. The first exception thrown by
/// any item is rethrown on the calling thread after the loop.
template <class F>
std::vector<double> map_items(std::size_t n, F &&f) {
    std::vector<double> out(n);
    std::exception_ptr failure;
    const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < count; ++i) {
        try {
            out[static_cast<std::size_t>(i)] = f(static_cast<std::size_t>(i));
        } catch (...) {
#pragma omp critical(inkbridge_map_items_failure)
            {
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    return out;
}

} // namespace omp

} // namespace inkbridge::kernels

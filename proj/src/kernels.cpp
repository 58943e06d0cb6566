#include "inkbridge/kernels.hpp"

#include "inkbridge/numeric.hpp"

#include <omp.h>

namespace inkbridge::kernels {

void set_num_threads(int n) { omp_set_num_threads(n < 1 ? 1 : n); }

int max_threads() { return omp_get_max_threads(); }

namespace {

// Shared per-entry bodies; the serial and OpenMP drivers differ only in how
// the outer loop is scheduled.

double column_mean(const Eigen::MatrixXd &x, Eigen::Index j) {
    const auto n = static_cast<std::size_t>(x.rows());
    return pairwise_sum_of(n, [&x, j](std::size_t k) { return x(static_cast<Eigen::Index>(k), j); }) /
           static_cast<double>(n);
}

double scatter_entry(const Eigen::MatrixXd &c, Eigen::Index i, Eigen::Index j) {
    return pairwise_dot(c.col(i).data(), c.col(j).data(), static_cast<std::size_t>(c.rows()));
}

double residual_entry(const Eigen::MatrixXd &c, const Eigen::MatrixXd &s, Eigen::Index i, Eigen::Index j) {
    const double *ci = c.col(i).data();
    const double *cj = c.col(j).data();
    const double sij = s(i, j);
    return pairwise_sum_of(static_cast<std::size_t>(c.rows()), [ci, cj, sij](std::size_t k) {
        const double r = ci[k] * cj[k] - sij;
        return r * r;
    });
}

// Row-contiguous copies so projection entries are contiguous dot products.
struct ProjectionOperands {
    Eigen::MatrixXd centered_t; // d x n
    Eigen::MatrixXd basis_t;    // d x q
};

ProjectionOperands prepare_projection(const Eigen::MatrixXd &x, const Eigen::VectorXd &offset,
                                      const Eigen::MatrixXd &basis) {
    ProjectionOperands ops;
    ops.centered_t = (x.rowwise() - offset.transpose()).transpose();
    ops.basis_t = basis.transpose();
    return ops;
}

double projection_entry(const ProjectionOperands &ops, Eigen::Index row, Eigen::Index comp) {
    return pairwise_dot(ops.centered_t.col(row).data(), ops.basis_t.col(comp).data(),
                        static_cast<std::size_t>(ops.centered_t.rows()));
}

void mirror_upper(Eigen::MatrixXd &m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = 0; i < j; ++i) {
            m(j, i) = m(i, j);
        }
    }
}

} // namespace

namespace serial {

Eigen::VectorXd column_means(const Eigen::MatrixXd &x) {
    Eigen::VectorXd mean(x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        mean(j) = column_mean(x, j);
    }
    return mean;
}

Eigen::MatrixXd scatter(const Eigen::MatrixXd &centered) {
    const Eigen::Index d = centered.cols();
    Eigen::MatrixXd out(d, d);
    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index i = 0; i <= j; ++i) {
            out(i, j) = scatter_entry(centered, i, j);
        }
    }
    mirror_upper(out);
    return out;
}

Eigen::MatrixXd outer_residual_sq(const Eigen::MatrixXd &centered, const Eigen::MatrixXd &s) {
    const Eigen::Index d = centered.cols();
    Eigen::MatrixXd out(d, d);
    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index i = 0; i <= j; ++i) {
            out(i, j) = residual_entry(centered, s, i, j);
        }
    }
    mirror_upper(out);
    return out;
}

Eigen::MatrixXd project(const Eigen::MatrixXd &x, const Eigen::VectorXd &offset, const Eigen::MatrixXd &basis) {
    const auto ops = prepare_projection(x, offset, basis);
    Eigen::MatrixXd out(x.rows(), basis.rows());
    for (Eigen::Index c = 0; c < basis.rows(); ++c) {
        for (Eigen::Index r = 0; r < x.rows(); ++r) {
            out(r, c) = projection_entry(ops, r, c);
        }
    }
    return out;
}

} // namespace serial

namespace omp {

Eigen::VectorXd column_means(const Eigen::MatrixXd &x) {
    Eigen::VectorXd mean(x.cols());
    const Eigen::Index d = x.cols();
#pragma omp parallel for schedule(static)
    for (Eigen::Index j = 0; j < d; ++j) {
        mean(j) = column_mean(x, j);
    }
    return mean;
}

Eigen::MatrixXd scatter(const Eigen::MatrixXd &centered) {
    const Eigen::Index d = centered.cols();
    Eigen::MatrixXd out(d, d);
#pragma omp parallel for schedule(dynamic, 4)
    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index i = 0; i <= j; ++i) {
            out(i, j) = scatter_entry(centered, i, j);
        }
    }
    mirror_upper(out);
    return out;
}

Eigen::MatrixXd outer_residual_sq(const Eigen::MatrixXd &centered, const Eigen::MatrixXd &s) {
    const Eigen::Index d = centered.cols();
    Eigen::MatrixXd out(d, d);
#pragma omp parallel for schedule(dynamic, 4)
    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index i = 0; i <= j; ++i) {
            out(i, j) = residual_entry(centered, s, i, j);
        }
    }
    mirror_upper(out);
    return out;
}

Eigen::MatrixXd project(const Eigen::MatrixXd &x, const Eigen::VectorXd &offset, const Eigen::MatrixXd &basis) {
    const auto ops = prepare_projection(x, offset, basis);
    Eigen::MatrixXd out(x.rows(), basis.rows());
    const Eigen::Index q = basis.rows();
    const Eigen::Index n = x.rows();
#pragma omp parallel for schedule(static)
    for (Eigen::Index c = 0; c < q; ++c) {
        for (Eigen::Index r = 0; r < n; ++r) {
            out(r, c) = projection_entry(ops, r, c);
        }
    }
    return out;
}

} // namespace omp

} // namespace inkbridge::kernels

#include "gur/moments.hpp"

#include <Eigen/Eigenvalues>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace gur {

namespace {

void check_cov(const Eigen::MatrixXd& c, int n, const char* label) {
    if (c.rows() != n || c.cols() != n) {
        std::ostringstream os;
        os << "MomentTable: " << label << " must be " << n << "x" << n;
        throw std::invalid_argument(os.str());
    }
    const double scale = c.cwiseAbs().maxCoeff();
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (std::abs(c(i, j) - c(j, i)) > 1e-12 * std::max(scale, 1.0)) {
                std::ostringstream os;
                os << "MomentTable: " << label << " not symmetric at (" << i << "," << j
                   << "): " << c(i, j) << " vs " << c(j, i);
                throw std::invalid_argument(os.str());
            }
        }
        if (c(i, i) < 0.0) {
            std::ostringstream os;
            os << "MomentTable: " << label << " has negative variance at particle " << i + 1
               << ": " << c(i, i);
            throw std::invalid_argument(os.str());
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (c + c.transpose()),
                                                      Eigen::EigenvaluesOnly);
    const double floor = -1e-10 * std::max(c.trace(), 1e-300);
    if (es.eigenvalues().minCoeff() < floor) {
        std::ostringstream os;
        os << "MomentTable: " << label << " not positive semi-definite (min eigenvalue "
           << es.eigenvalues().minCoeff() << ", floor " << floor << ")";
        throw std::invalid_argument(os.str());
    }
}

} // namespace

MomentTable::MomentTable(int n_, Eigen::VectorXd mean_q_, Eigen::VectorXd mean_p_,
                         Eigen::MatrixXd cov_q_, Eigen::MatrixXd cov_p_)
    : n(n_),
      mean_q(std::move(mean_q_)),
      mean_p(std::move(mean_p_)),
      cov_q(std::move(cov_q_)),
      cov_p(std::move(cov_p_)) {
    validate(*this);
}

void validate(const MomentTable& m) {
    if (m.n < 1)
        throw std::invalid_argument("MomentTable: particle count must be >= 1");
    if (m.mean_q.size() != m.n || m.mean_p.size() != m.n)
        throw std::invalid_argument("MomentTable: mean vectors must have length n");
    check_cov(m.cov_q, m.n, "cov_q");
    check_cov(m.cov_p, m.n, "cov_p");
}

CollectiveDispersions collective_dispersions(const MomentTable& m) {
    return {m.cov_q.sum(), m.cov_p.sum()};
}

MomentTable rescaled(const MomentTable& m, double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("rescaled: lambda must be finite and positive");
    MomentTable out;
    out.n = m.n;
    out.mean_q = lambda * m.mean_q;
    out.mean_p = m.mean_p / lambda;
    out.cov_q = lambda * lambda * m.cov_q;
    out.cov_p = m.cov_p / (lambda * lambda);
    return out;
}

} // namespace gur

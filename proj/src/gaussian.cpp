#include "gur/gaussian.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <nlohmann/json.hpp>
#include <sstream>
#include <utility>

#include "gur/rng.hpp"

namespace gur {

namespace {

bool mutation_active(const char* which) {
    const char* env = std::getenv("GUR_MUTATE");
    return env != nullptr && std::string(env) == which;
}

} // namespace

GaussianState::GaussianState(int n_, double hbar_, Eigen::VectorXd mean_, Eigen::MatrixXd sigma_)
    : n(n_), hbar(hbar_), mean(std::move(mean_)), sigma(std::move(sigma_)) {
    if (n < 1)
        throw std::invalid_argument("GaussianState: mode count must be >= 1");
    if (!(hbar > 0.0))
        throw std::invalid_argument("GaussianState: hbar must be positive");
    if (mean.size() != 2 * n)
        throw std::invalid_argument("GaussianState: mean must have length 2n");
    check_symplectic_validity(sigma, n, hbar);
}

Eigen::MatrixXd symplectic_form(int n) {
    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    omega.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
    omega.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
    return omega;
}

void check_symplectic_validity(const Eigen::MatrixXd& sigma, int n, double hbar) {
    if (sigma.rows() != 2 * n || sigma.cols() != 2 * n)
        throw std::invalid_argument("GaussianState: sigma must be 2n x 2n");
    const double scale = std::max(sigma.cwiseAbs().maxCoeff(), 1.0);
    if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw std::invalid_argument("GaussianState: sigma is not symmetric");

    // sigma + (i hbar / 2) Omega is Hermitian; the state is physical iff
    // its spectrum is non-negative.
    Eigen::MatrixXcd herm = sigma.cast<std::complex<double>>();
    herm += std::complex<double>(0.0, 0.5 * hbar) *
            symplectic_form(n).cast<std::complex<double>>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
    const double min_eig = es.eigenvalues().minCoeff();
    if (min_eig < -1e-10) {
        std::ostringstream os;
        os << "GaussianState: uncertainty-principle validity failed, min eigenvalue of "
              "sigma + (i hbar/2) Omega is "
           << min_eig;
        throw std::invalid_argument(os.str());
    }
}

GaussianState make_product_vacuum(int n, const Constants& c) {
    if (n < 1)
        throw std::invalid_argument("make_product_vacuum: n must be >= 1");
    return GaussianState(n, c.hbar, Eigen::VectorXd::Zero(2 * n),
                         (c.hbar / 2.0) * Eigen::MatrixXd::Identity(2 * n, 2 * n));
}

GaussianState make_two_mode_squeezed(double r, const Constants& c) {
    if (!std::isfinite(r))
        throw std::invalid_argument("make_two_mode_squeezed: r must be finite");
    const double ch = (c.hbar / 2.0) * std::cosh(2.0 * r);
    const double sh = (c.hbar / 2.0) * std::sinh(2.0 * r);
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(4, 4);
    sigma(0, 0) = sigma(1, 1) = ch;
    sigma(0, 1) = sigma(1, 0) = sh;
    sigma(2, 2) = sigma(3, 3) = ch;
    sigma(2, 3) = sigma(3, 2) = -sh;
    return GaussianState(2, c.hbar, Eigen::VectorXd::Zero(4), std::move(sigma));
}

GaussianState make_correlated_triple(double r, const Constants& c) {
    if (!std::isfinite(r))
        throw std::invalid_argument("make_correlated_triple: r must be finite");
    // Orthogonal particle<->mode map; first mode is (q1+q2+q3)/sqrt(3).
    Eigen::Matrix3d basis;
    const double s3 = 1.0 / std::sqrt(3.0);
    const double s2 = 1.0 / std::sqrt(2.0);
    const double s6 = 1.0 / std::sqrt(6.0);
    basis << s3, s3, s3,
             s2, -s2, 0.0,
             s6, s6, -2.0 * s6;
    Eigen::Vector3d dq(std::exp(-2.0 * r), 1.0, 1.0);
    Eigen::Vector3d dp(std::exp(2.0 * r), 1.0, 1.0);
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(6, 6);
    sigma.topLeftCorner(3, 3) =
        (c.hbar / 2.0) * basis.transpose() * dq.asDiagonal() * basis;
    sigma.bottomRightCorner(3, 3) =
        (c.hbar / 2.0) * basis.transpose() * dp.asDiagonal() * basis;
    return GaussianState(3, c.hbar, Eigen::VectorXd::Zero(6), std::move(sigma));
}

GaussianState make_random_state(int n, std::uint64_t seed, double squeeze_max,
                                const Constants& c) {
    if (n < 1)
        throw std::invalid_argument("make_random_state: n must be >= 1");
    if (!(squeeze_max >= 0.0) || !std::isfinite(squeeze_max))
        throw std::invalid_argument("make_random_state: squeeze_max must be finite and >= 0");
    if (squeeze_max == 0.0)
        return make_product_vacuum(n, c); // exact vacuum, independent of seed

    DetRng rng(seed);
    Eigen::VectorXd diag(2 * n);
    for (int k = 0; k < n; ++k) {
        const double r = rng.uniform(-squeeze_max, squeeze_max);
        diag(k) = std::exp(-2.0 * r);
        diag(n + k) = std::exp(2.0 * r);
    }

    // Haar-random unitary from QR of a complex Ginibre sample, with the
    // usual phase fix R_kk > 0.
    Eigen::MatrixXcd ginibre(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            ginibre(i, j) = std::complex<double>(rng.normal(), rng.normal());
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(ginibre);
    Eigen::MatrixXcd q = qr.householderQ();
    Eigen::MatrixXcd rmat = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int k = 0; k < n; ++k) {
        const std::complex<double> rkk = rmat(k, k);
        const double mag = std::abs(rkk);
        if (mag > 0.0)
            q.col(k) *= rkk / mag;
    }

    // Orthogonal-symplectic image of the unitary: q' + ip' = U (q + ip).
    Eigen::MatrixXd k(2 * n, 2 * n);
    k.topLeftCorner(n, n) = q.real();
    k.topRightCorner(n, n) = -q.imag();
    k.bottomLeftCorner(n, n) = q.imag();
    k.bottomRightCorner(n, n) = q.real();

    Eigen::MatrixXd sigma = (c.hbar / 2.0) * k * diag.asDiagonal() * k.transpose();
    sigma = 0.5 * (sigma + sigma.transpose());
    return GaussianState(n, c.hbar, Eigen::VectorXd::Zero(2 * n), std::move(sigma));
}

GaussianState displaced(const GaussianState& s, const Eigen::VectorXd& d) {
    if (d.size() != 2 * s.n)
        throw std::invalid_argument("displaced: displacement must have length 2n");
    return GaussianState(s.n, s.hbar, s.mean + d, s.sigma);
}

MomentTable moments(const GaussianState& s) {
    MomentTable m;
    m.n = s.n;
    m.mean_q = s.mean.head(s.n);
    m.mean_p = s.mean.tail(s.n);
    m.cov_q = s.sigma.topLeftCorner(s.n, s.n);
    m.cov_p = s.sigma.bottomRightCorner(s.n, s.n);
    if (s.n >= 2 && mutation_active("gaussian_qcf_sign")) {
        // Test hook: corrupts the C_Q(1,2) write so the CLI gate can prove
        // it detects a broken engine. Never set in normal operation.
        m.cov_q(0, 1) = -m.cov_q(0, 1);
        m.cov_q(1, 0) = -m.cov_q(1, 0);
    }
    validate(m);
    return m;
}

std::string to_json(const GaussianState& s) {
    nlohmann::json j;
    j["n"] = s.n;
    j["hbar"] = s.hbar;
    j["mean"] = std::vector<double>(s.mean.data(), s.mean.data() + s.mean.size());
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < s.sigma.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int k = 0; k < s.sigma.cols(); ++k)
            row.push_back(s.sigma(i, k));
        rows.push_back(std::move(row));
    }
    j["sigma"] = std::move(rows);
    return j.dump();
}

GaussianState gaussian_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    const int n = j.at("n").get<int>();
    const double hbar = j.at("hbar").get<double>();
    const auto mean_vals = j.at("mean").get<std::vector<double>>();
    if (static_cast<int>(mean_vals.size()) != 2 * n)
        throw std::invalid_argument("gaussian_from_json: mean length mismatch");
    Eigen::VectorXd mean = Eigen::Map<const Eigen::VectorXd>(mean_vals.data(), 2 * n);
    Eigen::MatrixXd sigma(2 * n, 2 * n);
    const auto& rows = j.at("sigma");
    if (static_cast<int>(rows.size()) != 2 * n)
        throw std::invalid_argument("gaussian_from_json: sigma row count mismatch");
    for (int i = 0; i < 2 * n; ++i) {
        const auto row = rows.at(i).get<std::vector<double>>();
        if (static_cast<int>(row.size()) != 2 * n)
            throw std::invalid_argument("gaussian_from_json: sigma column count mismatch");
        for (int k = 0; k < 2 * n; ++k)
            sigma(i, k) = row[k];
    }
    return GaussianState(n, hbar, std::move(mean), std::move(sigma));
}

} // namespace gur

#include "tpmbm/lp_solver.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tpmbm {

namespace {

using SpMat = Eigen::SparseMatrix<double>;

// Largest step in (0, 1] keeping v + alpha dv >= 0.
double max_step(const Vector& v, const Vector& dv) {
    double alpha = 1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (dv(i) < 0.0) alpha = std::min(alpha, -v(i) / dv(i));
    }
    return alpha;
}

class NormalSolver {
public:
    explicit NormalSolver(const SpMat& a) : a_(a), at_(a.transpose()) {}

    // Factorizes A diag(d) A^T plus a ridge relative to its largest diagonal
    // entry. Near convergence d spans many orders of magnitude and an
    // absolute ridge is lost in rounding, so the ridge grows on failure.
    void factorize(const Vector& d) {
        SpMat scaled = a_ * d.asDiagonal();
        SpMat m = scaled * at_;
        const double scale = std::max(1.0, m.diagonal().cwiseAbs().maxCoeff());
        if (!analyzed_) {
            ldlt_.analyzePattern(m);
            analyzed_ = true;
        }
        double ridge = 1e-14 * scale;
        for (int attempt = 0; attempt < 6; ++attempt, ridge *= 100.0) {
            SpMat reg = m;
            for (Eigen::Index i = 0; i < reg.rows(); ++i) reg.coeffRef(i, i) += ridge;
            ldlt_.factorize(reg);
            if (ldlt_.info() == Eigen::Success && ldlt_.vectorD().allFinite() &&
                (ldlt_.vectorD().array() > 0.0).all()) {
                return;
            }
        }
        throw std::runtime_error("solve_lp: normal equations factorization failed");
    }

    Vector solve(const Vector& rhs) const { return ldlt_.solve(rhs); }

private:
    const SpMat& a_;
    SpMat at_;
    Eigen::SimplicialLDLT<SpMat> ldlt_;
    bool analyzed_ = false;
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, double tolerance, int max_iterations) {
    const auto m = lp.a.rows();
    const auto n = lp.a.cols();
    if (lp.b.size() != m || lp.c.size() != n) throw std::invalid_argument("solve_lp: dimension mismatch");
    LpSolution out;
    if (n == 0) {
        out.x = Vector::Zero(0);
        out.converged = true;
        return out;
    }
    const SpMat& a = lp.a;
    NormalSolver normal(a);

    // Starting point from the least-squares heuristic, shifted into the interior.
    normal.factorize(Vector::Ones(n));
    Vector x = a.transpose() * normal.solve(lp.b);
    Vector lambda = normal.solve(a * lp.c);
    Vector s = lp.c - a.transpose() * lambda;
    const double dx = std::max(-1.5 * x.minCoeff(), 0.0);
    const double ds = std::max(-1.5 * s.minCoeff(), 0.0);
    x.array() += dx;
    s.array() += ds;
    const double xs = x.dot(s);
    x.array() += 0.5 * xs / std::max(s.sum(), 1e-300);
    s.array() += 0.5 * xs / std::max(x.sum(), 1e-300);
    x = x.cwiseMax(1e-8);
    s = s.cwiseMax(1e-8);

    const double b_scale = 1.0 + lp.b.norm();
    const double c_scale = 1.0 + lp.c.norm();
    for (int it = 0; it < max_iterations; ++it) {
        out.iterations = it;
        const Vector rb = a * x - lp.b;
        const Vector rc = a.transpose() * lambda + s - lp.c;
        const double mu = x.dot(s) / static_cast<double>(n);
        const double gap_scale = 1.0 + std::abs(lp.c.dot(x));
        if (rb.norm() / b_scale < tolerance && rc.norm() / c_scale < tolerance &&
            mu * static_cast<double>(n) / gap_scale < tolerance) {
            out.converged = true;
            break;
        }
        const Vector d = x.cwiseQuotient(s);
        normal.factorize(d);

        auto direction = [&](const Vector& rxs, Vector& dxo, Vector& dlo, Vector& dso) {
            const Vector rhs = -rb - a * (rxs.cwiseQuotient(s) + d.cwiseProduct(rc));
            dlo = normal.solve(rhs);
            dso = -rc - a.transpose() * dlo;
            dxo = (rxs - x.cwiseProduct(dso)).cwiseQuotient(s);
        };

        Vector dx_aff, dl_aff, ds_aff;
        direction(-x.cwiseProduct(s), dx_aff, dl_aff, ds_aff);
        const double ap_aff = max_step(x, dx_aff);
        const double ad_aff = max_step(s, ds_aff);
        const double mu_aff =
            (x + ap_aff * dx_aff).dot(s + ad_aff * ds_aff) / static_cast<double>(n);
        const double sigma = std::pow(mu_aff / mu, 3.0);

        const Vector rxs = -x.cwiseProduct(s) - dx_aff.cwiseProduct(ds_aff) +
                           Vector::Constant(n, sigma * mu);
        Vector dxv, dlv, dsv;
        direction(rxs, dxv, dlv, dsv);
        const double ap = std::min(1.0, 0.995 * max_step(x, dxv));
        const double ad = std::min(1.0, 0.995 * max_step(s, dsv));
        x += ap * dxv;
        lambda += ad * dlv;
        s += ad * dsv;
    }
    out.x = x;
    out.objective = lp.c.dot(x);
    return out;
}

}  // namespace tpmbm

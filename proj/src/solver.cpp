#include "satfuse/solver.hpp"

#include <cmath>

namespace satfuse {

CgResult conjugate_gradient(const std::function<std::vector<double>(const std::vector<double>&)>& apply,
                            const std::vector<double>& b, std::vector<double>& x, double tol,
                            int max_iters) {
    const std::size_t n = b.size();
    if (x.size() != n) x.assign(n, 0.0);

    auto dotv = [](const std::vector<double>& a, const std::vector<double>& c) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * c[i];
        return s;
    };

    const double bnorm = std::sqrt(dotv(b, b));
    if (bnorm == 0.0) {
        x.assign(n, 0.0);
        return {0, 0.0};
    }

    std::vector<double> r = apply(x);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
    std::vector<double> p = r;
    double rr = dotv(r, r);

    for (int it = 0; it < max_iters; ++it) {
        if (std::sqrt(rr) <= tol * bnorm)
            return {it, std::sqrt(rr) / bnorm};
        std::vector<double> ap = apply(p);
        const double pap = dotv(p, ap);
        if (!(pap > 0.0))
            throw SolverError("conjugate gradients: operator not positive definite (pAp=" +
                              std::to_string(pap) + ")");
        const double alpha = rr / pap;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        const double rr_new = dotv(r, r);
        const double beta = rr_new / rr;
        for (std::size_t i = 0; i < n; ++i)
            p[i] = r[i] + beta * p[i];
        rr = rr_new;
    }
    if (std::sqrt(rr) <= tol * bnorm)
        return {max_iters, std::sqrt(rr) / bnorm};
    throw SolverError("conjugate gradients: no convergence after " + std::to_string(max_iters) +
                      " iterations (rel residual " + std::to_string(std::sqrt(rr) / bnorm) + ")");
}

} // namespace satfuse

#ifndef SATFUSE_SOLVER_HPP
#define SATFUSE_SOLVER_HPP

#include "satfuse/common.hpp"

#include <functional>
#include <vector>

namespace satfuse {

struct CgResult {
    int iterations = 0;
    double relative_residual = 0.0;
};

/// Conjugate gradients for a symmetric positive-definite operator.
/// Terminates when ||Ax-b|| <= tol*||b||; throws SolverError on
/// nonconvergence or when an inner product certifies the operator is not
/// positive definite. x holds the initial guess on entry.
CgResult conjugate_gradient(const std::function<std::vector<double>(const std::vector<double>&)>& apply,
                            const std::vector<double>& b, std::vector<double>& x, double tol,
                            int max_iters);

} // namespace satfuse

#endif

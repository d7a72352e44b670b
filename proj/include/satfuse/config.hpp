#ifndef SATFUSE_CONFIG_HPP
#define SATFUSE_CONFIG_HPP

#include "satfuse/raster.hpp"

#include <string>

namespace satfuse {

/// Every scalar parameter of the pipeline in one place. Defaults follow the
/// values used for the reference experiments; solver knobs are conservative.
struct FusionConfig {
    // diffusion / texture
    double a = 0.01;      // edge-stopping scale in g(s) = a/(a+s)
    double h = 0.1;       // temporal window length for the texture index
    double sigma = 1.0;   // gaussian presmoothing width
    double eps = 0.001;   // regularization of the unit-normal flow

    // fusion energy weights
    double eta = 0.95;     // directional damping threshold, in (0,1)
    double mu = 2.5;       // gradient fidelity weight
    double gamma = 0.0;    // observed-pixel fidelity weight (restoration only)
    double vartheta = 1.0; // low-resolution fidelity weight

    // source estimation
    double lambda1 = 0.5; // screened-Poisson smoothing length

    // intensity cap C (box constraint 0 <= u <= C); 255 or 65535 or custom
    double intensity_cap = 255.0;

    // gradient-magnitude floor regularizing |grad|^(p-2) in lagged solves;
    // smaller floors inflate the linearized diffusivity at flat pixels and
    // stall the inner conjugate gradients
    double grad_floor = 1e-2;

    // resampling kernel
    Kernel::Kind kernel_kind = Kernel::Kind::Box;
    int kernel_size = 0; // 0 = use the grid ratio

    // descent solver
    double descent_dt = 0.25;
    int descent_max_iters = 2000;
    double descent_tol = 1e-9; // relative energy decrease threshold; 0 = run to the float floor

    // conjugate gradients
    double cg_tol = 1e-8;
    int cg_max_iters = 5000;

    // prediction time stepping; 0 = one step per day
    int time_steps = 0;

    // unit-normal flow integration
    int normal_flow_steps = 2;
    double normal_flow_dt = 0.0; // 0 = 0.2*eps

    void validate() const;

    /// Kernel for a given high/low grid ratio, honoring kernel_size when set.
    Kernel make_kernel(int grid_ratio) const;
    double flow_dt() const { return normal_flow_dt > 0.0 ? normal_flow_dt : 0.2 * eps; }
};

/// Parse "key=value" lines (blank lines and '#' comments ignored).
FusionConfig read_config(const std::string& path);
FusionConfig parse_config_line(FusionConfig base, const std::string& key, const std::string& value);
std::string config_to_string(const FusionConfig& cfg);

} // namespace satfuse

#endif

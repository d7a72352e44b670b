#include "satfuse/fuse.hpp"

#include "satfuse/parallel.hpp"
#include "satfuse/predict.hpp"
#include "satfuse/prototype.hpp"

#include <algorithm>
#include <cmath>

namespace satfuse {

void FusionProblem::validate() const {
    cfg.validate();
    prototype.validate("prototype band");
    modis.validate("modis band");
    if (!(q.grid == prototype.grid()) || !(theta.grid == prototype.grid()))
        throw ValidationError("fusion problem: q/theta grids disagree with the prototype");
    if (observed) {
        observed->values.validate("observed band");
        if (!(observed->values.grid() == prototype.grid()) ||
            !(observed->damage.grid == prototype.grid()))
            throw ValidationError("fusion problem: observed band grid mismatch");
    }
    if (kernel.size < 1)
        throw ValidationError("fusion problem: kernel is empty");
    if (prototype.grid().width % modis.grid().width != 0 ||
        prototype.grid().height % modis.grid().height != 0)
        throw ValidationError("fusion problem: low grid does not divide the high grid");
}

FusionProblem make_fusion_problem(Raster prototype_band, Raster modis_band,
                                  std::optional<ObservedBand> observed, const FusionConfig& cfg) {
    cfg.validate();
    FusionProblem p;
    p.q = texture_index_static(prototype_band, cfg);
    p.theta = normal_field(prototype_band, cfg);
    const int ratio = prototype_band.grid().width / std::max(1, modis_band.grid().width);
    p.kernel = cfg.make_kernel(std::max(1, ratio));
    p.prototype = std::move(prototype_band);
    p.modis = std::move(modis_band);
    p.observed = std::move(observed);
    p.cfg = cfg;
    p.validate();
    return p;
}

namespace {

void require_feasible(const FusionProblem& problem, const Raster& u) {
    if (!(u.grid() == problem.prototype.grid()))
        throw ValidationError("fusion energy: grid mismatch");
    const double cap = problem.cfg.intensity_cap;
    for (std::size_t i = 0; i < u.size(); ++i)
        if (!(u[i] >= 0.0) || !(u[i] <= cap))
            throw ValidationError("fusion energy: infeasible intensity " + std::to_string(u[i]));
}

/// Exact derivative of the regularized directional density: the flux
/// (|R grad u|^2 + eps^2)^((q-2)/2) R grad u, eps = cfg.grad_floor.
VectorField directional_flux(const FusionProblem& problem, const VectorField& grad_u) {
    const DirectionalOperator op{problem.theta, problem.cfg.eta};
    VectorField rg = apply_R(op, grad_u);
    for (std::size_t i = 0; i < rg.size(); ++i) {
        const double w =
            diffusion_weight(std::hypot(rg.x[i], rg.y[i]), problem.q.q[i], problem.cfg.grad_floor);
        rg.x[i] *= w;
        rg.y[i] *= w;
    }
    return rg;
}

} // namespace

EnergyBreakdown energy(const FusionProblem& problem, const Raster& u) {
    require_feasible(problem, u);
    const FusionConfig& cfg = problem.cfg;
    const double area = u.grid().pixel_area();

    EnergyBreakdown e;

    const DirectionalOperator op{problem.theta, cfg.eta};
    const VectorField gu = gradient(u);
    const VectorField rgu = apply_R(op, gu);
    const VectorField gs = gradient(problem.prototype);
    const double eps2 = cfg.grad_floor * cfg.grad_floor;
    double a_sum = 0.0, b_sum = 0.0;
    for (std::size_t i = 0; i < gu.size(); ++i) {
        // regularized density (1/q)[(|Rg|^2+eps^2)^(q/2) - eps^q]; vanishes
        // with the gradient and its derivative matches directional_flux
        const double q = problem.q.q[i];
        const double m2 = rgu.x[i] * rgu.x[i] + rgu.y[i] * rgu.y[i];
        a_sum += (std::pow(m2 + eps2, 0.5 * q) - std::pow(eps2, 0.5 * q)) / q;
        const double dx = gu.x[i] - gs.x[i];
        const double dy = gu.y[i] - gs.y[i];
        b_sum += dx * dx + dy * dy;
    }
    e.directional = a_sum * area;
    e.gradient_fidelity = 0.5 * cfg.mu * b_sum * area;

    if (problem.observed && cfg.gamma > 0.0) {
        double c_sum = 0.0;
        const Raster& s = problem.observed->values;
        const DamageMask& d = problem.observed->damage;
        for (std::size_t i = 0; i < u.size(); ++i) {
            if (d.mask[i]) continue;
            const double diff = u[i] - s[i];
            c_sum += diff * diff;
        }
        e.observed_fidelity = 0.5 * cfg.gamma * c_sum * area;
    }

    if (cfg.vartheta > 0.0) {
        const Raster low = downsample(u, problem.kernel, problem.modis.grid());
        double d_sum = 0.0;
        for (std::size_t i = 0; i < low.size(); ++i) {
            const double r = low[i] - problem.modis[i];
            d_sum += r * r; // Dirac-comb semantics: plain sum over low samples
        }
        e.lowres_fidelity = 0.5 * cfg.vartheta * d_sum;
    }

    e.total = e.directional + e.gradient_fidelity + e.observed_fidelity + e.lowres_fidelity;
    if (!std::isfinite(e.total))
        throw SolverError("fusion energy is not finite");
    return e;
}

Raster energy_gradient(const FusionProblem& problem, const Raster& u) {
    require_feasible(problem, u);
    const FusionConfig& cfg = problem.cfg;
    const double area = u.grid().pixel_area();
    const DirectionalOperator op{problem.theta, cfg.eta};

    const VectorField gu = gradient(u);
    const VectorField flux = apply_R_adjoint(op, directional_flux(problem, gu));
    const Raster div_flux = divergence(flux);

    const VectorField gs = gradient(problem.prototype);
    VectorField diff(u.grid());
    for (std::size_t i = 0; i < diff.size(); ++i) {
        diff.x[i] = gu.x[i] - gs.x[i];
        diff.y[i] = gu.y[i] - gs.y[i];
    }
    const Raster div_diff = divergence(diff);

    Raster grad(u.grid());
    for (std::size_t i = 0; i < grad.size(); ++i)
        grad[i] = area * (-div_flux[i] - cfg.mu * div_diff[i]);

    if (problem.observed && cfg.gamma > 0.0) {
        const Raster& s = problem.observed->values;
        const DamageMask& d = problem.observed->damage;
        for (std::size_t i = 0; i < grad.size(); ++i)
            if (!d.mask[i]) grad[i] += area * cfg.gamma * (u[i] - s[i]);
    }

    if (cfg.vartheta > 0.0) {
        Raster residual = downsample(u, problem.kernel, problem.modis.grid());
        for (std::size_t i = 0; i < residual.size(); ++i)
            residual[i] -= problem.modis[i];
        const Raster up = downsample_adjoint(residual, problem.kernel, u.grid());
        for (std::size_t i = 0; i < grad.size(); ++i)
            grad[i] += cfg.vartheta * up[i];
    }
    return grad;
}

Raster solve(const FusionProblem& problem, const Raster& initial, std::vector<TracePoint>* trace) {
    problem.validate();
    const FusionConfig& cfg = problem.cfg;
    const double cap = cfg.intensity_cap;

    Raster u = initial;
    EnergyBreakdown e = energy(problem, u);
    if (trace) {
        trace->clear();
        trace->push_back({0, e});
    }

    constexpr int kMaxHalvings = 60;
    const double dt_cap = 1e4 * cfg.descent_dt;
    double dt = cfg.descent_dt;

    Raster u_prev(u.grid());
    Raster g_prev(u.grid());
    bool have_prev = false;

    for (int it = 1; it <= cfg.descent_max_iters; ++it) {
        const Raster g = energy_gradient(problem, u);

        // spectral (Barzilai-Borwein) trial step; backtracking below keeps
        // every accepted step a strict decrease
        if (have_prev) {
            double ss = 0.0, sy = 0.0;
            for (std::size_t i = 0; i < u.size(); ++i) {
                const double s = u[i] - u_prev[i];
                ss += s * s;
                sy += s * (g[i] - g_prev[i]);
            }
            if (sy > 0.0 && ss > 0.0)
                dt = std::clamp(ss / sy, 1e-12 * cfg.descent_dt, dt_cap);
        }

        bool accepted = false;
        Raster u_try(u.grid());
        EnergyBreakdown e_try;
        for (int bt = 0; bt <= kMaxHalvings; ++bt) {
            for (std::size_t i = 0; i < u.size(); ++i)
                u_try[i] = std::clamp(u[i] - dt * g[i], 0.0, cap);
            try {
                e_try = energy(problem, u_try);
            } catch (const SolverError&) {
                throw SolverError("non-finite energy at descent iteration " + std::to_string(it));
            }
            if (e_try.total < e.total) {
                accepted = true;
                break;
            }
            dt *= 0.5;
        }
        if (!accepted)
            break; // no decreasing step exists at the smallest scale: stationary

        const double rel_decrease = (e.total - e_try.total) / std::max(std::abs(e.total), 1e-300);
        u_prev = std::move(u);
        g_prev = g;
        u = std::move(u_try);
        e = e_try;
        have_prev = true;
        if (trace) trace->push_back({it, e});
        if (cfg.descent_tol > 0.0 && rel_decrease < cfg.descent_tol)
            break;
    }
    return u;
}

double stationarity_inequality(const FusionProblem& problem, const Raster& u, const Raster& v) {
    const Raster g = energy_gradient(problem, u);
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        s += g[i] * (v[i] - u[i]);
    return s;
}

double stationarity_worst_rel(const FusionProblem& problem, const Raster& u, int n_dirs,
                              std::uint64_t seed) {
    const Raster g = energy_gradient(problem, u);
    const double eu = energy(problem, u).total;
    Rng rng(seed);
    double worst = 0.0;
    for (int k = 0; k < n_dirs; ++k) {
        Raster v(u.grid());
        for (std::size_t i = 0; i < v.size(); ++i)
            v[i] = rng.uniform(0.0, problem.cfg.intensity_cap);
        double vi = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i)
            vi += g[i] * (v[i] - u[i]);
        const double scale = eu + energy(problem, v).total;
        worst = std::min(worst, vi / std::max(scale, 1e-300));
    }
    return worst;
}

double beta_scaling(const Raster& reference, const Raster& u0, const DamageMask* mask) {
    if (!(reference.grid() == u0.grid()))
        throw ValidationError("beta_scaling: grid mismatch");
    if (mask && !(mask->grid == u0.grid()))
        throw ValidationError("beta_scaling: mask grid mismatch");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < u0.size(); ++i) {
        if (mask && mask->mask[i]) continue;
        num += reference[i] * u0[i];
        den += u0[i] * u0[i];
    }
    if (!(den > 0.0))
        throw ValidationError("beta_scaling: zero denominator");
    return num / den;
}

namespace {

/// Index of the low-resolution band matching band `k` of the series image:
/// by tag name when the low image carries it, otherwise by position among
/// the J1-tagged bands.
int modis_band_for(const MultiBandImage& series_img, const MultiBandImage& modis, std::size_t k) {
    const BandTag& tag = series_img.tags[k];
    const int by_name = modis.find_band(tag.name);
    if (by_name >= 0) return by_name;
    int j1_ordinal = 0;
    for (std::size_t i = 0; i < k; ++i)
        if (series_img.tags[i].group == BandGroup::J1) ++j1_ordinal;
    if (j1_ordinal >= static_cast<int>(modis.band_count()))
        throw ValidationError("low-resolution image has fewer bands than the J1 group");
    return j1_ordinal;
}

struct VariationalFill {
    Raster u0;     // minimizer
    Raster scaled; // beta * u0
    double beta = 1.0;
    std::vector<TracePoint> trace;
};

VariationalFill fuse_band(const Raster& prototype_band, const Raster& modis_band,
                          std::optional<ObservedBand> observed, const Raster* beta_reference,
                          const DamageMask* beta_mask, const FusionConfig& cfg) {
    FusionProblem problem =
        make_fusion_problem(prototype_band, modis_band, std::move(observed), cfg);
    VariationalFill fill;
    fill.u0 = solve(problem, prototype_band, &fill.trace);
    fill.beta = beta_scaling(beta_reference ? *beta_reference : prototype_band, fill.u0, beta_mask);
    fill.scaled = fill.u0;
    for (std::size_t i = 0; i < fill.scaled.size(); ++i)
        fill.scaled[i] *= fill.beta;
    return fill;
}

} // namespace

MultiBandImage run_restoration(const std::vector<MultiBandImage>& series,
                               const std::vector<DamageMask>& masks, const MultiBandImage& modis,
                               std::size_t i_star, const FusionConfig& cfg, int threads,
                               MultiBandImage* prototype_out, std::vector<BandSolve>* solves) {
    cfg.validate();
    if (i_star >= series.size())
        throw ValidationError("run_restoration: i_star out of range");
    if (!(cfg.gamma > 0.0))
        throw ValidationError("run_restoration: the observed-pixel fidelity requires gamma > 0");
    const DamageMask& damage = masks.at(i_star);
    if (damage.damaged_fraction() > 0.6)
        throw ValidationError("run_restoration: damage exceeds 0.6 of the scene");

    const std::vector<MultiBandImage> prototypes = build_prototypes(series, masks);
    const MultiBandImage& observed_img = series[i_star];
    const MultiBandImage& proto = prototypes[i_star];
    if (prototype_out) *prototype_out = proto;

    MultiBandImage out = observed_img; // undamaged pixels pass through bit-for-bit
    const std::size_t nbands = observed_img.band_count();

    std::vector<int> fused_bands;
    for (std::size_t k = 0; k < nbands; ++k) {
        if (observed_img.tags[k].group == BandGroup::J1)
            fused_bands.push_back(static_cast<int>(k));
        else
            out.bands[k] = proto.bands[k]; // copied-band group: prototype verbatim
    }

    if (solves) solves->assign(fused_bands.size(), {});
    if (!damage.empty()) {
        parallel_for_tasks(static_cast<int>(fused_bands.size()), threads, [&](int j) {
            const std::size_t k = static_cast<std::size_t>(fused_bands[static_cast<std::size_t>(j)]);
            const Raster& modis_band =
                modis.bands[static_cast<std::size_t>(modis_band_for(observed_img, modis, k))];
            VariationalFill fill =
                fuse_band(proto.bands[k], modis_band,
                          ObservedBand{observed_img.bands[k], damage}, &observed_img.bands[k],
                          &damage, cfg);
            Raster& band = out.bands[k];
            for (std::size_t z = 0; z < band.size(); ++z)
                if (damage.mask[z]) band[z] = fill.scaled[z];
            if (solves) {
                BandSolve& bs = (*solves)[static_cast<std::size_t>(j)];
                bs.band = k;
                bs.tag = observed_img.tags[k].name;
                bs.beta = fill.beta;
                bs.u0 = std::move(fill.u0);
                bs.trace = std::move(fill.trace);
            }
        });
    }
    return out;
}

namespace {

MultiBandImage fuse_with_prototype(const MultiBandImage& proto, const MultiBandImage& modis,
                                   const FusionConfig& cfg, int threads,
                                   std::vector<BandSolve>* solves) {
    MultiBandImage out = proto;
    std::vector<int> fused_bands;
    for (std::size_t k = 0; k < proto.band_count(); ++k)
        if (proto.tags[k].group == BandGroup::J1)
            fused_bands.push_back(static_cast<int>(k));

    if (solves) solves->assign(fused_bands.size(), {});
    parallel_for_tasks(static_cast<int>(fused_bands.size()), threads, [&](int j) {
        const std::size_t k = static_cast<std::size_t>(fused_bands[static_cast<std::size_t>(j)]);
        const Raster& modis_band =
            modis.bands[static_cast<std::size_t>(modis_band_for(proto, modis, k))];
        VariationalFill fill = fuse_band(proto.bands[k], modis_band, std::nullopt, nullptr,
                                         nullptr, cfg);
        out.bands[k] = std::move(fill.scaled);
        if (solves) {
            BandSolve& bs = (*solves)[static_cast<std::size_t>(j)];
            bs.band = k;
            bs.tag = proto.tags[k].name;
            bs.beta = fill.beta;
            bs.u0 = std::move(fill.u0);
            bs.trace = std::move(fill.trace);
        }
    });
    return out;
}

} // namespace

MultiBandImage run_interpolation(const std::vector<MultiBandImage>& series,
                                 const std::vector<DamageMask>& masks, const MultiBandImage& modis,
                                 double target_day, const FusionConfig& cfg, int threads,
                                 MultiBandImage* prototype_out, std::vector<BandSolve>* solves) {
    cfg.validate();
    if (series.empty())
        throw ValidationError("run_interpolation: empty series");
    const std::vector<MultiBandImage> prototypes = build_prototypes(series, masks);

    MultiBandImage proto;
    bool found = false;
    for (std::size_t i = 0; i < prototypes.size(); ++i) {
        if (static_cast<double>(series[i].timestamp) == target_day) {
            proto = prototypes[i]; // degenerate interval: that day's prototype stands in
            found = true;
            break;
        }
    }
    if (!found) {
        std::size_t i_star = prototypes.size();
        for (std::size_t i = 0; i + 1 < prototypes.size(); ++i)
            if (static_cast<double>(series[i].timestamp) < target_day &&
                target_day < static_cast<double>(series[i + 1].timestamp))
                i_star = i;
        if (i_star == prototypes.size())
            throw ValidationError("run_interpolation: target day is not inside the series");
        PredictionProblem prediction{prototypes[i_star], prototypes[i_star + 1], target_day, cfg};
        proto = predict_prototype(prediction, threads).image;
    }
    proto.timestamp = static_cast<std::int64_t>(std::llround(target_day));
    if (prototype_out) *prototype_out = proto;
    return fuse_with_prototype(proto, modis, cfg, threads, solves);
}

MultiBandImage run_extrapolation(const std::vector<MultiBandImage>& series,
                                 const std::vector<DamageMask>& masks, const MultiBandImage& modis,
                                 double target_day, const FusionConfig& cfg, int threads,
                                 MultiBandImage* prototype_out, std::vector<BandSolve>* solves) {
    cfg.validate();
    if (series.empty())
        throw ValidationError("run_extrapolation: empty series");
    if (!(target_day > static_cast<double>(series.back().timestamp)))
        throw ValidationError("run_extrapolation: target day must follow the last acquisition");
    const std::vector<MultiBandImage> prototypes = build_prototypes(series, masks);
    MultiBandImage proto = prototypes.back(); // the last prototype stands in for the prediction
    proto.timestamp = static_cast<std::int64_t>(std::llround(target_day));
    if (prototype_out) *prototype_out = proto;
    return fuse_with_prototype(proto, modis, cfg, threads, solves);
}

} // namespace satfuse

#include "satfuse/config.hpp"

#include <fstream>
#include <sstream>

namespace satfuse {

void FusionConfig::validate() const {
    if (!(a > 0.0)) throw ValidationError("config: a must be positive");
    if (!(h > 0.0)) throw ValidationError("config: h must be positive");
    if (!(sigma > 0.0)) throw ValidationError("config: sigma must be positive");
    if (!(eps > 0.0)) throw ValidationError("config: eps must be positive");
    if (!(eta > 0.0 && eta < 1.0)) throw ValidationError("config: eta must lie in (0,1)");
    if (mu < 0.0) throw ValidationError("config: mu must be nonnegative");
    if (gamma < 0.0) throw ValidationError("config: gamma must be nonnegative");
    if (vartheta < 0.0) throw ValidationError("config: vartheta must be nonnegative");
    if (!(lambda1 > 0.0)) throw ValidationError("config: lambda1 must be positive");
    if (!(intensity_cap > 0.0)) throw ValidationError("config: intensity_cap must be positive");
    if (!(grad_floor > 0.0)) throw ValidationError("config: grad_floor must be positive");
    if (kernel_size < 0) throw ValidationError("config: kernel_size must be nonnegative");
    if (!(descent_dt > 0.0)) throw ValidationError("config: descent_dt must be positive");
    if (descent_max_iters < 1) throw ValidationError("config: descent_max_iters must be >= 1");
    if (descent_tol < 0.0) throw ValidationError("config: descent_tol must be nonnegative");
    if (!(cg_tol > 0.0)) throw ValidationError("config: cg_tol must be positive");
    if (cg_max_iters < 1) throw ValidationError("config: cg_max_iters must be >= 1");
    if (time_steps < 0) throw ValidationError("config: time_steps must be nonnegative");
    if (normal_flow_steps < 1) throw ValidationError("config: normal_flow_steps must be >= 1");
    if (normal_flow_dt < 0.0) throw ValidationError("config: normal_flow_dt must be nonnegative");
}

Kernel FusionConfig::make_kernel(int grid_ratio) const {
    const int K = kernel_size > 0 ? kernel_size : grid_ratio;
    return kernel_kind == Kernel::Kind::Box ? Kernel::box(K) : Kernel::lanczos(K);
}

FusionConfig parse_config_line(FusionConfig cfg, const std::string& key, const std::string& value) {
    auto num = [&]() { return std::stod(value); };
    auto integer = [&]() { return std::stoi(value); };
    if (key == "a") cfg.a = num();
    else if (key == "h") cfg.h = num();
    else if (key == "sigma") cfg.sigma = num();
    else if (key == "eps") cfg.eps = num();
    else if (key == "eta") cfg.eta = num();
    else if (key == "mu") cfg.mu = num();
    else if (key == "gamma") cfg.gamma = num();
    else if (key == "vartheta") cfg.vartheta = num();
    else if (key == "lambda1") cfg.lambda1 = num();
    else if (key == "intensity_cap") cfg.intensity_cap = num();
    else if (key == "grad_floor") cfg.grad_floor = num();
    else if (key == "kernel") {
        if (value == "box") cfg.kernel_kind = Kernel::Kind::Box;
        else if (value == "lanczos") cfg.kernel_kind = Kernel::Kind::Lanczos;
        else throw ValidationError("config: unknown kernel '" + value + "'");
    }
    else if (key == "kernel_size") cfg.kernel_size = integer();
    else if (key == "descent_dt") cfg.descent_dt = num();
    else if (key == "descent_max_iters") cfg.descent_max_iters = integer();
    else if (key == "descent_tol") cfg.descent_tol = num();
    else if (key == "cg_tol") cfg.cg_tol = num();
    else if (key == "cg_max_iters") cfg.cg_max_iters = integer();
    else if (key == "time_steps") cfg.time_steps = integer();
    else if (key == "normal_flow_steps") cfg.normal_flow_steps = integer();
    else if (key == "normal_flow_dt") cfg.normal_flow_dt = num();
    else throw ValidationError("config: unknown key '" + key + "'");
    return cfg;
}

FusionConfig read_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ValidationError("cannot open config: " + path);
    FusionConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError(path + ":" + std::to_string(lineno) + ": expected key=value");
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        auto strip = [](std::string& s) {
            while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
            while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
        };
        strip(key);
        strip(value);
        try {
            cfg = parse_config_line(cfg, key, value);
        } catch (const std::invalid_argument&) {
            throw ValidationError(path + ":" + std::to_string(lineno) + ": bad value for " + key);
        }
    }
    cfg.validate();
    return cfg;
}

std::string config_to_string(const FusionConfig& cfg) {
    std::ostringstream os;
    os << "a=" << cfg.a << "\nh=" << cfg.h << "\nsigma=" << cfg.sigma << "\neps=" << cfg.eps
       << "\neta=" << cfg.eta << "\nmu=" << cfg.mu << "\ngamma=" << cfg.gamma
       << "\nvartheta=" << cfg.vartheta << "\nlambda1=" << cfg.lambda1
       << "\nintensity_cap=" << cfg.intensity_cap << "\ngrad_floor=" << cfg.grad_floor
       << "\nkernel=" << (cfg.kernel_kind == Kernel::Kind::Box ? "box" : "lanczos")
       << "\nkernel_size=" << cfg.kernel_size << "\ndescent_dt=" << cfg.descent_dt
       << "\ndescent_max_iters=" << cfg.descent_max_iters << "\ndescent_tol=" << cfg.descent_tol
       << "\ncg_tol=" << cfg.cg_tol << "\ncg_max_iters=" << cfg.cg_max_iters
       << "\ntime_steps=" << cfg.time_steps << "\nnormal_flow_steps=" << cfg.normal_flow_steps
       << "\nnormal_flow_dt=" << cfg.normal_flow_dt << "\n";
    return os.str();
}

} // namespace satfuse

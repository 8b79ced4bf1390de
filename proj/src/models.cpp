#include <adlab/models.hpp>

#include <adlab/hermitian.hpp>

#include <cmath>
#include <sstream>

namespace adlab {

namespace {

struct KindSpec {
    std::string name;
    std::map<std::string, double> defaults;
};

const std::vector<KindSpec>& kind_specs() {
    static const std::vector<KindSpec> specs = {
        {"berry-full", {{"radius", 1.0}, {"theta", kPi / 2.0}, {"period", 1.0}}},
        {"berry-xz",
         {{"radius", 1.0}, {"period", 1.0}, {"center_x", 0.0}, {"center_z", 0.0}}},
        {"gapped-lz", {{"v", 1.0}, {"delta", 0.25}}},
        {"rotating-xy", {{"omega", 1.0}}},
    };
    return specs;
}

const KindSpec& find_kind(const std::string& kind) {
    for (const auto& s : kind_specs())
        if (s.name == kind) return s;
    std::ostringstream msg;
    msg << "unknown model kind '" << kind << "'; valid kinds:";
    for (const auto& s : kind_specs()) msg << " " << s.name;
    throw ValidationError(msg.str());
}

std::map<std::string, double> resolve_params(const KindSpec& spec,
                                             const std::map<std::string, double>& user) {
    std::map<std::string, double> out = spec.defaults;
    for (const auto& [key, value] : user) {
        auto it = out.find(key);
        if (it == out.end()) {
            std::ostringstream msg;
            msg << "model '" << spec.name << "': unknown parameter '" << key
                << "'; accepted:";
            for (const auto& [k, v] : spec.defaults) msg << " " << k;
            throw ValidationError(msg.str());
        }
        it->second = value;
    }
    return out;
}

void spin_half(Matrix& h, double x, double y, double z) {
    h.resize(2, 2);
    h(0, 0) = Complex(0.5 * z, 0.0);
    h(0, 1) = Complex(0.5 * x, -0.5 * y);
    h(1, 0) = Complex(0.5 * x, 0.5 * y);
    h(1, 1) = Complex(-0.5 * z, 0.0);
}

} // namespace

const std::vector<std::string>& schedule_kinds() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& s : kind_specs()) v.push_back(s.name);
        return v;
    }();
    return names;
}

HamiltonianSchedule make_schedule(const std::string& kind,
                                  const std::map<std::string, double>& params) {
    const KindSpec& spec = find_kind(kind);
    auto p = resolve_params(spec, params);

    HamiltonianSchedule s;
    s.dim = 2;
    s.kind = kind;
    s.params = p;

    if (kind == "berry-full") {
        const double r = p.at("radius");
        const double theta = p.at("theta");
        const double period = p.at("period");
        if (!(r > 0.0)) throw ValidationError("berry-full: radius must be positive");
        if (!(period > 0.0)) throw ValidationError("berry-full: period must be positive");
        s.period = period;
        s.evaluate_into = [r, theta, period](double t, Matrix& h) {
            const double phi = 2.0 * kPi * t / period;
            spin_half(h, r * std::sin(theta) * std::cos(phi),
                      r * std::sin(theta) * std::sin(phi), r * std::cos(theta));
        };
    } else if (kind == "berry-xz") {
        const double r = p.at("radius");
        const double period = p.at("period");
        const double cx = p.at("center_x");
        const double cz = p.at("center_z");
        if (!(r > 0.0)) throw ValidationError("berry-xz: radius must be positive");
        if (!(period > 0.0)) throw ValidationError("berry-xz: period must be positive");
        s.period = period;
        s.evaluate_into = [r, period, cx, cz](double t, Matrix& h) {
            const double phi = 2.0 * kPi * t / period;
            spin_half(h, cx + r * std::cos(phi), 0.0, cz + r * std::sin(phi));
        };
    } else if (kind == "gapped-lz") {
        const double v = p.at("v");
        const double delta = p.at("delta");
        s.evaluate_into = [v, delta](double t, Matrix& h) {
            spin_half(h, delta, 0.0, v * t);
        };
    } else { // rotating-xy
        const double omega = p.at("omega");
        if (omega == 0.0) throw ValidationError("rotating-xy: omega must be nonzero");
        s.period = 2.0 * kPi / std::abs(omega);
        s.evaluate_into = [omega](double t, Matrix& h) {
            spin_half(h, std::cos(omega * t), std::sin(omega * t), 0.0);
        };
    }
    return s;
}

Matrix model_hamiltonian(const std::string& kind,
                         const std::map<std::string, double>& params, double t) {
    return make_schedule(kind, params).evaluate(t);
}

HamiltonianSchedule time_compressed(const HamiltonianSchedule& s, double scale) {
    if (!(scale > 0.0))
        throw ValidationError("time_compressed: scale must be positive");
    HamiltonianSchedule out = s;
    auto inner = s.evaluate_into;
    out.evaluate_into = [inner, scale](double t, Matrix& h) { inner(scale * t, h); };
    if (s.period) out.period = *s.period / scale;
    return out;
}

GridModel grid_model(double length, double mass,
                     const std::function<double(double)>& potential, int nx) {
    if (!(length > 0.0)) throw ValidationError("grid_model: length must be positive");
    if (!(mass > 0.0)) throw ValidationError("grid_model: mass must be positive");
    if (nx < 16 || (nx & (nx - 1)) != 0)
        throw ValidationError("grid_model: nx must be a power of two >= 16");

    GridModel g;
    g.length = length;
    g.mass = mass;
    g.nx = nx;
    g.x.resize(nx);
    g.v_samples.resize(nx);
    for (int k = 0; k < nx; ++k) {
        g.x(k) = static_cast<double>(k) * length / static_cast<double>(nx);
        const double v = potential(g.x(k));
        if (!std::isfinite(v)) {
            std::ostringstream msg;
            msg << "grid_model: potential not finite at x = " << g.x(k);
            throw ValidationError(msg.str());
        }
        g.v_samples(k) = v;
    }
    g.kinetic_modes.resize(nx);
    for (int j = 0; j < nx; ++j) {
        const int mode = (j <= nx / 2) ? j : j - nx;
        const double kj = 2.0 * kPi * static_cast<double>(mode) / length;
        g.kinetic_modes(j) = kj * kj / (2.0 * mass);
    }
    return g;
}

} // namespace adlab

#include "sselab/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace sselab {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& v, int line) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw ConfigError(line, "line " + std::to_string(line) + ": bad number '" + v + "'");
    }
}

long parse_long(const std::string& v, int line) {
    try {
        std::size_t pos = 0;
        const long x = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw ConfigError(line, "line " + std::to_string(line) + ": bad integer '" + v + "'");
    }
}

bool parse_bool(const std::string& v, int line) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError(line, "line " + std::to_string(line) + ": bad boolean '" + v + "'");
}

// "re" or "re+imi" / "re-imi", e.g. 0.5, 1.2+0.3i, -1e-2-4i
Complex parse_complex(const std::string& v, int line) {
    if (!v.empty() && v.back() == 'i') {
        const std::string body = v.substr(0, v.size() - 1);
        // split at the sign separating the real and imaginary parts
        for (std::size_t k = body.size(); k-- > 1;) {
            if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' &&
                body[k - 1] != 'E') {
                const double re = parse_double(body.substr(0, k), line);
                const std::string ims = body.substr(k);
                const double im = (ims == "+" || ims == "-")
                                      ? (ims == "+" ? 1.0 : -1.0)
                                      : parse_double(ims, line);
                return Complex(re, im);
            }
        }
        const double im = body.empty() ? 1.0 : parse_double(body, line);
        return Complex(0.0, im);
    }
    return Complex(parse_double(v, line), 0.0);
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

} // namespace

Config parse_config_text(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line = 0;
    bool saw_alpha45 = false;

    while (std::getline(in, raw)) {
        ++line;
        std::string s = raw;
        const auto hash = s.find('#');
        if (hash != std::string::npos) s = s.substr(0, hash);
        s = trim(s);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']')
                throw ConfigError(line, "line " + std::to_string(line) + ": unterminated section");
            section = trim(s.substr(1, s.size() - 2));
            if (section != "model" && section != "solver" && section != "ensemble" &&
                section != "checks")
                throw ConfigError(line,
                                  "line " + std::to_string(line) + ": unknown section [" +
                                      section + "]");
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError(line, "line " + std::to_string(line) + ": expected key = value");
        const std::string key = trim(s.substr(0, eq));
        const std::string val = trim(s.substr(eq + 1));
        if (key.empty() || val.empty())
            throw ConfigError(line, "line " + std::to_string(line) + ": empty key or value");

        auto unknown = [&]() -> ConfigError {
            return ConfigError(line, "line " + std::to_string(line) + ": unknown key '" + key +
                                         "' in section [" + section + "]");
        };

        if (section == "model") {
            if (key == "name") cfg.model_name = val;
            else if (key == "dim") cfg.dim = static_cast<int>(parse_long(val, line));
            else if (key == "omega") cfg.omega = parse_double(val, line);
            else if (key == "A") cfg.A = parse_double(val, line);
            else if (key == "nu") cfg.nu = parse_double(val, line);
            else if (key == "beta1") cfg.osc.beta1 = parse_double(val, line);
            else if (key == "beta2") cfg.osc.beta2 = parse_double(val, line);
            else if (key == "beta3") { cfg.osc.beta3 = parse_double(val, line); cfg.beta3 = cfg.osc.beta3; }
            else if (key == "alpha1") cfg.osc.alpha[0] = parse_complex(val, line);
            else if (key == "alpha2") cfg.osc.alpha[1] = parse_complex(val, line);
            else if (key == "alpha3") cfg.osc.alpha[2] = parse_complex(val, line);
            else if (key == "alpha4") { cfg.osc.alpha[3] = parse_complex(val, line); cfg.alpha4 = std::abs(cfg.osc.alpha[3]); saw_alpha45 = true; }
            else if (key == "alpha5") { cfg.osc.alpha[4] = parse_complex(val, line); cfg.alpha5 = std::abs(cfg.osc.alpha[4]); saw_alpha45 = true; }
            else if (key == "alpha6") cfg.osc.alpha[5] = parse_complex(val, line);
            else if (key == "kappa") cfg.meas.kappa = parse_double(val, line);
            else if (key == "sigma") cfg.meas.sigma = parse_double(val, line);
            else if (key == "h_alpha") cfg.meas.h_alpha = parse_double(val, line);
            else if (key == "h_beta") cfg.meas.h_beta = parse_double(val, line);
            else throw unknown();
        } else if (section == "solver") {
            if (key == "dt") cfg.solver.dt = parse_double(val, line);
            else if (key == "t_final") cfg.solver.t_final = parse_double(val, line);
            else if (key == "scheme") {
                if (val == "euler_maruyama") cfg.solver.scheme = Scheme::EulerMaruyama;
                else if (val == "semi_implicit") cfg.solver.scheme = Scheme::SemiImplicit;
                else throw ConfigError(line, "line " + std::to_string(line) +
                                                 ": unknown scheme '" + val + "'");
            }
            else if (key == "renormalize") cfg.solver.renormalize = parse_bool(val, line);
            else throw unknown();
        } else if (section == "ensemble") {
            if (key == "seed") cfg.solver.seed = static_cast<std::uint64_t>(parse_long(val, line));
            else if (key == "n_traj") cfg.solver.n_traj = static_cast<int>(parse_long(val, line));
            else if (key == "record_stride") cfg.solver.record_stride = static_cast<int>(parse_long(val, line));
            else if (key == "record_noise") cfg.solver.record_noise = parse_bool(val, line);
            else if (key == "threads") cfg.solver.threads = static_cast<int>(parse_long(val, line));
            else throw unknown();
        } else if (section == "checks") {
            if (key == "kind") {
                if (val != "nsse" && val != "linear" && val != "weighted")
                    throw ConfigError(line, "line " + std::to_string(line) +
                                                ": unknown kind '" + val + "'");
                cfg.kind = val;
            }
            else if (key == "init") cfg.init = val;
            else if (key == "observables") cfg.observables = split_list(val);
            else if (key == "times") {
                cfg.times.clear();
                for (const auto& t : split_list(val)) cfg.times.push_back(parse_double(t, line));
            }
            else if (key == "enforce") cfg.enforce = parse_bool(val, line);
            else if (key == "p") cfg.p = static_cast<int>(parse_long(val, line));
            else if (key == "burn_in") cfg.burn_in = parse_double(val, line);
            else throw unknown();
        } else {
            throw ConfigError(line, "line " + std::to_string(line) + ": key outside any section");
        }
    }
    if (saw_alpha45 && cfg.model_name == "two_photon") {
        cfg.alpha4 = std::abs(cfg.osc.alpha[3]);
        cfg.alpha5 = std::abs(cfg.osc.alpha[4]);
    }
    return cfg;
}

Config parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

ModelSpec Config::build_model_spec() const {
    if (model_name == "damped") return preset_damped(omega, A, nu, dim);
    if (model_name == "oscillator") return preset_oscillator(osc, dim);
    if (model_name == "two_photon") return preset_two_photon(beta3, alpha4, alpha5, dim);
    if (model_name == "measurement") return preset_measurement(meas, dim);
    throw std::invalid_argument("unknown model name: " + model_name);
}

State Config::initial_state() const {
    if (init.rfind("fock:", 0) == 0) {
        const int level = static_cast<int>(std::stol(init.substr(5)));
        return basis_state(dim, level);
    }
    if (init.rfind("pair:", 0) == 0) {
        // (e_j + e_k)/sqrt(2)
        const std::string body = init.substr(5);
        const auto comma = body.find(',');
        if (comma == std::string::npos)
            throw std::invalid_argument("init pair: expected pair:j,k");
        const int j = static_cast<int>(std::stol(body.substr(0, comma)));
        const int k = static_cast<int>(std::stol(body.substr(comma + 1)));
        State x = basis_state(dim, j) + basis_state(dim, k);
        x /= x.norm();
        return x;
    }
    throw std::invalid_argument("unknown init spec: " + init);
}

StateFunctional make_observable(const std::string& name, int dim) {
    if (name == "norm") {
        return [](const State& x) { return x.norm(); };
    }
    if (name == "P0") {
        return [](const State& x) { return std::norm(x(0)); };
    }
    FockOperator op;
    if (name == "N") op = ladder_ops(dim).number;
    else if (name == "N2") op = number_power(dim, 2);
    else if (name == "Q") op = quadratures(dim).q;
    else if (name == "P") op = quadratures(dim).p;
    else throw std::invalid_argument("unknown observable: " + name);
    return [op](const State& x) { return x.dot(op.apply(x)).real(); };
}

} // namespace sselab

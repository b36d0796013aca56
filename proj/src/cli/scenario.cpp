#include "uqkd/cli/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "uqkd/errors.hpp"

namespace uqkd::cli {

namespace {

std::string join_errors(const std::vector<FieldError>& errors) {
    std::ostringstream os;
    for (std::size_t i = 0; i < errors.size(); ++i) {
        if (i) os << '\n';
        os << errors[i].field << ": " << errors[i].message;
    }
    return os.str();
}

// Walks a YAML tree, recording every problem instead of stopping at the first.
class Reader {
public:
    std::vector<FieldError> errors;

    void error(const std::string& field, const std::string& message) { errors.push_back({field, message}); }

    void reject_unknown(const YAML::Node& node, const std::string& where, const std::set<std::string>& allowed) {
        if (!node.IsMap()) {
            error(where, "expected a mapping");
            return;
        }
        for (const auto& kv : node) {
            const auto key = kv.first.as<std::string>();
            if (!allowed.count(key)) error(qualify(where, key), "unknown key");
        }
    }

    template <class T>
    bool read(const YAML::Node& parent, const std::string& where, const std::string& key, T& out) {
        const auto node = parent[key];
        if (!node) return false;
        try {
            out = node.as<T>();
            return true;
        } catch (const YAML::Exception&) {
            error(qualify(where, key), std::string("expected ") + type_name<T>());
            return false;
        }
    }

    template <class T>
    void require(const YAML::Node& parent, const std::string& where, const std::string& key, T& out) {
        if (!parent[key]) {
            error(qualify(where, key), "required");
            return;
        }
        read(parent, where, key, out);
    }

    static std::string qualify(const std::string& where, const std::string& key) {
        return where.empty() ? key : where + "." + key;
    }

private:
    template <class T>
    static const char* type_name() {
        if constexpr (std::is_same_v<T, std::string>) return "a string";
        else if constexpr (std::is_integral_v<T>) return "an integer";
        else return "a number";
    }
};

void read_scheme(Reader& r, const YAML::Node& node, Scenario& s) {
    r.reject_unknown(node, "scheme", {"t_B", "t_D", "lambda", "mu"});
    if (!node.IsMap()) return;
    r.require(node, "scheme", "t_B", s.scheme.t_B);
    r.require(node, "scheme", "t_D", s.scheme.t_D);
    r.require(node, "scheme", "mu", s.scheme.mu);
    const auto lambda = node["lambda"];
    if (!lambda) {
        // decoy modes take their attenuations from the decoy section
        s.scheme.lambda = std::numeric_limits<double>::quiet_NaN();
        return;
    }
    if (lambda.IsScalar() && lambda.Scalar() == "channel-matched") {
        s.channel_matched = true;
        return;
    }
    r.read(node, "scheme", "lambda", s.scheme.lambda);
}

void read_channel(Reader& r, const YAML::Node& node, Scenario& s) {
    r.reject_unknown(node, "channel", {"eta_B", "alpha_prime", "Y0", "e_det", "e0"});
    if (!node.IsMap()) return;
    r.read(node, "channel", "eta_B", s.channel.eta_B);
    r.read(node, "channel", "alpha_prime", s.channel.alpha_prime);
    r.read(node, "channel", "Y0", s.channel.Y0);
    r.read(node, "channel", "e_det", s.channel.e_det);
    r.read(node, "channel", "e0", s.channel.e0);
}

void read_noise(Reader& r, const YAML::Node& node, Scenario& s) {
    s.noise.clear();
    if (!node.IsSequence()) {
        r.error("noise", "expected a list");
        return;
    }
    for (std::size_t i = 0; i < node.size(); ++i) {
        const std::string where = "noise[" + std::to_string(i) + "]";
        const auto item = node[i];
        if (item.IsScalar() && item.Scalar() == "none") {
            s.noise.emplace_back(NoNoise{});
            continue;
        }
        r.reject_unknown(item, where, {"poisson", "gaussian"});
        if (!item.IsMap()) continue;
        if (item.size() != 1) {
            r.error(where, "give exactly one of poisson or gaussian");
            continue;
        }
        double v = 0.0;
        if (r.read(item, where, "poisson", v)) s.noise.emplace_back(PoissonianNoise{v});
        if (r.read(item, where, "gaussian", v)) s.noise.emplace_back(GaussianNoise{v});
    }
}

}  // namespace

const char* to_string(Mode m) {
    switch (m) {
        case Mode::ApnBb84: return "apn-bb84";
        case Mode::PnaBb84: return "pna-bb84";
        case Mode::TrustedBb84: return "trusted-bb84";
        case Mode::PnaDecoy: return "pna-decoy";
        case Mode::TrustedDecoy: return "trusted-decoy";
        case Mode::McPipeline: return "mc-pipeline";
    }
    return "?";
}

std::optional<Mode> parse_mode(const std::string& s) {
    for (Mode m : {Mode::ApnBb84, Mode::PnaBb84, Mode::TrustedBb84, Mode::PnaDecoy, Mode::TrustedDecoy,
                   Mode::McPipeline})
        if (s == to_string(m)) return m;
    return std::nullopt;
}

std::vector<double> Sweep::points() const {
    std::vector<double> out;
    if (!(L_step > 0.0) || L_end < L_start) return out;
    const auto n = static_cast<std::int64_t>(std::floor((L_end - L_start) / L_step + 1e-9));
    for (std::int64_t i = 0; i <= n; ++i) out.push_back(L_start + static_cast<double>(i) * L_step);
    return out;
}

ScenarioError::ScenarioError(std::vector<FieldError> errors)
    : std::runtime_error(join_errors(errors)), errors_(std::move(errors)) {}

Scenario parse_scenario(const std::string& text, const std::string& name) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw ScenarioError(std::vector<FieldError>{{"<document>", e.what()}});
    }
    Reader r;
    Scenario s;
    s.name = name;
    r.reject_unknown(root, "",
                     {"name", "description", "mode", "scheme", "channel", "f_ec", "sweep", "decoy", "apn", "window",
                      "noise", "untagged", "monte_carlo", "alpha", "output"});
    if (!root.IsMap()) throw ScenarioError(std::move(r.errors));

    r.read(root, "", "name", s.name);
    r.read(root, "", "description", s.description);
    std::string mode;
    r.require(root, "", "mode", mode);
    if (!mode.empty()) {
        if (auto m = parse_mode(mode))
            s.mode = *m;
        else
            r.error("mode", "unknown mode '" + mode +
                                "' (apn-bb84, pna-bb84, trusted-bb84, pna-decoy, trusted-decoy, mc-pipeline)");
    }

    const bool decoy_mode = s.mode == Mode::PnaDecoy || s.mode == Mode::TrustedDecoy;
    const bool needs_scheme = s.mode != Mode::TrustedDecoy;

    if (root["scheme"])
        read_scheme(r, root["scheme"], s);
    else if (needs_scheme)
        r.error("scheme", "required for mode " + mode);

    if (root["channel"]) read_channel(r, root["channel"], s);
    r.read(root, "", "f_ec", s.f_ec);

    if (const auto sw = root["sweep"]) {
        r.reject_unknown(sw, "sweep", {"L_start", "L_end", "L_step"});
        if (sw.IsMap()) {
            r.require(sw, "sweep", "L_start", s.sweep.L_start);
            r.require(sw, "sweep", "L_end", s.sweep.L_end);
            r.read(sw, "sweep", "L_step", s.sweep.L_step);
        }
    } else if (s.mode != Mode::McPipeline) {
        r.error("sweep", "required for mode " + mode);
    }

    if (const auto d = root["decoy"]) {
        s.has_decoy = true;
        r.reject_unknown(d, "decoy", {"nu_s", "nu_d", "lambda_s", "lambda_d"});
        if (d.IsMap()) {
            r.require(d, "decoy", "nu_s", s.decoy.nu_s);
            r.require(d, "decoy", "nu_d", s.decoy.nu_d);
            if (s.mode == Mode::PnaDecoy) {
                r.require(d, "decoy", "lambda_s", s.decoy.lambda_s);
                r.require(d, "decoy", "lambda_d", s.decoy.lambda_d);
            } else {
                r.read(d, "decoy", "lambda_s", s.decoy.lambda_s);
                r.read(d, "decoy", "lambda_d", s.decoy.lambda_d);
            }
        }
    } else if (decoy_mode) {
        r.error("decoy", "required for mode " + mode);
    }
    s.decoy.f_ec = s.f_ec;

    if (const auto a = root["apn"]) {
        r.reject_unknown(a, "apn", {"mu_upper", "monitor"});
        if (a.IsMap()) {
            double mu_upper = 0.0;
            if (r.read(a, "apn", "mu_upper", mu_upper)) s.mu_upper = mu_upper;
            if (const auto m = a["monitor"]) {
                r.reject_unknown(m, "apn.monitor", {"records", "pulses_per_record"});
                if (m.IsMap()) {
                    ApnMonitor mon;
                    r.require(m, "apn.monitor", "records", mon.records);
                    r.require(m, "apn.monitor", "pulses_per_record", mon.pulses_per_record);
                    s.monitor = mon;
                }
            }
            if (s.mu_upper && s.monitor) r.error("apn", "give either mu_upper or monitor, not both");
        }
    }

    if (const auto w = root["window"]) {
        s.has_window = true;
        if (w.IsScalar() && w.Scalar() == "auto-minmax") {
            s.window = AutoMinMax{};
        } else {
            r.reject_unknown(w, "window", {"m1", "m2"});
            ThresholdWindow tw;
            if (w.IsMap()) {
                r.require(w, "window", "m1", tw.m1);
                r.require(w, "window", "m2", tw.m2);
            }
            s.window = tw;
        }
    }

    if (const auto n = root["noise"]) read_noise(r, n, s);

    if (const auto u = root["untagged"]) {
        const std::string v = u.IsScalar() ? u.Scalar() : "";
        if (v == "exact") {
            s.untagged = UntaggedSource::Exact;
        } else if (v == "monte-carlo") {
            s.untagged = UntaggedSource::MonteCarlo;
        } else {
            s.untagged = UntaggedSource::Fixed;
            try {
                s.untagged_value = u.as<double>();
            } catch (const YAML::Exception&) {
                r.error("untagged", "expected exact, monte-carlo or a number");
            }
        }
    } else if (s.mode == Mode::McPipeline) {
        s.untagged = UntaggedSource::MonteCarlo;
    }

    if (const auto mc = root["monte_carlo"]) {
        r.reject_unknown(mc, "monte_carlo", {"M", "seed"});
        if (mc.IsMap()) {
            r.read(mc, "monte_carlo", "M", s.M);
            r.read(mc, "monte_carlo", "seed", s.seed);
        }
    }
    r.read(root, "", "alpha", s.alpha);
    std::string output;
    if (r.read(root, "", "output", output)) s.output = output;

    if (r.errors.empty()) r.errors = check_scenario(s);
    if (!r.errors.empty()) throw ScenarioError(std::move(r.errors));
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read scenario file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), path.stem().string());
}

PassiveSchemeParams scheme_at(const Scenario& s, double L) {
    PassiveSchemeParams p = s.scheme;
    if (s.channel_matched) {
        ChannelParams ch = s.channel;
        ch.L = L;
        const double eta = ch.eta_B * ch.eta_f() / s.scheme.mu;
        p.lambda = eta / (1.0 - p.t_B);
    }
    return p;
}

std::vector<FieldError> check_scenario(const Scenario& s) {
    std::vector<FieldError> errs;
    auto err = [&](std::string field, std::string msg) { errs.push_back({std::move(field), std::move(msg)}); };
    const bool decoy_mode = s.mode == Mode::PnaDecoy || s.mode == Mode::TrustedDecoy;

    if (s.mode != Mode::TrustedDecoy) {
        const auto& p = s.scheme;
        if (!(p.t_B > 0.0 && p.t_B < 1.0)) err("scheme.t_B", "must lie in (0,1)");
        if (!(p.t_D > 0.0 && p.t_D <= 1.0)) err("scheme.t_D", "must lie in (0,1]");
        if (!(p.mu > 0.0) || !std::isfinite(p.mu)) err("scheme.mu", "must be positive");
        const bool lambda_given = !std::isnan(p.lambda) || s.channel_matched;
        if (s.mode == Mode::PnaDecoy) {
            if (s.channel_matched) err("scheme.lambda", "channel-matched is not available in decoy modes");
        } else if (!lambda_given && s.mode != Mode::McPipeline) {
            err("scheme.lambda", "required for mode " + std::string(to_string(s.mode)));
        } else if (!s.channel_matched && lambda_given) {
            if (!(p.lambda > 0.0 && p.lambda <= 1.0)) err("scheme.lambda", "must lie in (0,1]");
            else if (p.t_B > 0.0 && p.t_B < 1.0 && p.t_D > 0.0 && p.lambda_a() > 1.0)
                err("scheme.lambda", "lambda^A = (1-t_B)*lambda/(t_B*t_D) exceeds 1");
        }
    }

    try {
        s.channel.validate();
    } catch (const InvalidArgument& e) {
        err("channel", e.what());
    }
    if (!(s.f_ec >= 1.0)) err("f_ec", "must be >= 1");

    if (s.mode != Mode::McPipeline) {
        if (!(s.sweep.L_start >= 0.0)) err("sweep.L_start", "must be non-negative");
        if (s.sweep.L_end < s.sweep.L_start) err("sweep.L_end", "must not be below L_start");
        if (!(s.sweep.L_step > 0.0)) err("sweep.L_step", "must be positive");
    }

    if (decoy_mode) {
        const auto& d = s.decoy;
        if (!(d.nu_s > 0.0 && d.nu_d > 0.0)) err("decoy", "nu_s and nu_d must be positive");
        if (!(d.nu_d < d.nu_s)) err("decoy.nu_d", "ordering violated: need nu_d < nu_s");
        if (s.mode == Mode::PnaDecoy) {
            if (!(d.lambda_d > 0.0)) err("decoy.lambda_d", "must be positive");
            if (!(d.lambda_d < d.lambda_s)) err("decoy.lambda_d", "ordering violated: need lambda_d < lambda_s");
            const double ceiling = s.scheme.xi() / (1.0 - s.scheme.t_B);
            if (s.scheme.t_B > 0.0 && s.scheme.t_B < 1.0 && d.lambda_s > ceiling)
                err("decoy.lambda_s", "constraint violated: lambda_s <= t_B t_D / (1 - t_B) = " +
                                          std::to_string(ceiling));
            if (d.lambda_s > 1.0) err("decoy.lambda_s", "must not exceed 1");
        }
    }

    if (s.mu_upper && !(*s.mu_upper >= 0.0)) err("apn.mu_upper", "must be non-negative");
    if (s.monitor) {
        if (s.monitor->records < 2) err("apn.monitor.records", "need at least 2 records");
        if (!(s.monitor->pulses_per_record >= 1.0)) err("apn.monitor.pulses_per_record", "must be >= 1");
    }

    const bool needs_window = s.mode == Mode::PnaBb84 || s.mode == Mode::PnaDecoy || s.mode == Mode::McPipeline;
    if (needs_window) {
        if (!s.has_window) err("window", "required for mode " + std::string(to_string(s.mode)));
        if (const auto* w = std::get_if<ThresholdWindow>(&s.window)) {
            if (w->m1 < 0) err("window.m1", "must be non-negative");
            if (w->m2 <= w->m1) err("window.m2", "must exceed m1");
        } else if (s.has_window && s.untagged == UntaggedSource::Exact) {
            err("window", "auto-minmax needs untagged: monte-carlo");
        }
    }

    if (s.noise.empty()) err("noise", "list must not be empty");
    for (std::size_t i = 0; i < s.noise.size(); ++i) {
        try {
            validate(s.noise[i]);
        } catch (const InvalidArgument& e) {
            err("noise[" + std::to_string(i) + "]", e.what());
        }
    }
    const bool noisy = std::any_of(s.noise.begin(), s.noise.end(),
                                   [](const NoiseModel& n) { return !std::holds_alternative<NoNoise>(n); });
    if (noisy && needs_window && s.untagged != UntaggedSource::MonteCarlo)
        err("noise", "detection noise only enters through untagged: monte-carlo");

    if (s.mode == Mode::McPipeline && s.untagged != UntaggedSource::MonteCarlo)
        err("untagged", "mode mc-pipeline always simulates");
    if (s.untagged == UntaggedSource::Fixed && !(s.untagged_value >= 0.0 && s.untagged_value <= 1.0))
        err("untagged", "must lie in [0,1]");
    if (s.M < 1) err("monte_carlo.M", "must be >= 1");
    if (!(s.alpha > 0.0 && s.alpha < 1.0)) err("alpha", "must lie in (0,1)");
    return errs;
}

std::string to_yaml(const Scenario& s) {
    YAML::Emitter out;
    out.SetDoublePrecision(17);
    out << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << s.name;
    out << YAML::Key << "mode" << YAML::Value << to_string(s.mode);
    if (s.mode != Mode::TrustedDecoy) {
        out << YAML::Key << "scheme" << YAML::Value << YAML::Flow << YAML::BeginMap;
        out << YAML::Key << "t_B" << YAML::Value << s.scheme.t_B;
        out << YAML::Key << "t_D" << YAML::Value << s.scheme.t_D;
        if (s.channel_matched)
            out << YAML::Key << "lambda" << YAML::Value << "channel-matched";
        else if (!std::isnan(s.scheme.lambda))
            out << YAML::Key << "lambda" << YAML::Value << s.scheme.lambda;
        out << YAML::Key << "mu" << YAML::Value << s.scheme.mu << YAML::EndMap;
    }
    out << YAML::Key << "channel" << YAML::Value << YAML::Flow << YAML::BeginMap;
    out << YAML::Key << "eta_B" << YAML::Value << s.channel.eta_B;
    out << YAML::Key << "alpha_prime" << YAML::Value << s.channel.alpha_prime;
    out << YAML::Key << "Y0" << YAML::Value << s.channel.Y0;
    out << YAML::Key << "e_det" << YAML::Value << s.channel.e_det;
    out << YAML::Key << "e0" << YAML::Value << s.channel.e0 << YAML::EndMap;
    out << YAML::Key << "f_ec" << YAML::Value << s.f_ec;
    if (s.mode != Mode::McPipeline) {
        out << YAML::Key << "sweep" << YAML::Value << YAML::Flow << YAML::BeginMap;
        out << YAML::Key << "L_start" << YAML::Value << s.sweep.L_start;
        out << YAML::Key << "L_end" << YAML::Value << s.sweep.L_end;
        out << YAML::Key << "L_step" << YAML::Value << s.sweep.L_step << YAML::EndMap;
    }
    if (s.has_decoy) {
        out << YAML::Key << "decoy" << YAML::Value << YAML::Flow << YAML::BeginMap;
        out << YAML::Key << "nu_s" << YAML::Value << s.decoy.nu_s;
        out << YAML::Key << "nu_d" << YAML::Value << s.decoy.nu_d;
        out << YAML::Key << "lambda_s" << YAML::Value << s.decoy.lambda_s;
        out << YAML::Key << "lambda_d" << YAML::Value << s.decoy.lambda_d << YAML::EndMap;
    }
    if (s.mu_upper || s.monitor) {
        out << YAML::Key << "apn" << YAML::Value << YAML::Flow << YAML::BeginMap;
        if (s.mu_upper) out << YAML::Key << "mu_upper" << YAML::Value << *s.mu_upper;
        if (s.monitor) {
            out << YAML::Key << "monitor" << YAML::Value << YAML::BeginMap;
            out << YAML::Key << "records" << YAML::Value << s.monitor->records;
            out << YAML::Key << "pulses_per_record" << YAML::Value << s.monitor->pulses_per_record << YAML::EndMap;
        }
        out << YAML::EndMap;
    }
    if (s.has_window) {
        out << YAML::Key << "window" << YAML::Value;
        if (const auto* w = std::get_if<ThresholdWindow>(&s.window))
            out << YAML::Flow << YAML::BeginMap << YAML::Key << "m1" << YAML::Value << w->m1 << YAML::Key << "m2"
                << YAML::Value << w->m2 << YAML::EndMap;
        else
            out << "auto-minmax";
    }
    out << YAML::Key << "noise" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (const auto& n : s.noise) {
        if (const auto* p = std::get_if<PoissonianNoise>(&n))
            out << YAML::BeginMap << YAML::Key << "poisson" << YAML::Value << p->gamma << YAML::EndMap;
        else if (const auto* g = std::get_if<GaussianNoise>(&n))
            out << YAML::BeginMap << YAML::Key << "gaussian" << YAML::Value << g->sigma2 << YAML::EndMap;
        else
            out << "none";
    }
    out << YAML::EndSeq;
    out << YAML::Key << "untagged" << YAML::Value;
    switch (s.untagged) {
        case UntaggedSource::Exact: out << "exact"; break;
        case UntaggedSource::MonteCarlo: out << "monte-carlo"; break;
        case UntaggedSource::Fixed: out << s.untagged_value; break;
    }
    out << YAML::Key << "monte_carlo" << YAML::Value << YAML::Flow << YAML::BeginMap;
    out << YAML::Key << "M" << YAML::Value << s.M;
    out << YAML::Key << "seed" << YAML::Value << s.seed << YAML::EndMap;
    out << YAML::Key << "alpha" << YAML::Value << s.alpha;
    out << YAML::EndMap;
    return out.c_str();
}

}  // namespace uqkd::cli

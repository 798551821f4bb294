#include <cctype>
#include <cmath>
#include <charconv>
#include <fstream>
#include <sstream>

#include "fixsynth/synth.hpp"

namespace fixsynth {

namespace {

std::string trim(std::string_view s) {
    size_t b = 0;
    size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

template <typename T>
T parse_num(const std::string& key, const std::string& v) {
    T out{};
    auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
        throw Error(ErrorCode::ConfigError, "bad value '" + v + "' for key '" + key + "'");
    }
    return out;
}

}  // namespace

void SynthConfig::validate() const {
    auto bad = [](const std::string& m) { throw Error(ErrorCode::ConfigError, m); };
    if (!(max_error >= 0) || !std::isfinite(max_error)) bad("max_error must be a finite value >= 0");
    if (wl_max < 1 || wl_max > kMaxTotalBits - 1) bad("wl_max must be in [1, 63]");
    if (initial_samples < 1) bad("initial_samples must be >= 1");
    if (max_attempts < 1) bad("max_attempts must be >= 1");
    if (max_outer_iters < 1) bad("max_outer_iters must be >= 1");
    if (!(dedup_tol >= 0)) bad("dedup_tol must be >= 0");
    if (threads < 1) bad("threads must be >= 1");
    if (cost_model != "constantinides" && cost_model != "table") bad("unknown cost model '" + cost_model + "'");
    nm.validate();
}

std::shared_ptr<const CostModel> SynthConfig::make_cost_model() const {
    if (cost_model == "table") return std::make_shared<TableCostModel>(cost_table);
    if (cost_model == "constantinides") return std::make_shared<ConstantinidesModel>();
    throw Error(ErrorCode::ConfigError, "unknown cost model '" + cost_model + "'");
}

SynthConfig parse_config(std::string_view text, SynthConfig cfg) {
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorCode::ConfigError, "line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(std::string_view(body).substr(0, eq));
        const std::string val = trim(std::string_view(body).substr(eq + 1));
        try {
            if (key == "error_fn") cfg.error_fn = ErrorFn::parse(val);
            else if (key == "max_error") cfg.max_error = parse_num<double>(key, val);
            else if (key == "wl_max") cfg.wl_max = parse_num<int>(key, val);
            else if (key == "initial_samples") cfg.initial_samples = parse_num<int>(key, val);
            else if (key == "max_attempts") cfg.max_attempts = parse_num<int>(key, val);
            else if (key == "max_outer_iters") cfg.max_outer_iters = parse_num<int>(key, val);
            else if (key == "rounding") cfg.rm = parse_rounding(val);
            else if (key == "overflow") cfg.om = parse_overflow(val);
            else if (key == "seed") {
                cfg.seed = parse_num<std::uint64_t>(key, val);
                cfg.seed_set = true;
            } else if (key == "cost_model") cfg.cost_model = val;
            else if (key.rfind("cost.", 0) == 0) {
                cfg.cost_table.set(parse_node_kind(key.substr(5)), TableCostModel::parse_coeffs(val));
            } else if (key == "iwl_rule") cfg.iwl_rule = parse_iwl_rule(val);
            else if (key == "nm.alpha") cfg.nm.alpha = parse_num<double>(key, val);
            else if (key == "nm.gamma") cfg.nm.gamma = parse_num<double>(key, val);
            else if (key == "nm.rho") cfg.nm.rho = parse_num<double>(key, val);
            else if (key == "nm.sigma") cfg.nm.sigma = parse_num<double>(key, val);
            else if (key == "nm.tol") cfg.nm.tol = parse_num<double>(key, val);
            else if (key == "nm.max_iters") cfg.nm.max_iters = parse_num<int>(key, val);
            else if (key == "dedup_tol") cfg.dedup_tol = parse_num<double>(key, val);
            else if (key == "threads") cfg.threads = parse_num<int>(key, val);
            else throw Error(ErrorCode::ConfigError, "unknown key '" + key + "'");
        } catch (const Error& e) {
            throw Error(ErrorCode::ConfigError, "line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    cfg.validate();
    return cfg;
}

SynthConfig load_config(const std::string& path, SynthConfig base) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), std::move(base));
}

std::string config_to_text(const SynthConfig& c) {
    std::ostringstream os;
    os << "error_fn = " << c.error_fn.to_string() << "\n"
       << "max_error = " << format_double(c.max_error) << "\n"
       << "wl_max = " << c.wl_max << "\n"
       << "initial_samples = " << c.initial_samples << "\n"
       << "max_attempts = " << c.max_attempts << "\n"
       << "max_outer_iters = " << c.max_outer_iters << "\n"
       << "rounding = " << to_string(c.rm) << "\n"
       << "overflow = " << to_string(c.om) << "\n"
       << "seed = " << c.seed << "\n"
       << "cost_model = " << c.cost_model << "\n";
    if (c.cost_model == "table") {
        for (NodeKind k : {NodeKind::Delay, NodeKind::Mul, NodeKind::AddSub, NodeKind::Div, NodeKind::Unary,
                           NodeKind::Neg}) {
            os << "cost." << to_string(k) << " = ";
            const auto& co = c.cost_table.get(k);
            for (size_t i = 0; i < co.size(); ++i) os << (i ? ", " : "") << format_double(co[i]);
            os << "\n";
        }
    }
    os << "iwl_rule = " << to_string(c.iwl_rule) << "\n"
       << "nm.alpha = " << format_double(c.nm.alpha) << "\n"
       << "nm.gamma = " << format_double(c.nm.gamma) << "\n"
       << "nm.rho = " << format_double(c.nm.rho) << "\n"
       << "nm.sigma = " << format_double(c.nm.sigma) << "\n"
       << "nm.tol = " << format_double(c.nm.tol) << "\n"
       << "nm.max_iters = " << c.nm.max_iters << "\n"
       << "dedup_tol = " << format_double(c.dedup_tol) << "\n"
       << "threads = " << c.threads << "\n";
    return os.str();
}

}  // namespace fixsynth

#include "elmfs/config.hpp"

#include <charconv>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>

namespace elmfs {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

template <typename T>
T parse_integer(std::string_view key, std::string_view value) {
    T out{};
    const auto v = trim(value);
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw ConfigError(std::string(key), "expected an integer, got '" + std::string(value) + "'");
    return out;
}

double parse_real(std::string_view key, std::string_view value) {
    const auto v = trim(value);
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty())
        throw ConfigError(std::string(key), "expected a number, got '" + std::string(value) + "'");
    return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
    const auto v = trim(value);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(std::string(key), "expected a boolean, got '" + std::string(value) + "'");
}

using Setter = std::function<void(SimConfig&, std::string_view, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters() {
    static const std::map<std::string, Setter, std::less<>> table = {
        {"n", [](SimConfig& c, auto k, auto v) { c.n = parse_integer<int>(k, v); }},
        {"m", [](SimConfig& c, auto k, auto v) { c.m = parse_integer<int>(k, v); }},
        {"l", [](SimConfig& c, auto k, auto v) { c.l = parse_integer<int>(k, v); }},
        {"hidden", [](SimConfig& c, auto k, auto v) { c.hidden = parse_integer<int>(k, v); }},
        {"n_train", [](SimConfig& c, auto k, auto v) { c.n_train = parse_integer<int>(k, v); }},
        {"n_s", [](SimConfig& c, auto k, auto v) { c.n_s = parse_integer<int>(k, v); }},
        {"zc_root", [](SimConfig& c, auto k, auto v) { c.zc_root = parse_integer<int>(k, v); }},
        {"rho", [](SimConfig& c, auto k, auto v) { c.rho = parse_real(k, v); }},
        {"energy", [](SimConfig& c, auto k, auto v) { c.energy = parse_real(k, v); }},
        {"eta", [](SimConfig& c, auto k, auto v) { c.eta = parse_real(k, v); }},
        {"evm_target_percent",
         [](SimConfig& c, auto k, auto v) { c.evm_target_percent = parse_real(k, v); }},
        {"ridge", [](SimConfig& c, auto k, auto v) { c.ridge = parse_real(k, v); }},
        {"snr_grid_db",
         [](SimConfig& c, auto k, auto v) {
             try {
                 c.snr_grid_db = parse_number_list(v);
             } catch (const std::invalid_argument& e) {
                 throw ConfigError(std::string(k), e.what());
             }
         }},
        {"trials_per_point",
         [](SimConfig& c, auto k, auto v) { c.trials_per_point = parse_integer<int>(k, v); }},
        {"calibration_frames",
         [](SimConfig& c, auto k, auto v) { c.calibration_frames = parse_integer<int>(k, v); }},
        {"seed", [](SimConfig& c, auto k, auto v) { c.seed = parse_integer<std::uint64_t>(k, v); }},
        {"train_snr_mode",
         [](SimConfig& c, auto k, auto v) {
             const auto t = trim(v);
             if (t == "mixed") c.train_snr_mode = TrainSnrMode::Mixed;
             else if (t == "per_point") c.train_snr_mode = TrainSnrMode::PerPoint;
             else throw ConfigError(std::string(k), "expected mixed or per_point");
         }},
        {"td_energy_rule",
         [](SimConfig& c, auto k, auto v) {
             const auto t = trim(v);
             if (t == "per_symbol") c.td_energy_rule = TdEnergyRule::PerSymbol;
             else if (t == "preamble_boost") c.td_energy_rule = TdEnergyRule::PreambleBoost;
             else throw ConfigError(std::string(k), "expected per_symbol or preamble_boost");
         }},
        {"hpa_enabled", [](SimConfig& c, auto k, auto v) { c.hpa_enabled = parse_bool(k, v); }},
        {"saleh_alpha_a", [](SimConfig& c, auto k, auto v) { c.saleh.alpha_a = parse_real(k, v); }},
        {"saleh_beta_a", [](SimConfig& c, auto k, auto v) { c.saleh.beta_a = parse_real(k, v); }},
        {"saleh_alpha_phi", [](SimConfig& c, auto k, auto v) { c.saleh.alpha_phi = parse_real(k, v); }},
        {"saleh_beta_phi", [](SimConfig& c, auto k, auto v) { c.saleh.beta_phi = parse_real(k, v); }},
    };
    return table;
}

} // namespace

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::vector<double> parse_number_list(std::string_view text) {
    const auto t = trim(text);
    if (t.empty()) throw std::invalid_argument("empty number list");
    std::vector<double> out;
    // start:step:stop range form
    if (t.find(':') != std::string_view::npos) {
        std::vector<double> parts;
        std::size_t pos = 0;
        while (pos <= t.size()) {
            const auto next = t.find(':', pos);
            parts.push_back(parse_real("range", t.substr(pos, next - pos)));
            if (next == std::string_view::npos) break;
            pos = next + 1;
        }
        if (parts.size() != 3 || !(parts[1] > 0.0))
            throw std::invalid_argument("range must be start:step:stop with positive step");
        const auto count = static_cast<long>(std::floor((parts[2] - parts[0]) / parts[1] + 1e-9)) + 1;
        for (long i = 0; i < count; ++i) out.push_back(parts[0] + static_cast<double>(i) * parts[1]);
        if (out.empty()) throw std::invalid_argument("empty range");
        return out;
    }
    std::size_t pos = 0;
    while (pos <= t.size()) {
        const auto next = t.find(',', pos);
        out.push_back(parse_real("list", t.substr(pos, next - pos)));
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    return out;
}

SimConfig desk_profile() { return SimConfig{}; }

SimConfig paper_profile() {
    SimConfig c;
    c.n = 512;
    c.m = 1024;
    c.hidden = 5120;
    c.n_train = 100000;
    c.trials_per_point = 100000;
    return c;
}

SimConfig profile_by_name(std::string_view name) {
    if (name == "desk") return desk_profile();
    if (name == "paper") return paper_profile();
    throw ConfigError("profile", "expected desk or paper, got '" + std::string(name) + "'");
}

void validate(const SimConfig& c) {
    if (c.n < 2) throw ConfigError("n", "must be >= 2");
    if (c.m != 2 * c.n) throw ConfigError("m", "must equal 2N");
    if (c.l < 1 || c.l >= c.n) throw ConfigError("l", "must satisfy 1 <= L < N");
    if (c.hidden < 1) throw ConfigError("hidden", "must be >= 1");
    if (c.n_train < 1) throw ConfigError("n_train", "must be >= 1");
    if (c.n_s < 1 || c.n_s >= c.n) throw ConfigError("n_s", "must satisfy 1 <= N_s < N");
    if (c.zc_root < 1 || std::gcd(c.zc_root, c.n) != 1 || std::gcd(c.zc_root, c.n_s) != 1)
        throw ConfigError("zc_root", "must be coprime with N and N_s");
    if (!(c.rho >= 0.0 && c.rho <= 1.0)) throw ConfigError("rho", "must lie in [0, 1]");
    if (!(c.energy > 0.0) || !std::isfinite(c.energy)) throw ConfigError("energy", "must be positive");
    if (!(c.eta >= 0.0) || !std::isfinite(c.eta)) throw ConfigError("eta", "must be >= 0");
    if (!(c.evm_target_percent > 0.0 && c.evm_target_percent < 100.0))
        throw ConfigError("evm_target_percent", "must lie in (0, 100)");
    if (!(c.ridge >= 0.0) || !std::isfinite(c.ridge)) throw ConfigError("ridge", "must be >= 0");
    if (c.snr_grid_db.empty()) throw ConfigError("snr_grid_db", "must not be empty");
    for (double s : c.snr_grid_db)
        if (std::isnan(s)) throw ConfigError("snr_grid_db", "contains NaN");
    if (c.trials_per_point < 0) throw ConfigError("trials_per_point", "must be >= 0");
    if (c.calibration_frames < 1) throw ConfigError("calibration_frames", "must be >= 1");
    const auto& p = c.saleh;
    if (!(p.alpha_a > 0 && p.beta_a > 0 && p.alpha_phi > 0 && p.beta_phi > 0))
        throw ConfigError("saleh", "all Saleh parameters must be positive");
}

void apply_setting(SimConfig& cfg, std::string_view key, std::string_view value) {
    const auto& table = setters();
    const auto it = table.find(trim(key));
    if (it == table.end()) throw ConfigError(std::string(trim(key)), "unknown configuration key");
    it->second(cfg, trim(key), value);
}

SimConfig parse_config(std::string_view text, SimConfig base) {
    std::size_t pos = 0;
    int line_no = 0;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("line " + std::to_string(line_no), "expected key=value");
        apply_setting(base, line.substr(0, eq), line.substr(eq + 1));
    }
    return base;
}

SimConfig load_config(const std::filesystem::path& path, SimConfig base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), std::move(base));
}

std::string to_config_text(const SimConfig& c) {
    std::ostringstream os;
    std::string grid;
    for (std::size_t i = 0; i < c.snr_grid_db.size(); ++i)
        grid += (i ? "," : "") + format_double(c.snr_grid_db[i]);
    os << "n=" << c.n << '\n'
       << "m=" << c.m << '\n'
       << "l=" << c.l << '\n'
       << "hidden=" << c.hidden << '\n'
       << "n_train=" << c.n_train << '\n'
       << "n_s=" << c.n_s << '\n'
       << "zc_root=" << c.zc_root << '\n'
       << "rho=" << format_double(c.rho) << '\n'
       << "energy=" << format_double(c.energy) << '\n'
       << "eta=" << format_double(c.eta) << '\n'
       << "evm_target_percent=" << format_double(c.evm_target_percent) << '\n'
       << "ridge=" << format_double(c.ridge) << '\n'
       << "snr_grid_db=" << grid << '\n'
       << "trials_per_point=" << c.trials_per_point << '\n'
       << "calibration_frames=" << c.calibration_frames << '\n'
       << "seed=" << c.seed << '\n'
       << "train_snr_mode=" << (c.train_snr_mode == TrainSnrMode::Mixed ? "mixed" : "per_point") << '\n'
       << "td_energy_rule="
       << (c.td_energy_rule == TdEnergyRule::PerSymbol ? "per_symbol" : "preamble_boost") << '\n'
       << "hpa_enabled=" << (c.hpa_enabled ? "true" : "false") << '\n'
       << "saleh_alpha_a=" << format_double(c.saleh.alpha_a) << '\n'
       << "saleh_beta_a=" << format_double(c.saleh.beta_a) << '\n'
       << "saleh_alpha_phi=" << format_double(c.saleh.alpha_phi) << '\n'
       << "saleh_beta_phi=" << format_double(c.saleh.beta_phi) << '\n';
    return os.str();
}

std::string config_digest(const SimConfig& cfg) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : to_config_text(cfg)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace elmfs

#include "kdvnudge/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

#include "kdvnudge/csvio.hpp"

namespace kdv {

namespace {

struct KeyDef {
    const char* key;
    const char* def;
};

struct SectionDef {
    const char* name;
    std::vector<KeyDef> keys;
};

const std::vector<SectionDef>& schema() {
    static const std::vector<SectionDef> s = {
        {"grid",
         {{"L", "6.2831853071795862"}, {"N", "128"}, {"dealias_cutoff", "-1"}}},
        {"model",
         {{"gamma", "0.5"},
          {"mu", "0"},
          {"m", "8"},
          {"epsilon", "0"},
          {"dt", "0.001"},
          {"mean", "zero"},
          {"blowup_guard", "1000000"}}},
        {"forcing", {{"modes", "1:1:0"}}},
        {"init", {{"seed", "1"}, {"modes", "10"}, {"h2", "1"}}},
        {"simulate", {{"t_end", "10"}, {"sample_stride", "10"}, {"snapshot_stride", "0"}}},
        {"assimilate",
         {{"ref_seed", "1"},
          {"nudged_seed", "2"},
          {"spinup", "50"},
          {"horizon", "100"},
          {"obs_stride", "1"},
          {"sample_stride", "100"},
          {"floor_guard", "1e-11"},
          {"coupled", "false"},
          {"control_run", "true"}}},
        {"steady",
         {{"tol", "1e-12"}, {"max_iter", "50"}, {"flow_check_T", "10"}, {"verify_flow", "true"}}},
        {"bounds",
         {{"rho", "4"},
          {"alpha", "1"},
          {"beta", "1.3333333333333333"},
          {"c", "1"},
          {"f_l2", "-1"},
          {"f_linf", "-1"},
          {"f_h2", "-1"},
          {"rho_fixed_point", "false"},
          {"minimal_m_conditions", "none"}}},
        {"dform",
         {{"d_tau", "0.1"},
          {"tau_end", "2"},
          {"theta_stop", "1e-06"},
          {"rho_stop", "1e-10"},
          {"spinup", "60"},
          {"w_tol", "1e-08"},
          {"seed1", "101"},
          {"seed2", "202"},
          {"init_modes", "8"},
          {"init_h2", "0.5"},
          {"sample_stride", "20"},
          {"window", "10"},
          {"perturb_amp", "0.5"},
          {"perturb_seed", "7"},
          {"steady_tol", "1e-12"}}},
        {"probe",
         {{"seed_a", "1"},
          {"seed_b", "2"},
          {"spinup", "50"},
          {"horizon", "50"},
          {"sample_stride", "100"},
          {"rho_proxy", "4"}}},
        {"sweep",
         {{"target", "bounds"},
          {"param", "model.mu"},
          {"grid", "log:1:100:5"},
          {"conditions", "1,2,3,4"}}},
    };
    return s;
}

bool known_key(const std::string& section, const std::string& key) {
    for (const auto& s : schema())
        if (section == s.name)
            for (const auto& k : s.keys)
                if (key == k.key) return true;
    return false;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return d;
    } catch (...) {
        throw ConfigError("config: key '" + key + "' expects a number, got '" + v + "'");
    }
}

}  // namespace

RunConfig RunConfig::defaults() {
    RunConfig c;
    for (const auto& s : schema())
        for (const auto& k : s.keys) c.values_[std::string(s.name) + "." + k.key] = k.def;
    return c;
}

RunConfig RunConfig::parse(const std::string& text) {
    RunConfig c = defaults();
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config: malformed section header at line " +
                                  std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            bool ok = false;
            for (const auto& s : schema()) ok = ok || section == s.name;
            if (!ok) throw ConfigError("config: unknown section '" + section + "'");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: expected 'key = value' at line " + std::to_string(lineno));
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty()) throw ConfigError("config: key '" + key + "' outside any section");
        if (!known_key(section, key))
            throw ConfigError("config: unknown key '" + section + "." + key + "'");
        c.values_[section + "." + key] = value;
    }
    c.validate();
    return c;
}

RunConfig RunConfig::parse_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("config: cannot open " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return parse(ss.str());
}

void RunConfig::set(const std::string& dotted, const std::string& value) {
    const auto dot = dotted.find('.');
    if (dot == std::string::npos)
        throw ConfigError("config: --set expects section.key=value, got '" + dotted + "'");
    const std::string section = dotted.substr(0, dot), key = dotted.substr(dot + 1);
    if (!known_key(section, key))
        throw ConfigError("config: unknown key '" + dotted + "'");
    values_[dotted] = value;
    validate();
}

std::string RunConfig::serialize() const {
    std::ostringstream os;
    for (const auto& s : schema()) {
        os << '[' << s.name << "]\n";
        for (const auto& k : s.keys)
            os << k.key << " = " << values_.at(std::string(s.name) + "." + k.key) << '\n';
        os << '\n';
    }
    return os.str();
}

const std::string& RunConfig::raw(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("config: unknown key '" + key + "'");
    return it->second;
}

double RunConfig::get_double(const std::string& key) const { return to_double(key, raw(key)); }

int RunConfig::get_int(const std::string& key) const {
    const double d = get_double(key);
    const int i = static_cast<int>(std::llround(d));
    if (std::abs(d - i) > 1e-9)
        throw ConfigError("config: key '" + key + "' expects an integer");
    return i;
}

std::uint64_t RunConfig::get_u64(const std::string& key) const {
    const std::string& v = raw(key);
    std::uint64_t out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
        throw ConfigError("config: key '" + key + "' expects an unsigned integer");
    return out;
}

bool RunConfig::get_bool(const std::string& key) const {
    const std::string& v = raw(key);
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("config: key '" + key + "' expects true/false");
}

std::vector<ForcingMode> RunConfig::forcing_modes() const {
    const std::string& v = raw("forcing.modes");
    std::vector<ForcingMode> out;
    if (v == "none" || v.empty()) return out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        std::replace(item.begin(), item.end(), ':', ' ');
        std::stringstream ms(item);
        ForcingMode fm;
        if (!(ms >> fm.k >> fm.amplitude))
            throw ConfigError("config: forcing.modes expects k:amplitude[:phase] triples");
        ms >> fm.phase;
        out.push_back(fm);
    }
    return out;
}

GridSpec RunConfig::grid() const {
    try {
        return GridSpec::make(get_double("grid.L"), get_int("grid.N"),
                              get_int("grid.dealias_cutoff"));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

SpectralField RunConfig::forcing(const GridSpec& g) const {
    const auto modes = forcing_modes();
    return SpectralField::from_modes(g, modes);
}

ModelParams RunConfig::model() const {
    ModelParams p;
    p.grid = grid();
    p.gamma = get_double("model.gamma");
    p.mu = get_double("model.mu");
    p.m = get_int("model.m");
    p.epsilon = get_double("model.epsilon");
    p.dt = get_double("model.dt");
    p.blowup_guard = get_double("model.blowup_guard");
    const std::string& mean = raw("model.mean");
    if (mean == "zero")
        p.mean = MeanMode::EnforcedZero;
    else if (mean == "free")
        p.mean = MeanMode::Free;
    else
        throw ConfigError("config: model.mean must be 'zero' or 'free'");
    p.forcing = forcing(p.grid);
    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return p;
}

AssimilationConfig RunConfig::assimilation() const {
    AssimilationConfig a;
    a.params = model();
    a.ref_seed = get_u64("assimilate.ref_seed");
    a.nudged_seed = get_u64("assimilate.nudged_seed");
    a.init_modes = get_int("init.modes");
    a.init_h2 = get_double("init.h2");
    a.spinup = get_double("assimilate.spinup");
    a.horizon = get_double("assimilate.horizon");
    a.obs_stride = get_int("assimilate.obs_stride");
    a.sample_stride = get_int("assimilate.sample_stride");
    a.floor_guard = get_double("assimilate.floor_guard");
    a.coupled = get_bool("assimilate.coupled");
    return a;
}

ProbeConfig RunConfig::probe() const {
    ProbeConfig c;
    c.params = model();
    c.seed_a = get_u64("probe.seed_a");
    c.seed_b = get_u64("probe.seed_b");
    c.init_modes = get_int("init.modes");
    c.init_h2 = get_double("init.h2");
    c.spinup = get_double("probe.spinup");
    c.horizon = get_double("probe.horizon");
    c.sample_stride = get_int("probe.sample_stride");
    c.rho_proxy = get_double("probe.rho_proxy");
    return c;
}

bounds::BoundInputs RunConfig::bound_inputs() const {
    bounds::BoundInputs b;
    b.gamma = get_double("model.gamma");
    b.L = get_double("grid.L");
    b.mu = get_double("model.mu");
    b.rho = get_double("bounds.rho");
    b.alpha = get_double("bounds.alpha");
    b.beta = get_double("bounds.beta");
    b.epsilon = get_double("model.epsilon");
    b.c_universal = get_double("bounds.c");
    b.f_l2 = get_double("bounds.f_l2");
    b.f_linf = get_double("bounds.f_linf");
    b.f_h2 = get_double("bounds.f_h2");
    if (b.f_l2 < 0 || b.f_linf < 0 || b.f_h2 < 0) {
        const SpectralField f = forcing(grid());
        if (b.f_l2 < 0) b.f_l2 = f.l2();
        if (b.f_linf < 0) b.f_linf = f.linf();
        if (b.f_h2 < 0) b.f_h2 = f.h2();
    }
    try {
        b.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return b;
}

DFormOptions RunConfig::dform_options() const {
    DFormOptions d;
    d.d_tau = get_double("dform.d_tau");
    d.tau_end = get_double("dform.tau_end");
    d.theta_stop = get_double("dform.theta_stop");
    d.rho_stop = get_double("dform.rho_stop");
    d.w.spinup = get_double("dform.spinup");
    d.w.tol = get_double("dform.w_tol");
    d.w.seed1 = get_u64("dform.seed1");
    d.w.seed2 = get_u64("dform.seed2");
    d.w.init_modes = get_int("dform.init_modes");
    d.w.init_h2 = get_double("dform.init_h2");
    d.w.sample_stride = get_int("dform.sample_stride");
    d.w.rho_proxy = get_double("bounds.rho");
    return d;
}

void RunConfig::validate() const {
    (void)grid();
    (void)model();
    const double alpha = get_double("bounds.alpha");
    if (!(alpha >= 1.0) || alpha >= 2.0)
        throw ConfigError("config: bounds.alpha must lie in [1, 2)");
    if (!(get_double("bounds.beta") > 0)) throw ConfigError("config: bounds.beta must be positive");
    for (const char* k : {"simulate.sample_stride", "assimilate.obs_stride",
                          "assimilate.sample_stride", "probe.sample_stride",
                          "dform.sample_stride"})
        if (get_int(k) < 1) throw ConfigError(std::string("config: ") + k + " must be >= 1");
}

SweepGrid parse_sweep_grid(const std::string& spec) {
    SweepGrid g;
    if (spec.rfind("log:", 0) == 0) {
        std::string body = spec.substr(4);
        std::replace(body.begin(), body.end(), ':', ' ');
        std::stringstream ss(body);
        double lo = 0, hi = 0;
        int n = 0;
        if (!(ss >> lo >> hi >> n) || n < 2 || !(lo > 0) || !(hi > lo))
            throw ConfigError("config: sweep.grid expects log:lo:hi:n with hi > lo > 0, n >= 2");
        for (int i = 0; i < n; ++i)
            g.values.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
        return g;
    }
    if (spec.rfind("list:", 0) == 0) {
        std::stringstream ss(spec.substr(5));
        std::string item;
        while (std::getline(ss, item, ','))
            g.values.push_back(to_double("sweep.grid", trim(item)));
        if (g.values.empty()) throw ConfigError("config: sweep.grid list is empty");
        return g;
    }
    throw ConfigError("config: sweep.grid must start with log: or list:");
}

std::vector<bounds::Cond> parse_condition_list(const std::string& spec) {
    std::vector<bounds::Cond> out;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item == "1") out.push_back(bounds::Cond::c1);
        else if (item == "2") out.push_back(bounds::Cond::c2);
        else if (item == "3") out.push_back(bounds::Cond::c3);
        else if (item == "4") out.push_back(bounds::Cond::c4);
        else if (item == "3p") out.push_back(bounds::Cond::c3p);
        else if (item == "5") out.push_back(bounds::Cond::c5);
        else if (item == "6") out.push_back(bounds::Cond::c6);
        else if (item == "4p") out.push_back(bounds::Cond::c4p);
        else throw ConfigError("config: unknown condition '" + item + "'");
    }
    if (out.empty()) throw ConfigError("config: empty condition list");
    return out;
}

}  // namespace kdv

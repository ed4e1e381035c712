// Copyright 2026 The pbit-nqs developers
//
//    Licensed under the Apache License, Version 2.0 (the "License");
//    you may not use this file except in compliance with the License.
//    You may obtain a copy of the License at
//
//        http://www.apache.org/licenses/LICENSE-2.0
//
//    Unless required by applicable law or agreed to in writing, software
//    distributed under the License is distributed on an "AS IS" BASIS,
//    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//    See the License for the specific language governing permissions and
//    limitations under the License.

#include "pbitnqs/run_config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "pbitnqs/errors.hpp"

namespace pbitnqs {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
    throw ConfigError("config key '" + key + "': bad value '" + value + "'");
}

uint64_t parse_u64(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        const uint64_t x = std::stoull(value, &pos);
        if (pos != value.size()) bad_value(key, value);
        return x;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        bad_value(key, value);
    }
}

uint32_t parse_u32(const std::string& key, const std::string& value) {
    const uint64_t x = parse_u64(key, value);
    if (x > 0xFFFFFFFFULL) bad_value(key, value);
    return static_cast<uint32_t>(x);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        const double x = std::stod(value, &pos);
        if (pos != value.size()) bad_value(key, value);
        return x;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        bad_value(key, value);
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    bad_value(key, value);
}

ChimeraDims parse_chimera(const std::string& key, const std::string& value) {
    ChimeraDims dims{};
    char extra = 0;
    if (std::sscanf(value.c_str(), "%u,%u,%u%c", &dims.rows, &dims.cols, &dims.shore, &extra) != 3)
        bad_value(key, value);
    return dims;
}

std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

void RunSpec::apply(const std::string& key, const std::string& value) {
    auto& cfg = config;
    if (key == "n_spins") {
        const uint32_t n = parse_u32(key, value);
        const bool periodic = cfg.model.bonds.empty() || cfg.model.bonds.back() != 0.0;
        const double j = cfg.model.bonds.empty() ? 1.0 : cfg.model.bonds.front();
        cfg.model = TfimModel::uniform(n, j, cfg.model.gamma, periodic);
    } else if (key == "j") {
        const double j = parse_double(key, value);
        const bool periodic = cfg.model.bonds.empty() || cfg.model.bonds.back() != 0.0;
        cfg.model = TfimModel::uniform(cfg.model.n_spins, j, cfg.model.gamma, periodic);
    } else if (key == "gamma") {
        cfg.model.gamma = parse_double(key, value);
    } else if (key == "boundary") {
        if (value == "pbc")
            cfg.model = TfimModel::uniform(cfg.model.n_spins, cfg.model.bonds.front(),
                                           cfg.model.gamma, true);
        else if (value == "obc")
            cfg.model = TfimModel::uniform(cfg.model.n_spins, cfg.model.bonds.front(),
                                           cfg.model.gamma, false);
        else
            bad_value(key, value);
    } else if (key == "alpha") {
        cfg.alpha = parse_u32(key, value);
    } else if (key == "sampler") {
        cfg.sampler = sampler_kind_from_string(value);
    } else if (key == "mode") {
        cfg.mode = sampling_mode_from_string(value);
    } else if (key == "chimera") {
        if (value == "auto") {
            chimera_auto = true;
        } else {
            cfg.chimera = parse_chimera(key, value);
            chimera_auto = false;
        }
    } else if (key == "chain_strength") {
        cfg.chain_strength = parse_double(key, value);
    } else if (key == "samples_per_epoch") {
        cfg.samples_per_epoch = parse_u32(key, value);
    } else if (key == "sweeps_per_sample") {
        cfg.sweeps_per_sample = parse_u32(key, value);
    } else if (key == "burn_in") {
        cfg.burn_in = parse_u32(key, value);
    } else if (key == "learning_rate") {
        cfg.learning_rate = parse_double(key, value);
    } else if (key == "epochs") {
        cfg.epochs = parse_u32(key, value);
    } else if (key == "seed") {
        cfg.seed = parse_u64(key, value);
    } else if (key == "init_sigma") {
        cfg.init_sigma = parse_double(key, value);
    } else if (key == "convergence_window") {
        cfg.convergence_window = parse_u32(key, value);
    } else if (key == "convergence_tol") {
        cfg.convergence_tol = parse_double(key, value);
    } else if (key == "activation") {
        if (value == "tanh")
            cfg.activation = Activation::Tanh;
        else if (value == "rom")
            cfg.activation = Activation::Rom;
        else
            bad_value(key, value);
    } else if (key == "update_order") {
        if (value == "sequential")
            cfg.update_order = UpdateOrder::Sequential;
        else if (value == "colored")
            cfg.update_order = UpdateOrder::Colored;
        else
            bad_value(key, value);
    } else if (key == "parallel_sweeps") {
        cfg.parallel_sweeps = parse_bool(key, value);
    } else if (key == "readout") {
        if (value == "majority")
            cfg.readout_policy = ReadoutPolicy::MajorityVote;
        else if (value == "discard")
            cfg.readout_policy = ReadoutPolicy::DiscardBroken;
        else
            bad_value(key, value);
    } else if (key == "endpoint") {
        cfg.endpoint = value;
    } else {
        throw ConfigError("unknown config key '" + key + "'");
    }
}

TrainConfig RunSpec::resolve() const {
    TrainConfig cfg = config;
    if (chimera_auto) {
        const uint32_t shore = 4;
        const uint32_t nh_eff =
            cfg.mode == SamplingMode::Psi2Duplicate ? 2 * cfg.nh() : cfg.nh();
        cfg.chimera.shore = shore;
        cfg.chimera.cols = (cfg.nv() + shore - 1) / shore;
        cfg.chimera.rows = (nh_eff + shore - 1) / shore;
    }
    cfg.validate();
    return cfg;
}

RunSpec RunSpec::preset_tfim12() {
    RunSpec spec;
    spec.config.model = TfimModel::uniform(12, 1.0, 1.0);
    spec.config.alpha = 4;
    spec.config.chain_strength = 1.0;
    spec.chimera_auto = true;
    return spec;
}

RunSpec parse_config(std::istream& is, RunSpec base) {
    RunSpec spec = std::move(base);
    std::string line;
    size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const std::string text = trim(line);
        if (text.empty() || text[0] == '#') continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": expected 'key = value', got '" + text + "'");
        const std::string key = trim(text.substr(0, eq));
        const std::string value = trim(text.substr(eq + 1));
        spec.apply(key, value);
    }
    return spec;
}

RunSpec parse_config_file(const std::string& path, RunSpec base) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file " + path);
    return parse_config(is, std::move(base));
}

void write_config(std::ostream& os, const TrainConfig& cfg) {
    os << "n_spins = " << cfg.model.n_spins << "\n";
    os << "j = " << fmt_double(cfg.model.bonds.front()) << "\n";
    os << "gamma = " << fmt_double(cfg.model.gamma) << "\n";
    os << "boundary = " << (cfg.model.bonds.back() != 0.0 ? "pbc" : "obc") << "\n";
    os << "alpha = " << cfg.alpha << "\n";
    os << "sampler = " << to_string(cfg.sampler) << "\n";
    os << "mode = " << to_string(cfg.mode) << "\n";
    os << "chimera = " << cfg.chimera.rows << "," << cfg.chimera.cols << "," << cfg.chimera.shore
       << "\n";
    os << "chain_strength = " << fmt_double(cfg.chain_strength) << "\n";
    os << "samples_per_epoch = " << cfg.samples_per_epoch << "\n";
    os << "sweeps_per_sample = " << cfg.sweeps_per_sample << "\n";
    os << "burn_in = " << cfg.burn_in << "\n";
    os << "learning_rate = " << fmt_double(cfg.learning_rate) << "\n";
    os << "epochs = " << cfg.epochs << "\n";
    os << "seed = " << cfg.seed << "\n";
    os << "init_sigma = " << fmt_double(cfg.init_sigma) << "\n";
    os << "convergence_window = " << cfg.convergence_window << "\n";
    os << "convergence_tol = " << fmt_double(cfg.convergence_tol) << "\n";
    os << "activation = " << (cfg.activation == Activation::Rom ? "rom" : "tanh") << "\n";
    os << "update_order = "
       << (cfg.update_order == UpdateOrder::Colored ? "colored" : "sequential") << "\n";
    os << "parallel_sweeps = " << (cfg.parallel_sweeps ? "true" : "false") << "\n";
    os << "readout = "
       << (cfg.readout_policy == ReadoutPolicy::DiscardBroken ? "discard" : "majority") << "\n";
    os << "endpoint = " << cfg.endpoint << "\n";
}

void write_manifest(std::ostream& os, const TrainConfig& cfg,
                    const std::vector<std::string>& comment_lines) {
    os << "# pbit-nqs run manifest (a valid config file: rerun with --config)\n";
    for (const auto& line : comment_lines) os << "# " << line << "\n";
    write_config(os, cfg);
}

const char* const kHistoryCsvHeader =
    "epoch,energy_mean,energy_stderr,grad_norm,broken_chain_rate,ess,sample_ms,train_ms";

std::string format_epoch_csv(const EpochRecord& rec) {
    std::ostringstream out;
    out << rec.epoch << ',' << fmt_double(rec.energy_mean) << ',' << fmt_double(rec.energy_stderr)
        << ',' << fmt_double(rec.grad_norm) << ',' << fmt_double(rec.broken_chain_rate) << ','
        << fmt_double(rec.ess) << ',';
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", rec.sample_ms);
    out << buf << ',';
    std::snprintf(buf, sizeof buf, "%.3f", rec.train_ms);
    out << buf;
    return out.str();
}

}  // namespace pbitnqs

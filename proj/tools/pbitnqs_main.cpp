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

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "pbitnqs/embedding.hpp"
#include "pbitnqs/errors.hpp"
#include "pbitnqs/link.hpp"
#include "pbitnqs/network_file.hpp"
#include "pbitnqs/run_config.hpp"
#include "pbitnqs/svg_plot.hpp"
#include "pbitnqs/trainer.hpp"
#include "pbitnqs/version.hpp"
#include "pbitnqs/wire.hpp"

namespace fs = std::filesystem;
using namespace pbitnqs;

namespace {

using Clock = std::chrono::steady_clock;

LinkServer* g_server = nullptr;

void handle_stop_signal(int) {
    if (g_server) g_server->stop();
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
    std::ofstream os(path, mode);
    if (!os) throw IoError("cannot open output file " + path);
    return os;
}

// ---------------------------------------------------------------- exact ----

struct ExactArgs {
    uint32_t n = 12;
    double j = 1.0;
    double gamma = 1.0;
    bool obc = false;
    std::string out;
};

int run_exact(const ExactArgs& args) {
    const TfimModel model = TfimModel::uniform(args.n, args.j, args.gamma, !args.obc);
    const auto t0 = Clock::now();
    const SpectrumResult result = exact_ground_energy(model);
    const double wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();

    std::cout << "ground_energy = " << std::setprecision(10) << result.ground_energy << "\n";
    std::cout << "magnitude     = " << std::abs(result.ground_energy) << "\n";
    std::cout << "residual      = " << result.residual << "\n";
    std::cout << "iterations    = " << result.iterations << "\n";
    std::cout << "wall_ms       = " << wall_ms << "\n";

    if (!args.out.empty()) {
        auto os = open_out(args.out);
        os << "# pbit-nqs exact ground state report\n";
        os << "n_spins = " << args.n << "\n";
        os << "j = " << args.j << "\n";
        os << "gamma = " << args.gamma << "\n";
        os << "boundary = " << (args.obc ? "obc" : "pbc") << "\n";
        os << "method = " << result.method << "\n";
        os << std::setprecision(12);
        os << "ground_energy = " << result.ground_energy << "\n";
        os << "residual = " << result.residual << "\n";
        os << "iterations = " << result.iterations << "\n";
        os << "wall_ms = " << wall_ms << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------- embed ----

struct EmbedArgs {
    uint32_t nv = 12;
    uint32_t nh = 48;
    std::string chimera = "12,3,4";
    std::string out = "embedding.txt";
};

ChimeraDims parse_dims(const std::string& text) {
    ChimeraDims dims{};
    char extra = 0;
    if (std::sscanf(text.c_str(), "%u,%u,%u%c", &dims.rows, &dims.cols, &dims.shore, &extra) != 3)
        throw ConfigError("--chimera expects M,N,L, got '" + text + "'");
    return dims;
}

int run_embed(const EmbedArgs& args) {
    const ChimeraTopology topo(parse_dims(args.chimera));
    const Embedding emb = embed_bipartite(args.nv, args.nh, topo);
    validate_embedding(emb);
    emb.save_file(args.out);

    const auto& d = topo.dims();
    std::cout << "chimera " << ChimeraTopology::to_string(d) << ": " << topo.node_count()
              << " p-bits, " << topo.coupler_count() << " couplers\n";
    std::cout << "embedded K(" << args.nv << "," << args.nh << "): " << emb.physical_count()
              << " p-bits used, chains " << args.nv << " x len" << d.rows << " + " << args.nh
              << " x len" << d.cols << "\n";
    std::cout << "intra-cell couplers used: " << args.nv * args.nh << " of "
              << topo.intra_cell_coupler_count() << "\n";
    std::cout << "embedding written to " << args.out << "\n";
    return 0;
}

// ---------------------------------------------------------------- train ----

struct TrainArgs {
    std::string config_path;
    std::string preset;
    std::string out_dir = "run";
    bool no_plot = false;
    std::vector<std::pair<std::string, std::string>> overrides;  // config key, value
};

int run_train(const TrainArgs& args) {
    RunSpec spec;
    if (!args.preset.empty()) {
        if (args.preset != "tfim12")
            throw ConfigError("unknown preset '" + args.preset + "' (available: tfim12)");
        spec = RunSpec::preset_tfim12();
    }
    if (!args.config_path.empty()) spec = parse_config_file(args.config_path, std::move(spec));
    for (const auto& [key, value] : args.overrides) spec.apply(key, value);
    const TrainConfig cfg = spec.resolve();

    fs::create_directories(args.out_dir);
    const std::string manifest_path = args.out_dir + "/manifest.txt";
    const std::string csv_path = args.out_dir + "/history.csv";
    const std::string ckpt_path = args.out_dir + "/model.ckpt";
    const std::string plot_path = args.out_dir + "/convergence.svg";

    {
        auto os = open_out(manifest_path);
        write_manifest(os, cfg,
                       {std::string("pbit-nqs ") + kVersion,
                        "outputs: history.csv, model.ckpt" +
                            std::string(args.no_plot ? "" : ", convergence.svg")});
    }
    std::cout << "manifest written to " << manifest_path << "\n";

    std::optional<double> exact;
    if (cfg.model.n_spins <= kMaxExactSpins)
        exact = exact_ground_energy(cfg.model).ground_energy;

    if (cfg.sampler != SamplerKind::ExactEnumeration) {
        // Surface what s{6}{3} quantization does to the starting parameters.
        const RbmParams initial = RbmParams::random(cfg.nv(), cfg.nh(), cfg.seed, cfg.init_sigma);
        const EffectiveParams eff = effective_sampler_params(initial, cfg.mode);
        const Embedding emb =
            embed_bipartite(cfg.nv(), eff.nh, ChimeraTopology(cfg.chimera));
        MapWeightsReport report;
        map_weights(eff, emb, cfg.chain_strength, &report);
        if (report.precision_loss())
            std::cout << "note: quantization to the 0.125 grid zeroed " << report.zeroed_biases
                      << " bias shares and " << report.zeroed_weights
                      << " couplings of the initial parameters (max errors "
                      << report.max_bias_error << " / " << report.max_weight_error << ")\n";
    }

    auto csv = open_out(csv_path);
    csv << kHistoryCsvHeader << "\n";
    const auto on_epoch = [&](const EpochRecord& rec) {
        csv << format_epoch_csv(rec) << "\n";
        csv.flush();
        if (rec.epoch % 25 == 0)
            std::cout << "epoch " << rec.epoch << ": energy " << rec.energy_mean << " +- "
                      << rec.energy_stderr << "\n";
    };

    TrainHistory history;
    RbmParams params(cfg.nv(), cfg.nh());
    bool converged = false;
    try {
        TrainResult result = train(cfg, on_epoch);
        history = std::move(result.history);
        params = std::move(result.params);
        converged = result.converged;
    } catch (const TrainAbort& abort) {
        // Leave the partial history (already streamed) and a checkpoint of the
        // last consistent parameters behind, then fail.
        abort.params.save_file(ckpt_path);
        if (!args.no_plot) {
            auto os = open_out(plot_path);
            write_convergence_svg(os, abort.history, exact);
        }
        std::cerr << "training aborted: " << abort.what() << "\n";
        std::cerr << "checkpoint of last consistent parameters: " << ckpt_path << "\n";
        if (abort.protocol_code != 0) throw ProtocolError(abort.protocol_code, abort.what());
        throw;
    }

    params.save_file(ckpt_path);
    if (!args.no_plot) {
        auto os = open_out(plot_path);
        write_convergence_svg(os, history, exact);
    }

    std::cout << "epochs run: " << history.records.size() << (converged ? " (converged)" : "")
              << "\n";
    if (!history.records.empty())
        std::cout << "final estimated energy: " << history.records.back().energy_mean << " +- "
                  << history.records.back().energy_stderr << "\n";
    if (exact && cfg.model.n_spins <= 16) {
        const double final_exact = variational_energy_exact(params, cfg.model);
        std::cout << "final variational energy (enumerated): " << std::setprecision(8)
                  << final_exact << "\n";
        std::cout << "exact ground energy: " << *exact << "\n";
        std::cout << "relative deviation: " << std::abs(final_exact - *exact) / std::abs(*exact)
                  << "\n";
    }
    std::cout << "history: " << csv_path << "\ncheckpoint: " << ckpt_path << "\n";
    if (!args.no_plot) std::cout << "plot: " << plot_path << "\n";
    return 0;
}

// --------------------------------------------------------------- sample ----

struct SampleArgs {
    std::string net_path;
    uint32_t n_samples = 1000;
    uint32_t sweeps = 1;
    uint32_t burn_in = 100;
    uint64_t seed = 1;
    std::string out = "samples.bin";
    std::string activation = "tanh";
    std::string order = "sequential";
    bool parallel = false;
};

SamplerOptions sampler_options(const std::string& activation, const std::string& order,
                               bool parallel) {
    SamplerOptions opts;
    if (activation == "tanh")
        opts.activation = Activation::Tanh;
    else if (activation == "rom")
        opts.activation = Activation::Rom;
    else
        throw ConfigError("--activation expects tanh or rom");
    if (order == "sequential")
        opts.update_order = UpdateOrder::Sequential;
    else if (order == "colored")
        opts.update_order = UpdateOrder::Colored;
    else
        throw ConfigError("--update-order expects sequential or colored");
    opts.parallel_sweeps = parallel;
    return opts;
}

int run_sample(const SampleArgs& args) {
    PbitNetwork net = load_network_text_file(args.net_path);
    const SamplerOptions opts = sampler_options(args.activation, args.order, args.parallel);
    net.set_activation(opts.activation);
    const SampleBatch batch = net.sample(args.n_samples, args.sweeps, args.burn_in, args.seed,
                                         opts.update_order, opts.parallel_sweeps);
    const std::vector<uint8_t> payload = encode_samples(batch);
    auto os = open_out(args.out, std::ios::binary);
    os.write(reinterpret_cast<const char*>(payload.data()),
             static_cast<std::streamsize>(payload.size()));
    if (!os) throw IoError("failed writing " + args.out);

    std::cout << "network: " << net.size() << " p-bits, " << net.coupler_count() << " couplers\n";
    std::cout << "sampled " << batch.n_rows << " rows x " << batch.n_bits << " bits (seed "
              << batch.seed << ", " << batch.sweeps_per_sample << " sweeps/sample, "
              << batch.burn_in_sweeps << " burn-in)\n";
    std::cout << "bit-packed payload: " << payload.size() << " bytes -> " << args.out << "\n";
    return 0;
}

// ---------------------------------------------------------------- serve ----

struct ServeArgs {
    std::string host = "127.0.0.1";
    uint16_t port = 9763;
    std::string activation = "tanh";
    std::string order = "sequential";
    bool parallel = false;
};

int run_serve(const ServeArgs& args) {
    LinkServer server(args.host, args.port,
                      sampler_options(args.activation, args.order, args.parallel));
    g_server = &server;
    std::signal(SIGINT, handle_stop_signal);
    std::signal(SIGTERM, handle_stop_signal);
    std::cout << "sampler server listening on " << args.host << ":" << server.port() << "\n"
              << std::flush;
    server.run();
    std::cout << "server stopped after " << server.sessions_served() << " session(s)\n";
    g_server = nullptr;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pbit-nqs: emulated p-bit sampler + neural-quantum-state trainer for the 1D "
                 "transverse-field Ising chain"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    ExactArgs exact_args;
    auto* exact = app.add_subcommand("exact", "Exact ground energy by sparse diagonalization");
    exact->add_option("--n", exact_args.n, "number of spins (<= 20)")->required();
    exact->add_option("--j", exact_args.j, "uniform bond coupling");
    exact->add_option("--gamma", exact_args.gamma, "transverse field strength");
    auto* pbc_flag = exact->add_flag("--pbc", "periodic boundary (default)");
    exact->add_flag("--obc", exact_args.obc, "open boundary")->excludes(pbc_flag);
    exact->add_option("--out", exact_args.out, "write a structured-text report here");

    EmbedArgs embed_args;
    auto* embed = app.add_subcommand("embed", "Minor-embed a complete bipartite RBM graph");
    embed->add_option("--nv", embed_args.nv, "visible node count")->required();
    embed->add_option("--nh", embed_args.nh, "hidden node count")->required();
    embed->add_option("--chimera", embed_args.chimera, "Chimera dims M,N,L")->required();
    embed->add_option("--out", embed_args.out, "embedding map file (default embedding.txt)");

    TrainArgs train_args;
    auto* train_cmd = app.add_subcommand("train", "Run the hybrid training loop");
    train_cmd->add_option("--config", train_args.config_path, "key = value config file");
    train_cmd->add_option("--preset", train_args.preset, "named preset (tfim12)");
    train_cmd->add_option("--out-dir", train_args.out_dir, "output directory (default ./run)");
    train_cmd->add_flag("--no-plot", train_args.no_plot, "skip the SVG convergence plot");
    // Every flag override maps onto a config key.
    static const std::vector<std::pair<std::string, std::string>> kOverrideFlags = {
        {"--n", "n_spins"},          {"--j", "j"},
        {"--gamma", "gamma"},        {"--boundary", "boundary"},
        {"--alpha", "alpha"},        {"--sampler", "sampler"},
        {"--mode", "mode"},          {"--chimera", "chimera"},
        {"--chain-strength", "chain_strength"},
        {"--samples", "samples_per_epoch"},
        {"--sweeps", "sweeps_per_sample"},
        {"--burn-in", "burn_in"},    {"--eta", "learning_rate"},
        {"--epochs", "epochs"},      {"--seed", "seed"},
        {"--init-sigma", "init_sigma"},
        {"--window", "convergence_window"},
        {"--tol", "convergence_tol"},
        {"--activation", "activation"},
        {"--update-order", "update_order"},
        {"--parallel-sweeps", "parallel_sweeps"},
        {"--readout", "readout"},    {"--endpoint", "endpoint"},
    };
    for (size_t k = 0; k < kOverrideFlags.size(); ++k) {
        const auto& [flag, key] = kOverrideFlags[k];
        train_cmd
            ->add_option_function<std::string>(
                flag,
                [&train_args, key = key](const std::string& value) {
                    train_args.overrides.emplace_back(key, value);
                },
                "override config key '" + key + "'")
            ->expected(1);
    }

    SampleArgs sample_args;
    auto* sample = app.add_subcommand("sample", "Draw a batch from a network file");
    sample->add_option("--net", sample_args.net_path, "plain-text network file")->required();
    sample->add_option("--samples", sample_args.n_samples, "rows to record");
    sample->add_option("--sweeps", sample_args.sweeps, "sweeps between records");
    sample->add_option("--burn-in", sample_args.burn_in, "burn-in sweeps");
    sample->add_option("--seed", sample_args.seed, "RNG seed");
    sample->add_option("--out", sample_args.out, "bit-packed output file");
    sample->add_option("--activation", sample_args.activation, "tanh | rom");
    sample->add_option("--update-order", sample_args.order, "sequential | colored");
    sample->add_flag("--parallel", sample_args.parallel, "parallel colored sweeps");

    ServeArgs serve_args;
    auto* serve = app.add_subcommand("serve", "Serve the sampler over the wire protocol");
    serve->add_option("--host", serve_args.host, "listen address");
    serve->add_option("--port", serve_args.port, "listen port (0 = auto)")
        ->envname("PBITNQS_PORT");
    serve->add_option("--activation", serve_args.activation, "tanh | rom");
    serve->add_option("--update-order", serve_args.order, "sequential | colored");
    serve->add_flag("--parallel", serve_args.parallel, "parallel colored sweeps");

    try {
        app.parse(argc, argv);
        if (exact->parsed()) return run_exact(exact_args);
        if (embed->parsed()) return run_embed(embed_args);
        if (train_cmd->parsed()) return run_train(train_args);
        if (sample->parsed()) return run_sample(sample_args);
        if (serve->parsed()) return run_serve(serve_args);
        return 1;
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;  // usage errors are exit code 1
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const ProtocolError& e) {
        std::cerr << "protocol error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

#pragma once

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "dim3/analysis.hpp"
#include "dim3/chain.hpp"
#include "dim3/dataset.hpp"
#include "dim3/generator.hpp"

namespace dim3 {

struct RunConfig {
    ModelKind model = ModelKind::MtvGibbs;
    std::string dataset_path;
    std::string generator;  // "case", "mtv-prior", "mti-prior", "sampson-like"
    int gen_case = 1;
    int gen_n = 20;
    int gen_t = 3;
    uint64_t gen_seed = 1;

    long long iterations = 1000;
    double burnin_frac = 0.5;
    int thin = 1;
    int chains = 1;
    uint64_t seed = 0;
    int k_fixed = 3;
    int init_communities = 3;

    double gamma0 = 1.0, alpha0 = 1.0, kappa0 = 1.0;
    double lambda1 = 1.0, lambda2 = 1.0;
    bool freeze_gamma = false, freeze_concentration = false, freeze_ratio = false;
    bool random_order = false, parallel_labels = false;

    std::string out_dir = "out";
    long long checkpoint_interval = 0;  // 0: checkpoint only at the end
    // Stop early after this many sweeps, leaving resumable checkpoints.
    // Not part of the config digest: an interrupted run and its resume
    // describe the same chain.
    long long stop_after = 0;

    void validate() const {
        if (iterations <= 0) throw ConfigError("config: iterations must be > 0");
        if (chains < 1) throw ConfigError("config: chains must be >= 1");
        if (burnin_frac < 0.0 || burnin_frac >= 1.0)
            throw ConfigError("config: burnin_frac must lie in [0,1)");
        if (thin < 1) throw ConfigError("config: thin must be >= 1");
        if (k_fixed < 1) throw ConfigError("config: k_fixed must be >= 1");
        if (init_communities < 1) throw ConfigError("config: init_communities must be >= 1");
        if (!(lambda1 > 0.0) || !(lambda2 > 0.0)) throw ConfigError("config: lambda must be > 0");
        if (!(gamma0 > 0.0) || alpha0 < 0.0 || kappa0 < 0.0)
            throw ConfigError("config: invalid hyperparameter initials");
        if (dataset_path.empty() && generator.empty())
            throw ConfigError("config: need dataset or generator");
    }

    std::string canonical() const {
        std::ostringstream ss;
        ss << "model=" << to_string(model) << ";dataset=" << dataset_path
           << ";generator=" << generator << ";case=" << gen_case << ";gn=" << gen_n
           << ";gt=" << gen_t << ";gseed=" << gen_seed << ";iters=" << iterations
           << ";burn=" << burnin_frac << ";thin=" << thin << ";chains=" << chains
           << ";seed=" << seed << ";kfixed=" << k_fixed << ";init=" << init_communities
           << ";g0=" << gamma0 << ";a0=" << alpha0 << ";k0=" << kappa0 << ";l1=" << lambda1
           << ";l2=" << lambda2 << ";fg=" << freeze_gamma << ";fc=" << freeze_concentration
           << ";fr=" << freeze_ratio << ";ro=" << random_order << ";pl=" << parallel_labels;
        return ss.str();
    }

    uint64_t digest() const {
        uint64_t h = 1469598103934665603ULL;  // FNV-1a
        for (unsigned char c : canonical()) {
            h ^= c;
            h *= 1099511628211ULL;
        }
        return h;
    }
};

inline DatasetBundle materialize_dataset(const RunConfig& cfg) {
    if (!cfg.dataset_path.empty()) return load_dataset(cfg.dataset_path);
    if (cfg.generator == "case") {
        GroundTruth truth = synthetic_truth(cfg.gen_case, cfg.gen_n);
        return generate_fixed(truth, cfg.gen_n, cfg.gen_t, cfg.gen_seed,
                              "case" + std::to_string(cfg.gen_case));
    }
    if (cfg.generator == "mtv-prior") {
        GlobalWeights w;
        w.gamma = cfg.gamma0;
        w.alpha = cfg.alpha0;
        w.kappa = cfg.kappa0;
        w.lambda1 = cfg.lambda1;
        w.lambda2 = cfg.lambda2;
        return generate_mtv(cfg.gen_n, cfg.gen_t, w, cfg.gen_seed).bundle;
    }
    if (cfg.generator == "mti-prior") {
        GlobalWeights w;
        w.gamma = cfg.gamma0;
        w.alpha = cfg.alpha0;
        w.kappa = cfg.kappa0;
        w.lambda1 = cfg.lambda1;
        w.lambda2 = cfg.lambda2;
        return generate_mti(cfg.gen_n, cfg.gen_t, w, cfg.gen_seed).bundle;
    }
    if (cfg.generator == "sampson-like") return sampson_like_fixture(cfg.gen_seed);
    throw ConfigError("config: unknown generator '" + cfg.generator + "'");
}

// --- checkpointing -------------------------------------------------------------

namespace detail {

struct ByteWriter {
    std::ofstream out;
    explicit ByteWriter(const std::string& path) : out(path, std::ios::binary) {
        if (!out) throw DataError("checkpoint: cannot open " + path);
    }
    void u32(uint32_t v) {
        unsigned char b[4];
        for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
        out.write(reinterpret_cast<char*>(b), 4);
    }
    void u64(uint64_t v) {
        unsigned char b[8];
        for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
        out.write(reinterpret_cast<char*>(b), 8);
    }
    void i32(int32_t v) { u32(static_cast<uint32_t>(v)); }
    void i64(int64_t v) { u64(static_cast<uint64_t>(v)); }
    void f64(double v) {
        uint64_t bits;
        std::memcpy(&bits, &v, 8);
        u64(bits);
    }
    void raw(const char* p, size_t n) { out.write(p, n); }
};

struct ByteReader {
    std::ifstream in;
    std::string path;
    explicit ByteReader(const std::string& p) : in(p, std::ios::binary), path(p) {
        if (!in) throw DataError("checkpoint: cannot open " + p);
    }
    uint32_t u32() {
        unsigned char b[4];
        in.read(reinterpret_cast<char*>(b), 4);
        if (!in) throw DataError("checkpoint: truncated " + path);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(b[i]) << (8 * i);
        return v;
    }
    uint64_t u64() {
        unsigned char b[8];
        in.read(reinterpret_cast<char*>(b), 8);
        if (!in) throw DataError("checkpoint: truncated " + path);
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(b[i]) << (8 * i);
        return v;
    }
    int32_t i32() { return static_cast<int32_t>(u32()); }
    int64_t i64() { return static_cast<int64_t>(u64()); }
    double f64() {
        uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }
};

}  // namespace detail

struct Checkpoint {
    uint64_t config_digest = 0;
    long long iteration = 0;
    ModelKind model = ModelKind::MtvGibbs;
    int chain_id = 0;
    LabelState labels;
    GlobalWeights weights;
    uint64_t rng_seed = 0, rng_stream = 0, rng_counter = 0;
    long long trace_rows = 0;
};

inline void save_checkpoint(const Checkpoint& ck, const std::string& path) {
    detail::ByteWriter w(path);
    w.raw("DIM3CKP1", 8);
    w.u32(0x01020304u);  // written little-endian; this tag proves it on load
    w.u32(1u);           // format version
    w.u64(ck.config_digest);
    w.i64(ck.iteration);
    w.u32(static_cast<uint32_t>(ck.model));
    w.i32(ck.chain_id);
    w.i32(ck.labels.nodes);
    w.i32(ck.labels.steps);
    w.i32(ck.labels.communities);
    for (int v : ck.labels.send) w.i32(v);
    for (int v : ck.labels.recv) w.i32(v);
    w.i32(static_cast<int32_t>(ck.weights.beta.size()));
    for (double b : ck.weights.beta) w.f64(b);
    w.f64(ck.weights.beta_rem);
    w.f64(ck.weights.gamma);
    w.f64(ck.weights.alpha);
    w.f64(ck.weights.kappa);
    w.f64(ck.weights.lambda1);
    w.f64(ck.weights.lambda2);
    w.u64(ck.rng_seed);
    w.u64(ck.rng_stream);
    w.u64(ck.rng_counter);
    w.i64(ck.trace_rows);
    if (!w.out) throw DataError("checkpoint: write failure " + path);
}

inline Checkpoint load_checkpoint(const std::string& path) {
    detail::ByteReader r(path);
    char magic[8];
    r.in.read(magic, 8);
    if (!r.in || std::memcmp(magic, "DIM3CKP1", 8) != 0)
        throw DataError("checkpoint: bad magic in " + path);
    if (r.u32() != 0x01020304u) throw DataError("checkpoint: endianness tag mismatch");
    if (r.u32() != 1u) throw DataError("checkpoint: unsupported version");
    Checkpoint ck;
    ck.config_digest = r.u64();
    ck.iteration = r.i64();
    ck.model = static_cast<ModelKind>(r.u32());
    ck.chain_id = r.i32();
    int n = r.i32(), T = r.i32(), K = r.i32();
    ck.labels = LabelState(n, T, K);
    for (auto& v : ck.labels.send) v = r.i32();
    for (auto& v : ck.labels.recv) v = r.i32();
    int bk = r.i32();
    ck.weights.beta.resize(bk);
    for (auto& b : ck.weights.beta) b = r.f64();
    ck.weights.beta_rem = r.f64();
    ck.weights.gamma = r.f64();
    ck.weights.alpha = r.f64();
    ck.weights.kappa = r.f64();
    ck.weights.lambda1 = r.f64();
    ck.weights.lambda2 = r.f64();
    ck.rng_seed = r.u64();
    ck.rng_stream = r.u64();
    ck.rng_counter = r.u64();
    ck.trace_rows = r.i64();
    return ck;
}

// --- the multi-chain driver -----------------------------------------------------

struct ChainResult {
    ChainTrace trace;
    Matrix membership;  // aligned running mean, (n*T) x K
    Matrix compat;
    std::vector<double> retained_loglik;
    double seconds_per_iteration = 0.0;
    long long gamma_grid_fallbacks = 0;
};

struct RunResult {
    std::vector<ChainResult> chains;
    DatasetBundle dataset;
    nlohmann::json summary;
};

namespace detail {

inline ChainConfig chain_config(const RunConfig& cfg) {
    ChainConfig cc;
    cc.model = cfg.model;
    cc.k_fixed = cfg.k_fixed;
    cc.init_communities = cfg.init_communities;
    cc.freeze_gamma = cfg.freeze_gamma;
    cc.freeze_concentration = cfg.freeze_concentration;
    cc.freeze_ratio = cfg.freeze_ratio;
    cc.random_order = cfg.random_order;
    cc.parallel_labels = cfg.parallel_labels;
    return cc;
}

inline GlobalWeights initial_weights(const RunConfig& cfg) {
    GlobalWeights w;
    w.gamma = cfg.gamma0;
    w.alpha = cfg.alpha0;
    w.kappa = cfg.kappa0;
    w.lambda1 = cfg.lambda1;
    w.lambda2 = cfg.lambda2;
    return w;
}

inline bool retained(const RunConfig& cfg, long long iter) {
    long long burn = static_cast<long long>(cfg.iterations * cfg.burnin_frac);
    return iter > burn && (iter - burn - 1) % cfg.thin == 0;
}

inline std::string trace_path(const RunConfig& cfg, int chain) {
    return cfg.out_dir + "/trace_chain" + std::to_string(chain) + ".csv";
}
inline std::string checkpoint_path(const RunConfig& cfg, int chain) {
    return cfg.out_dir + "/checkpoint_chain" + std::to_string(chain) + ".bin";
}

inline void write_matrix(const Matrix& m, const std::string& path, int n, int T) {
    std::ofstream out(path);
    if (!out) throw DataError("write_matrix: cannot open " + path);
    size_t k = m.empty() ? 0 : m[0].size();
    out << n << ' ' << T << ' ' << k << "\n";
    for (const auto& row : m) {
        for (size_t c = 0; c < row.size(); ++c) out << (c ? " " : "") << fmt_double(row[c]);
        out << "\n";
    }
}

inline Matrix read_matrix(const std::string& path, int& n, int& T) {
    std::ifstream in(path);
    if (!in) throw DataError("read_matrix: cannot open " + path);
    size_t k;
    in >> n >> T >> k;
    Matrix m(static_cast<size_t>(n) * std::max(T, 1), std::vector<double>(k, 0.0));
    for (auto& row : m)
        for (auto& v : row)
            if (!(in >> v)) throw DataError("read_matrix: truncated " + path);
    return m;
}

// Run one chain from a given state (fresh or resumed).
inline ChainResult run_chain(const RunConfig& cfg, const DatasetBundle& dataset, int chain_id,
                             Chain& chain, long long start_iter, ChainTrace trace) {
    ChainResult res;
    res.trace = std::move(trace);
    res.trace.chain_id = chain_id;
    AlignedMeanAccumulator memb_acc(false);
    AlignedMeanAccumulator compat_acc(true);
    long long last = cfg.iterations;
    if (cfg.stop_after > 0) last = std::min(last, cfg.stop_after);
    auto t0 = std::chrono::steady_clock::now();
    for (long long iter = start_iter + 1; iter <= last; ++iter) {
        chain.sweep();
        res.trace.push(iter, chain.k_active(), chain.density_d(), chain.loglik(),
                       chain.weights().gamma, chain.weights().alpha, chain.weights().kappa);
        if (retained(cfg, iter)) {
            memb_acc.add(chain.membership_estimate());
            auto compat = posterior_compat(chain.counts(), cfg.lambda1, cfg.lambda2);
            Matrix cm(compat.k, std::vector<double>(compat.k, 0.0));
            for (int a = 0; a < compat.k; ++a)
                for (int b = 0; b < compat.k; ++b) cm[a][b] = compat.at(a, b);
            compat_acc.add(cm);
            res.retained_loglik.push_back(res.trace.loglik.back());
        }
        bool at_checkpoint = cfg.checkpoint_interval > 0 && iter % cfg.checkpoint_interval == 0;
        if (at_checkpoint || iter == last) {
            write_trace_csv(res.trace, trace_path(cfg, chain_id));
            Checkpoint ck;
            ck.config_digest = cfg.digest();
            ck.iteration = iter;
            ck.model = cfg.model;
            ck.chain_id = chain_id;
            ck.labels = chain.labels();
            ck.weights = chain.weights();
            ck.rng_seed = chain.rng().seed();
            ck.rng_stream = chain.rng().stream();
            ck.rng_counter = chain.rng().counter();
            ck.trace_rows = static_cast<long long>(res.trace.size());
            save_checkpoint(ck, checkpoint_path(cfg, chain_id));
        }
    }
    auto t1 = std::chrono::steady_clock::now();
    long long done = last - start_iter;
    res.seconds_per_iteration =
        done > 0 ? std::chrono::duration<double>(t1 - t0).count() / done : 0.0;
    res.membership = memb_acc.mean();
    res.compat = compat_acc.mean();
    res.gamma_grid_fallbacks = chain.gamma_grid_fallbacks();
    write_matrix(res.membership, cfg.out_dir + "/membership_chain" + std::to_string(chain_id) + ".txt",
                 dataset.data.nodes(), dataset.data.steps());
    write_matrix(res.compat, cfg.out_dir + "/compat_chain" + std::to_string(chain_id) + ".txt",
                 static_cast<int>(res.compat.size()), 1);
    return res;
}

inline int worker_cap() {
    if (const char* env = std::getenv("DIM3_THREADS")) {
        int v = std::atoi(env);
        if (v >= 1) return v;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace detail

inline nlohmann::json summarize(const RunConfig& cfg, const std::vector<ChainResult>& chains) {
    nlohmann::json j;
    j["model"] = to_string(cfg.model);
    j["iterations"] = cfg.iterations;
    j["chains"] = cfg.chains;
    j["seed"] = cfg.seed;

    nlohmann::json per_chain = nlohmann::json::array();
    std::vector<std::vector<double>> k_halves, d_halves;
    std::vector<double> pooled_loglik;
    long long fallbacks = 0;
    for (const auto& cr : chains) {
        nlohmann::json c;
        c["chain"] = cr.trace.chain_id;
        c["seconds_per_iteration"] = cr.seconds_per_iteration;
        c["final_k"] = cr.trace.k.empty() ? 0 : static_cast<int>(cr.trace.k.back());
        auto kh = cr.trace.second_half(cr.trace.k);
        auto dh = cr.trace.second_half(cr.trace.d);
        if (kh.size() >= 100) {
            try {
                c["geweke_z_k"] = geweke_z(kh);
            } catch (const DataError&) {
                c["geweke_z_k"] = nullptr;  // constant series
            }
            try {
                c["geweke_z_d"] = geweke_z(dh);
            } catch (const DataError&) {
                c["geweke_z_d"] = nullptr;
            }
        } else {
            c["geweke_z_k"] = nullptr;
            c["diagnostics_skipped"] = "chain too short";
        }
        // thinned 1/20 for the autocorrelation study
        std::vector<double> k_thin;
        for (size_t idx = 0; idx < kh.size(); idx += 20) k_thin.push_back(kh[idx]);
        if (k_thin.size() >= 10) {
            try {
                c["iat_k_thinned"] = iat(k_thin);
            } catch (const DataError&) {
                c["iat_k_thinned"] = nullptr;
            }
        }
        per_chain.push_back(c);
        k_halves.push_back(kh);
        d_halves.push_back(dh);
        pooled_loglik.insert(pooled_loglik.end(), cr.retained_loglik.begin(),
                             cr.retained_loglik.end());
        fallbacks += cr.gamma_grid_fallbacks;
    }
    j["per_chain"] = per_chain;
    j["gamma_grid_fallbacks"] = fallbacks;

    if (chains.size() >= 2 && !k_halves.empty() && k_halves[0].size() >= 2) {
        size_t min_len = k_halves[0].size();
        for (const auto& h : k_halves) min_len = std::min(min_len, h.size());
        for (auto& h : k_halves) h.resize(min_len);
        for (auto& h : d_halves) h.resize(min_len);
        try {
            auto pk = psrf(k_halves);
            j["psrf_k"] = {{"estimate", pk.estimate}, {"upper", pk.upper}};
        } catch (const DataError& e) {
            j["psrf_k"] = {{"error", e.what()}};
        }
        try {
            auto pd = psrf(d_halves);
            j["psrf_d"] = {{"estimate", pd.estimate}, {"upper", pd.upper}};
        } catch (const DataError& e) {
            j["psrf_d"] = {{"error", e.what()}};
        }
    }
    if (pooled_loglik.size() >= 2) {
        auto s = loglik_summary(pooled_loglik);
        j["loglik"] = {{"mean", s.mean}, {"ci95", {s.lo, s.hi}}};
    } else {
        j["loglik"] = nullptr;
        if (pooled_loglik.size() < 2) j["loglik_skipped"] = "fewer than 2 retained samples";
    }
    return j;
}

inline RunResult run(const RunConfig& cfg) {
    cfg.validate();
    std::filesystem::create_directories(cfg.out_dir);
    RunResult result;
    result.dataset = materialize_dataset(cfg);
    result.chains.resize(cfg.chains);

    const int cap = detail::worker_cap();
    std::vector<std::thread> workers;
    std::mutex err_mutex;
    std::string first_error;
    for (int base = 0; base < cfg.chains; base += cap) {
        int batch = std::min(cap, cfg.chains - base);
        workers.clear();
        for (int b = 0; b < batch; ++b) {
            int cid = base + b;
            workers.emplace_back([&, cid]() {
                try {
                    Chain chain(result.dataset.data, detail::chain_config(cfg),
                                detail::initial_weights(cfg), Rng(cfg.seed, cid + 1));
                    chain.init_random_labels();
                    result.chains[cid] =
                        detail::run_chain(cfg, result.dataset, cid, chain, 0, ChainTrace{});
                } catch (const std::exception& e) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (first_error.empty()) first_error = e.what();
                }
            });
        }
        for (auto& t : workers) t.join();
    }
    if (!first_error.empty()) throw NumericError("chain failure: " + first_error);

    result.summary = summarize(cfg, result.chains);
    std::ofstream out(cfg.out_dir + "/summary.json");
    out << result.summary.dump(2) << "\n";
    return result;
}

// Continue an interrupted run from its per-chain checkpoints.
inline RunResult resume(const RunConfig& cfg) {
    cfg.validate();
    RunResult result;
    result.dataset = materialize_dataset(cfg);
    result.chains.resize(cfg.chains);
    for (int cid = 0; cid < cfg.chains; ++cid) {
        Checkpoint ck = load_checkpoint(detail::checkpoint_path(cfg, cid));
        if (ck.config_digest != cfg.digest())
            throw ConfigError("resume: config digest mismatch for chain " + std::to_string(cid));
        ChainTrace trace = read_trace_csv(detail::trace_path(cfg, cid));
        if (static_cast<long long>(trace.size()) < ck.trace_rows)
            throw DataError("resume: trace shorter than checkpoint");
        while (static_cast<long long>(trace.size()) > ck.trace_rows) {
            trace.iteration.pop_back();
            trace.k.pop_back();
            trace.d.pop_back();
            trace.loglik.pop_back();
            trace.gamma.pop_back();
            trace.alpha.pop_back();
            trace.kappa.pop_back();
        }
        Chain chain(result.dataset.data, detail::chain_config(cfg), ck.weights,
                    Rng::restore(ck.rng_seed, ck.rng_stream, ck.rng_counter));
        chain.set_state(ck.labels, ck.weights);
        result.chains[cid] =
            detail::run_chain(cfg, result.dataset, cid, chain, ck.iteration, std::move(trace));
    }
    result.summary = summarize(cfg, result.chains);
    std::ofstream out(cfg.out_dir + "/summary.json");
    out << result.summary.dump(2) << "\n";
    return result;
}

// Fit/recovery report over an existing run directory.
inline nlohmann::json evaluate_run(const RunConfig& cfg, const std::string& truth_path) {
    nlohmann::json report;
    std::vector<double> pooled;
    for (int cid = 0; cid < cfg.chains; ++cid) {
        ChainTrace tr = read_trace_csv(detail::trace_path(cfg, cid));
        for (size_t i = 0; i < tr.size(); ++i)
            if (detail::retained(cfg, tr.iteration[i])) pooled.push_back(tr.loglik[i]);
    }
    if (pooled.size() >= 2) {
        auto s = loglik_summary(pooled);
        report["loglik"] = {{"mean", s.mean}, {"ci95", {s.lo, s.hi}}};
    } else {
        report["loglik"] = nullptr;
    }

    if (!truth_path.empty()) {
        DatasetBundle truth_bundle = load_dataset(truth_path);
        if (!truth_bundle.truth) throw DataError("eval: dataset has no ground truth section");
        const GroundTruth& truth = *truth_bundle.truth;

        AlignedMeanAccumulator memb_acc(false), compat_acc(true);
        for (int cid = 0; cid < cfg.chains; ++cid) {
            int n, T;
            memb_acc.add(detail::read_matrix(
                cfg.out_dir + "/membership_chain" + std::to_string(cid) + ".txt", n, T));
            compat_acc.add(detail::read_matrix(
                cfg.out_dir + "/compat_chain" + std::to_string(cid) + ".txt", n, T));
        }
        // collapse the per-time membership rows to one row per node
        const Matrix& per_time = memb_acc.mean();
        int n = truth_bundle.data.nodes();
        int T = std::max(truth_bundle.data.steps(), 1);
        Matrix per_node(n);
        for (int i = 0; i < n; ++i) {
            per_node[i].assign(per_time.empty() ? 0 : per_time[0].size(), 0.0);
            for (int t = 0; t < T; ++t)
                for (size_t k = 0; k < per_node[i].size(); ++k)
                    per_node[i][k] += per_time[static_cast<size_t>(t) * n + i][k] / T;
        }
        Matrix truth_compat(truth.compat.k, std::vector<double>(truth.compat.k, 0.0));
        for (int a = 0; a < truth.compat.k; ++a)
            for (int b = 0; b < truth.compat.k; ++b) truth_compat[a][b] = truth.compat.at(a, b);
        report["l2_membership"] = l2_membership(per_node, truth.membership);
        report["l2_compat"] = l2_compat(compat_acc.mean(), truth_compat);
    }
    return report;
}

}  // namespace dim3

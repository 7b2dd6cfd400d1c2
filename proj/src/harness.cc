// Copyright 2026 The scqkd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "scqkd/harness.h"

#include <CLI11.hpp>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <sstream>
#include <thread>

namespace scqkd {

namespace {

using nlohmann::json;

// Flags that map one-to-one onto config keys.
constexpr std::string_view CONFIG_KEYS[] = {
    "rounds", "test-fraction", "transmittance", "attack",         "theta",          "alpha0p",   "alpha1p",
    "return-leg", "return-angle", "loss",      "seed",           "trojan",         "trojan-probe", "out",
    "sweep",  "workers",       "min-visibility", "max-error",
};

std::string shortest(double x) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, end);
}

double parse_double(const ConfigMap &m, const std::string &key, double fallback) {
    auto it = m.find(key);
    if (it == m.end()) {
        return fallback;
    }
    const std::string &s = it->second;
    double v = 0;
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size()) {
        throw UsageError("--" + key + ": expected a number, got '" + s + "'.");
    }
    return v;
}

uint64_t parse_u64(const ConfigMap &m, const std::string &key, uint64_t fallback) {
    auto it = m.find(key);
    if (it == m.end()) {
        return fallback;
    }
    const std::string &s = it->second;
    uint64_t v = 0;
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size()) {
        throw UsageError("--" + key + ": expected a non-negative integer, got '" + s + "'.");
    }
    return v;
}

std::string parse_choice(
    const ConfigMap &m, const std::string &key, std::string fallback, std::initializer_list<std::string_view> allowed) {
    auto it = m.find(key);
    std::string v = it == m.end() ? fallback : it->second;
    for (auto a : allowed) {
        if (v == a) {
            return v;
        }
    }
    throw UsageError("--" + key + ": unsupported value '" + v + "'.");
}

void require_range(const std::string &key, double v, double lo, double hi) {
    if (!(v >= lo && v <= hi)) {
        throw UsageError("--" + key + " must lie in [" + shortest(lo) + ", " + shortest(hi) + "], got " + shortest(v) + ".");
    }
}

ReturnLeg return_leg_from(const std::string &s) {
    if (s == "unattack") {
        return ReturnLeg::Unattack;
    }
    if (s == "general") {
        return ReturnLeg::General;
    }
    return ReturnLeg::None;
}

std::string return_leg_name(ReturnLeg r) {
    switch (r) {
        case ReturnLeg::None:
            return "none";
        case ReturnLeg::Unattack:
            return "unattack";
        case ReturnLeg::General:
            return "general";
    }
    return "none";
}

std::string trojan_name(TrojanDefense t) {
    switch (t) {
        case TrojanDefense::None:
            return "none";
        case TrojanDefense::Timing:
            return "timing";
        case TrojanDefense::Polarization:
            return "polarization";
        case TrojanDefense::Both:
            return "both";
    }
    return "none";
}

std::optional<SweepRequest> parse_sweep(const ConfigMap &m) {
    auto it = m.find("sweep");
    if (it == m.end() || it->second.empty()) {
        return std::nullopt;
    }
    std::vector<std::string> parts;
    std::stringstream ss(it->second);
    for (std::string part; std::getline(ss, part, ':');) {
        parts.push_back(part);
    }
    if (parts.size() != 3) {
        throw UsageError("--sweep expects START:END:STEPS.");
    }
    ConfigMap tmp{{"sweep-start", parts[0]}, {"sweep-end", parts[1]}, {"sweep-steps", parts[2]}};
    SweepRequest s;
    s.start = parse_double(tmp, "sweep-start", 0);
    s.end = parse_double(tmp, "sweep-end", 0);
    s.steps = parse_u64(tmp, "sweep-steps", 0);
    require_range("sweep START", s.start, 0, std::numbers::pi / 2);
    require_range("sweep END", s.end, 0, std::numbers::pi / 2);
    if (s.steps < 1 || (s.steps > 1 && !(s.end > s.start))) {
        throw UsageError("--sweep needs STEPS >= 1 and END > START when STEPS > 1.");
    }
    return s;
}

// Rounds to 12 significant digits so the JSON dump carries at most that many.
double round12(double x) {
    return std::strtod(format_double(x).c_str(), nullptr);
}

json opt_num(const std::optional<double> &x) {
    return x ? json(round12(*x)) : json(nullptr);
}

json counts_json(const OutcomeCounts &c) {
    json j = json::object();
    for (size_t s = 0; s < NUM_SETTINGS; s++) {
        for (size_t o = 0; o < NUM_OUTCOMES; o++) {
            auto sp = SettingsPair::from_index(s);
            auto oc = static_cast<Outcome>(o);
            j[std::string(settings_name(sp)) + "/" + std::string(outcome_name(oc))] = c.at(sp, oc);
        }
    }
    return j;
}

void write_file(const std::filesystem::path &path, const std::string &content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open '" + path.string() + "' for writing.");
    }
    out << content;
    if (!out) {
        throw std::runtime_error("failed writing '" + path.string() + "'.");
    }
}

ConfigMap echo_for_outputs(const ConfigMap &m) {
    ConfigMap e = m;
    e.erase("out");
    e.erase("workers");
    return e;
}

}  // namespace

std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

ConfigMap load_config_file(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw UsageError("cannot read config file '" + path.string() + "'.");
    }
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error &e) {
        throw UsageError("config file '" + path.string() + "' is not valid JSON: " + e.what());
    }
    if (j.contains("config") && j["config"].is_object()) {
        j = j["config"];
    }
    if (!j.is_object()) {
        throw UsageError("config file must hold a flat JSON object.");
    }
    ConfigMap m;
    for (auto &[key, value] : j.items()) {
        if (std::find(std::begin(CONFIG_KEYS), std::end(CONFIG_KEYS), key) == std::end(CONFIG_KEYS)) {
            throw UsageError("config file: unknown key '" + key + "'.");
        }
        if (value.is_string()) {
            m[key] = value.get<std::string>();
        } else if (value.is_number_unsigned() || value.is_number_integer()) {
            m[key] = value.dump();
        } else if (value.is_number_float()) {
            m[key] = shortest(value.get<double>());
        } else {
            throw UsageError("config file: key '" + key + "' must be a string or a number.");
        }
    }
    return m;
}

RunRequest request_from_map(const ConfigMap &m) {
    for (const auto &[key, value] : m) {
        if (std::find(std::begin(CONFIG_KEYS), std::end(CONFIG_KEYS), key) == std::end(CONFIG_KEYS)) {
            throw UsageError("unknown option '" + key + "'.");
        }
    }
    if (!m.contains("rounds")) {
        throw UsageError("--rounds is required.");
    }
    RunRequest req;
    SessionConfig &cfg = req.session;
    cfg.rounds = parse_u64(m, "rounds", 0);
    if (cfg.rounds < 1) {
        throw UsageError("--rounds must be at least 1.");
    }
    cfg.test_fraction = parse_double(m, "test-fraction", 0.25);
    if (!(cfg.test_fraction > 0 && cfg.test_fraction < 1)) {
        throw UsageError("--test-fraction must lie in (0, 1).");
    }
    if (cfg.test_fraction * static_cast<double>(cfg.rounds) < 1) {
        throw UsageError("--test-fraction times --rounds must be at least 1.");
    }
    double t = parse_double(m, "transmittance", 0.5);
    require_range("transmittance", t, 0, 1);
    cfg.bs = BeamsplitterParams::from_transmittance(t);
    cfg.loss = parse_double(m, "loss", 0);
    if (!(cfg.loss >= 0 && cfg.loss < 1)) {
        throw UsageError("--loss must lie in [0, 1).");
    }
    cfg.seed = parse_u64(m, "seed", 0);
    std::string trojan = parse_choice(m, "trojan", "none", {"none", "timing", "polarization", "both"});
    cfg.trojan = trojan == "timing"         ? TrojanDefense::Timing
                 : trojan == "polarization" ? TrojanDefense::Polarization
                 : trojan == "both"         ? TrojanDefense::Both
                                            : TrojanDefense::None;
    cfg.trojan_probe = parse_double(m, "trojan-probe", 0);
    require_range("trojan-probe", cfg.trojan_probe, 0, 1);
    cfg.workers = parse_u64(m, "workers", std::max(1u, std::thread::hardware_concurrency()));
    if (cfg.workers < 1) {
        throw UsageError("--workers must be at least 1.");
    }

    std::string attack = parse_choice(m, "attack", "none", {"none", "incoherent", "number-preserving"});
    std::string leg = parse_choice(m, "return-leg", "none", {"none", "unattack", "general"});
    double theta = parse_double(m, "theta", 0);
    double a0p = parse_double(m, "alpha0p", 0);
    double a1p = parse_double(m, "alpha1p", 0);
    double return_angle = parse_double(m, "return-angle", 0);
    if (attack == "number-preserving") {
        require_range("theta", theta, 0, std::numbers::pi / 2);
        NumberPreservingParams p;
        p.theta = theta;
        p.return_leg = return_leg_from(leg);
        if (p.return_leg == ReturnLeg::General) {
            p.u1_return = probe_rotation(return_angle, cfg.probe_dim);
        }
        cfg.attack = p;
    } else if (attack == "incoherent") {
        require_range("alpha0p", a0p, 0, 1);
        require_range("alpha1p", a1p, 0, 1);
        if (leg == "general") {
            throw UsageError("--return-leg general is only defined for the number-preserving attack.");
        }
        cfg.attack = GeneralIncoherentParams::with_amplitudes(a0p, a1p, return_leg_from(leg), cfg.probe_dim);
    }

    req.sweep = parse_sweep(m);
    if (auto it = m.find("out"); it != m.end() && !it->second.empty()) {
        req.out_dir = it->second;
    } else if (const char *env = std::getenv(OUT_DIR_ENV); env && *env) {
        req.out_dir = env;
    } else {
        req.out_dir = "scqkd_out";
    }
    req.min_visibility = parse_double(m, "min-visibility", 0.95);
    require_range("min-visibility", req.min_visibility, -1, 1);
    if (auto it = m.find("max-error"); it != m.end() && it->second != "auto") {
        req.max_error = parse_double(m, "max-error", 0);
        require_range("max-error", *req.max_error, 0, 1);
    }
    try {
        cfg.validate();
    } catch (const std::invalid_argument &e) {
        throw UsageError(e.what());
    }
    return req;
}

ConfigMap request_to_map(const RunRequest &req) {
    const SessionConfig &cfg = req.session;
    ConfigMap m;
    m["rounds"] = std::to_string(cfg.rounds);
    m["test-fraction"] = shortest(cfg.test_fraction);
    m["transmittance"] = shortest(cfg.bs.T);
    m["loss"] = shortest(cfg.loss);
    m["seed"] = std::to_string(cfg.seed);
    m["trojan"] = trojan_name(cfg.trojan);
    m["trojan-probe"] = shortest(cfg.trojan_probe);
    m["workers"] = std::to_string(cfg.workers);
    m["attack"] = "none";
    m["theta"] = "0";
    m["alpha0p"] = "0";
    m["alpha1p"] = "0";
    m["return-leg"] = "none";
    m["return-angle"] = "0";
    if (const auto *np = std::get_if<NumberPreservingParams>(&cfg.attack)) {
        m["attack"] = "number-preserving";
        m["theta"] = shortest(np->theta);
        m["return-leg"] = return_leg_name(np->return_leg);
        if (np->return_leg == ReturnLeg::General && np->u1_return.size() > 0) {
            m["return-angle"] = shortest(std::atan2(np->u1_return(1, 0).real(), np->u1_return(0, 0).real()));
        }
    } else if (const auto *gi = std::get_if<GeneralIncoherentParams>(&cfg.attack)) {
        m["attack"] = "incoherent";
        m["alpha0p"] = shortest(std::abs(gi->a0p));
        m["alpha1p"] = shortest(std::abs(gi->a1p));
        m["return-leg"] = return_leg_name(gi->return_leg);
    }
    m["out"] = req.out_dir.string();
    m["sweep"] = req.sweep ? shortest(req.sweep->start) + ":" + shortest(req.sweep->end) + ":" +
                                 std::to_string(req.sweep->steps)
                           : "";
    m["min-visibility"] = shortest(req.min_visibility);
    m["max-error"] = req.max_error ? shortest(*req.max_error) : "auto";
    return m;
}

RunRequest parse_config(const std::vector<std::string> &args) {
    CLI::App app{"Semi-counterfactual QKD simulator and security analyzer", "scqkd"};
    std::string config_file;
    app.add_option("--config", config_file, "Flat JSON key/value file (or a run manifest); flags override it");

    ConfigMap flags;
    std::map<std::string, CLI::Option *> opts;
    auto add = [&](const std::string &name, const std::string &help) {
        opts[name] = app.add_option("--" + name, flags[name], help);
    };
    add("rounds", "Number of protocol rounds (required)");
    add("test-fraction", "Fraction of rounds revealed for testing (default 0.25)");
    add("transmittance", "Source beamsplitter transmittance T (default 0.5)");
    add("attack", "none | incoherent | number-preserving");
    add("theta", "Number-preserving attack angle in [0, pi/2]");
    add("alpha0p", "Incoherent attack |alpha_0perp|");
    add("alpha1p", "Incoherent attack |alpha_1perp|");
    add("return-leg", "none | unattack | general");
    add("return-angle", "U1' rotation angle for --return-leg general (U0' = 1)");
    add("loss", "Per-leg photon loss probability on arm b");
    add("seed", "64-bit seed");
    add("trojan", "none | timing | polarization | both");
    add("trojan-probe", "Fraction of rounds with an injected Trojan probe photon");
    add("out", "Output directory (default $SCQKD_OUT_DIR or ./scqkd_out)");
    add("sweep", "START:END:STEPS theta sweep");
    add("workers", "Worker threads");
    add("min-visibility", "Accept threshold on the test-set visibility (default 0.95)");
    add("max-error", "Accept threshold on the test-set error rate (default: threshold e*)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp &) {
        throw;
    } catch (const CLI::ParseError &e) {
        throw UsageError(e.what());
    }

    ConfigMap merged;
    if (!config_file.empty()) {
        merged = load_config_file(config_file);
    }
    for (const auto &[name, opt] : opts) {
        if (opt->count() > 0) {
            merged[name] = flags[name];
        }
    }
    return request_from_map(merged);
}

std::string_view verdict_name(Verdict v) {
    return v == Verdict::Accept ? "ACCEPT" : "ABORT";
}

Verdict decide(const SiftResult &sifted, double min_visibility, double max_error) {
    if (!sifted.test_visibility || !sifted.test_error_rate) {
        return Verdict::Abort;
    }
    bool ok = *sifted.test_visibility >= min_visibility && *sifted.test_error_rate <= max_error;
    return ok ? Verdict::Accept : Verdict::Abort;
}

std::string records_csv(std::span<const RoundRecord> records) {
    std::string out = "index,alice,bob,outcome,bit,t_s,t_r,pol_sent,pol_basis,pol_result\n";
    out.reserve(out.size() + records.size() * 40);
    for (const auto &r : records) {
        out += std::to_string(r.index);
        out += ',';
        out += switch_name(r.settings.alice);
        out += ',';
        out += switch_name(r.settings.bob);
        out += ',';
        out += outcome_name(r.outcome);
        out += ',';
        if (r.sifted_bit) {
            out += static_cast<char>('0' + *r.sifted_bit);
        }
        out += ',';
        out += std::to_string(r.send_tick);
        out += ',';
        if (r.bob_receive_tick) {
            out += std::to_string(*r.bob_receive_tick);
        }
        out += ',';
        out += bb84_name(r.sent_pol);
        out += ',';
        if (r.bob_pol) {
            out += basis_name(r.bob_pol->basis);
        }
        out += ',';
        if (r.bob_pol) {
            out += bb84_name(r.bob_pol->result);
        }
        out += '\n';
    }
    return out;
}

std::string sweep_csv(const SecurityCurve &curve) {
    std::string out = "theta,V,e,I_E,I_AB,K\n";
    for (const auto &p : curve.points) {
        out += format_double(p.theta) + "," + format_double(p.visibility) + "," + format_double(p.error_rate) + "," +
               format_double(p.eve_info) + "," + format_double(p.bob_info) + "," + format_double(p.key_rate) + "\n";
    }
    return out;
}

RunManifest run(const RunRequest &req) {
    auto started = std::chrono::steady_clock::now();
    std::error_code ec;
    std::filesystem::create_directories(req.out_dir, ec);
    if (ec) {
        throw std::runtime_error("cannot create output directory '" + req.out_dir.string() + "': " + ec.message());
    }

    RunManifest manifest;
    manifest.config = request_to_map(req);
    manifest.version = std::string(ARTIFACT_VERSION);
    manifest.seed = req.session.seed;

    SecurityThreshold threshold = security_threshold();
    double max_error = req.max_error.value_or(threshold.e_star);

    json summary;
    summary["artifact"] = "scqkd";
    summary["version"] = ARTIFACT_VERSION;
    summary["rng"] = Rng::NAME;
    summary["config"] = echo_for_outputs(manifest.config);
    summary["threshold"] = {{"theta_star", round12(threshold.theta_star)}, {"e_star", round12(threshold.e_star)}};

    auto emit = [&](const std::string &name, const std::string &content) {
        auto path = req.out_dir / name;
        write_file(path, content);
        manifest.outputs.push_back(path.string());
    };

    if (req.sweep) {
        auto grid = linspace(req.sweep->start, req.sweep->end, req.sweep->steps);
        SecurityCurve curve = sweep(grid);
        emit("sweep.csv", sweep_csv(curve));

        NumberPreservingParams base;
        if (const auto *np = std::get_if<NumberPreservingParams>(&req.session.attack)) {
            base = *np;
        }
        std::string mc = "theta,V_hat,e_hat,eve_rate,key_bits\n";
        auto na = [](const std::optional<double> &x) {
            return x ? format_double(*x) : std::string("nan");
        };
        for (double theta : grid) {
            SessionConfig cfg = req.session;
            NumberPreservingParams p = base;
            p.theta = theta;
            cfg.attack = p;
            SessionResult res = run_session(cfg);
            mc += format_double(theta) + "," + na(res.stats.visibility) + "," + na(res.stats.error_rate) + "," +
                  na(res.stats.eve.conclusive_rate()) + "," + std::to_string(res.stats.key_bits) + "\n";
        }
        emit("sweep_sessions.csv", mc);
        summary["sweep"] = {{"rows", curve.points.size()}};
    } else {
        SessionResult res = run_session(req.session);
        const SessionStats &st = res.stats;
        Verdict verdict = decide(res.sifted, req.min_visibility, max_error);
        manifest.verdict = verdict;

        summary["counts"] = counts_json(st.counts);
        summary["estimators"] = {
            {"visibility", opt_num(st.visibility)},
            {"error_rate", opt_num(st.error_rate)},
            {"multi_count_rate", round12(st.multi_count_rate)},
            {"loss_rate", round12(st.loss_rate)},
            {"detection_rate", round12(st.detection_rate)},
            {"key_bits", st.key_bits},
        };
        summary["test_set"] = {
            {"rounds", res.sifted.test_indices.size()},
            {"counts", counts_json(res.sifted.test_counts)},
            {"visibility", opt_num(res.sifted.test_visibility)},
            {"error_rate", opt_num(res.sifted.test_error_rate)},
        };
        summary["eve"] = {
            {"measured", st.eve.measured},
            {"conclusive", st.eve.conclusive},
            {"correct", st.eve.correct},
            {"conclusive_rate", opt_num(st.eve.conclusive_rate())},
        };
        PolarizationCheck pol = trojan_polarization_check(res.records);
        summary["trojan"] = {
            {"timing_violations", trojan_timing_check(res.records)},
            {"polarization_compared", pol.compared},
            {"polarization_mismatch_rate", opt_num(pol.mismatch_rate)},
        };
        summary["verdict"] = verdict_name(verdict);
        summary["thresholds"] = {{"min_visibility", round12(req.min_visibility)}, {"max_error", round12(max_error)}};
        emit("rounds.csv", records_csv(res.records));
    }
    emit("summary.json", summary.dump(2) + "\n");

    manifest.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    auto manifest_path = req.out_dir / "manifest.json";
    manifest.outputs.push_back(manifest_path.string());
    json mj;
    mj["config"] = manifest.config;
    mj["version"] = manifest.version;
    mj["seed"] = manifest.seed;
    mj["wall_seconds"] = manifest.wall_seconds;
    mj["outputs"] = manifest.outputs;
    mj["verdict"] = manifest.verdict ? json(verdict_name(*manifest.verdict)) : json(nullptr);
    write_file(manifest_path, mj.dump(2) + "\n");
    return manifest;
}

int exit_code(const RunManifest &manifest) {
    return manifest.verdict == Verdict::Abort ? 2 : 0;
}

}  // namespace scqkd

// Copyright 2026 The rotecho Authors
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


#include "cli.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <system_error>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rotecho/channels.h"
#include "rotecho/cr_hamiltonian.h"
#include "rotecho/echo.h"
#include "rotecho/errors.h"
#include "rotecho/fit.h"
#include "rotecho/heat.h"
#include "rotecho/qv.h"
#include "rotecho/spectator.h"
#include "rotecho/units.h"

#ifndef ROTECHO_VERSION
#define ROTECHO_VERSION "0.0.0"
#endif

namespace rotecho::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

void write_atomic(const fs::path &path, const std::string &contents) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) {
            throw Error("cannot open " + tmp.string() + " for writing");
        }
        f << contents;
        f.flush();
        if (!f) {
            throw Error("write failed for " + tmp.string());
        }
    }
    fs::rename(tmp, path);
}

std::string format_double(double v) {
    if (v == 0) {
        return "0";
    }
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

// ------------------------------------------------------------------ config

[[noreturn]] void fail(const std::string &path, const std::string &msg) {
    throw ConfigError(path + ": " + msg);
}

std::string child(const std::string &path, const std::string &key) {
    return path + "." + key;
}

void only_keys(const json &j, const std::string &path, std::initializer_list<const char *> keys) {
    if (!j.is_object()) {
        fail(path, "expected an object");
    }
    for (const auto &[k, v] : j.items()) {
        bool known = false;
        std::string hint;
        for (const char *a : keys) {
            const std::string s = a;
            known = known || s == k;
            if (s.size() > k.size() && s.compare(0, k.size() + 1, k + "_") == 0) {
                hint = s;
            }
        }
        if (known) {
            continue;
        }
        if (!hint.empty()) {
            fail(child(path, k), "missing unit suffix (expected '" + hint + "')");
        }
        fail(child(path, k), "unknown key");
    }
}

const json &require(const json &j, const std::string &path, const std::string &key) {
    if (!j.contains(key)) {
        fail(child(path, key), "required key missing");
    }
    return j.at(key);
}

double number(const json &j, const std::string &path, const std::string &key) {
    const json &v = require(j, path, key);
    if (!v.is_number()) {
        fail(child(path, key), "expected a number");
    }
    return v.get<double>();
}

double number_or(const json &j, const std::string &path, const std::string &key, double fallback) {
    return j.contains(key) ? number(j, path, key) : fallback;
}

long long integer(const json &j, const std::string &path, const std::string &key) {
    const json &v = require(j, path, key);
    if (!v.is_number_integer()) {
        fail(child(path, key), "expected an integer");
    }
    return v.get<long long>();
}

long long integer_or(const json &j, const std::string &path, const std::string &key, long long fallback) {
    return j.contains(key) ? integer(j, path, key) : fallback;
}

std::string string_or(const json &j, const std::string &path, const std::string &key, const std::string &fallback) {
    if (!j.contains(key)) {
        return fallback;
    }
    if (!j.at(key).is_string()) {
        fail(child(path, key), "expected a string");
    }
    return j.at(key).get<std::string>();
}

template <class T>
std::vector<T> array_of(const json &j, const std::string &path, const std::string &key) {
    const json &v = require(j, path, key);
    if (!v.is_array() || v.empty()) {
        fail(child(path, key), "expected a non-empty array");
    }
    std::vector<T> out;
    for (std::size_t k = 0; k < v.size(); ++k) {
        const json &e = v[k];
        const std::string where = child(path, key) + "[" + std::to_string(k) + "]";
        if constexpr (std::is_same_v<T, std::string>) {
            if (!e.is_string()) {
                fail(where, "expected a string");
            }
        } else if constexpr (std::is_integral_v<T>) {
            if (!e.is_number_integer()) {
                fail(where, "expected an integer");
            }
        } else {
            if (!e.is_number()) {
                fail(where, "expected a number");
            }
        }
        out.push_back(e.get<T>());
    }
    return out;
}

std::string read_text(const fs::path &p) {
    std::ifstream f(p, std::ios::binary);
    if (!f) {
        throw ConfigError("cannot read " + p.string());
    }
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

json parse_json_file(const fs::path &p) {
    const std::string text = read_text(p);
    try {
        return json::parse(text);
    } catch (const json::parse_error &e) {
        std::size_t line = 1, col = 1;
        for (std::size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
            if (text[k] == '\n') {
                line++;
                col = 1;
            } else {
                col++;
            }
        }
        throw ConfigError(p.string() + ":" + std::to_string(line) + ":" + std::to_string(col) +
                          ": JSON syntax error");
    }
}

fs::path resolve(const fs::path &base, const std::string &p) {
    fs::path q(p);
    return q.is_absolute() ? q : base / q;
}

// Rethrows library configuration errors with the key path in front.
template <class F>
auto at_path(const std::string &path, F &&f) -> decltype(f()) {
    try {
        return f();
    } catch (const ConfigError &e) {
        fail(path, e.what());
    } catch (const InvalidInput &e) {
        fail(path, e.what());
    }
}

struct AnyModel {
    std::optional<ThetaModel> theta;
    std::optional<CoefficientModel> coefficient;
};

AnyModel load_model(const json &j, const std::string &path, const fs::path &base) {
    AnyModel m;
    if (j.is_string()) {
        const std::string name = j.get<std::string>();
        if (name == "reference_2q") {
            m.theta = ThetaModel::reference_2q();
            return m;
        }
        if (name == "reference_3q") {
            m.theta = ThetaModel::reference_3q();
            return m;
        }
        const fs::path file = resolve(base, name);
        return load_model(parse_json_file(file), file.string(), file.parent_path());
    }
    if (!j.is_object()) {
        fail(path, "expected a model object, a built-in name or a file path");
    }
    if (j.contains("mode") && j.at("mode") == "theta") {
        m.theta = at_path(path, [&] { return ThetaModel::from_json(j); });
    } else {
        m.coefficient = at_path(path, [&] { return CoefficientModel::from_json(j); });
    }
    return m;
}

std::vector<double> load_grid(const json &j, const std::string &path) {
    only_keys(j, path, {"x_min", "x_step", "x_points", "x_values"});
    std::vector<double> xs;
    if (j.contains("x_values")) {
        if (j.contains("x_min") || j.contains("x_step") || j.contains("x_points")) {
            fail(path, "give either x_values or x_min/x_step/x_points");
        }
        xs = array_of<double>(j, path, "x_values");
    } else {
        const double x0 = number(j, path, "x_min"), dx = number(j, path, "x_step");
        const long long n = integer(j, path, "x_points");
        if (n < 1 || n > 1000000) {
            fail(child(path, "x_points"), "must lie in [1, 1e6]");
        }
        for (long long k = 0; k < n; ++k) {
            xs.push_back(x0 + dx * static_cast<double>(k));
        }
    }
    if (!std::is_sorted(xs.begin(), xs.end())) {
        fail(path, "x values must be ascending");
    }
    return xs;
}

NoiseParams load_noise(const json &j, const std::string &path, std::size_t qubits) {
    only_keys(j, path, {"qubits"});
    const json &arr = require(j, path, "qubits");
    if (!arr.is_array() || arr.size() != qubits) {
        fail(child(path, "qubits"), "expected " + std::to_string(qubits) + " entries");
    }
    NoiseParams np;
    for (std::size_t k = 0; k < arr.size(); ++k) {
        const std::string where = child(path, "qubits") + "[" + std::to_string(k) + "]";
        only_keys(arr[k], where, {"t1_us", "t2_us"});
        QubitNoise q;
        if (arr[k].contains("t1_us")) {
            q.t1 = us_to_s(number(arr[k], where, "t1_us"));
        }
        if (arr[k].contains("t2_us")) {
            q.t2 = us_to_s(number(arr[k], where, "t2_us"));
        }
        at_path(where, [&] { q.validate(); });
        np.qubits.push_back(q);
    }
    return np;
}

NoiseParams ideal_noise(std::size_t qubits) {
    return NoiseParams{std::vector<QubitNoise>(qubits)};
}

// ------------------------------------------------------------------- runs

struct Run {
    std::string command;
    std::uint64_t seed = 1;
    std::optional<int> shots;
    std::string hash;
    fs::path out_dir;
    fs::path base;
    std::ostream *out = nullptr;

    std::string csv_header() const {
        return "# rotecho " ROTECHO_VERSION " command=" + command + " config_hash=" + hash +
               " seed=" + std::to_string(seed) + " shots=" + (shots ? std::to_string(*shots) : "exact") + "\n";
    }
    json provenance() const {
        return {{"tool", "rotecho"},       {"version", ROTECHO_VERSION}, {"command", command},
                {"config_hash", hash},     {"seed", seed},               {"shots", shots ? json(*shots) : json("exact")}};
    }
    void write(const std::string &name, const std::string &text) const {
        const fs::path p = out_dir / name;
        write_atomic(p, text);
        *out << "wrote " << p.string() << "\n";
    }
    void write_csv(const std::string &name, const std::string &body) const {
        write(name, csv_header() + body);
    }
    void write_json(const std::string &name, json j) const {
        j["provenance"] = provenance();
        write(name, j.dump(2) + "\n");
    }
};

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    // splitmix64 finalizer over (seed, index).
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

void check_schema(const json &cfg) {
    if (!cfg.is_object()) {
        fail("$", "configuration must be a JSON object");
    }
    if (integer(cfg, "$", "schema_version") != 1) {
        fail("$.schema_version", "only schema version 1 is supported");
    }
}

std::uint64_t config_seed(const json &cfg) {
    const long long s = integer_or(cfg, "$", "seed", 1);
    if (s < 0) {
        fail("$.seed", "must be non-negative");
    }
    return static_cast<std::uint64_t>(s);
}

// ----------------------------------------------------------- sweep-rotary

const std::vector<std::string> kCrLabels{"IX", "IY", "IZ", "ZI", "ZX", "ZY", "ZZ"};

double lookup(const std::map<std::string, double> &m, const std::string &k) {
    auto it = m.find(k);
    return it == m.end() ? 0.0 : it->second;
}

int cmd_sweep_rotary(const Run &run, const json &cfg) {
    only_keys(cfg, "$",
              {"schema_version", "seed", "model", "grid", "method", "heat", "noise", "t_gate_ns", "t_pulse_ns"});
    const AnyModel model = load_model(require(cfg, "$", "model"), "$.model", run.base);
    const std::vector<double> xs = load_grid(require(cfg, "$", "grid"), "$.grid");
    const std::string method = string_or(cfg, "$", "method", "heat");
    if (method != "heat" && method != "closed_form") {
        fail("$.method", "must be \"heat\" or \"closed_form\"");
    }
    std::vector<std::string> observables;
    long long n = model.theta ? 2 : 8;
    if (cfg.contains("heat")) {
        only_keys(cfg.at("heat"), "$.heat", {"n", "observables"});
        n = integer_or(cfg.at("heat"), "$.heat", "n", n);
        if (cfg.at("heat").contains("observables")) {
            observables = array_of<std::string>(cfg.at("heat"), "$.heat", "observables");
        }
    }
    if (n < 1 || n % 2) {
        fail("$.heat.n", "must be a positive even integer");
    }
    HeatConfig heat;
    heat.reps = {static_cast<int>(n)};
    heat.shots = run.shots;
    heat.seed = run.seed;

    if (model.theta) {
        for (const char *k : {"noise", "t_gate_ns", "t_pulse_ns"}) {
            if (cfg.contains(k)) {
                fail(child("$", k), "only valid for coefficient models (theta models carry t_pulse_ns)");
            }
        }
        const ThetaModel &m = *model.theta;
        SweepConfig sc;
        sc.heat = heat;
        sc.n = static_cast<int>(n);
        sc.observables = observables;
        SweepDataset ds;
        if (method == "heat") {
            ds = synthesize_sweep(m, xs, sc);
        } else {
            const auto labels = observables.empty() ? default_observables(m.qubit_count()) : observables;
            for (double x : xs) {
                PauliDecomposition h = generating_hamiltonian(theta_echo(m, x), m.t_pulse());
                for (const auto &label : labels) {
                    std::string key = label.substr(0, m.qubit_count());
                    ds.rows.push_back({x, label, 2 * h[key].real(), 1.0});
                }
            }
        }
        run.write_csv("sweep.csv", ds.to_csv());
        return kExitOk;
    }

    if (!observables.empty()) {
        fail("$.heat.observables", "coefficient-model sweeps always report every two-qubit label");
    }
    const CoefficientModel &m = *model.coefficient;
    const double t = cfg.contains("t_pulse_ns") ? ns_to_s(number(cfg, "$", "t_pulse_ns")) : kDefaultPulseTime;
    if (!(t > 0)) {
        fail("$.t_pulse_ns", "must be positive");
    }
    const NoiseParams noise = cfg.contains("noise") ? load_noise(cfg.at("noise"), "$.noise", 2) : ideal_noise(2);
    const double t_gate = cfg.contains("t_gate_ns") ? ns_to_s(number(cfg, "$", "t_gate_ns")) : 2 * t;
    const auto rows = sweep_rotary(m, xs, t, noise, t_gate);
    std::string csv = "x";
    for (const auto &l : kCrLabels) {
        csv += "," + l + "_khz";
    }
    csv += ",epg\n";
    for (std::size_t k = 0; k < rows.size(); ++k) {
        std::map<std::string, double> nu = rows[k].report.nu_tilde;
        if (method == "heat") {
            HeatConfig hk = heat;
            hk.seed = derive_seed(run.seed, k);
            const int zx_sign = lookup(nu, "ZX") < 0 ? -1 : 1;
            nu = heat_echo_nu_tilde(echo_unitary(m.at(rows[k].x), t), hk, static_cast<int>(n), t, zx_sign);
        }
        csv += format_double(rows[k].x);
        for (const auto &l : kCrLabels) {
            csv += "," + format_double(rad_s_to_khz(lookup(nu, l)));
        }
        csv += "," + format_double(rows[k].epg_total) + "\n";
    }
    run.write_csv("sweep.csv", csv);
    return kExitOk;
}

// ------------------------------------------------------------------- heat

json nu_json(const std::map<std::string, double> &nu) {
    json j = json::object();
    for (const auto &[k, v] : nu) {
        j[k] = rad_s_to_khz(v);
    }
    return j;
}

int cmd_heat(const Run &run, const json &cfg) {
    only_keys(cfg, "$",
              {"schema_version", "seed", "model", "x", "t_pulse_ns", "n", "reps", "records_file", "kind", "zx_sign"});
    const long long n = integer_or(cfg, "$", "n", 8);
    HeatConfig heat;
    if (cfg.contains("reps")) {
        heat.reps.clear();
        for (long long r : array_of<long long>(cfg, "$", "reps")) {
            heat.reps.push_back(static_cast<int>(r));
        }
    }
    if (std::find(heat.reps.begin(), heat.reps.end(), n) == heat.reps.end()) {
        fail("$.n", "must be one of the HEAT repetition counts");
    }
    heat.shots = run.shots;
    heat.seed = run.seed;
    at_path("$.reps", [&] { heat.validate(); });

    HeatRecord rec;
    std::string kind = string_or(cfg, "$", "kind", "two_qubit");
    if (kind != "two_qubit" && kind != "spectator") {
        fail("$.kind", "must be \"two_qubit\" or \"spectator\"");
    }
    int zx_sign = static_cast<int>(integer_or(cfg, "$", "zx_sign", 1));
    if (zx_sign != 1 && zx_sign != -1) {
        fail("$.zx_sign", "must be 1 or -1");
    }
    double t = cfg.contains("t_pulse_ns") ? ns_to_s(number(cfg, "$", "t_pulse_ns")) : kDefaultPulseTime;
    json report;
    if (cfg.contains("records_file")) {
        for (const char *k : {"model", "x"}) {
            if (cfg.contains(k)) {
                fail(child("$", k), "not used when records_file is given");
            }
        }
        const fs::path file = resolve(run.base, string_or(cfg, "$", "records_file", ""));
        const std::string text = read_text(file);
        rec = at_path("$.records_file", [&] {
            return file.extension() == ".json" ? HeatRecord::from_json(json::parse(text)) : HeatRecord::from_csv(text);
        });
        report["source"] = "imported";
    } else {
        if (cfg.contains("zx_sign")) {
            fail("$.zx_sign", "only used with records_file; simulated gates pick the frame themselves");
        }
        const AnyModel model = load_model(require(cfg, "$", "model"), "$.model", run.base);
        const double x = number(cfg, "$", "x");
        CMatrix u;
        if (model.theta) {
            if (cfg.contains("t_pulse_ns")) {
                fail("$.t_pulse_ns", "theta models carry their own t_pulse_ns");
            }
            t = model.theta->t_pulse();
            u = theta_echo(*model.theta, x);
            if (model.theta->qubit_count() == 3) {
                if (std::abs(model.theta->angle("ZXI", x)) > 1e-12) {
                    throw OutOfScope("spectator HEAT needs ZXI = 0");
                }
                kind = "spectator";
            } else {
                zx_sign = model.theta->angle("ZXI", x) < 0 ? 1 : -1;
            }
        } else {
            u = echo_unitary(model.coefficient->at(x), t);
            zx_sign = lookup(echo_coefficients(model.coefficient->at(x), t).nu_tilde, "ZX") < 0 ? -1 : 1;
        }
        if (kind == "spectator") {
            rec = run_heat_spectator(u, heat);
        } else {
            if (zx_sign < 0) {
                const CMatrix z = pauli_matrix("IZ");
                u = z * u * z;
            }
            rec = run_heat_2q(u, heat);
        }
        report["source"] = "simulated";
        report["x"] = x;
    }
    report["kind"] = kind;
    report["n"] = n;
    report["t_pulse_ns"] = t * 1e9;
    if (kind == "spectator") {
        const SpectatorHeatResult r = reconstruct_spectator(rec, static_cast<int>(n));
        const cdouble i(0, 1);
        report["nu_tilde_khz"] = {{"IY", rad_s_to_khz((i * r.a_y).real() / t)},
                                  {"IZ", rad_s_to_khz((i * r.a_z).real() / t)},
                                  {"YZ", rad_s_to_khz((i * r.a_yz).real() / t)},
                                  {"ZZ", rad_s_to_khz((i * r.a_zz).real() / t)}};
        report["linearity_warning"] = r.linearity_warning;
    } else {
        report["zx_sign"] = zx_sign;
        report["frame"] = zx_sign < 0 ? "target_z_pi" : "lab";
        report["nu_tilde_khz"] = nu_json(heat_record_nu_tilde(rec, static_cast<int>(n), t, zx_sign));
    }
    run.write_csv("heat_records.csv", rec.to_csv());
    run.write_json("heat.json", report);
    return kExitOk;
}

// -------------------------------------------------------------- unitarity

struct RbSettings {
    std::vector<int> lengths{1, 2, 4, 8, 16, 32, 50};
    int n_sequences = 200;
};

RbSettings load_rb(const json &cfg, const std::string &path) {
    RbSettings rb;
    if (!cfg.contains("rb")) {
        return rb;
    }
    const json &j = cfg.at("rb");
    const std::string p = child(path, "rb");
    only_keys(j, p, {"lengths", "n_sequences"});
    if (j.contains("lengths")) {
        rb.lengths.clear();
        for (long long m : array_of<long long>(j, p, "lengths")) {
            if (m < 1) {
                fail(child(p, "lengths"), "lengths must be positive");
            }
            rb.lengths.push_back(static_cast<int>(m));
        }
    }
    rb.n_sequences = static_cast<int>(integer_or(j, p, "n_sequences", rb.n_sequences));
    if (rb.n_sequences < 1) {
        fail(child(p, "n_sequences"), "must be positive");
    }
    return rb;
}

RbDecayFit run_rb(const PTMatrix &r, const RbSettings &rb, const Run &run, std::uint64_t stream) {
    PurityRbConfig c;
    c.lengths = rb.lengths;
    c.n_sequences = rb.n_sequences;
    c.seed = derive_seed(run.seed, stream);
    c.shots = run.shots;
    return purity_rb(r, c);
}

int cmd_unitarity(const Run &run, const json &cfg) {
    only_keys(cfg, "$", {"schema_version", "seed", "noise", "t_pulse_ns", "xi_khz", "rotary_turns", "rb"});
    const NoiseParams noise = cfg.contains("noise") ? load_noise(cfg.at("noise"), "$.noise", 3) : ideal_noise(3);
    const double t = cfg.contains("t_pulse_ns") ? ns_to_s(number(cfg, "$", "t_pulse_ns")) : kDefaultPulseTime;
    if (!(t > 0)) {
        fail("$.t_pulse_ns", "must be positive");
    }
    const double xi = khz_to_rad_s(number_or(cfg, "$", "xi_khz", 0));
    const std::vector<double> turns =
        cfg.contains("rotary_turns") ? array_of<double>(cfg, "$", "rotary_turns") : std::vector<double>{0};
    const RbSettings rb = load_rb(cfg, "$");

    const PTMatrix damping = damping_ptm(noise, 2 * t);
    std::vector<std::pair<double, double>> g_ct, g_ts;
    for (std::size_t q = 0; q < 3; ++q) {
        const std::pair<double, double> g{noise.qubits[q].gamma_a(2 * t), noise.qubits[q].gamma_p(2 * t)};
        (q < 2 ? g_ct : g_ts).push_back(g);
        if (q == 1) {
            g_ts.push_back(g);
        }
    }
    const double limit_ct = unitarity_independent(g_ct);
    const double limit_ts = unitarity_independent(g_ts);

    std::string csv =
        "rotary_turns,omega_khz,u_ct,u_ct_rb,u_ts,u_ts_rb,u_ts_product,e_ts,u_ct_limit,u_ts_limit,u_full,"
        "u_product_ct_s,e_ct_s,entanglement\n";
    json points = json::array();
    for (std::size_t k = 0; k < turns.size(); ++k) {
        const double omega = 2 * std::numbers::pi * turns[k] / t;
        const CMatrix r_ts = spectator_unitary(xi, omega, {}, t);
        const CMatrix u = kron(CMatrix::Identity(2, 2), r_ts);
        const PTMatrix full = compose(damping, ptm_from_unitary(u));
        const UnitarityReport ct_s = unitarity_report(full, {2, 1});
        const PTMatrix ts = reduced_ptm(full, {1, 2}, 1);
        const UnitarityReport ts_pair = unitarity_report(ts, {1, 1});
        const PTMatrix ct = reduced_ptm(full, {2, 1}, 0);
        const RbDecayFit rb_ct = run_rb(ct, rb, run, 2 * k);
        const RbDecayFit rb_ts = run_rb(ts, rb, run, 2 * k + 1);
        const SpectatorTerms terms = rotary_suppression(xi, omega, t);
        const double ent = entanglement_from_heat(terms.nu_yz, terms.nu_zz, t);
        const std::vector<double> vals{turns[k],
                                       rad_s_to_khz(omega),
                                       ct_s.u_sub[0],
                                       rb_ct.u_hat,
                                       ts_pair.u_full,
                                       rb_ts.u_hat,
                                       ts_pair.u_product,
                                       ts_pair.e_entanglement,
                                       limit_ct,
                                       limit_ts,
                                       ct_s.u_full,
                                       ct_s.u_product,
                                       ct_s.e_entanglement,
                                       ent};
        for (std::size_t c = 0; c < vals.size(); ++c) {
            csv += (c ? "," : "") + format_double(vals[c]);
        }
        csv += "\n";
        points.push_back({{"rotary_turns", turns[k]},
                          {"u_ct", ct_s.u_sub[0]},
                          {"u_ct_rb", rb_ct.u_hat},
                          {"u_ts", ts_pair.u_full},
                          {"u_ts_rb", rb_ts.u_hat},
                          {"u_ts_product", ts_pair.u_product},
                          {"e_ts", ts_pair.e_entanglement},
                          {"u_full", ct_s.u_full},
                          {"u_product_ct_s", ct_s.u_product},
                          {"e_ct_s", ct_s.e_entanglement},
                          {"entanglement", ent}});
    }
    run.write_csv("unitarity.csv", csv);
    run.write_json("unitarity.json", {{"xi_khz", rad_s_to_khz(xi)},
                                      {"t_pulse_ns", t * 1e9},
                                      {"u_ct_limit", limit_ct},
                                      {"u_ts_limit", limit_ts},
                                      {"points", points}});
    return kExitOk;
}

// -------------------------------------------------------------- purity-rb

int cmd_purity_rb(const Run &run, const json &cfg) {
    only_keys(cfg, "$", {"schema_version", "seed", "channel", "rb"});
    const json &ch = require(cfg, "$", "channel");
    const std::string kind = string_or(ch, "$.channel", "kind", "");
    PTMatrix r;
    if (kind == "depolarizing") {
        only_keys(ch, "$.channel", {"kind", "lambda", "qubits"});
        const long long q = integer(ch, "$.channel", "qubits");
        if (q != 1 && q != 2) {
            fail("$.channel.qubits", "purity RB supports one or two qubits");
        }
        r = at_path("$.channel", [&] { return depolarizing_ptm(number(ch, "$.channel", "lambda"), q); });
    } else if (kind == "damping") {
        only_keys(ch, "$.channel", {"kind", "noise", "t_gate_ns"});
        const json &nj = require(ch, "$.channel", "noise");
        const std::size_t q = nj.contains("qubits") && nj.at("qubits").is_array() ? nj.at("qubits").size() : 0;
        if (q != 1 && q != 2) {
            fail("$.channel.noise.qubits", "purity RB supports one or two qubits");
        }
        r = damping_ptm(load_noise(nj, "$.channel.noise", q), ns_to_s(number(ch, "$.channel", "t_gate_ns")));
    } else {
        fail("$.channel.kind", "must be \"depolarizing\" or \"damping\"");
    }
    const RbSettings rb = load_rb(cfg, "$");
    const RbDecayFit fit = run_rb(r, rb, run, 0);
    std::string csv = "m,mean_purity,std_purity\n";
    for (std::size_t k = 0; k < fit.lengths.size(); ++k) {
        csv += std::to_string(fit.lengths[k]) + "," + format_double(fit.mean_purity[k]) + "," +
               format_double(fit.std_purity[k]) + "\n";
    }
    const double u_true = unitarity_ptm(r);
    run.write_csv("purity_rb.csv", csv);
    run.write_json("purity_rb.json", {{"u_hat", fit.u_hat},
                                      {"a_offset", fit.a_offset},
                                      {"b_scale", fit.b_scale},
                                      {"residual", fit.residual},
                                      {"degenerate", fit.degenerate},
                                      {"u_ptm", u_true},
                                      {"relative_error", std::abs(fit.u_hat - u_true) / u_true}});
    return kExitOk;
}

// -------------------------------------------------------------------- fit

int cmd_fit(const Run &run, const json &cfg) {
    only_keys(cfg, "$", {"schema_version", "seed", "data_csv", "init", "mask", "fit"});
    const fs::path data_file = resolve(run.base, string_or(cfg, "$", "data_csv", ""));
    if (!cfg.contains("data_csv")) {
        fail("$.data_csv", "required key missing");
    }
    const SweepDataset data = at_path("$.data_csv", [&] {
        SweepDataset d = SweepDataset::from_csv(read_text(data_file));
        d.validate();
        return d;
    });
    const AnyModel init = load_model(require(cfg, "$", "init"), "$.init", run.base);
    if (!init.theta) {
        fail("$.init", "fit needs a theta model (\"mode\": \"theta\")");
    }
    std::vector<ThetaParam> mask;
    const json &mj = require(cfg, "$", "mask");
    if (mj.is_string() && mj == "reference") {
        mask = init.theta->qubit_count() == 2 ? reference_mask_2q() : reference_mask_3q();
    } else if (mj.is_array()) {
        for (std::size_t k = 0; k < mj.size(); ++k) {
            const std::string where = "$.mask[" + std::to_string(k) + "]";
            only_keys(mj[k], where, {"label", "order"});
            const std::string label = string_or(mj[k], where, "label", "");
            const long long order = integer(mj[k], where, "order");
            if (order < 0 || order > 2) {
                fail(child(where, "order"), "must be 0, 1 or 2");
            }
            mask.push_back({label, static_cast<int>(order)});
            at_path(where, [&] { return get_param(*init.theta, mask.back()); });
        }
    } else {
        fail("$.mask", "expected \"reference\" or an array of {label, order}");
    }
    FitOptions opts;
    opts.seed = run.seed;
    if (cfg.contains("fit")) {
        const json &fj = cfg.at("fit");
        only_keys(fj, "$.fit", {"restarts", "start_spread", "max_evaluations", "n"});
        opts.restarts = static_cast<int>(integer_or(fj, "$.fit", "restarts", opts.restarts));
        opts.start_spread = number_or(fj, "$.fit", "start_spread", opts.start_spread);
        opts.simplex.max_evaluations =
            static_cast<int>(integer_or(fj, "$.fit", "max_evaluations", opts.simplex.max_evaluations));
        opts.sweep.n = static_cast<int>(integer_or(fj, "$.fit", "n", opts.sweep.n));
    }
    const ThetaFit f = fit_theta(data, mask, *init.theta, opts);
    json params = json::array();
    for (std::size_t k = 0; k < f.free.size(); ++k) {
        const auto i = static_cast<Eigen::Index>(k);
        const double var = f.covariance.rows() > i ? f.covariance(i, i) : NAN;
        params.push_back({{"label", f.free[k].label},
                          {"order", f.free[k].order},
                          {"value", get_param(f.model, f.free[k])},
                          {"initial", get_param(*init.theta, f.free[k])},
                          {"stderr", var >= 0 ? json(std::sqrt(var)) : json(nullptr)}});
    }
    run.write_json("fit.json", {{"converged", f.converged},
                                {"evaluations", f.evaluations},
                                {"objective", f.objective},
                                {"rms_khz", f.rms_khz},
                                {"parameters", params},
                                {"model", f.model.to_json()}});
    if (!f.converged) {
        *run.out << "warning: fit did not converge within the evaluation budget\n";
        return kExitWarning;
    }
    return kExitOk;
}

// --------------------------------------------------------------------- qv

QvNoise load_qv_noise(const json &j, const std::string &path) {
    only_keys(j, path, {"schema_version", "coherent", "damping", "depolarizing"});
    QvNoise noise;
    std::optional<PTMatrix> channel;
    if (j.contains("coherent")) {
        const std::string p = child(path, "coherent");
        only_keys(j.at("coherent"), p, {"label", "angle_rad"});
        const std::string label = string_or(j.at("coherent"), p, "label", "IY");
        noise = at_path(p, [&] {
            return qv_coherent_error(PauliLabel(label), number(j.at("coherent"), p, "angle_rad"));
        });
    }
    if (j.contains("damping")) {
        const std::string p = child(path, "damping");
        only_keys(j.at("damping"), p, {"qubits", "t_block_ns"});
        json nj = {{"qubits", require(j.at("damping"), p, "qubits")}};
        channel = damping_ptm(load_noise(nj, p, 2), ns_to_s(number(j.at("damping"), p, "t_block_ns")));
    }
    if (j.contains("depolarizing")) {
        const std::string p = child(path, "depolarizing");
        only_keys(j.at("depolarizing"), p, {"lambda"});
        PTMatrix d = at_path(p, [&] { return depolarizing_ptm(number(j.at("depolarizing"), p, "lambda"), 2); });
        channel = channel ? compose(d, *channel) : d;
    }
    if (channel) {
        noise.kraus = qv_ptm_noise(*channel).kraus;
    }
    return noise;
}

int cmd_qv(const Run &run, const json &cfg, std::optional<int> width_flag, std::optional<int> circuits_flag,
           const std::optional<std::string> &noise_flag) {
    only_keys(cfg, "$", {"schema_version", "seed", "width", "circuits", "noise"});
    const int width = width_flag ? *width_flag : static_cast<int>(integer_or(cfg, "$", "width", 4));
    const int circuits = circuits_flag ? *circuits_flag : static_cast<int>(integer_or(cfg, "$", "circuits", 150));
    if (circuits < 1) {
        fail("circuits", "must be positive");
    }
    QvNoise noise;
    json noise_json = nullptr;
    if (noise_flag) {
        const fs::path p = resolve(fs::current_path(), *noise_flag);
        noise_json = parse_json_file(p);
        noise = load_qv_noise(noise_json, p.string());
    } else if (cfg.contains("noise")) {
        noise_json = cfg.at("noise");
        if (noise_json.is_string()) {
            const fs::path p = resolve(run.base, noise_json.get<std::string>());
            noise_json = parse_json_file(p);
        }
        noise = load_qv_noise(noise_json, "$.noise");
    }
    const auto cs = generate_circuits(width, circuits, run.seed);
    const HopResult r = hop_estimate(cs, noise, run.shots.value_or(0), derive_seed(run.seed, 0));
    std::string csv = "index,circuit_seed,hop,ideal_heavy_mass,heavy_count\n";
    for (std::size_t i = 0; i < cs.size(); ++i) {
        const auto p = ideal_probabilities(cs[i]);
        const auto heavy = heavy_set(p);
        double mass = 0;
        for (auto x : heavy) {
            mass += p[x];
        }
        csv += std::to_string(i) + "," + std::to_string(cs[i].seed) + "," + format_double(r.per_circuit[i]) + "," +
               format_double(mass) + "," + std::to_string(heavy.size()) + "\n";
    }
    run.write_csv("qv_circuits.csv", csv);
    run.write_json("qv.json", {{"width", width},
                               {"n_circuits", r.n_circuits},
                               {"mean_hop", r.mean_hop},
                               {"sigma", r.sigma},
                               {"threshold", kHopThreshold},
                               {"passed", r.passed},
                               {"noise", noise_json}});
    *run.out << "HOP " << format_double(r.mean_hop) << " +- " << format_double(r.sigma)
             << (r.passed ? " passed\n" : " failed\n");
    return kExitOk;
}

// ------------------------------------------------------------------ zeros

int cmd_zeros(const Run &run, const json &cfg) {
    only_keys(cfg, "$", {"schema_version", "seed", "model", "x_min", "x_max", "grid_points", "t_pulse_ns"});
    const AnyModel model = load_model(require(cfg, "$", "model"), "$.model", run.base);
    if (!model.coefficient) {
        fail("$.model", "zeros needs a coefficient model");
    }
    const double t = cfg.contains("t_pulse_ns") ? ns_to_s(number(cfg, "$", "t_pulse_ns")) : kDefaultPulseTime;
    const double lo = number(cfg, "$", "x_min"), hi = number(cfg, "$", "x_max");
    if (!(hi > lo)) {
        fail("$.x_max", "must exceed x_min");
    }
    const long long grid = integer_or(cfg, "$", "grid_points", 2001);
    if (grid < 3) {
        fail("$.grid_points", "must be at least 3");
    }
    const ZeroClassReport rep = find_iy_zeros(*model.coefficient, lo, hi, t, static_cast<int>(grid));
    std::string csv = "x,class,n,chi0,chi1_khz,n1,chi2_khz,n2\n";
    for (const auto &z : rep.roots) {
        csv += format_double(z.x) + "," + std::string(zero_class_name(z.cls)) + "," + std::to_string(z.n) + "," +
               format_double(z.chi0) + "," + format_double(rad_s_to_khz(z.chi1)) + "," + std::to_string(z.n1) +
               "," + format_double(rad_s_to_khz(z.chi2)) + "," + std::to_string(z.n2) + "\n";
    }
    if (rep.identically_zero) {
        csv = "# nu_tilde_IY vanishes identically on the interval\n" + csv;
    }
    run.write_csv("zeros.csv", csv);
    *run.out << rep.roots.size() << " zero(s) of nu_tilde_IY\n";
    return kExitOk;
}

// ---------------------------------------------------------------- schemas

constexpr const char *kSchemaSweep = R"(Config schema (JSON):
  schema_version   1 (required)
  seed             integer, overridden by --seed
  model            theta or coefficient model object, "reference_2q",
                   "reference_3q", or a path to a model JSON file
  grid             {x_min, x_step, x_points} or {x_values: [...]}
  method           "heat" (default) or "closed_form"
  heat             {n: repetitions (theta 2, coefficient 8), observables: [...]}
  t_pulse_ns       coefficient models only (default 206.22)
  t_gate_ns        coefficient models only, for the EPG column
  noise            coefficient models only: {qubits: [{t1_us, t2_us}, {...}]}
Writes sweep.csv.)";

constexpr const char *kSchemaHeat = R"(Config schema (JSON):
  schema_version   1 (required)
  seed             integer, overridden by --seed
  model, x         echoed gate to simulate (theta or coefficient model)
  records_file     alternatively, imported records (.csv or .json)
  kind             "two_qubit" (default) or "spectator" for imported records
  zx_sign          1 or -1 for imported records taken in the Z_pi target frame
  n                repetition count to invert (default 8)
  reps             repetition counts to simulate (default [2, 4, 8])
  t_pulse_ns       echo half duration for coefficient models (default 206.22)
Writes heat_records.csv and heat.json.)";

constexpr const char *kSchemaUnitarity = R"(Config schema (JSON):
  schema_version   1 (required)
  seed             integer, overridden by --seed
  noise            {qubits: [control, target, spectator] each {t1_us, t2_us}}
  t_pulse_ns       echo half duration (default 206.22)
  xi_khz           static ZZ between target and spectator
  rotary_turns     list of rotary angles per half, in turns (W t / 2 pi)
  rb               {lengths: [...], n_sequences}
Writes unitarity.csv and unitarity.json.)";

constexpr const char *kSchemaPurity = R"(Config schema (JSON):
  schema_version   1 (required)
  seed             integer, overridden by --seed
  channel          {kind: "depolarizing", lambda, qubits: 1 or 2} or
                   {kind: "damping", noise: {qubits: [{t1_us, t2_us}, ...]}, t_gate_ns}
  rb               {lengths: [...], n_sequences}
Writes purity_rb.csv and purity_rb.json.)";

constexpr const char *kSchemaFit = R"(Config schema (JSON):
  schema_version   1 (required)
  seed             integer, overridden by --seed
  data_csv         sweep CSV (x,observable,nu_khz,weight)
  init             theta model object, built-in name or path
  mask             "reference" or [{label, order}, ...]
  fit              {restarts, start_spread, max_evaluations, n}
Writes fit.json. Exit code 2 when the fit did not converge.)";

constexpr const char *kSchemaQv = R"(Config schema (JSON, optional; flags take precedence):
  schema_version   1 (required)
  seed             integer, overridden by --seed
  width            2 to 5 (default 4)
  circuits         number of model circuits (default 150)
  noise            object or path; see below
Noise model (--noise file or "noise" key):
  coherent         {label: two-qubit Pauli, angle_rad: nu t}
  damping          {qubits: [{t1_us, t2_us}, {...}], t_block_ns}
  depolarizing     {lambda}
Writes qv.json and qv_circuits.csv.)";

constexpr const char *kSchemaZeros = R"(Config schema (JSON):
  schema_version   1 (required)
  model            coefficient model object or path
  x_min, x_max     rotary interval
  grid_points      scan resolution (default 2001)
  t_pulse_ns       echo half duration (default 206.22)
Writes zeros.csv.)";

}  // namespace

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"rotecho: echoed cross-resonance simulation and analysis"};
    app.set_version_flag("--version", ROTECHO_VERSION);
    app.require_subcommand(1);
    app.fallthrough();

    std::optional<std::uint64_t> seed_flag;
    std::string out_dir = ".";
    bool exact = false;
    std::optional<int> shots;
    app.add_option("--seed", seed_flag, "Master seed (overrides the config)");
    app.add_option("--out-dir", out_dir, "Directory for output files")->capture_default_str();
    auto *exact_opt = app.add_flag("--exact", exact, "Exact expectations (default)");
    app.add_option("--shots", shots, "Binomial sampling with N shots per expectation")
        ->check(CLI::PositiveNumber)
        ->excludes(exact_opt);

    struct Entry {
        const char *name;
        const char *help;
        const char *schema;
    };
    const Entry entries[] = {{"sweep-rotary", "Echoed Hamiltonian versus rotary amplitude", kSchemaSweep},
                             {"heat", "Simulate or invert HEAT records", kSchemaHeat},
                             {"unitarity", "Subsystem unitarity and entanglement versus rotary", kSchemaUnitarity},
                             {"purity-rb", "Purity randomized benchmarking of a channel", kSchemaPurity},
                             {"fit", "Fit the quadratic angle model to a sweep", kSchemaFit},
                             {"qv", "Quantum-volume heavy output probability", kSchemaQv},
                             {"zeros", "Zeros of the echoed IY coefficient", kSchemaZeros}};
    std::map<std::string, std::string> config_paths;
    std::optional<int> qv_width, qv_circuits;
    std::optional<std::string> qv_noise;
    for (const auto &e : entries) {
        CLI::App *sub = app.add_subcommand(e.name, e.help);
        sub->footer(e.schema);
        auto *opt = sub->add_option("config", config_paths[e.name], "JSON configuration file")->check(CLI::ExistingFile);
        if (std::string(e.name) == "qv") {
            sub->add_option("--width", qv_width, "Circuit width (2 to 5)");
            sub->add_option("--circuits", qv_circuits, "Number of model circuits");
            sub->add_option("--noise", qv_noise, "Noise model JSON file")->check(CLI::ExistingFile);
        } else {
            opt->required();
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitError;
    }

    try {
        const CLI::App *sub = app.get_subcommands().front();
        const std::string cmd = sub->get_name();
        const std::string &cfg_path = config_paths[cmd];
        json cfg = json::object();
        Run run;
        run.command = cmd;
        run.out = &out;
        if (!cfg_path.empty()) {
            cfg = parse_json_file(cfg_path);
            run.base = fs::path(cfg_path).parent_path();
            check_schema(cfg);
        } else {
            run.base = fs::current_path();
        }
        run.seed = seed_flag ? *seed_flag : config_seed(cfg);
        run.shots = exact ? std::nullopt : shots;
        run.out_dir = out_dir;
        json hashed = cfg;
        if (cmd == "qv") {
            hashed["width"] = qv_width ? *qv_width : cfg.value("width", 4);
            hashed["circuits"] = qv_circuits ? *qv_circuits : cfg.value("circuits", 150);
            if (qv_noise) {
                hashed["noise"] = parse_json_file(*qv_noise);
            }
        }
        hashed.erase("seed");
        run.hash = hex64(fnv1a64(hashed.dump()));

        if (cmd == "sweep-rotary") {
            return cmd_sweep_rotary(run, cfg);
        }
        if (cmd == "heat") {
            return cmd_heat(run, cfg);
        }
        if (cmd == "unitarity") {
            return cmd_unitarity(run, cfg);
        }
        if (cmd == "purity-rb") {
            return cmd_purity_rb(run, cfg);
        }
        if (cmd == "fit") {
            return cmd_fit(run, cfg);
        }
        if (cmd == "qv") {
            return cmd_qv(run, cfg, qv_width, qv_circuits, qv_noise);
        }
        return cmd_zeros(run, cfg);
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    }
}

}  // namespace rotecho::cli

// Command-line front end for the Wasserstein-distortion library: transport
// solving, pooled distortion, the two low-rate coding schemes, sigma sweeps,
// limit experiments, pooling-PMF verification, and region classification.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wd/wd.hpp"

using nlohmann::json;

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string timestamp_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[64];
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

// Output sink: file when a path is given, stdout otherwise.
class Sink {
public:
    explicit Sink(const std::string& path) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) throw wd::validation_error("cannot open output file: " + path);
        }
    }
    std::ostream& out() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

void write_csv_header(std::ostream& os, const std::string& command, const json& config) {
    os << "# wd " << command << "\n";
    os << "# config: " << config.dump() << "\n";
    os << "# timestamp: " << timestamp_utc() << "\n";
}

json finite_or_string(double v) {
    if (std::isfinite(v)) return v;
    return v > 0 ? "inf" : "-inf";
}

double parse_signed_inf(const std::string& s) {
    if (s == "-inf" || s == "-INF" || s == "-Inf") return -std::numeric_limits<double>::infinity();
    if (s == "inf" || s == "INF" || s == "Inf") return std::numeric_limits<double>::infinity();
    return std::stod(s);
}

std::vector<double> parse_grid(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    if (out.empty()) throw wd::validation_error("empty grid specification");
    return out;
}

std::vector<int> read_symbol_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw wd::validation_error("cannot open symbol file: " + path);
    std::vector<int> out;
    int v;
    while (in >> v) out.push_back(v);
    if (out.empty()) throw wd::validation_error("symbol file is empty: " + path);
    return out;
}

std::vector<double> read_real_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw wd::validation_error("cannot open file: " + path);
    std::vector<double> out;
    double v;
    while (in >> v) out.push_back(v);
    if (out.empty()) throw wd::validation_error("file is empty: " + path);
    return out;
}

// Minimal flat TOML subset: `key = value` lines where value is a number,
// "string", true/false, or [v1, v2, ...] of numbers. Enough for experiment
// configs; JSON is the fully supported format.
json parse_minimal_toml(std::istream& in) {
    json out = json::object();
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw wd::validation_error("toml: expected key = value: " + line);
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (val.empty()) throw wd::validation_error("toml: empty value for " + key);
        if (val.front() == '"') {
            if (val.size() < 2 || val.back() != '"')
                throw wd::validation_error("toml: unterminated string for " + key);
            out[key] = val.substr(1, val.size() - 2);
        } else if (val.front() == '[') {
            if (val.back() != ']') throw wd::validation_error("toml: unterminated array for " + key);
            json arr = json::array();
            std::stringstream ss(val.substr(1, val.size() - 2));
            std::string item;
            while (std::getline(ss, item, ',')) {
                item = trim(item);
                if (!item.empty()) arr.push_back(std::stod(item));
            }
            out[key] = arr;
        } else if (val == "true" || val == "false") {
            out[key] = (val == "true");
        } else {
            out[key] = std::stod(val);
        }
    }
    return out;
}

json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw wd::validation_error("cannot open config file: " + path);
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".toml") return parse_minimal_toml(in);
    json j;
    in >> j;
    return j;
}

wd::CostMatrix cost_from_json(const json& j, int alphabet) {
    if (j.is_number()) return wd::CostMatrix::uniform(alphabet, j.get<double>());
    if (!j.is_array()) throw wd::validation_error("cost must be a scalar or a full matrix");
    std::vector<double> entries;
    for (const auto& row : j)
        for (const auto& v : row) entries.push_back(v.get<double>());
    return wd::CostMatrix(alphabet, std::move(entries));
}

json cost_to_json(const wd::CostMatrix& d) {
    if (d.uniform_off_diagonal()) return d.max_off_diagonal();
    json rows = json::array();
    for (int i = 0; i < d.size(); ++i) {
        json row = json::array();
        for (int j = 0; j < d.size(); ++j) row.push_back(d(i, j));
        rows.push_back(row);
    }
    return rows;
}

// ---------------------------------------------------------------------------

struct TransportOpts {
    std::string instance_path;
    std::string output;
};

int run_transport(const TransportOpts& opt) {
    const json inst = load_config_file(opt.instance_path);
    const int A = inst.at("A").get<int>();
    const wd::DiscreteDistribution mu(inst.at("mu").get<std::vector<double>>());
    const wd::DiscreteDistribution nu(inst.at("nu").get<std::vector<double>>());
    const wd::CostMatrix d = cost_from_json(inst.at("cost"), A);
    if (mu.size() != A || nu.size() != A) throw wd::validation_error("mu/nu length must equal A");

    const wd::TransportSolution sol = wd::w2sq_exact(mu, nu, d);
    const wd::SandwichBounds sb = wd::sandwich_bounds(mu, nu, d);

    json plan = json::array();
    for (int i = 0; i < A; ++i) {
        json row = json::array();
        for (int j = 0; j < A; ++j) row.push_back(sol.plan(i, j));
        plan.push_back(row);
    }
    json out = {{"command", "transport"},
                {"config", inst},
                {"timestamp", timestamp_utc()},
                {"value", sol.value},
                {"plan", plan},
                {"lower", sb.lower},
                {"upper", sb.upper}};
    Sink sink(opt.output);
    sink.out() << out.dump(2) << "\n";
    return 0;
}

// ---------------------------------------------------------------------------

struct DistortionOpts {
    std::string x_path, xhat_path, config_path;
    std::string output;
};

int run_distortion(const DistortionOpts& opt) {
    const json cfg = load_config_file(opt.config_path);
    const double sigma = cfg.at("sigma").get<double>();
    const int A = cfg.at("A").get<int>();
    const double tol = cfg.value("tol", 1e-10);
    const std::int64_t guard = cfg.value("guard", 0);
    const wd::CostMatrix d = cost_from_json(cfg.at("cost"), A);

    const std::vector<int> xs = read_symbol_file(opt.x_path);
    const std::vector<int> hs = read_symbol_file(opt.xhat_path);
    if (xs.size() != hs.size()) throw wd::validation_error("sequence files differ in length");
    const wd::SymbolSequence x = wd::SymbolSequence::from_flat(xs, guard, A);
    const wd::SymbolSequence xhat = wd::SymbolSequence::from_flat(hs, guard, A);

    const wd::PoolingPmf q = wd::PoolingPmf::geometric(sigma);
    const std::vector<double> profile = wd::distortion_profile(x, xhat, q, d, tol);
    const double average = wd::pairwise_mean(profile);

    Sink sink(opt.output);
    std::ostream& os = sink.out();
    write_csv_header(os, "distortion", cfg);
    os << "index,distortion\n";
    for (std::size_t i = 0; i < profile.size(); ++i) {
        const std::int64_t n = static_cast<std::int64_t>(i) - x.core_radius();
        os << n << "," << fmt(profile[i]) << "\n";
    }
    os << "average," << fmt(average) << "\n";
    return 0;
}

// ---------------------------------------------------------------------------

struct EncodeOpts {
    std::string input, output;
    int alphabet = 2;
    std::int64_t k = 1;
    std::int64_t offset = 0;
};

int run_encode(const EncodeOpts& opt) {
    const std::vector<int> block = read_symbol_file(opt.input);
    for (int s : block)
        if (s < 1 || s > opt.alphabet) throw wd::validation_error("symbol outside alphabet");
    const wd::PermutationSchemeConfig cfg(opt.k, opt.offset);
    const wd::EncodedMessage msg =
        wd::permutation_encode_block(block, opt.alphabet, cfg);
    const std::vector<std::uint8_t> bytes = wd::serialize_message(msg);
    if (opt.output.empty()) throw wd::validation_error("encode requires --output");
    std::ofstream out(opt.output, std::ios::binary);
    if (!out) throw wd::validation_error("cannot open output file: " + opt.output);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    std::cerr << "encoded " << block.size() << " symbols into " << bytes.size() << " bytes ("
              << msg.bit_length() << " payload bits, " << msg.window_count << " windows)\n";
    return 0;
}

struct DecodeOpts {
    std::string input, output;
    std::int64_t length = -1;
    std::int64_t offset = 0;
    std::uint64_t seed = 1;
};

int run_decode(const DecodeOpts& opt) {
    std::ifstream in(opt.input, std::ios::binary);
    if (!in) throw wd::validation_error("cannot open input file: " + opt.input);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    const wd::EncodedMessage msg = wd::deserialize_message(bytes);
    const wd::PermutationSchemeConfig cfg(msg.k, opt.offset);
    const std::int64_t length =
        opt.length > 0 ? opt.length : cfg.offset + msg.window_count * msg.k;
    std::vector<int> block(static_cast<std::size_t>(length));
    wd::permutation_decode_into(msg, cfg, block, opt.seed);
    Sink sink(opt.output);
    std::ostream& os = sink.out();
    for (std::size_t i = 0; i < block.size(); ++i) os << block[i] << (i + 1 < block.size() ? ' ' : '\n');
    return 0;
}

// ---------------------------------------------------------------------------

json sweep_config_to_json(const wd::SweepConfig& cfg) {
    return {{"scheme", wd::to_string(cfg.scheme)},
            {"A", cfg.source.alphabet},
            {"pmf", cfg.source.pmf},
            {"cost", cost_to_json(cfg.cost)},
            {"sigma_grid", cfg.sigma_grid},
            {"gamma", cfg.gamma},
            {"trials", cfg.trials},
            {"seed", cfg.seed},
            {"tol", cfg.tol},
            {"min_windows", cfg.min_windows},
            {"k", cfg.fixed_k},
            {"N", cfg.fixed_N},
            {"C", cfg.window_offset}};
}

wd::SweepConfig sweep_config_from_json(const json& j) {
    wd::SweepConfig cfg;
    const std::string scheme = j.value("scheme", "independent");
    if (scheme == "independent")
        cfg.scheme = wd::Scheme::Independent;
    else if (scheme == "permutation")
        cfg.scheme = wd::Scheme::Permutation;
    else
        throw wd::validation_error("unknown scheme: " + scheme);
    const int A = j.value("A", 2);
    std::vector<double> pmf =
        j.contains("pmf") ? j.at("pmf").get<std::vector<double>>()
                          : std::vector<double>(static_cast<std::size_t>(A), 1.0 / A);
    cfg.source = wd::SourceSpec(A, std::move(pmf));
    cfg.cost = j.contains("cost") ? cost_from_json(j.at("cost"), A) : wd::CostMatrix::uniform(A, 1.0);
    if (!j.contains("sigma_grid")) throw wd::validation_error("config needs sigma_grid");
    cfg.sigma_grid = j.at("sigma_grid").get<std::vector<double>>();
    cfg.gamma = j.value("gamma", 0.5);
    cfg.trials = j.value("trials", std::int64_t{200});
    cfg.seed = j.value("seed", std::uint64_t{1});
    cfg.tol = j.value("tol", 1e-10);
    cfg.min_windows = j.value("min_windows", std::int64_t{64});
    cfg.fixed_k = j.value("k", std::int64_t{0});
    cfg.fixed_N = j.value("N", std::int64_t{0});
    cfg.window_offset = j.value("C", std::int64_t{0});
    return cfg;
}

void write_sweep_csv(std::ostream& os, const wd::SweepResult& result) {
    write_csv_header(os, "sweep", sweep_config_to_json(result.config));
    os << "sigma,k,rate,mean_distortion,std_error,bound,trials,N,seed\n";
    for (const wd::SweepRow& row : result.rows)
        os << fmt(row.sigma) << "," << row.k << "," << fmt(row.rate) << ","
           << fmt(row.mean_distortion) << "," << fmt(row.std_error) << "," << fmt(row.bound_value)
           << "," << row.trials << "," << row.N << "," << row.seed << "\n";
}

json sweep_summary(const wd::SweepResult& result) {
    json summary = {{"command", "sweep"},
                    {"config", sweep_config_to_json(result.config)},
                    {"timestamp", timestamp_utc()}};
    json rows = json::array();
    for (const wd::SweepRow& r : result.rows)
        rows.push_back({{"sigma", r.sigma},
                        {"k", r.k},
                        {"rate", r.rate},
                        {"mean_distortion", r.mean_distortion},
                        {"std_error", r.std_error},
                        {"bound", r.bound_value},
                        {"trials", r.trials},
                        {"N", r.N}});
    summary["rows"] = rows;

    const double alpha = wd::scheme_rate_exponent(result.config);
    summary["alpha"] = finite_or_string(alpha);
    if (result.config.scheme == wd::Scheme::Permutation) {
        summary["alpha_note"] =
            "exact rate (A-1)*ceil(log2(k+1))/k with k = round(sigma^gamma); the log2 factor is the "
            "stated log correction, so alpha = -gamma up to that factor and is not fitted";
    } else {
        summary["alpha_note"] = "zero-rate scheme: alpha is a -inf sentinel, never fitted";
    }

    try {
        const wd::ExponentFit fit = wd::fit_exponent(result, wd::SweepColumn::Distortion);
        summary["distortion_fit"] = {
            {"slope", fit.slope}, {"intercept", fit.intercept}, {"r_squared", fit.r_squared}};
        const wd::RegionReport rep = wd::region_report(
            {{wd::to_string(result.config.scheme), alpha, fit.slope}},
            {{"converse-corner", -3.0, -0.5}});
        json region = json::array();
        for (const wd::RegionRow& row : rep.rows)
            region.push_back({{"label", row.entry.label},
                              {"alpha", finite_or_string(row.entry.alpha)},
                              {"beta", finite_or_string(row.entry.beta)},
                              {"class", wd::to_string(row.cls)}});
        summary["region"] = region;
        json boundary = json::array();
        for (const auto& [a, b] : rep.boundary) boundary.push_back({a, b});
        summary["region_boundary"] = boundary;
    } catch (const wd::validation_error& e) {
        summary["distortion_fit"] = nullptr;
        summary["fit_note"] = e.what();
    }
    return summary;
}

struct SweepOpts {
    std::string config_path;
    std::string scheme_override;
    std::string output;
    std::string summary_path;
    int workers = 1;
    std::int64_t seed_override = -1;
};

int run_sweep_cmd(const SweepOpts& opt) {
    json raw = load_config_file(opt.config_path);
    if (!opt.scheme_override.empty()) raw["scheme"] = opt.scheme_override;
    wd::SweepConfig cfg = sweep_config_from_json(raw);
    cfg.workers = opt.workers;
    if (opt.seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(opt.seed_override);

    const wd::SweepResult result = wd::run_sweep(cfg);
    {
        Sink sink(opt.output);
        write_sweep_csv(sink.out(), result);
    }
    const json summary = sweep_summary(result); // throws check_failure on a NotAchievable measurement
    if (!opt.summary_path.empty()) {
        std::ofstream out(opt.summary_path);
        if (!out) throw wd::validation_error("cannot open summary file: " + opt.summary_path);
        out << summary.dump(2) << "\n";
    } else if (!opt.output.empty()) {
        std::cout << summary.dump(2) << "\n";
    }
    return 0;
}

struct SimulateOpts {
    std::string scheme = "independent";
    double sigma = 16.0;
    double gamma = 0.5;
    std::int64_t k = 0;
    std::int64_t N = 0;
    int alphabet = 2;
    std::string pmf;
    std::string cost;
    std::int64_t trials = 200;
    std::uint64_t seed = 1;
    int workers = 1;
    std::int64_t min_windows = 64;
    std::string output;
};

int run_simulate(const SimulateOpts& opt) {
    json j = {{"scheme", opt.scheme},
              {"A", opt.alphabet},
              {"sigma_grid", json::array({opt.sigma})},
              {"gamma", opt.gamma},
              {"trials", opt.trials},
              {"seed", opt.seed},
              {"min_windows", opt.min_windows},
              {"k", opt.k},
              {"N", opt.N}};
    if (!opt.pmf.empty()) j["pmf"] = parse_grid(opt.pmf);
    if (!opt.cost.empty()) j["cost"] = std::stod(opt.cost);
    wd::SweepConfig cfg = sweep_config_from_json(j);
    cfg.workers = opt.workers;
    const wd::SweepResult result = wd::run_sweep(cfg);
    Sink sink(opt.output);
    write_sweep_csv(sink.out(), result);
    return 0;
}

// ---------------------------------------------------------------------------

struct LimitsOpts {
    std::string which = "fidelity";
    std::string grid;
    double p = 2.0;
    int alphabet = 2;
    std::string pmf = "0.5,0.5";
    std::string pmf_hat = "0.8,0.2";
    double dval = 1.0;
    std::uint64_t seed = 1;
    double tol = 1e-10;
    std::string z_path, zhat_path;
    std::string output;
};

int run_limits(const LimitsOpts& opt) {
    Sink sink(opt.output);
    std::ostream& os = sink.out();
    if (opt.which == "fidelity") {
        const std::vector<double> grid =
            parse_grid(opt.grid.empty() ? "1,0.5,0.2,0.1,0.05,0" : opt.grid);
        std::function<double(std::int64_t)> z = wd::fixtures::fidelity_source;
        std::function<double(std::int64_t)> zh = wd::fixtures::fidelity_reconstruction;
        std::vector<double> zf, hf;
        if (!opt.z_path.empty()) {
            zf = read_real_file(opt.z_path);
            hf = read_real_file(opt.zhat_path);
            if (zf.size() != hf.size() || zf.size() % 2 == 0)
                throw wd::validation_error("feature files need equal odd lengths");
            const std::int64_t c = static_cast<std::int64_t>(zf.size() / 2);
            z = [zf, c](std::int64_t k) { return zf[static_cast<std::size_t>(k + c)]; };
            zh = [hf, c](std::int64_t k) { return hf[static_cast<std::size_t>(k + c)]; };
        }
        const wd::LimitTable table = wd::fidelity_limit_experiment(z, zh, grid, opt.p, opt.tol);
        const json cfg = {{"which", "fidelity"}, {"p", opt.p}, {"grid", grid}, {"tol", opt.tol}};
        write_csv_header(os, "limits", cfg);
        os << "sigma,value,target,abs_error\n";
        for (const auto& row : table.rows)
            os << fmt(row.sigma) << "," << fmt(row.value) << "," << fmt(row.target) << ","
               << fmt(row.abs_error) << "\n";
        os << "# tail_decreasing: " << (table.tail_decreasing ? "true" : "false") << "\n";
        return 0;
    }
    if (opt.which == "realism") {
        const std::vector<double> grid = parse_grid(opt.grid.empty() ? "1,10,10000" : opt.grid);
        const wd::SourceSpec p(opt.alphabet, parse_grid(opt.pmf));
        const wd::SourceSpec ph(opt.alphabet, parse_grid(opt.pmf_hat));
        const wd::CostMatrix d = wd::CostMatrix::uniform(opt.alphabet, opt.dval);
        const wd::LimitTable table = wd::realism_limit_experiment(p, ph, grid, d, opt.seed, opt.tol);
        const json cfg = {{"which", "realism"}, {"A", opt.alphabet},    {"pmf", parse_grid(opt.pmf)},
                          {"pmf_hat", parse_grid(opt.pmf_hat)},         {"d", opt.dval},
                          {"grid", grid},      {"seed", opt.seed},      {"tol", opt.tol}};
        write_csv_header(os, "limits", cfg);
        os << "sigma,value,target,abs_error\n";
        for (const auto& row : table.rows)
            os << fmt(row.sigma) << "," << fmt(row.value) << "," << fmt(row.target) << ","
               << fmt(row.abs_error) << "\n";
        os << "# error_min_at_largest_sigma: "
           << (table.error_min_at_largest_sigma ? "true" : "false") << "\n";
        return 0;
    }
    throw wd::validation_error("--which must be fidelity or realism");
}

// ---------------------------------------------------------------------------

struct VerifyPmfOpts {
    double sigma = -1.0;
    std::string table_path;
    std::int64_t k_range = 10000;
};

int run_verify_pmf(const VerifyPmfOpts& opt) {
    std::optional<wd::PoolingPmf> q;
    if (!opt.table_path.empty()) {
        const json arr = load_config_file(opt.table_path);
        if (!arr.is_array()) throw wd::validation_error("table file must be a JSON array of [k, weight]");
        std::int64_t max_k = 0;
        for (const auto& pair : arr) max_k = std::max(max_k, pair.at(0).get<std::int64_t>());
        std::vector<double> half(static_cast<std::size_t>(max_k) + 1, 0.0);
        double total = 0.0;
        for (const auto& pair : arr) {
            const std::int64_t k = pair.at(0).get<std::int64_t>();
            if (k < 0) throw wd::validation_error("table offsets must be >= 0");
            const double w = pair.at(1).get<double>();
            half[static_cast<std::size_t>(k)] = w;
            total += (k == 0 ? w : 2.0 * w);
        }
        if (std::abs(total - 1.0) > 1e-9)
            std::cerr << "warning: table renormalised by " << fmt(std::abs(total - 1.0)) << "\n";
        q = wd::PoolingPmf::custom(std::move(half));
    } else if (opt.sigma >= 0.0) {
        q = wd::PoolingPmf::geometric(opt.sigma);
    } else {
        throw wd::validation_error("verify-pmf needs --sigma or --table");
    }

    const wd::PmfAxiomReport rep = wd::verify_pmf_axioms(*q, opt.k_range);
    auto line = [](const char* name, const wd::AxiomResult& r) {
        std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << name
                  << (r.detail.empty() ? "" : ": " + r.detail) << "\n";
    };
    line("symmetry", rep.symmetry);
    line("monotonicity in |k|", rep.monotonicity);
    line("point mass at sigma=0", rep.delta_at_zero);
    line("normalization", rep.normalization);

    bool all = rep.all_pass();
    if (q->kind() == wd::PmfKind::TwoSidedGeometric || q->kind() == wd::PmfKind::KroneckerDelta) {
        const wd::AxiomResult p4 = wd::verify_continuity_at_zero({0.0, 0.1, 1.0, 10.0, 100.0});
        const wd::AxiomResult p5 = wd::verify_small_sigma_monotone();
        bool p6 = true;
        for (std::int64_t k = 0; k <= 5; ++k) p6 = p6 && wd::verify_vanishing({0.1, 1.0, 10.0, 100.0}, k).pass;
        line("continuity at sigma=0", p4);
        line("small-sigma monotonicity", p5);
        line("vanishing at large sigma", {p6, ""});
        all = all && p4.pass && p5.pass && p6;
    }
    if (!all) throw wd::check_failure("pooling PMF verification failed");
    return 0;
}

// ---------------------------------------------------------------------------

struct RegionOpts {
    std::string alpha, beta;
    std::string measured_path;
    bool boundary = false;
    std::string output;
};

int run_region(const RegionOpts& opt) {
    Sink sink(opt.output);
    std::ostream& os = sink.out();
    if (opt.boundary) {
        os << "alpha,beta\n";
        for (const auto& [a, b] : wd::achievable_boundary_polyline())
            os << fmt(a) << "," << fmt(b) << "\n";
        return 0;
    }
    if (!opt.measured_path.empty()) {
        const json arr = load_config_file(opt.measured_path);
        std::vector<wd::RegionEntry> measured;
        for (const auto& e : arr)
            measured.push_back({e.value("label", "measured"),
                                parse_signed_inf(e.at("alpha").is_string()
                                                     ? e.at("alpha").get<std::string>()
                                                     : fmt(e.at("alpha").get<double>())),
                                e.at("beta").get<double>()});
        const wd::RegionReport rep = wd::region_report(measured); // throws on NotAchievable
        json rows = json::array();
        for (const auto& row : rep.rows)
            rows.push_back({{"label", row.entry.label},
                            {"alpha", finite_or_string(row.entry.alpha)},
                            {"beta", finite_or_string(row.entry.beta)},
                            {"class", wd::to_string(row.cls)}});
        os << rows.dump(2) << "\n";
        return 0;
    }
    if (opt.alpha.empty() || opt.beta.empty())
        throw wd::validation_error("region needs --alpha and --beta, --measured, or --boundary");
    const double a = parse_signed_inf(opt.alpha);
    const double b = parse_signed_inf(opt.beta);
    os << wd::to_string(wd::classify_rate_region(a, b)) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Wasserstein distortion toolkit: exact discrete optimal transport, pooled "
                 "distortion, low-rate coding schemes, and scaling-law experiments"};
    app.require_subcommand(1);

    TransportOpts transport_opts;
    auto* transport = app.add_subcommand("transport", "solve one OT instance from JSON");
    transport->add_option("instance", transport_opts.instance_path, "instance JSON {A, mu, nu, cost}")
        ->required();
    transport->add_option("-o,--output", transport_opts.output, "output path (default stdout)");

    DistortionOpts distortion_opts;
    auto* distortion = app.add_subcommand("distortion", "per-index pooled distortion of two sequences");
    distortion->add_option("x", distortion_opts.x_path, "source symbol file")->required();
    distortion->add_option("xhat", distortion_opts.xhat_path, "reconstruction symbol file")->required();
    distortion->add_option("-c,--config", distortion_opts.config_path,
                           "JSON config {sigma, A, cost, tol, guard}")
        ->required();
    distortion->add_option("-o,--output", distortion_opts.output, "output path (default stdout)");

    EncodeOpts encode_opts;
    auto* encode = app.add_subcommand("encode", "encode a block with the permutation scheme");
    encode->add_option("-i,--input", encode_opts.input, "symbol file")->required();
    encode->add_option("-A,--alphabet", encode_opts.alphabet, "alphabet size")->required();
    encode->add_option("-k", encode_opts.k, "window size")->required();
    encode->add_option("-C,--offset", encode_opts.offset, "window offset in [0, k-1]");
    encode->add_option("-o,--output", encode_opts.output, "message output path")->required();

    DecodeOpts decode_opts;
    auto* decode = app.add_subcommand("decode", "decode a permutation-scheme message");
    decode->add_option("-i,--input", decode_opts.input, "message file")->required();
    decode->add_option("-l,--length", decode_opts.length, "block length (default: full windows)");
    decode->add_option("-C,--offset", decode_opts.offset, "window offset in [0, k-1]");
    decode->add_option("-s,--seed", decode_opts.seed, "decoder seed");
    decode->add_option("-o,--output", decode_opts.output, "symbol output path (default stdout)");

    SimulateOpts sim_opts;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo at one sigma, printed as CSV");
    simulate->add_option("--scheme", sim_opts.scheme, "independent|permutation");
    simulate->add_option("--sigma", sim_opts.sigma, "pooling width")->required();
    simulate->add_option("--gamma", sim_opts.gamma, "window exponent (k = round(sigma^gamma))");
    simulate->add_option("-k", sim_opts.k, "fixed window size (overrides gamma)");
    simulate->add_option("-N", sim_opts.N, "fixed block radius");
    simulate->add_option("-A,--alphabet", sim_opts.alphabet, "alphabet size");
    simulate->add_option("--pmf", sim_opts.pmf, "source pmf, comma separated");
    simulate->add_option("--cost", sim_opts.cost, "uniform off-diagonal cost");
    simulate->add_option("--trials", sim_opts.trials, "Monte Carlo trials");
    simulate->add_option("--seed", sim_opts.seed, "master seed");
    simulate->add_option("--workers", sim_opts.workers, "parallel workers");
    simulate->add_option("--min-windows", sim_opts.min_windows, "window-count floor");
    simulate->add_option("-o,--output", sim_opts.output, "output path (default stdout)");

    SweepOpts sweep_opts;
    auto* sweep = app.add_subcommand("sweep", "sigma sweep from a JSON/TOML config");
    sweep->add_option("-c,--config", sweep_opts.config_path, "config file")->required();
    sweep->add_option("--scheme", sweep_opts.scheme_override, "override the config scheme");
    sweep->add_option("-o,--output", sweep_opts.output, "CSV output path (default stdout)");
    sweep->add_option("--summary", sweep_opts.summary_path, "JSON summary path");
    sweep->add_option("--workers", sweep_opts.workers, "parallel workers");
    sweep->add_option("--seed", sweep_opts.seed_override, "override the config seed");

    LimitsOpts limits_opts;
    auto* limits = app.add_subcommand("limits", "fidelity / realism limit experiments");
    limits->add_option("--which", limits_opts.which, "fidelity|realism")->required();
    limits->add_option("--grid", limits_opts.grid, "sigma grid, comma separated");
    limits->add_option("--p", limits_opts.p, "Wasserstein order (fidelity)");
    limits->add_option("-A,--alphabet", limits_opts.alphabet, "alphabet size (realism)");
    limits->add_option("--pmf", limits_opts.pmf, "source pmf (realism)");
    limits->add_option("--pmf-hat", limits_opts.pmf_hat, "reconstruction pmf (realism)");
    limits->add_option("--dval", limits_opts.dval, "uniform cost (realism)");
    limits->add_option("--seed", limits_opts.seed, "seed (realism)");
    limits->add_option("--tol", limits_opts.tol, "truncation tolerance");
    limits->add_option("--z-file", limits_opts.z_path, "feature file overriding the fixture");
    limits->add_option("--zhat-file", limits_opts.zhat_path, "reconstruction feature file");
    limits->add_option("-o,--output", limits_opts.output, "output path (default stdout)");

    VerifyPmfOpts pmf_opts;
    auto* verify = app.add_subcommand("verify-pmf", "check pooling-PMF axioms");
    verify->add_option("--sigma", pmf_opts.sigma, "geometric pooling width");
    verify->add_option("--table", pmf_opts.table_path, "custom table JSON [[k, weight], ...]");
    verify->add_option("--k-range", pmf_opts.k_range, "offset range for exact checks");

    RegionOpts region_opts;
    auto* region = app.add_subcommand("region", "classify convergence-rate pairs");
    region->add_option("--alpha", region_opts.alpha, "rate exponent (accepts -inf)");
    region->add_option("--beta", region_opts.beta, "distortion exponent");
    region->add_option("--measured", region_opts.measured_path,
                       "JSON list of measured {label, alpha, beta}; NotAchievable exits 2");
    region->add_flag("--boundary", region_opts.boundary, "print the achievable boundary polyline");
    region->add_option("-o,--output", region_opts.output, "output path (default stdout)");

    int rc = 0;
    transport->callback([&] { rc = run_transport(transport_opts); });
    distortion->callback([&] { rc = run_distortion(distortion_opts); });
    encode->callback([&] { rc = run_encode(encode_opts); });
    decode->callback([&] { rc = run_decode(decode_opts); });
    simulate->callback([&] { rc = run_simulate(sim_opts); });
    sweep->callback([&] { rc = run_sweep_cmd(sweep_opts); });
    limits->callback([&] { rc = run_limits(limits_opts); });
    verify->callback([&] { rc = run_verify_pmf(pmf_opts); });
    region->callback([&] { rc = run_region(region_opts); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return 1;
    } catch (const wd::check_failure& e) {
        std::cerr << "check failed: " << e.what() << "\n";
        return 2;
    } catch (const wd::validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const wd::capability_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return rc;
}
